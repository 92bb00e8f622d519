#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pwl/kernels.hpp"

namespace pwl::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
  double seconds = 0.0;
};

// Canonical kernels used throughout the suite.
WalkSpec lazy_1d(double drift_weight = 0.1);
WalkSpec srw_1d();
WalkSpec nearest_neighbor_2d(double drift_weight = 0.05);
/// P(0) = 1/2, P(±e_i) = 1/(4ν), a(±e_1) = ±drift_weight.
WalkSpec lazy_nd(int dim, double drift_weight);
/// Lazy 1D free walk, s(0) = 1/4, s(±1) = −1/8, ε = 1.
WalkSpec symmetric_1d();

// One function per acceptance criterion. Each takes its kernels explicitly so a
// harness can substitute (e.g. mutated) specs.
CheckResult antisymmetric_representation(const std::vector<ValidatedSpec>& specs, int max_n);
CheckResult return_identity(const std::vector<ValidatedSpec>& specs, int max_n);
CheckResult symmetric_representation(const ValidatedSpec& spec, int max_n);
CheckResult convolution_identity(const ValidatedSpec& spec, int max_n);
CheckResult fourier_inversion(const ValidatedSpec& spec, int n, int grid);
CheckResult three_way_agreement(const ValidatedSpec& spec, int n, int max_x);
CheckResult theorem_convergence(const ValidatedSpec& spec, const std::vector<int>& ladder,
                                const std::vector<int>& sites);
CheckResult dimensional_locality(const ValidatedSpec& spec2, int n2, const ValidatedSpec& spec3,
                                 int n3, const ValidatedSpec& spec1,
                                 const std::vector<int>& ladder1);
CheckResult psi_tail(const ValidatedSpec& spec, const std::vector<int>& ladder, int power,
                     double x_min);
CheckResult appendix_bound();
CheckResult montecarlo_calibration(const ValidatedSpec& spec, int n, unsigned long long samples,
                                   int coverage_seeds);

struct SuiteConfig {
  bool quick = false;
  /// Called after each check completes.
  std::function<void(const CheckResult&)> on_result;
};

std::vector<CheckResult> run_suite(const SuiteConfig& config = {});
std::string report_json(const std::vector<CheckResult>& results);

}  // namespace pwl::verify
