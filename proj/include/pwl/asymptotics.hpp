#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pwl/exact_engine.hpp"

namespace pwl {

struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
};

/// (2πn)^{−ν/2} |B|^{−1/2} exp(−(B⁻¹x,x)/2n).
double gaussian_term(const MomentData& m, int n, std::span<const double> x);

/// Δ_n(x) as a finite time sum with exact return probabilities:
/// (2π)^{−ν/2}|B|^{−1/2} (d·B⁻¹x) Σ_{k=1}^{n−1} p_{n−k−1} k^{−(ν+2)/2} e^{−(B⁻¹x,x)/2k}.
/// `returns` must reach horizon n − 2.
double delta_sum(const MomentData& m, const ReturnSequence& returns, int n,
                 std::span<const double> x);
/// Convenience form; refuses periodic kernels and symmetric perturbations.
double delta_sum(const ValidatedSpec& spec, int n, std::span<const double> x);

/// ∫_{1/n}^{1−1/n} e^{−shift(α)} / (α^{ν/2+1}(1−α)^{ν/2}) dα, with shift = q/(2nα)
/// (`relative = false`) or ((1−α)/α)·q/(2n) (`relative = true`).
double alpha_integral(int dim, int n, double q, const QuadratureConfig& cfg, bool relative = false);

/// Δ_n(x) with return probabilities replaced by their Gaussian asymptotics and the time
/// sum by the α-integral: (2π)^{−ν}|B|^{−1} (d·B⁻¹x) n^{−ν} ∫ e^{−q/2nα} α^{−ν/2−1}(1−α)^{−ν/2}.
double delta_quadrature(const MomentData& m, int n, std::span<const double> x,
                        const QuadratureConfig& cfg = {});

/// The O(1) profile δ_n(x), scaled so that
/// delta_quadrature = |d| cos(d, B⁻¹x) e^{−q/2n} n^{−ν/2} δ_n(x).
double delta_profile(const MomentData& m, int n, std::span<const double> x,
                     const QuadratureConfig& cfg = {});

/// ∫₀^x e^{−t²/σ²} dt.
double erf_sigma(double sigma, double x);
/// erf(‖x‖_B) with ‖x‖_B² = (B⁻¹x, x); in one dimension erf_B = 2·erf_σ(|x|)/(σ√π).
double erf_B(const MomentData& m, std::span<const double> x);

/// Dimension-specific closed forms of delta_quadrature (ν ∈ {1, 2, 3});
/// throws UnsupportedDimension otherwise. ν = 1 is exact, ν = 2 keeps only the
/// explicit exponential bracket, ν = 3 is the leading order in n.
double delta_closed(const MomentData& m, int n, std::span<const double> x);

struct PsiTailReport {
  double fitted_constant = 0.0;  // max |ψ|·n^{ν/2}·|x|^L
  LatticeVector argmax;
  double max_antisymmetry_error = 0.0;
  int sites = 0;
};

/// Residual ψ = (Π_n − P_n) − delta_quadrature over x_min ≤ |x| ≤ min(R, √n·log n).
PsiTailReport psi_tail_check(const ValidatedSpec& spec, int n, int power, double x_min,
                             const QuadratureConfig& cfg = {});

struct AppendixReport {
  int l = 0;
  double a = 0.0;
  int dim = 1;
  /// scaled[n] = n^{ν/2}·S(n) for n = 0..N (entries 0 and 1 are 0).
  std::vector<double> scaled;
  std::vector<double> sums;
  /// Σ_{k≥0} k^l e^{−a(k−l)}, the n → ∞ limit of n^{ν/2} S(n).
  double series_limit = 0.0;
};

/// S(n) = Σ_{k=0}^{n−2} k^l e^{−a(k−l)} / (n−k−1)^{ν/2}.
AppendixReport appendix_bound_check(int l, double a, int dim, int horizon);

/// Scale-guard radius √n·log n.
double scale_guard(int n);

struct ProfileRow {
  LatticeVector x;
  double exact_total = 0.0;
  double gaussian = 0.0;
  double exact_correction = 0.0;
  double delta_sum = 0.0;
  double delta_quadrature = 0.0;
  double delta_closed = 0.0;  // NaN when no closed form exists for ν
  double psi_residual = 0.0;
};

struct CorrectionProfile {
  int dim = 0;
  int n = 0;
  int radius = 0;
  std::vector<ProfileRow> rows;
};

/// Every site of the box [x_lo, x_hi]^ν. Requires ε·s = 0 and an aperiodic kernel.
CorrectionProfile correction_profile(const ValidatedSpec& spec, int n, int x_lo, int x_hi,
                                     const QuadratureConfig& cfg = {}, int radius = 0);

void write_csv(std::ostream& os, const CorrectionProfile& profile, const ValidatedSpec& spec);
std::string to_json(const CorrectionProfile& profile, const ValidatedSpec& spec);

}  // namespace pwl
