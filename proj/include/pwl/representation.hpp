#pragma once

#include <vector>

#include "pwl/exact_engine.hpp"

namespace pwl {

/// Terms (a * P_k)(·) for k = 0..horizon−1.
struct ConvolutionSeries {
  int horizon = 0;
  std::vector<MassField> terms;

  /// max over k, x of |term_k(x) + term_k(−x)|.
  double max_antisymmetry_error() const;
};

ConvolutionSeries antisymmetric_convolution_series(const ValidatedSpec& spec, int horizon,
                                                   int radius = 0);

/// Π_n(0,x) = P_n(0,x) + Σ_{k<n} p_k·(a * P_{n−k−1})(x). Requires ε·s = 0.
MassField pi_antisymmetric(const ValidatedSpec& spec, int n, int radius = 0);

/// max over k ≤ n and x of |(a * P⁰_k)(x) − (a * P_k)(x)|, where a * P⁰_k starts
/// the taboo walk from the measure a. Throws WrongParity when ε·s ≠ 0.
double convolution_identity_check(const ValidatedSpec& spec, int n, int radius = 0);

/// Representation of Π_n for a purely symmetric perturbation (a ≡ 0), assembled
/// from free returns, taboo fields and the composition series of perturbed
/// first returns. Throws WrongParity if a ≠ 0 and CapExceeded for n > kSymmetricCap.
inline constexpr int kSymmetricCap = 16;
MassField pi_symmetric(const ValidatedSpec& spec, int n, int radius = 0);

struct FourierReport {
  double max_deviation = 0.0;  // vs evolve_perturbed
  double gamma = 0.0;          // fitted constant in |P̃(λ)^k| ≤ exp(−γ k |λ|²)
  double bound_violation = 0.0;  // max over grid, k ≤ n of |P̃^k|·exp(γ k |λ|²) − 1 (≤ 0 when the bound holds)
};

/// Assembles φ_n(λ) = P̃^n + ã·Σ_{k<n} p_k P̃^{n−k−1} on the grid (2π/M)·{0..M−1}^ν,
/// inverts it with a discrete transform and compares with the exact engine.
/// Throws GridTooSmall when M < 2·exact_radius + 1 and WrongParity when ε·s ≠ 0.
FourierReport fourier_inversion_check(const ValidatedSpec& spec, int n, int grid_size);

/// min over nonzero grid λ ∈ (−π, π]^ν of −ln|P̃(λ)| / |λ|².
double characteristic_gamma(const ValidatedSpec& spec, int grid_size);

}  // namespace pwl
