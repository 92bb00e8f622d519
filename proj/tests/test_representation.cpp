#include <cmath>
#include <random>

#include "doctest.h"
#include "pwl/error.hpp"
#include "pwl/representation.hpp"
#include "pwl/verify.hpp"

using namespace pwl;

namespace {

double max_diff(const MassField& a, const MassField& b) {
  REQUIRE(a.values.size() == b.values.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  return worst;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

// Random symmetric P with a lazy part, a random antisymmetric a and (optionally) a symmetric s,
// kept small enough that the origin row stays nonnegative.
WalkSpec random_spec(std::mt19937_64& rng, int dim, bool symmetric_part) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<LatticeVector> half;
  if (dim == 1) {
    half = {LatticeVector{1}, LatticeVector{2}};
  } else {
    half = {LatticeVector{1, 0}, LatticeVector{0, 1}, LatticeVector{1, 1}};
  }
  std::vector<double> w(half.size());
  double total = 0.0;
  for (double& v : w) total += (v = 0.2 + U(rng));
  const double lazy = 0.2 + 0.4 * U(rng);
  std::vector<SignedKernel::Entry> P{{LatticeVector::zero(dim), lazy}}, a, s;
  for (std::size_t i = 0; i < half.size(); ++i) {
    const double wi = (1.0 - lazy) * w[i] / total / 2.0;
    P.push_back({half[i], wi});
    P.push_back({-half[i], wi});
    const double ai = (2.0 * U(rng) - 1.0) * 0.9 * wi;
    if (!symmetric_part) {
      a.push_back({half[i], ai});
      a.push_back({-half[i], -ai});
    } else {
      const double si = -0.9 * wi * U(rng);
      s.push_back({half[i], si});
      s.push_back({-half[i], si});
    }
  }
  WalkSpec spec;
  spec.free = SignedKernel::from_entries(dim, P);
  spec.anti = SignedKernel::from_entries(dim, a);
  spec.sym = SignedKernel::from_entries(dim, s);
  if (symmetric_part) {
    double removed = 0.0;
    for (const auto& e : s) removed -= e.w;
    spec.sym = spec.sym.plus(SignedKernel::from_entries(dim, {{LatticeVector::zero(dim), removed}}));
    spec.epsilon = 0.5 + 0.5 * U(rng);
  }
  return spec;
}

}  // namespace

TEST_SUITE("representation") {
  TEST_CASE("antisymmetric representation reproduces the exact field") {
    const ValidatedSpec lazy = validate(verify::lazy_1d());
    const MassField one = pi_antisymmetric(lazy, 1);
    CHECK(one.at(LatticeVector{-1}) == doctest::Approx(0.15));
    CHECK(one.at(LatticeVector{0}) == doctest::Approx(0.5));
    CHECK(one.at(LatticeVector{1}) == doctest::Approx(0.35));
    for (int n = 0; n <= 64; n += 7) CHECK(max_diff(pi_antisymmetric(lazy, n), evolve_perturbed(lazy, n)) <= 1e-12);

    const ValidatedSpec free = validate(verify::lazy_1d(0.0));
    CHECK(max_diff(pi_antisymmetric(free, 20), evolve_free(free, 20)) == 0.0);
  }

  TEST_CASE("property: random antisymmetric kernels in one and two dimensions") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 12; ++trial) {
      const int dim = 1 + trial % 2;
      const ValidatedSpec spec = validate(random_spec(rng, dim, false));
      for (int n : {1, 5, 12})
        CHECK(max_diff(pi_antisymmetric(spec, n), evolve_perturbed(spec, n)) <= 1e-12);
      const MassField pert = evolve_perturbed(spec, 12);
      const MassField free = evolve_free(spec, 12);
      const std::size_t N = pert.values.size();
      for (std::size_t i = 0; i < N; ++i) {
        const double c = pert.values[i] - free.values[i];
        const double mirror = pert.values[N - 1 - i] - free.values[N - 1 - i];
        CHECK(std::abs(c + mirror) <= 1e-13);
      }
      CHECK(convolution_identity_check(spec, 12) <= 1e-12);
    }
  }

  TEST_CASE("convolution series terms are antisymmetric") {
    const ValidatedSpec spec = validate(verify::lazy_nd(2, 0.05));
    const ConvolutionSeries series = antisymmetric_convolution_series(spec, 20);
    CHECK(series.terms.size() == 20);
    CHECK(series.max_antisymmetry_error() <= 1e-13);
  }

  TEST_CASE("convolution identity") {
    CHECK(convolution_identity_check(validate(verify::lazy_1d()), 16) <= 1e-12);
    CHECK(convolution_identity_check(validate(verify::lazy_1d(0.0)), 16) == 0.0);
    CHECK(code_of([] { convolution_identity_check(validate(verify::symmetric_1d()), 4); }) == ErrorCode::WrongParity);
  }

  TEST_CASE("symmetric representation") {
    const ValidatedSpec spec = validate(verify::symmetric_1d());
    CHECK(spec.origin_row().weight(LatticeVector{-1}) == doctest::Approx(0.125));
    CHECK(spec.origin_row().weight(LatticeVector{0}) == doctest::Approx(0.75));
    for (int n = 0; n <= kSymmetricCap; ++n) CHECK(max_diff(pi_symmetric(spec, n), evolve_perturbed(spec, n)) <= 1e-12);

    const MassField one = pi_symmetric(spec, 1);
    CHECK(one.at(LatticeVector{1}) == doctest::Approx(0.25 - 0.125));

    WalkSpec off = verify::symmetric_1d();
    off.epsilon = 0.0;
    const ValidatedSpec zero = validate(off);
    CHECK(max_diff(pi_symmetric(zero, 9), evolve_free(zero, 9)) <= 1e-15);

    CHECK(code_of([&] { pi_symmetric(spec, kSymmetricCap + 1); }) == ErrorCode::CapExceeded);
    CHECK(code_of([] { pi_symmetric(validate(verify::lazy_1d()), 3); }) == ErrorCode::WrongParity);
    CHECK(code_of([] { pi_antisymmetric(validate(verify::symmetric_1d()), 3); }) == ErrorCode::WrongParity);
  }

  TEST_CASE("property: random symmetric perturbations") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 8; ++trial) {
      const int dim = 1 + trial % 2;
      const ValidatedSpec spec = validate(random_spec(rng, dim, true));
      for (int n : {1, 4, 9, 16}) CHECK(max_diff(pi_symmetric(spec, n), evolve_perturbed(spec, n)) <= 1e-12);
    }
  }

  TEST_CASE("characteristic function inversion") {
    const ValidatedSpec lazy = validate(verify::lazy_1d());
    const FourierReport r = fourier_inversion_check(lazy, 32, 128);
    CHECK(r.max_deviation <= 1e-10);
    CHECK(r.gamma > 0.0);
    CHECK(r.bound_violation <= 1e-12);
    CHECK(fourier_inversion_check(validate(verify::lazy_1d(0.0)), 32, 128).max_deviation <= 1e-12);
    CHECK(fourier_inversion_check(validate(verify::lazy_nd(2, 0.05)), 8, 20).max_deviation <= 1e-12);
    CHECK(code_of([&] { fourier_inversion_check(lazy, 32, 64); }) == ErrorCode::GridTooSmall);
    // the simple walk has |P̃(π)| = 1, so no positive γ exists
    CHECK(characteristic_gamma(validate(verify::srw_1d()), 64) == 0.0);
    // lazy walk: P̃ = cos²(λ/2) and −ln cos²(λ/2)/λ² increases in |λ|, so γ sits at the first grid point
    const double lambda = 2.0 * 3.141592653589793 / 128;
    CHECK(characteristic_gamma(lazy, 128) ==
          doctest::Approx(-std::log(std::cos(lambda / 2) * std::cos(lambda / 2)) / (lambda * lambda)).epsilon(1e-12));
  }
}
