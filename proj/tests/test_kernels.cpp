#include <cmath>
#include <string>

#include "doctest.h"
#include "pwl/error.hpp"
#include "pwl/kernels.hpp"
#include "pwl/verify.hpp"

using namespace pwl;

namespace {

SignedKernel k1(std::vector<SignedKernel::Entry> e) { return SignedKernel::from_entries(1, std::move(e)); }

ErrorCode code_of(const WalkSpec& spec) {
  try {
    validate(spec);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

WalkSpec lazy_with(SignedKernel anti) {
  WalkSpec s = verify::lazy_1d();
  s.anti = std::move(anti);
  return s;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("signed kernel entries are sorted, distinct and nonzero") {
    const SignedKernel k = k1({{{2}, 0.1}, {{-1}, 0.3}, {{0}, 0.0}, {{1}, 0.6}});
    REQUIRE(k.size() == 3);
    CHECK(k.entries()[0].u == LatticeVector{-1});
    CHECK(k.entries()[2].u == LatticeVector{2});
    CHECK(k.weight(LatticeVector{0}) == 0.0);
    CHECK(k.weight(LatticeVector{1}) == 0.6);
    CHECK(k.radius() == 2);
    CHECK(k.total() == doctest::Approx(1.0));
    CHECK_THROWS_AS(k1({{{1}, 0.5}, {{1}, 0.5}}), Error);
    CHECK_THROWS_AS(SignedKernel::from_entries(2, {{{1}, 0.5}}), Error);
    CHECK_THROWS_AS(k1({{{1}, std::nan("")}}), Error);
  }

  TEST_CASE("plus merges and cancels") {
    const SignedKernel a = k1({{{-1}, 0.25}, {{1}, 0.25}});
    const SignedKernel b = k1({{{1}, 1.0}, {{2}, 1.0}});
    const SignedKernel c = a.plus(b, -0.25);
    CHECK(c.size() == 2);
    CHECK(c.weight(LatticeVector{1}) == 0.0);
    CHECK(c.weight(LatticeVector{2}) == -0.25);
  }

  TEST_CASE("lazy kernel validates with B = 0.5 and d = 0.2") {
    const ValidatedSpec spec = validate(verify::lazy_1d());
    const MomentData m = moments(spec);
    CHECK(m.covariance(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.drift(0) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(m.covariance_det == doctest::Approx(0.5));
    CHECK(m.covariance_inverse(0, 0) == doctest::Approx(2.0));
    CHECK_FALSE(spec.periodic());
    CHECK(spec.origin_row().weight(LatticeVector{1}) == doctest::Approx(0.35));
    CHECK(spec.origin_row().weight(LatticeVector{-1}) == doctest::Approx(0.15));
  }

  TEST_CASE("raw moments of P and c") {
    const MomentData m = moments(validate(verify::lazy_1d()), 3);
    REQUIRE(m.raw.size() == 4);
    CHECK(m.raw[0].free == doctest::Approx(1.0));
    CHECK(m.raw[1].perturbation == doctest::Approx(0.2));
    CHECK(m.raw[2].free == doctest::Approx(0.5));
    CHECK(m.raw[3].free == doctest::Approx(0.0));
    CHECK(m.raw[3].perturbation == doctest::Approx(0.2));
  }

  TEST_CASE("validation errors carry their code") {
    CHECK(code_of(lazy_with(k1({{{-1}, -0.2}, {{1}, 0.1}}))) == ErrorCode::NotAntisymmetric);
    CHECK(code_of(lazy_with(k1({{{-1}, -0.3}, {{1}, 0.3}}))) == ErrorCode::NotAProbability);

    WalkSpec heavy = verify::lazy_1d();
    heavy.free = k1({{{-1}, 0.3}, {{0}, 0.5}, {{1}, 0.3}});
    CHECK(code_of(heavy) == ErrorCode::NotAProbability);

    WalkSpec lopsided = verify::lazy_1d();
    lopsided.free = k1({{{-1}, 0.2}, {{0}, 0.5}, {{1}, 0.3}});
    CHECK(code_of(lopsided) == ErrorCode::NotSymmetric);

    WalkSpec sym = verify::symmetric_1d();
    sym.sym = k1({{{-1}, -0.1}, {{0}, 0.25}, {{1}, -0.15}});
    CHECK(code_of(sym) == ErrorCode::NotSymmetric);

    WalkSpec negative = verify::symmetric_1d();
    negative.epsilon = -1.0;
    CHECK(code_of(negative) == ErrorCode::InvalidArgument);

    WalkSpec sparse = verify::lazy_1d();
    sparse.free = k1({{{-2}, 0.25}, {{0}, 0.5}, {{2}, 0.25}});
    sparse.anti = SignedKernel(1);
    CHECK(code_of(sparse) == ErrorCode::Reducible);

    WalkSpec mixed = verify::lazy_1d();
    mixed.anti = SignedKernel::from_entries(2, {{{1, 0}, 0.1}, {{-1, 0}, -0.1}});
    CHECK(code_of(mixed) == ErrorCode::DimensionMismatch);
  }

  TEST_CASE("a trapping origin row is reducible") {
    // the origin row keeps all its mass at 0
    WalkSpec trap = verify::symmetric_1d();
    trap.sym = k1({{{-1}, -0.25}, {{0}, 0.5}, {{1}, -0.25}});
    CHECK(code_of(trap) == ErrorCode::Reducible);
  }

  TEST_CASE("periodicity detection") {
    CHECK(validate(verify::srw_1d()).periodic());
    CHECK(validate(verify::nearest_neighbor_2d()).periodic());
    CHECK_FALSE(validate(verify::lazy_nd(2, 0.05)).periodic());
    CHECK_FALSE(validate(verify::lazy_nd(3, 0.05)).periodic());
    WalkSpec mixed = verify::lazy_1d();
    mixed.free = k1({{{-2}, 0.25}, {{-1}, 0.25}, {{1}, 0.25}, {{2}, 0.25}});
    CHECK_FALSE(validate(mixed).periodic());
  }

  TEST_CASE("degenerate covariance is reported by moments") {
    WalkSpec flat;
    flat.free = SignedKernel::from_entries(2, {{{0, 0}, 0.5}, {{1, 0}, 0.25}, {{-1, 0}, 0.25}});
    flat.anti = SignedKernel(2);
    flat.sym = SignedKernel(2);
    CHECK(code_of(flat) == ErrorCode::Reducible);
    try {
      moments(testing::unchecked(flat));
      FAIL("expected DegenerateCovariance");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateCovariance);
    }
  }

  TEST_CASE("hash is stable and content sensitive") {
    const ValidatedSpec a = validate(verify::lazy_1d());
    const ValidatedSpec b = validate(verify::lazy_1d());
    const ValidatedSpec c = validate(verify::lazy_1d(0.05));
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(a.hash_hex().size() == 16);
  }

  TEST_CASE("JSON round trip") {
    const WalkSpec s = verify::symmetric_1d();
    const WalkSpec back = parse_spec_json(spec_to_json(s));
    CHECK(validate(back).hash() == validate(s).hash());
    const WalkSpec file = load_spec_file(std::string(PWL_KERNEL_DIR) + "/lazy1d.json");
    CHECK(validate(file).hash() == validate(verify::lazy_1d()).hash());
  }

  TEST_CASE("malformed input") {
    auto parse_code = [](const std::string& text) {
      try {
        parse_spec_json(text);
      } catch (const Error& e) {
        return e.code();
      }
      return ErrorCode::Ok;
    };
    CHECK(parse_code("{\"dim\": 1, \"P\": [") == ErrorCode::Parse);
    CHECK(parse_code("{\"dim\": 1}") == ErrorCode::Parse);
    CHECK(parse_code("{\"dim\": 1, \"P\": [{\"u\": [0]}]}") == ErrorCode::Parse);
    CHECK(parse_code("{\"dim\": 1, \"P\": [{\"u\": [0, 1], \"w\": 1}]}") == ErrorCode::DimensionMismatch);
    try {
      load_spec_file("/nonexistent/kernel.json");
      FAIL("expected Io");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Io);
      CHECK(std::string(e.what()).rfind("Io", 0) == 0);
    }
  }
}
