#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

#include "doctest.h"
#include "pwl/exact_engine.hpp"
#include "pwl/montecarlo.hpp"
#include "pwl/verify.hpp"

using namespace pwl;

TEST_SUITE("montecarlo") {
  TEST_CASE("alias table reproduces the weights exactly on a uniform grid") {
    const SignedKernel k = SignedKernel::from_entries(1, {{{-2}, 0.05}, {{-1}, 0.2}, {{0}, 0.5}, {{1}, 0.15}, {{2}, 0.1}});
    const AliasTable table(k);
    const int grid = 1 << 20;
    std::vector<double> freq(table.size(), 0.0);
    for (int i = 0; i < grid; ++i) freq[table.pick((i + 0.5) / grid)] += 1.0 / grid;
    for (std::size_t i = 0; i < k.size(); ++i) CHECK(std::abs(freq[i] - k.entries()[i].w) <= 1e-5);
  }

  TEST_CASE("counter generator is deterministic per stream") {
    CounterRng a(5, 9), b(5, 9), c(5, 10), d(6, 9);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
      const std::uint64_t x = a.next();
      CHECK(x == b.next());
      CHECK(x != c.next());
      CHECK(x != d.next());
      seen.insert(x);
      const double u = a.uniform();
      b.uniform();
      c.uniform();
      d.uniform();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
    }
    CHECK(seen.size() == 1000);
  }

  TEST_CASE("trivial sampling") {
    const ValidatedSpec spec = validate(verify::lazy_1d());
    const EmpiricalField f = sample(spec, 0, 1, 42);
    CHECK(f.counts.size() == 1);
    CHECK(f.counts.at(LatticeVector{0}) == 1);
    CHECK(f.estimate(LatticeVector{0}) == 1.0);
  }

  TEST_CASE("fixed seed gives identical counts regardless of worker count") {
    const ValidatedSpec spec = validate(verify::lazy_nd(2, 0.05));
    ::setenv("PWL_THREADS", "1", 1);
    const EmpiricalField a = sample(spec, 10, 50000, 3);
    ::setenv("PWL_THREADS", "4", 1);
    const EmpiricalField b = sample(spec, 10, 50000, 3);
    ::unsetenv("PWL_THREADS");
    CHECK(a.counts == b.counts);
    std::uint64_t total = 0;
    for (const auto& [x, c] : a.counts) total += c;
    CHECK(total == 50000);
    CHECK(sample(spec, 10, 50000, 4).counts != a.counts);
  }

  TEST_CASE("one origin step has mean 0.2") {
    const ValidatedSpec spec = validate(verify::lazy_1d());
    const std::uint64_t N = 1000000;
    const EmpiricalField f = sample(spec, 1, N, 1);
    // origin row (0.15, 0.5, 0.35): mean 0.2, variance 0.5 − 0.04
    const double se = std::sqrt(0.46 / N);
    CHECK(std::abs(drift_estimate(f)[0] - 0.2) <= 4 * se);
  }

  TEST_CASE("symmetric walk has no drift and the perturbed walk drifts along d") {
    const ValidatedSpec flat = validate(verify::lazy_1d(0.0));
    const std::uint64_t N = 200000;
    const EmpiricalField f = sample(flat, 16, N, 2);
    CHECK(std::abs(drift_estimate(f)[0]) <= 4 * std::sqrt(8.0 / N));

    const ValidatedSpec lazy = validate(verify::lazy_1d());
    for (int n : {4, 16, 32}) CHECK(drift_estimate(sample(lazy, n, 1000000, 9))[0] > 0.0);
  }

  TEST_CASE("binomial interval against the exact field") {
    const ValidatedSpec spec = validate(verify::lazy_1d());
    const std::uint64_t N = 200000;
    const EmpiricalField f = sample(spec, 16, N, 17);
    const MassField exact = evolve_perturbed(spec, 16);
    const Box box = exact.box();
    for (std::size_t i = 0; i < exact.values.size(); ++i) {
      const double p = exact.values[i];
      if (p < 1e-4) continue;
      CHECK(std::abs(f.estimate(box.site(i)) - p) <= 4 * std::sqrt(p * (1 - p) / N));
    }
  }

  TEST_CASE("CSV has count and stderr columns") {
    const ValidatedSpec spec = validate(verify::lazy_1d());
    std::ostringstream os;
    write_csv(os, sample(spec, 3, 1000, 0), spec);
    CHECK(os.str().find("x_1,value,count,stderr\n") != std::string::npos);
    CHECK(os.str().find("# samples=1000\n") != std::string::npos);
  }
}
