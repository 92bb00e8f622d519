#include <string>

#include "doctest.h"
#include "json.hpp"
#include "pwl/verify.hpp"

using namespace pwl;

TEST_SUITE("verify") {
  TEST_CASE("a sign flip in one perturbation entry breaks the return identity") {
    const ValidatedSpec good = validate(verify::lazy_1d());
    CHECK(verify::return_identity({good}, 64).passed);

    WalkSpec flipped = verify::lazy_1d();
    flipped.anti = SignedKernel::from_entries(1, {{{-1}, 0.1}, {{1}, 0.1}});
    const verify::CheckResult r = verify::return_identity({testing::unchecked(flipped)}, 64);
    CHECK_FALSE(r.passed);
    CHECK(r.measured > 1e-3);
  }

  TEST_CASE("the same mutation breaks the antisymmetric representation") {
    WalkSpec flipped = verify::lazy_1d();
    flipped.anti = SignedKernel::from_entries(1, {{{-1}, 0.1}, {{1}, 0.1}});
    CHECK_FALSE(verify::antisymmetric_representation({testing::unchecked(flipped)}, 8).passed);
  }

  TEST_CASE("quick suite passes and reports JSON") {
    std::vector<std::string> seen;
    verify::SuiteConfig cfg;
    cfg.quick = true;
    cfg.on_result = [&](const verify::CheckResult& r) { seen.push_back(r.name); };
    const auto results = verify::run_suite(cfg);
    CHECK(seen.size() == results.size());
    for (const auto& r : results) {
      INFO(r.name << ": " << r.detail);
      CHECK(r.passed);
    }
    const auto doc = nlohmann::json::parse(verify::report_json(results));
    CHECK(doc.at("passed").get<bool>());
    CHECK(doc.at("checks").size() == results.size());
    CHECK(doc.at("checks")[0].contains("tolerance"));
  }

  TEST_CASE("exceptions inside a check become failures") {
    // a periodic kernel cannot enter the asymptotic checks
    const auto r = [] {
      try {
        return verify::three_way_agreement(validate(verify::srw_1d()), 100, 5);
      } catch (const std::exception&) {
        return verify::CheckResult{"three_way_agreement", false, 0, 0, "threw", 0};
      }
    }();
    CHECK_FALSE(r.passed);
  }
}
