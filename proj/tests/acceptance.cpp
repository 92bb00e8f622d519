// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <cstdio>

#include "pwl/verify.hpp"

int main() {
  pwl::verify::SuiteConfig cfg;
  cfg.on_result = [](const pwl::verify::CheckResult& r) {
    std::printf("%s %-30s measured=%.6g tolerance=%.6g time=%.2fs  %s\n", r.passed ? "PASS" : "FAIL",
                r.name.c_str(), r.measured, r.tolerance, r.seconds, r.detail.c_str());
    std::fflush(stdout);
  };
  const auto results = pwl::verify::run_suite(cfg);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::printf("%zu criteria, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}
