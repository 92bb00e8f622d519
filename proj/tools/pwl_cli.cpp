// Command-line front end. Talks to the library only through pwl.h.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pwl/pwl.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct SpecDeleter {
  void operator()(pwl_spec* s) const { pwl_spec_free(s); }
};
using SpecPtr = std::unique_ptr<pwl_spec, SpecDeleter>;

int config_or_failure(int status) {
  switch (status) {
    case PWL_OK: return kExitOk;
    case PWL_IO:
    case PWL_PARSE:
    case PWL_SCALE_GUARD:
    case PWL_INVALID_ARGUMENT: return kExitConfig;
    default: return kExitFailure;
  }
}

int report(int status) {
  if (status != PWL_OK) std::fprintf(stderr, "error: %s\n", pwl_last_error_message());
  return config_or_failure(status);
}

// Loading failures other than I/O and parse errors are validation failures.
int load(const std::string& path, SpecPtr& out) {
  pwl_spec* raw = nullptr;
  const int status = pwl_spec_load(path.c_str(), &raw);
  if (status != PWL_OK) {
    std::fprintf(stderr, "error: %s\n", pwl_last_error_message());
    return status == PWL_IO || status == PWL_PARSE ? kExitConfig : kExitFailure;
  }
  out.reset(raw);
  return kExitOk;
}

int check_scale(int n, int x_min, int x_max, bool unsafe) {
  if (n < 1) {
    std::fprintf(stderr, "error: --n must be ≥ 1\n");
    return kExitConfig;
  }
  const double guard = pwl_scale_guard(n);
  const int reach = std::max(std::abs(x_min), std::abs(x_max));
  if (reach <= guard) return kExitOk;
  if (!unsafe) {
    std::fprintf(stderr,
                 "error: ScaleGuard: |x| up to %d exceeds √n·log n = %.3f for n = %d; pass --unsafe-scale to override\n",
                 reach, guard, n);
    return kExitConfig;
  }
  std::fprintf(stderr, "warning: |x| up to %d exceeds √n·log n = %.3f for n = %d\n", reach, guard, n);
  return kExitOk;
}

int format_code(const std::string& format) { return format == "json" ? PWL_FORMAT_JSON : PWL_FORMAT_CSV; }

const char* out_path(const std::string& out) { return out.empty() ? nullptr : out.c_str(); }

void print_check(const char* name, int passed, double measured, double tolerance, const char* detail,
                 double seconds, void*) {
  std::fprintf(stderr, "%s %-30s measured=%.6g tolerance=%.6g (%.2f s) %s\n", passed ? "PASS" : "FAIL", name,
               measured, tolerance, seconds, detail);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perturbed lattice walk: exact fields, correction asymptotics and verification"};
  app.require_subcommand(1);

  std::string kernel, out, format = "csv";
  int n = 0, x_min = 0, x_max = 0, radius = 0;
  std::vector<int> ladder;
  double tol_abs = pwl_quadrature_default().abs_tol;
  double tol_rel = pwl_quadrature_default().rel_tol;
  unsigned long long seed = 0, samples = 100000;
  bool quick = false, unsafe = false;

  auto* validate = app.add_subcommand("validate", "Check a kernel file and print its summary");
  validate->add_option("--kernel", kernel, "Kernel JSON file")->required();

  auto* profile = app.add_subcommand("profile", "Correction profile over [x-min, x-max]^ν");
  auto* sweep = app.add_subcommand("sweep", "Correction profiles along an n ladder");
  for (auto* sub : {profile, sweep}) {
    sub->add_option("--kernel", kernel, "Kernel JSON file")->required();
    sub->add_option("--x-min", x_min, "Lower coordinate bound")->required();
    sub->add_option("--x-max", x_max, "Upper coordinate bound")->required();
    sub->add_option("--tol-abs", tol_abs, "Quadrature absolute tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--tol-rel", tol_rel, "Quadrature relative tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "Output path (default stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--unsafe-scale", unsafe, "Allow |x| beyond √n·log n");
  }
  profile->add_option("--n", n, "Number of steps")->required();
  profile->add_option("--radius", radius, "Box radius (default: exact)");
  sweep->add_option("--n", ladder, "n ladder, e.g. --n 100,200,400")->required()->delimiter(',');

  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_flag("--quick", quick, "Only the checks with n ≤ 64");
  verify->add_option("--out", out, "JSON report path (default stdout)");

  auto* sample = app.add_subcommand("sample", "Monte Carlo estimate of the perturbed field");
  sample->add_option("--kernel", kernel, "Kernel JSON file")->required();
  sample->add_option("--n", n, "Number of steps")->required();
  sample->add_option("--samples", samples, "Trajectories")->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "Seed");
  sample->add_option("--out", out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const pwl_quadrature cfg{tol_abs, tol_rel, pwl_quadrature_default().max_subdivisions};

  if (*validate) {
    SpecPtr spec;
    if (const int rc = load(kernel, spec)) return rc;
    char* summary = nullptr;
    if (const int st = pwl_spec_summary_json(spec.get(), &summary)) return report(st);
    std::printf("%s\n", summary);
    pwl_string_free(summary);
    return kExitOk;
  }

  if (*profile) {
    if (const int rc = check_scale(n, x_min, x_max, unsafe)) return rc;
    SpecPtr spec;
    if (const int rc = load(kernel, spec)) return rc;
    pwl_profile* p = nullptr;
    if (const int st = pwl_profile_compute(spec.get(), n, x_min, x_max, &cfg, radius, &p)) return report(st);
    const int st = pwl_profile_write(p, spec.get(), out_path(out), format_code(format));
    pwl_profile_free(p);
    return report(st);
  }

  if (*sweep) {
    for (int k : ladder)
      if (const int rc = check_scale(k, x_min, x_max, unsafe)) return rc;
    SpecPtr spec;
    if (const int rc = load(kernel, spec)) return rc;
    return report(pwl_sweep_write(spec.get(), ladder.data(), ladder.size(), x_min, x_max, &cfg, out_path(out),
                                  format_code(format)));
  }

  if (*sample) {
    SpecPtr spec;
    if (const int rc = load(kernel, spec)) return rc;
    pwl_empirical* field = nullptr;
    if (const int st = pwl_sample(spec.get(), n, samples, seed, &field)) return report(st);
    const int st = pwl_sample_write_csv(field, spec.get(), out_path(out));
    pwl_sample_free(field);
    return report(st);
  }

  if (*verify) {
    pwl_report* rep = nullptr;
    if (const int st = pwl_verify(quick ? 1 : 0, &print_check, nullptr, &rep)) return report(st);
    char* json = nullptr;
    int st = pwl_report_json(rep, &json);
    if (st == PWL_OK) {
      if (out.empty()) {
        std::printf("%s\n", json);
      } else if (FILE* f = std::fopen(out.c_str(), "w")) {
        std::fprintf(f, "%s\n", json);
        std::fclose(f);
      } else {
        std::fprintf(stderr, "error: Io: cannot open %s\n", out.c_str());
        st = PWL_IO;
      }
      pwl_string_free(json);
    }
    const bool passed = pwl_report_passed(rep) != 0;
    pwl_report_free(rep);
    if (st != PWL_OK) return report(st);
    return passed ? kExitOk : kExitFailure;
  }
  return kExitConfig;
}
