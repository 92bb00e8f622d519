#include "pwl/pwl.h"

#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "json.hpp"

#include "pwl/asymptotics.hpp"
#include "pwl/error.hpp"
#include "pwl/exact_engine.hpp"
#include "pwl/format.hpp"
#include "pwl/kernels.hpp"
#include "pwl/montecarlo.hpp"
#include "pwl/representation.hpp"
#include "pwl/verify.hpp"

struct pwl_spec {
  pwl::ValidatedSpec spec;
};
struct pwl_field {
  pwl::MassField field;
};
struct pwl_profile {
  pwl::CorrectionProfile profile;
};
struct pwl_empirical {
  pwl::EmpiricalField field;
};
struct pwl_report {
  std::vector<pwl::verify::CheckResult> results;
};

namespace {

thread_local std::string last_error;

template <class F>
int guard(F&& f) {
  try {
    f();
    last_error.clear();
    return PWL_OK;
  } catch (const pwl::Error& e) {
    last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    last_error = std::string("Internal: ") + e.what();
    return PWL_INTERNAL;
  } catch (...) {
    last_error = "Internal: unknown exception";
    return PWL_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw pwl::Error(pwl::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

template <class F>
void with_output(const char* path, F&& write) {
  if (path == nullptr || std::strcmp(path, "-") == 0) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pwl::Error(pwl::ErrorCode::Io, std::string("cannot open ") + path + " for writing");
  write(out);
  out.flush();
  if (!out) throw pwl::Error(pwl::ErrorCode::Io, std::string("write failed for ") + path);
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

pwl::QuadratureConfig config(const pwl_quadrature* cfg) {
  if (cfg == nullptr) return {};
  return {cfg->abs_tol, cfg->rel_tol, cfg->max_subdivisions};
}

std::span<const double> point(const pwl_spec* spec, const double* x) {
  require(x, "x");
  return {x, static_cast<std::size_t>(spec->spec.dim())};
}

nlohmann::json kernel_json(const pwl::SignedKernel& k) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : k) {
    std::vector<int> u(e.u.coords().begin(), e.u.coords().end());
    arr.push_back({{"u", u}, {"w", e.w}});
  }
  return arr;
}

}  // namespace

extern "C" {

const char* pwl_last_error_message(void) { return last_error.c_str(); }

const char* pwl_error_name(int status) {
  static thread_local std::string name;
  name = std::string(pwl::error_name(static_cast<pwl::ErrorCode>(status)));
  return name.c_str();
}

void pwl_string_free(char* s) { std::free(s); }

int pwl_spec_load(const char* path, pwl_spec** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new pwl_spec{pwl::validate(pwl::load_spec_file(path))};
  });
}

int pwl_spec_parse(const char* json, pwl_spec** out) {
  return guard([&] {
    require(json, "json");
    require(out, "out");
    *out = new pwl_spec{pwl::validate(pwl::parse_spec_json(json))};
  });
}

void pwl_spec_free(pwl_spec* spec) { delete spec; }

int pwl_spec_dim(const pwl_spec* spec) { return spec ? spec->spec.dim() : 0; }

int pwl_spec_is_periodic(const pwl_spec* spec) { return spec && spec->spec.periodic() ? 1 : 0; }

int pwl_spec_moments(const pwl_spec* spec, double* covariance, double* drift) {
  return guard([&] {
    require(spec, "spec");
    const pwl::MomentData m = pwl::moments(spec->spec);
    const int d = m.dim();
    for (int i = 0; i < d; ++i) {
      if (drift) drift[i] = m.drift(i);
      for (int j = 0; j < d; ++j)
        if (covariance) covariance[i * d + j] = m.covariance(i, j);
    }
  });
}

int pwl_spec_summary_json(const pwl_spec* spec, char** out) {
  return guard([&] {
    require(spec, "spec");
    require(out, "out");
    const pwl::ValidatedSpec& s = spec->spec;
    nlohmann::json doc = {{"dim", s.dim()},
                          {"kernel", s.hash_hex()},
                          {"epsilon", s.epsilon()},
                          {"P", kernel_json(s.free())},
                          {"a", kernel_json(s.anti())},
                          {"s", kernel_json(s.sym())},
                          {"origin_row", kernel_json(s.origin_row())},
                          {"periodic", s.periodic()},
                          {"checks",
                           {{"P_probability", true},
                            {"P_symmetric", true},
                            {"a_antisymmetric", true},
                            {"s_symmetric", true},
                            {"origin_row_probability", true},
                            {"irreducible", true}}}};
    try {
      const pwl::MomentData m = pwl::moments(s);
      nlohmann::json B = nlohmann::json::array();
      for (int i = 0; i < m.dim(); ++i) {
        std::vector<double> row(m.dim());
        for (int j = 0; j < m.dim(); ++j) row[j] = m.covariance(i, j);
        B.push_back(row);
      }
      std::vector<double> d(m.drift.data(), m.drift.data() + m.dim());
      doc["B"] = B;
      doc["d"] = d;
    } catch (const pwl::Error& e) {
      doc["B"] = nullptr;
      doc["d"] = nullptr;
      doc["moments_error"] = e.what();
    }
    *out = duplicate(doc.dump(2));
  });
}

int pwl_field_compute(const pwl_spec* spec, int kind, int n, int radius, pwl_field** out) {
  return guard([&] {
    require(spec, "spec");
    require(out, "out");
    const pwl::ValidatedSpec& s = spec->spec;
    pwl::MassField f;
    switch (kind) {
      case PWL_FIELD_FREE: f = pwl::evolve_free(s, n, radius); break;
      case PWL_FIELD_PERTURBED: f = pwl::evolve_perturbed(s, n, radius); break;
      case PWL_FIELD_TABOO: f = pwl::evolve_taboo(s, n, radius).field; break;
      case PWL_FIELD_RHO: f = pwl::rho(s, n, radius); break;
      case PWL_FIELD_PI_ANTISYMMETRIC: f = pwl::pi_antisymmetric(s, n, radius); break;
      case PWL_FIELD_PI_SYMMETRIC: f = pwl::pi_symmetric(s, n, radius); break;
      default: throw pwl::Error(pwl::ErrorCode::InvalidArgument, "unknown field kind");
    }
    *out = new pwl_field{std::move(f)};
  });
}

int pwl_field_radius(const pwl_field* field) { return field ? field->field.radius : -1; }

size_t pwl_field_size(const pwl_field* field) { return field ? field->field.values.size() : 0; }

int pwl_field_value(const pwl_field* field, const int* x, double* out) {
  return guard([&] {
    require(field, "field");
    require(x, "x");
    require(out, "out");
    *out = field->field.at(pwl::LatticeVector(std::vector<int>(x, x + field->field.dim)));
  });
}

int pwl_field_copy(const pwl_field* field, double* buffer, size_t length) {
  return guard([&] {
    require(field, "field");
    require(buffer, "buffer");
    if (length < field->field.values.size())
      throw pwl::Error(pwl::ErrorCode::InvalidArgument, "buffer shorter than the field");
    std::copy(field->field.values.begin(), field->field.values.end(), buffer);
  });
}

int pwl_field_write_csv(const pwl_field* field, const pwl_spec* spec, const char* path) {
  return guard([&] {
    require(field, "field");
    require(spec, "spec");
    with_output(path, [&](std::ostream& os) { pwl::write_csv(os, field->field, spec->spec); });
  });
}

void pwl_field_free(pwl_field* field) { delete field; }

pwl_quadrature pwl_quadrature_default(void) {
  const pwl::QuadratureConfig c;
  return {c.abs_tol, c.rel_tol, c.max_subdivisions};
}

int pwl_profile_compute(const pwl_spec* spec, int n, int x_lo, int x_hi, const pwl_quadrature* cfg, int radius,
                        pwl_profile** out) {
  return guard([&] {
    require(spec, "spec");
    require(out, "out");
    *out = new pwl_profile{pwl::correction_profile(spec->spec, n, x_lo, x_hi, config(cfg), radius)};
  });
}

size_t pwl_profile_rows(const pwl_profile* profile) { return profile ? profile->profile.rows.size() : 0; }

int pwl_profile_row(const pwl_profile* profile, size_t row, int* x, double* values) {
  return guard([&] {
    require(profile, "profile");
    if (row >= profile->profile.rows.size()) throw pwl::Error(pwl::ErrorCode::InvalidArgument, "row out of range");
    const pwl::ProfileRow& r = profile->profile.rows[row];
    if (x)
      for (int i = 0; i < r.x.dim(); ++i) x[i] = r.x[i];
    if (values) {
      const double v[7] = {r.exact_total,      r.gaussian,     r.exact_correction, r.delta_sum,
                           r.delta_quadrature, r.delta_closed, r.psi_residual};
      std::copy(v, v + 7, values);
    }
  });
}

int pwl_profile_write(const pwl_profile* profile, const pwl_spec* spec, const char* path, int format) {
  return guard([&] {
    require(profile, "profile");
    require(spec, "spec");
    with_output(path, [&](std::ostream& os) {
      if (format == PWL_FORMAT_JSON)
        os << pwl::to_json(profile->profile, spec->spec) << '\n';
      else
        pwl::write_csv(os, profile->profile, spec->spec);
    });
  });
}

void pwl_profile_free(pwl_profile* profile) { delete profile; }

int pwl_sweep_write(const pwl_spec* spec, const int* ladder, size_t count, int x_lo, int x_hi,
                    const pwl_quadrature* cfg, const char* path, int format) {
  return guard([&] {
    require(spec, "spec");
    require(ladder, "ladder");
    if (count == 0) throw pwl::Error(pwl::ErrorCode::InvalidArgument, "empty n ladder");
    const pwl::ValidatedSpec& s = spec->spec;
    std::vector<pwl::CorrectionProfile> profiles;
    for (size_t i = 0; i < count; ++i)
      profiles.push_back(pwl::correction_profile(s, ladder[i], x_lo, x_hi, config(cfg)));
    const int dim = s.dim();

    with_output(path, [&](std::ostream& os) {
      if (format == PWL_FORMAT_JSON) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& p : profiles)
          for (const auto& r : p.rows) {
            std::vector<int> x(r.x.coords().begin(), r.x.coords().end());
            rows.push_back({{"n", p.n},
                            {"x", x},
                            {"exact_correction", r.exact_correction},
                            {"delta_sum", r.delta_sum},
                            {"delta_quadrature", r.delta_quadrature},
                            {"psi_residual", r.psi_residual},
                            {"scaled_error", std::pow(p.n, 0.5 * dim) * std::abs(r.psi_residual)}});
          }
        os << nlohmann::json{{"dim", dim}, {"kernel", s.hash_hex()}, {"rows", rows}}.dump(2) << '\n';
        return;
      }
      os << "# dim=" << dim << "\n# kernel=" << s.hash_hex() << "\n# ladder=";
      for (size_t i = 0; i < count; ++i) os << (i ? ";" : "") << ladder[i];
      os << "\nn,";
      for (int i = 1; i <= dim; ++i) os << "x_" << i << ",";
      os << "exact_correction,delta_sum,delta_quadrature,psi_residual,scaled_error\n";
      for (const auto& p : profiles)
        for (const auto& r : p.rows) {
          os << p.n << ',';
          for (int c : r.x.coords()) os << c << ',';
          os << pwl::format_double(r.exact_correction) << ',' << pwl::format_double(r.delta_sum) << ','
             << pwl::format_double(r.delta_quadrature) << ',' << pwl::format_double(r.psi_residual) << ','
             << pwl::format_double(std::pow(p.n, 0.5 * dim) * std::abs(r.psi_residual)) << '\n';
        }
    });
  });
}

int pwl_sample(const pwl_spec* spec, int n, uint64_t samples, uint64_t seed, pwl_empirical** out) {
  return guard([&] {
    require(spec, "spec");
    require(out, "out");
    *out = new pwl_empirical{pwl::sample(spec->spec, n, samples, seed)};
  });
}

int pwl_sample_estimate(const pwl_empirical* field, const int* x, double* out) {
  return guard([&] {
    require(field, "field");
    require(x, "x");
    require(out, "out");
    *out = field->field.estimate(pwl::LatticeVector(std::vector<int>(x, x + field->field.dim)));
  });
}

int pwl_sample_drift(const pwl_empirical* field, double* out) {
  return guard([&] {
    require(field, "field");
    require(out, "out");
    const auto d = pwl::drift_estimate(field->field);
    std::copy(d.begin(), d.end(), out);
  });
}

int pwl_sample_write_csv(const pwl_empirical* field, const pwl_spec* spec, const char* path) {
  return guard([&] {
    require(field, "field");
    require(spec, "spec");
    with_output(path, [&](std::ostream& os) { pwl::write_csv(os, field->field, spec->spec); });
  });
}

void pwl_sample_free(pwl_empirical* field) { delete field; }

int pwl_gaussian_term(const pwl_spec* spec, int n, const double* x, double* out) {
  return guard([&] {
    require(spec, "spec");
    require(out, "out");
    *out = pwl::gaussian_term(pwl::moments(spec->spec), n, point(spec, x));
  });
}

int pwl_delta_sum(const pwl_spec* spec, int n, const double* x, double* out) {
  return guard([&] {
    require(spec, "spec");
    require(out, "out");
    *out = pwl::delta_sum(spec->spec, n, point(spec, x));
  });
}

int pwl_delta_quadrature(const pwl_spec* spec, int n, const double* x, const pwl_quadrature* cfg, double* out) {
  return guard([&] {
    require(spec, "spec");
    require(out, "out");
    *out = pwl::delta_quadrature(pwl::moments(spec->spec), n, point(spec, x), config(cfg));
  });
}

int pwl_delta_closed(const pwl_spec* spec, int n, const double* x, double* out) {
  return guard([&] {
    require(spec, "spec");
    require(out, "out");
    *out = pwl::delta_closed(pwl::moments(spec->spec), n, point(spec, x));
  });
}

int pwl_erf_sigma(double sigma, double x, double* out) {
  return guard([&] {
    require(out, "out");
    *out = pwl::erf_sigma(sigma, x);
  });
}

double pwl_scale_guard(int n) { return n >= 1 ? pwl::scale_guard(n) : 0.0; }

int pwl_convolution_identity(const pwl_spec* spec, int n, double* deviation) {
  return guard([&] {
    require(spec, "spec");
    require(deviation, "deviation");
    *deviation = pwl::convolution_identity_check(spec->spec, n);
  });
}

int pwl_fourier_check(const pwl_spec* spec, int n, int grid, double* deviation, double* gamma) {
  return guard([&] {
    require(spec, "spec");
    const pwl::FourierReport r = pwl::fourier_inversion_check(spec->spec, n, grid);
    if (deviation) *deviation = r.max_deviation;
    if (gamma) *gamma = r.gamma;
  });
}

int pwl_psi_tail(const pwl_spec* spec, int n, int power, double x_min, double* fitted_constant) {
  return guard([&] {
    require(spec, "spec");
    require(fitted_constant, "fitted_constant");
    *fitted_constant = pwl::psi_tail_check(spec->spec, n, power, x_min).fitted_constant;
  });
}

int pwl_appendix_scaled(int l, double a, int dim, int n, double* scaled, double* series_limit) {
  return guard([&] {
    const pwl::AppendixReport r = pwl::appendix_bound_check(l, a, dim, n);
    if (scaled) *scaled = r.scaled.back();
    if (series_limit) *series_limit = r.series_limit;
  });
}

int pwl_verify(int quick, pwl_check_callback callback, void* user, pwl_report** out) {
  return guard([&] {
    require(out, "out");
    pwl::verify::SuiteConfig cfg;
    cfg.quick = quick != 0;
    if (callback)
      cfg.on_result = [&](const pwl::verify::CheckResult& r) {
        callback(r.name.c_str(), r.passed ? 1 : 0, r.measured, r.tolerance, r.detail.c_str(), r.seconds, user);
      };
    *out = new pwl_report{pwl::verify::run_suite(cfg)};
  });
}

int pwl_report_passed(const pwl_report* report) {
  if (report == nullptr) return 0;
  for (const auto& r : report->results)
    if (!r.passed) return 0;
  return 1;
}

int pwl_report_json(const pwl_report* report, char** out) {
  return guard([&] {
    require(report, "report");
    require(out, "out");
    *out = duplicate(pwl::verify::report_json(report->results));
  });
}

void pwl_report_free(pwl_report* report) { delete report; }

}  // extern "C"
