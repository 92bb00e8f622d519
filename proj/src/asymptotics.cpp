#include "pwl/asymptotics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <unordered_map>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_gamma.h>

#include "json.hpp"

#include "pwl/error.hpp"
#include "pwl/format.hpp"
#include "pwl/parallel.hpp"

namespace pwl {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Geometry {
  double q = 0.0;     // (B⁻¹x, x)
  double proj = 0.0;  // d·B⁻¹x
  double norm_binv_x = 0.0;
};

Geometry geometry(const MomentData& m, std::span<const double> x) {
  if (static_cast<int>(x.size()) != m.dim())
    throw Error(ErrorCode::DimensionMismatch, "point dimension differs from the kernel");
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd y = m.covariance_inverse * v;
  return {v.dot(y), m.drift.dot(y), y.norm()};
}

// (2π)^{−ν/2} |B|^{−1/2}
double gauss_constant(const MomentData& m) {
  if (!(m.covariance_det > 0.0)) throw Error(ErrorCode::SingularCovariance, "det B ≤ 0");
  return std::pow(2.0 * std::numbers::pi, -0.5 * m.dim()) / std::sqrt(m.covariance_det);
}

void require_steps(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be ≥ 1");
}

void require_asymptotic(const ValidatedSpec& spec) {
  if (spec.periodic())
    throw Error(ErrorCode::Periodic, "free kernel is periodic; the local limit theorem needs an aperiodic walk");
  if (spec.has_symmetric_part())
    throw Error(ErrorCode::WrongParity, "asymptotics are stated for ε·s = 0");
}

struct Workspace {
  gsl_integration_workspace* ws;
  std::size_t size;
  explicit Workspace(std::size_t n) : ws(gsl_integration_workspace_alloc(n)), size(n) {}
  ~Workspace() { gsl_integration_workspace_free(ws); }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
};

gsl_integration_workspace* workspace(std::size_t n) {
  thread_local std::unique_ptr<Workspace> cached;
  if (!cached || cached->size < n) cached = std::make_unique<Workspace>(n);
  return cached->ws;
}

struct IntegrandParams {
  double half_nu;
  double c;  // q/(2n)
  bool relative;
};

double integrand(double alpha, void* raw) {
  const auto* p = static_cast<const IntegrandParams*>(raw);
  const double shift = p->relative ? p->c * (1.0 - alpha) / alpha : p->c / alpha;
  return std::exp(-shift - (p->half_nu + 1.0) * std::log(alpha) - p->half_nu * std::log1p(-alpha));
}

}  // namespace

double gaussian_term(const MomentData& m, int n, std::span<const double> x) {
  require_steps(n);
  const Geometry g = geometry(m, x);
  return gauss_constant(m) * std::pow(n, -0.5 * m.dim()) * std::exp(-g.q / (2.0 * n));
}

double delta_sum(const MomentData& m, const ReturnSequence& returns, int n,
                 std::span<const double> x) {
  require_steps(n);
  if (n >= 2 && static_cast<int>(returns.horizon()) < n - 2)
    throw Error(ErrorCode::InvalidArgument, "return sequence is shorter than n − 2");
  const Geometry g = geometry(m, x);
  if (g.proj == 0.0) return 0.0;
  const double power = 0.5 * (m.dim() + 2);
  double acc = 0.0;
  for (int k = 1; k <= n - 1; ++k)
    acc += returns[static_cast<std::size_t>(n - k - 1)] * std::exp(-power * std::log(k) - g.q / (2.0 * k));
  return gauss_constant(m) * g.proj * acc;
}

double delta_sum(const ValidatedSpec& spec, int n, std::span<const double> x) {
  require_asymptotic(spec);
  require_steps(n);
  return delta_sum(moments(spec), return_sequence(spec, std::max(0, n - 2)), n, x);
}

double alpha_integral(int dim, int n, double q, const QuadratureConfig& cfg, bool relative) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be ≥ 1");
  if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0) || cfg.max_subdivisions < 1)
    throw Error(ErrorCode::InvalidArgument, "quadrature tolerances must be positive");
  if (n <= 2) return 0.0;
  static const bool silenced = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)silenced;

  IntegrandParams params{0.5 * dim, q / (2.0 * n), relative};
  gsl_function f{&integrand, &params};
  gsl_integration_workspace* ws = workspace(static_cast<std::size_t>(cfg.max_subdivisions));

  // Geometric breakpoints resolve the endpoint layers of width 1/n.
  const double lo = 1.0 / n;
  const double hi = 1.0 - 1.0 / n;
  std::vector<double> cuts{lo};
  for (double t = 2.0 / n; t < 0.5; t *= 2.0) cuts.push_back(t);
  cuts.push_back(0.5);
  std::vector<double> upper;
  for (double t = 2.0 / n; t < 0.5; t *= 2.0) upper.push_back(1.0 - t);
  std::reverse(upper.begin(), upper.end());
  cuts.insert(cuts.end(), upper.begin(), upper.end());
  cuts.push_back(hi);

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    double result = 0.0, abserr = 0.0;
    const int status = gsl_integration_qag(&f, cuts[i], cuts[i + 1], cfg.abs_tol, cfg.rel_tol,
                                           static_cast<std::size_t>(cfg.max_subdivisions),
                                           GSL_INTEG_GAUSS21, ws, &result, &abserr);
    if (status != GSL_SUCCESS && status != GSL_EROUND)
      throw Error(ErrorCode::QuadratureNotConverged,
                  std::string("α-integral: ") + gsl_strerror(status) + " on [" +
                      format_double(cuts[i]) + ", " + format_double(cuts[i + 1]) + "]");
    total += result;
  }
  return total;
}

double delta_quadrature(const MomentData& m, int n, std::span<const double> x,
                        const QuadratureConfig& cfg) {
  require_steps(n);
  const Geometry g = geometry(m, x);
  if (g.proj == 0.0) return 0.0;
  const double C = gauss_constant(m);
  return C * C * g.proj * std::pow(n, -static_cast<double>(m.dim())) *
         alpha_integral(m.dim(), n, g.q, cfg, false);
}

double delta_profile(const MomentData& m, int n, std::span<const double> x,
                     const QuadratureConfig& cfg) {
  require_steps(n);
  const Geometry g = geometry(m, x);
  if (g.norm_binv_x == 0.0) return 0.0;
  const double C = gauss_constant(m);
  return C * C * g.norm_binv_x * std::pow(n, -0.5 * m.dim()) *
         alpha_integral(m.dim(), n, g.q, cfg, true);
}

double erf_sigma(double sigma, double x) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "σ must be > 0");
  return sigma * 0.5 * std::sqrt(std::numbers::pi) * std::erf(x / sigma);
}

double erf_B(const MomentData& m, std::span<const double> x) {
  return std::erf(std::sqrt(geometry(m, x).q));
}

double delta_closed(const MomentData& m, int n, std::span<const double> x) {
  require_steps(n);
  const int dim = m.dim();
  if (dim < 1 || dim > 3)
    throw Error(ErrorCode::UnsupportedDimension, "closed form exists only for ν ≤ 3");
  const Geometry g = geometry(m, x);
  if (g.proj == 0.0 || g.q == 0.0 || n <= 2) return 0.0;
  const double c = g.q / (2.0 * n);
  const double pi = std::numbers::pi;
  double integral = 0.0;
  if (dim == 1) {
    const double sigma = std::sqrt(m.covariance(0, 0));
    const double ax = std::abs(x[0]);
    const double upper = ax / std::sqrt(2.0) * std::sqrt((n - 1.0) / n);
    const double lower = ax / (std::sqrt(2.0) * std::sqrt(n * (n - 1.0)));
    integral = std::exp(-c) * std::sqrt(2.0 * pi * n) / ax * (2.0 / std::sqrt(pi)) *
               (erf_sigma(sigma, upper) - erf_sigma(sigma, lower));
  } else if (dim == 2) {
    integral = (2.0 * n / g.q) * std::exp(-c) * (std::exp(-c / (n - 1.0)) - std::exp(-c * (n - 1.0)));
  } else {
    const double rho = std::sqrt(g.q);
    double bracket;  // ρ^{−3}[√(2π) erf_B(x/√2) − 2ρ e^{−ρ²/2}]
    if (rho < 0.1) {
      bracket = 2.0 * std::sqrt(2.0) * std::tgamma(1.5) * gsl_sf_gamma_inc_P(1.5, 0.5 * g.q) /
                (rho * rho * rho);
    } else {
      std::vector<double> half(x.begin(), x.end());
      for (double& h : half) h /= std::sqrt(2.0);
      bracket = (std::sqrt(2.0 * pi) * erf_B(m, half) - 2.0 * rho * std::exp(-0.5 * g.q)) /
                (rho * rho * rho);
    }
    integral = std::pow(n, 1.5) * std::exp(-c) * bracket;
  }
  const double C = gauss_constant(m);
  return C * C * g.proj * std::pow(n, -static_cast<double>(dim)) * integral;
}

namespace {

// delta_quadrature with the α-integral memoized on the bit pattern of q.
class QuadratureCache {
 public:
  QuadratureCache(const MomentData& m, int n, const QuadratureConfig& cfg) : m_(m), n_(n), cfg_(cfg) {
    const double C = gauss_constant(m);
    scale_ = C * C * std::pow(n, -static_cast<double>(m.dim()));
  }

  double delta(std::span<const double> x) {
    const Geometry g = geometry(m_, x);
    if (g.proj == 0.0) return 0.0;
    const auto key = std::bit_cast<std::uint64_t>(g.q);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, alpha_integral(m_.dim(), n_, g.q, cfg_)).first;
    return scale_ * g.proj * it->second;
  }

 private:
  const MomentData& m_;
  int n_;
  QuadratureConfig cfg_;
  double scale_ = 0.0;
  std::unordered_map<std::uint64_t, double> cache_;
};

}  // namespace

PsiTailReport psi_tail_check(const ValidatedSpec& spec, int n, int power, double x_min,
                             const QuadratureConfig& cfg) {
  require_asymptotic(spec);
  require_steps(n);
  const MomentData m = moments(spec);
  const MassField pert = evolve_perturbed(spec, n);
  const MassField free = evolve_free(spec, n, pert.radius);
  const Box box = pert.box();
  const double reach = std::min(static_cast<double>(box.radius()), scale_guard(n));
  QuadratureCache quad(m, n, cfg);

  std::vector<double> psi(box.size(), 0.0);
  std::vector<char> used(box.size(), 0);
  PsiTailReport report;
  for (std::size_t idx = 0; idx < box.size(); ++idx) {
    const LatticeVector x = box.site(idx);
    const double r = x.norm();
    if (r < x_min || r > reach) continue;
    const auto xr = x.to_real();
    psi[idx] = (pert.values[idx] - free.values[idx]) - quad.delta(xr);
    used[idx] = 1;
    ++report.sites;
    const double fitted = std::abs(psi[idx]) * std::pow(n, 0.5 * m.dim()) * std::pow(r, power);
    if (fitted > report.fitted_constant || report.sites == 1) {
      report.fitted_constant = fitted;
      report.argmax = x;
    }
  }
  for (std::size_t idx = 0; idx < box.size(); ++idx)
    if (used[idx])
      report.max_antisymmetry_error =
          std::max(report.max_antisymmetry_error, std::abs(psi[idx] + psi[box.size() - 1 - idx]));
  return report;
}

AppendixReport appendix_bound_check(int l, double a, int dim, int horizon) {
  if (l < 0 || !(a > 0.0) || dim < 1 || horizon < 0)
    throw Error(ErrorCode::InvalidArgument, "appendix sum needs l ≥ 0, a > 0, ν ≥ 1, N ≥ 0");
  AppendixReport r;
  r.l = l;
  r.a = a;
  r.dim = dim;
  const std::size_t N = static_cast<std::size_t>(horizon);
  std::vector<double> weight(N + 1);
  for (std::size_t k = 0; k <= N; ++k)
    weight[k] = std::pow(static_cast<double>(k), l) * std::exp(-a * (static_cast<double>(k) - l));
  std::vector<double> inverse(N + 1, 0.0);
  for (std::size_t m = 1; m <= N; ++m) inverse[m] = std::pow(static_cast<double>(m), -0.5 * dim);
  r.sums.assign(N + 1, 0.0);
  r.scaled.assign(N + 1, 0.0);
  for (std::size_t n = 2; n <= N; ++n) {
    double s = 0.0;
    for (std::size_t k = 0; k + 2 <= n; ++k) s += weight[k] * inverse[n - k - 1];
    r.sums[n] = s;
    r.scaled[n] = std::pow(static_cast<double>(n), 0.5 * dim) * s;
  }
  double limit = 0.0;
  for (int k = 0;; ++k) {
    const double term = std::pow(static_cast<double>(k), l) * std::exp(-a * (k - l));
    limit += term;
    if (k > l + 10 && term < 1e-18 * limit) break;
  }
  r.series_limit = limit;
  return r;
}

double scale_guard(int n) {
  require_steps(n);
  return std::sqrt(static_cast<double>(n)) * std::log(static_cast<double>(n));
}

CorrectionProfile correction_profile(const ValidatedSpec& spec, int n, int x_lo, int x_hi,
                                     const QuadratureConfig& cfg, int radius) {
  require_asymptotic(spec);
  require_steps(n);
  if (x_lo > x_hi) throw Error(ErrorCode::InvalidArgument, "x range is empty");
  const MomentData m = moments(spec);
  const MassField pert = evolve_perturbed(spec, n, radius);
  const MassField free = evolve_free(spec, n, pert.radius);
  const ReturnSequence returns = return_sequence(spec, std::max(0, n - 2));
  const int dim = spec.dim();
  const bool closed = dim <= 3;

  CorrectionProfile profile{dim, n, pert.radius, {}};
  const int extent = x_hi - x_lo + 1;
  std::size_t count = 1;
  for (int i = 0; i < dim; ++i) count *= static_cast<std::size_t>(extent);
  profile.rows.resize(count);

  parallel_for(0, static_cast<int>(count), [&](int lo, int hi) {
    QuadratureCache quad(m, n, cfg);
    for (int r = lo; r < hi; ++r) {
      std::vector<int> coords(dim);
      int rest = r;
      for (int i = dim - 1; i >= 0; --i) {
        coords[i] = x_lo + rest % extent;
        rest /= extent;
      }
      ProfileRow& row = profile.rows[static_cast<std::size_t>(r)];
      row.x = LatticeVector(std::move(coords));
      const auto xr = row.x.to_real();
      row.exact_total = pert.at(row.x);
      row.gaussian = gaussian_term(m, n, xr);
      row.exact_correction = row.exact_total - free.at(row.x);
      row.delta_sum = delta_sum(m, returns, n, xr);
      row.delta_quadrature = quad.delta(xr);
      row.delta_closed = closed ? delta_closed(m, n, xr) : kNaN;
      row.psi_residual = row.exact_correction - row.delta_quadrature;
    }
  }, 16);
  return profile;
}

void write_csv(std::ostream& os, const CorrectionProfile& profile, const ValidatedSpec& spec) {
  os << "# dim=" << profile.dim << "\n# n=" << profile.n << "\n# R=" << profile.radius
     << "\n# kernel=" << spec.hash_hex() << "\n";
  for (int i = 1; i <= profile.dim; ++i) os << "x_" << i << ",";
  os << "exact_total,gaussian,exact_correction,delta_sum,delta_quadrature,delta_closed,psi_residual\n";
  for (const auto& row : profile.rows) {
    for (int c : row.x.coords()) os << c << ",";
    os << format_double(row.exact_total) << ',' << format_double(row.gaussian) << ','
       << format_double(row.exact_correction) << ',' << format_double(row.delta_sum) << ','
       << format_double(row.delta_quadrature) << ',' << format_double(row.delta_closed) << ','
       << format_double(row.psi_residual) << '\n';
  }
}

std::string to_json(const CorrectionProfile& profile, const ValidatedSpec& spec) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : profile.rows) {
    std::vector<int> x(row.x.coords().begin(), row.x.coords().end());
    rows.push_back({{"x", x},
                    {"exact_total", num(row.exact_total)},
                    {"gaussian", num(row.gaussian)},
                    {"exact_correction", num(row.exact_correction)},
                    {"delta_sum", num(row.delta_sum)},
                    {"delta_quadrature", num(row.delta_quadrature)},
                    {"delta_closed", num(row.delta_closed)},
                    {"psi_residual", num(row.psi_residual)}});
  }
  nlohmann::json doc = {{"dim", profile.dim},
                        {"n", profile.n},
                        {"radius", profile.radius},
                        {"kernel", spec.hash_hex()},
                        {"rows", rows}};
  return doc.dump(2);
}

}  // namespace pwl
