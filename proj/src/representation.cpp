#include "pwl/representation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "pwl/error.hpp"

namespace pwl {
namespace {

int checked_radius(const ValidatedSpec& spec, int n, int radius) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "number of steps must be ≥ 0");
  const int exact = exact_radius(spec, n);
  if (radius <= 0) return exact;
  if (radius < exact)
    throw Error(ErrorCode::BoxTooSmall, "radius " + std::to_string(radius) + " < " +
                                            std::to_string(exact));
  return radius;
}

void require_antisymmetric(const ValidatedSpec& spec) {
  if (spec.has_symmetric_part())
    throw Error(ErrorCode::WrongParity, "operation requires ε·s = 0");
}

MassField make_field(const Box& box, int time, std::vector<double> values) {
  return MassField{box.dim(), box.radius(), time, std::move(values), 0.0};
}

// Writes the measure k onto the box.
std::vector<double> embed(const Box& box, const SignedKernel& k) {
  std::vector<double> v(box.size(), 0.0);
  for (const auto& e : k)
    if (box.contains(e.u.coords())) v[box.index(e.u.coords())] += e.w;
  return v;
}

}  // namespace

double ConvolutionSeries::max_antisymmetry_error() const {
  double worst = 0.0;
  for (const auto& t : terms) {
    const std::size_t n = t.values.size();
    for (std::size_t i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(t.values[i] + t.values[n - 1 - i]));
  }
  return worst;
}

ConvolutionSeries antisymmetric_convolution_series(const ValidatedSpec& spec, int horizon,
                                                   int radius) {
  require_antisymmetric(spec);
  const Box box(spec.dim(), checked_radius(spec, horizon, radius));
  const Stencil free(box, spec.free());
  const Stencil anti(box, spec.anti());
  ConvolutionSeries series;
  series.horizon = horizon;
  std::vector<double> cur(box.size(), 0.0), next(box.size());
  cur[box.origin()] = 1.0;
  for (int k = 0; k < horizon; ++k) {
    std::vector<double> term(box.size());
    anti.apply(cur, term);
    series.terms.push_back(make_field(box, k, std::move(term)));
    free.apply(cur, next);
    cur.swap(next);
  }
  return series;
}

MassField pi_antisymmetric(const ValidatedSpec& spec, int n, int radius) {
  require_antisymmetric(spec);
  const Box box(spec.dim(), checked_radius(spec, n, radius));
  const Stencil free(box, spec.free());
  const Stencil anti(box, spec.anti());
  const ReturnSequence p = return_sequence(spec, n);

  std::vector<double> cur(box.size(), 0.0), next(box.size()), result(box.size(), 0.0);
  cur[box.origin()] = 1.0;
  // cur = P_m; its a-convolution enters with weight p_{n−1−m}
  for (int m = 0; m < n; ++m) {
    anti.apply_add(cur, result, p[n - 1 - m]);
    free.apply(cur, next);
    cur.swap(next);
  }
  for (std::size_t i = 0; i < result.size(); ++i) result[i] += cur[i];
  return make_field(box, n, std::move(result));
}

double convolution_identity_check(const ValidatedSpec& spec, int n, int radius) {
  require_antisymmetric(spec);
  const Box box(spec.dim(), checked_radius(spec, n + 1, radius));
  const Stencil free(box, spec.free());
  const std::size_t origin = box.origin();

  // both walks start from the signed measure a; the taboo one loses origin mass before every step
  std::vector<double> plain = embed(box, spec.anti());
  std::vector<double> taboo = plain;
  std::vector<double> next(box.size());
  double worst = 0.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) {
      free.apply(plain, next);
      plain.swap(next);
      taboo[origin] = 0.0;
      free.apply(taboo, next);
      taboo.swap(next);
    }
    for (std::size_t i = 0; i < box.size(); ++i) worst = std::max(worst, std::abs(taboo[i] - plain[i]));
  }
  return worst;
}

MassField pi_symmetric(const ValidatedSpec& spec, int n, int radius) {
  if (spec.has_antisymmetric_part())
    throw Error(ErrorCode::WrongParity, "symmetric representation requires a ≡ 0");
  if (n > kSymmetricCap)
    throw Error(ErrorCode::CapExceeded, "symmetric representation is capped at n = " +
                                            std::to_string(kSymmetricCap));
  const Box box(spec.dim(), checked_radius(spec, n, radius));
  const Stencil free(box, spec.free());
  const std::size_t origin = box.origin();
  const double eps = spec.epsilon();
  const ReturnSequence p = return_sequence(spec, n);
  const std::size_t N = static_cast<std::size_t>(n);

  // taboo[m] = P⁰_m(0,·) with the origin removed
  std::vector<std::vector<double>> taboo(N + 1, std::vector<double>(box.size(), 0.0));
  taboo[0][origin] = 1.0;
  std::vector<double> next(box.size());
  for (std::size_t m = 1; m <= N; ++m) {
    free.apply(taboo[m - 1], taboo[m]);
    taboo[m][origin] = 0.0;
  }
  taboo[0][origin] = 0.0;

  // S[j]: the measure s started off the origin, evolved j free steps, origin mass deleted.
  // e[k] = ε × (mass of s reaching the origin first at time k − 1).
  std::vector<std::vector<double>> S(N + 1);
  std::vector<double> e(N + 1, 0.0);
  if (n >= 1) {
    S[0] = embed(box, spec.sym());
    e[1] = eps * S[0][origin];
    S[0][origin] = 0.0;
    for (std::size_t j = 1; j < N; ++j) {
      S[j].resize(box.size());
      free.apply(S[j - 1], S[j]);
      e[j + 1] = eps * S[j][origin];
      S[j][origin] = 0.0;
    }
  }

  // Composition series over excursions started with an s-step.
  std::vector<double> w(N + 1, 0.0), g(N + 1, 0.0), Q1(N + 1, 0.0), Q2(N + 1, 0.0);
  for (std::size_t m = 1; m <= N; ++m) {
    for (std::size_t j = 1; j <= m; ++j) w[m] += e[j] * p[m - j];
    g[m] = w[m];
    for (std::size_t j = 1; j < m; ++j) g[m] += w[j] * g[m - j];
  }
  for (std::size_t l = 1; l <= N; ++l)
    for (std::size_t K = 1; K <= l; ++K) {
      Q1[l] += p[l - K] * w[K];
      Q2[l] += p[l - K] * (g[K] - w[K]);
    }

  std::vector<double> free_n(box.size(), 0.0);
  free_n[origin] = 1.0;
  for (int t = 0; t < n; ++t) {
    free.apply(free_n, next);
    free_n.swap(next);
  }

  std::vector<double> result = free_n;
  for (std::size_t l = 0; l < N; ++l) {
    const std::vector<double>& s_field = S[N - l - 1];
    const std::vector<double>& t_field = taboo[N - l];
    const double q = Q1[l] + Q2[l];
    for (std::size_t i = 0; i < box.size(); ++i) {
      result[i] += eps * p[l] * s_field[i];
      result[i] += Q1[l] * t_field[i];
      result[i] += Q2[l] * t_field[i];
      result[i] += eps * q * s_field[i];
    }
  }
  result[origin] = p[N] + Q1[N] + Q2[N];
  return make_field(box, n, std::move(result));
}

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Enumerates the grid (2π/M)·{0..M−1}^ν with coordinates wrapped into (−M/2, M/2].
struct Grid {
  int dim;
  int M;
  std::size_t size;

  Grid(int dim_, int M_) : dim(dim_), M(M_), size(1) {
    for (int i = 0; i < dim; ++i) size *= static_cast<std::size_t>(M);
  }
  std::vector<int> wrapped(std::size_t idx) const {
    std::vector<int> j(dim);
    for (int i = dim - 1; i >= 0; --i) {
      int c = static_cast<int>(idx % static_cast<std::size_t>(M));
      idx /= static_cast<std::size_t>(M);
      j[i] = c > M / 2 ? c - M : c;
    }
    return j;
  }
};

std::complex<double> transform(const SignedKernel& k, const std::vector<double>& lambda) {
  std::complex<double> acc = 0.0;
  for (const auto& e : k) {
    double phase = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) phase += lambda[i] * e.u[i];
    acc += e.w * std::polar(1.0, phase);
  }
  return acc;
}

std::vector<double> frequencies(const Grid& grid, std::size_t idx) {
  const auto j = grid.wrapped(idx);
  std::vector<double> lambda(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) lambda[i] = 2.0 * std::numbers::pi * j[i] / grid.M;
  return lambda;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return s;
}

}  // namespace

double characteristic_gamma(const ValidatedSpec& spec, int grid_size) {
  if (grid_size < 2) throw Error(ErrorCode::GridTooSmall, "grid needs at least 2 points per axis");
  const Grid grid(spec.dim(), grid_size);
  double gamma = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 1; idx < grid.size; ++idx) {
    const auto lambda = frequencies(grid, idx);
    const double mag = std::abs(transform(spec.free(), lambda));
    if (mag == 0.0) continue;
    gamma = std::min(gamma, -std::log(mag) / norm2(lambda));
  }
  return std::isfinite(gamma) ? gamma : 0.0;
}

FourierReport fourier_inversion_check(const ValidatedSpec& spec, int n, int grid_size) {
  require_antisymmetric(spec);
  const int radius = exact_radius(spec, n);
  if (grid_size < 2 * radius + 1)
    throw Error(ErrorCode::GridTooSmall, "grid " + std::to_string(grid_size) + " < 2R + 1 = " +
                                             std::to_string(2 * radius + 1));
  const Grid grid(spec.dim(), grid_size);
  const ReturnSequence p = return_sequence(spec, n);

  FourierReport report;
  report.gamma = characteristic_gamma(spec, grid_size);

  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * grid.size));
  std::vector<int> shape(spec.dim(), grid_size);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft(spec.dim(), shape.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }

  for (std::size_t idx = 0; idx < grid.size; ++idx) {
    const auto lambda = frequencies(grid, idx);
    const std::complex<double> P = transform(spec.free(), lambda);
    const std::complex<double> a = transform(spec.anti(), lambda);
    // φ_n = P̃^n + ã Σ_{k<n} p_k P̃^{n−k−1}; Horner in P̃
    std::complex<double> series = 0.0;
    for (int k = 0; k < n; ++k) series = series * P + p[k];
    std::complex<double> Pn = 1.0;
    for (int k = 0; k < n; ++k) Pn *= P;
    const std::complex<double> phi = Pn + a * series;
    buf[idx][0] = phi.real();
    buf[idx][1] = phi.imag();

    const double mag = std::abs(P);
    const double l2 = norm2(lambda);
    double power = 1.0;
    for (int k = 1; k <= n; ++k) {
      power *= mag;
      if (idx > 0 && power > 0.0)
        report.bound_violation =
            std::max(report.bound_violation, power * std::exp(report.gamma * k * l2) - 1.0);
    }
  }

  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  const MassField exact = evolve_perturbed(spec, n);
  const double scale = 1.0 / static_cast<double>(grid.size);
  for (std::size_t idx = 0; idx < grid.size; ++idx) {
    const LatticeVector x(grid.wrapped(idx));
    const double value = buf[idx][0] * scale;
    report.max_deviation = std::max(report.max_deviation, std::abs(value - exact.at(x)));
    report.max_deviation = std::max(report.max_deviation, std::abs(buf[idx][1] * scale));
  }
  fftw_free(buf);
  return report;
}

}  // namespace pwl
