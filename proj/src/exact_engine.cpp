#include "pwl/exact_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "pwl/error.hpp"
#include "pwl/format.hpp"
#include "pwl/parallel.hpp"

namespace pwl {

Box::Box(int dim, int radius) : dim_(dim), radius_(radius), strides_(dim) {
  if (dim < 1) throw Error(ErrorCode::DimensionMismatch, "box dimension must be at least 1");
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "box radius must be ≥ 0");
  std::ptrdiff_t stride = 1;
  for (int i = dim - 1; i >= 0; --i) {
    strides_[i] = stride;
    stride *= extent();
  }
  size_ = static_cast<std::size_t>(stride);
  origin_ = 0;
  for (int i = 0; i < dim; ++i) origin_ += static_cast<std::size_t>(radius * strides_[i]);
}

bool Box::contains(std::span<const int> x) const noexcept {
  for (int c : x)
    if (c < -radius_ || c > radius_) return false;
  return true;
}

std::size_t Box::index(std::span<const int> x) const {
  return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(origin_) + offset(x));
}

std::ptrdiff_t Box::offset(std::span<const int> u) const {
  std::ptrdiff_t off = 0;
  for (int i = 0; i < dim_; ++i) off += u[i] * strides_[i];
  return off;
}

LatticeVector Box::site(std::size_t index) const {
  std::vector<int> x(dim_);
  for (int i = 0; i < dim_; ++i) {
    x[i] = static_cast<int>(static_cast<std::ptrdiff_t>(index) / strides_[i]) - radius_;
    index %= static_cast<std::size_t>(strides_[i]);
  }
  return LatticeVector(std::move(x));
}

Stencil::Stencil(const Box& box, const SignedKernel& kernel) : box_(&box) {
  if (kernel.dim() != box.dim() && !kernel.empty())
    throw Error(ErrorCode::DimensionMismatch, "kernel and box dimensions differ");
  for (const auto& e : kernel) {
    std::vector<int> shift(e.u.coords().begin(), e.u.coords().end());
    taps_.push_back({shift, box.offset(shift), e.w});
  }
}

void Stencil::apply(std::span<const double> in, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  apply_add(in, out);
}

void Stencil::apply_add(std::span<const double> in, std::span<double> out, double scale) const {
  const int extent = box_->extent();
  if (box_->size() < (1u << 15)) {
    accumulate_rows(0, extent, in, out, scale);
    return;
  }
  parallel_for(0, extent, [&](int lo, int hi) { accumulate_rows(lo, hi, in, out, scale); }, 4);
}

void Stencil::accumulate_rows(int row_begin, int row_end, std::span<const double> in,
                              std::span<double> out, double scale) const {
  const int dim = box_->dim();
  const int R = box_->radius();
  std::vector<int> lo(dim), hi(dim), cur(dim);
  for (const Tap& tap : taps_) {
    bool empty = false;
    for (int i = 0; i < dim; ++i) {
      lo[i] = std::max(-R, -R + tap.shift[i]);
      hi[i] = std::min(R, R + tap.shift[i]);
      if (i == 0) {
        lo[0] = std::max(lo[0], row_begin - R);
        hi[0] = std::min(hi[0], row_end - 1 - R);
      }
      if (lo[i] > hi[i]) empty = true;
    }
    if (empty) continue;
    const double w = tap.weight * scale;
    const int last = dim - 1;
    const int run = hi[last] - lo[last] + 1;
    for (int i = 0; i < last; ++i) cur[i] = lo[i];
    while (true) {
      cur[last] = lo[last];
      const std::size_t start = box_->index(cur);
      double* dst = out.data() + start;
      const double* src = in.data() + (static_cast<std::ptrdiff_t>(start) - tap.offset);
      for (int j = 0; j < run; ++j) dst[j] += w * src[j];
      int axis = last - 1;
      while (axis >= 0 && cur[axis] == hi[axis]) {
        cur[axis] = lo[axis];
        --axis;
      }
      if (axis < 0) break;
      ++cur[axis];
    }
  }
}

double MassField::at(const LatticeVector& x) const {
  Box b = box();
  return b.contains(x.coords()) ? values[b.index(x.coords())] : 0.0;
}

double MassField::total() const { return std::accumulate(values.begin(), values.end(), 0.0); }

namespace {

// Evolution on a fixed box with the free stencil and the origin-row correction.
class Engine {
 public:
  Engine(const ValidatedSpec& spec, int radius)
      : box_(spec.dim(), radius), free_(box_, spec.free()) {
    for (const auto& e : spec.perturbation()) {
      if (box_.contains(e.u.coords()))
        origin_taps_.push_back({box_.offset(e.u.coords()), e.w});
      else
        outside_weight_ += e.w;
    }
  }

  const Box& box() const { return box_; }
  const Stencil& free() const { return free_; }

  std::vector<double> delta() const {
    std::vector<double> v(box_.size(), 0.0);
    v[box_.origin()] = 1.0;
    return v;
  }

  void step_free(const std::vector<double>& cur, std::vector<double>& next) const {
    free_.apply(cur, next);
  }

  void step_perturbed(const std::vector<double>& cur, std::vector<double>& next) const {
    const double o = cur[box_.origin()];
    free_.apply(cur, next);
    if (o == 0.0) return;
    for (const auto& [off, w] : origin_taps_)
      next[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(box_.origin()) + off)] += w * o;
  }

  MassField wrap(std::vector<double> values, int time, double leaked) const {
    return MassField{box_.dim(), box_.radius(), time, std::move(values), leaked};
  }

 private:
  Box box_;
  Stencil free_;
  std::vector<std::pair<std::ptrdiff_t, double>> origin_taps_;
  double outside_weight_ = 0.0;
};

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

int resolve_radius(const ValidatedSpec& spec, int n, int radius, bool strict) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "number of steps must be ≥ 0");
  const int exact = exact_radius(spec, n);
  if (radius <= 0) return exact;
  if (strict && radius < exact)
    throw Error(ErrorCode::BoxTooSmall, "radius " + std::to_string(radius) + " < " +
                                            std::to_string(exact) + " needed for " +
                                            std::to_string(n) + " exact steps");
  return radius;
}

}  // namespace

int exact_radius(const ValidatedSpec& spec, int n) { return std::max(1, n * spec.max_radius()); }

MassField evolve_free(const ValidatedSpec& spec, int n, int radius, bool strict) {
  Engine eng(spec, resolve_radius(spec, n, radius, strict));
  auto cur = eng.delta();
  std::vector<double> next(cur.size());
  double leaked = 0.0;
  for (int t = 0; t < n; ++t) {
    const double before = sum(cur);
    eng.step_free(cur, next);
    leaked += before - sum(next);
    cur.swap(next);
  }
  return eng.wrap(std::move(cur), n, std::max(0.0, leaked));
}

MassField evolve_perturbed(const ValidatedSpec& spec, int n, int radius, bool strict) {
  Engine eng(spec, resolve_radius(spec, n, radius, strict));
  auto cur = eng.delta();
  std::vector<double> next(cur.size());
  double leaked = 0.0;
  for (int t = 0; t < n; ++t) {
    const double before = sum(cur);
    eng.step_perturbed(cur, next);
    leaked += before - sum(next);
    cur.swap(next);
  }
  return eng.wrap(std::move(cur), n, std::max(0.0, leaked));
}

TabooField evolve_taboo(const ValidatedSpec& spec, int n, int radius, bool use_free, bool strict) {
  Engine eng(spec, resolve_radius(spec, n, radius, strict));
  const std::size_t origin = eng.box().origin();
  auto cur = eng.delta();
  std::vector<double> next(cur.size());
  TabooField out;
  out.first_returns.assign(static_cast<std::size_t>(n) + 1, 0.0);
  double leaked = 0.0;
  for (int t = 1; t <= n; ++t) {
    const double before = sum(cur);
    // only the first step starts from the origin, so the perturbed step differs from the free one only there
    if (t == 1 && !use_free)
      eng.step_perturbed(cur, next);
    else
      eng.step_free(cur, next);
    leaked += before - sum(next);
    out.first_returns[t] = next[origin];
    next[origin] = 0.0;
    cur.swap(next);
  }
  out.first_return = n > 0 ? out.first_returns[n] : 0.0;
  out.field = eng.wrap(std::move(cur), n, std::max(0.0, leaked));
  return out;
}

ReturnSequence return_sequence(const ValidatedSpec& spec, int horizon) {
  if (horizon < 0) throw Error(ErrorCode::InvalidArgument, "horizon must be ≥ 0");
  // mass farther than ⌈N/2⌉·r cannot come back by time N
  const int radius = std::max(1, ((horizon + 1) / 2) * std::max(1, spec.free().radius()));
  Engine eng(spec, radius);
  ReturnSequence seq;
  seq.values.reserve(static_cast<std::size_t>(horizon) + 1);
  auto cur = eng.delta();
  std::vector<double> next(cur.size());
  seq.values.push_back(1.0);
  for (int t = 1; t <= horizon; ++t) {
    eng.step_free(cur, next);
    cur.swap(next);
    seq.values.push_back(cur[eng.box().origin()]);
  }
  return seq;
}

ReturnSequence perturbed_return_sequence(const ValidatedSpec& spec, int horizon) {
  if (horizon < 0) throw Error(ErrorCode::InvalidArgument, "horizon must be ≥ 0");
  const int radius = std::max(1, ((horizon + 1) / 2) * spec.max_radius());
  Engine eng(spec, radius);
  ReturnSequence seq;
  auto cur = eng.delta();
  std::vector<double> next(cur.size());
  seq.values.push_back(1.0);
  for (int t = 1; t <= horizon; ++t) {
    eng.step_perturbed(cur, next);
    cur.swap(next);
    seq.values.push_back(cur[eng.box().origin()]);
  }
  return seq;
}

MassField rho(const ValidatedSpec& spec, int n, int radius) {
  MassField free = evolve_free(spec, n, radius);
  const TabooField taboo = evolve_taboo(spec, n, free.radius, true);
  for (std::size_t i = 0; i < free.values.size(); ++i) free.values[i] -= taboo.field.values[i];
  return free;
}

MassField rho_direct(const ValidatedSpec& spec, int n, int radius) {
  if (n > kRhoDirectCap)
    throw Error(ErrorCode::CapExceeded, "direct ρ evaluator is capped at n = " + std::to_string(kRhoDirectCap));
  Engine eng(spec, resolve_radius(spec, n, radius, true));
  const ReturnSequence p = return_sequence(spec, n);

  // chain[m] = Σ over ordered chains of intermediate origin visits spanning m steps,
  // (−1)^{p+1} Π P_{gap}(0,0): chain[m] = p_m − Σ_{j<m} p_j·chain[m−j]
  std::vector<double> chain(static_cast<std::size_t>(n) + 1, 0.0);
  for (int m = 1; m <= n; ++m) {
    double c = p[m];
    for (int j = 1; j < m; ++j) c -= p[j] * chain[m - j];
    chain[m] = c;
  }

  auto cur = eng.delta();
  std::vector<double> next(cur.size());
  std::vector<double> acc(cur.size(), 0.0);
  for (int k = 1; k <= n; ++k) {
    eng.step_free(cur, next);
    cur.swap(next);
    if (k == n) break;
    const double weight = chain[n - k];
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weight * cur[i];
  }
  // the alternating sum is stated off the origin; report P_n(0,0) − P⁰_n(0,0) = P_n(0,0) there
  acc[eng.box().origin()] = cur[eng.box().origin()];
  if (n == 0) acc[eng.box().origin()] = 1.0;
  return eng.wrap(std::move(acc), n, 0.0);
}

void write_csv(std::ostream& os, const MassField& field, const ValidatedSpec& spec) {
  os << "# dim=" << field.dim << "\n# n=" << field.time << "\n# R=" << field.radius
     << "\n# kernel=" << spec.hash_hex() << "\n";
  for (int i = 1; i <= field.dim; ++i) os << "x_" << i << ",";
  os << "value\n";
  const Box box = field.box();
  for (std::size_t idx = 0; idx < field.values.size(); ++idx) {
    const LatticeVector x = box.site(idx);
    for (int c : x.coords()) os << c << ",";
    os << format_double(field.values[idx]) << "\n";
  }
}

}  // namespace pwl
