#include "pwl/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "pwl/error.hpp"

namespace pwl {

LatticeVector LatticeVector::unit(int dim, int axis, int sign) {
  LatticeVector v = zero(dim);
  v.coords_[axis] = sign;
  return v;
}

LatticeVector LatticeVector::operator-() const {
  LatticeVector v = *this;
  for (int& c : v.coords_) c = -c;
  return v;
}

bool LatticeVector::is_zero() const noexcept {
  return std::all_of(coords_.begin(), coords_.end(), [](int c) { return c == 0; });
}

int LatticeVector::sup_norm() const noexcept {
  int r = 0;
  for (int c : coords_) r = std::max(r, std::abs(c));
  return r;
}

double LatticeVector::norm() const noexcept {
  double s = 0.0;
  for (int c : coords_) s += static_cast<double>(c) * c;
  return std::sqrt(s);
}

SignedKernel SignedKernel::from_entries(int dim, std::vector<Entry> entries) {
  if (dim < 1) throw Error(ErrorCode::DimensionMismatch, "dimension must be at least 1");
  SignedKernel k(dim);
  for (auto& e : entries) {
    if (e.u.dim() != dim)
      throw Error(ErrorCode::DimensionMismatch,
                  "step of length " + std::to_string(e.u.dim()) + " in a dimension-" +
                      std::to_string(dim) + " kernel");
    if (!std::isfinite(e.w)) throw Error(ErrorCode::InvalidArgument, "non-finite kernel weight");
    if (e.w != 0.0) k.entries_.push_back(std::move(e));
  }
  std::sort(k.entries_.begin(), k.entries_.end(),
            [](const Entry& a, const Entry& b) { return a.u < b.u; });
  auto dup = std::adjacent_find(k.entries_.begin(), k.entries_.end(),
                                [](const Entry& a, const Entry& b) { return a.u == b.u; });
  if (dup != k.entries_.end())
    throw Error(ErrorCode::InvalidArgument, "duplicate support vector in kernel");
  return k;
}

double SignedKernel::weight(const LatticeVector& u) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), u,
                             [](const Entry& e, const LatticeVector& v) { return e.u < v; });
  return (it != entries_.end() && it->u == u) ? it->w : 0.0;
}

double SignedKernel::total() const noexcept {
  double s = 0.0;
  for (const auto& e : entries_) s += e.w;
  return s;
}

int SignedKernel::radius() const noexcept {
  int r = 0;
  for (const auto& e : entries_) r = std::max(r, e.u.sup_norm());
  return r;
}

SignedKernel SignedKernel::scaled(double factor) const {
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back({e.u, e.w * factor});
  return from_entries(dim_, std::move(out));
}

SignedKernel SignedKernel::plus(const SignedKernel& other, double factor) const {
  if (other.dim_ != dim_ && !other.empty())
    throw Error(ErrorCode::DimensionMismatch, "adding kernels of different dimensions");
  std::vector<Entry> out;
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() || b != other.entries_.end()) {
    if (b == other.entries_.end() || (a != entries_.end() && a->u < b->u)) {
      out.push_back(*a++);
    } else if (a == entries_.end() || b->u < a->u) {
      out.push_back({b->u, factor * b->w});
      ++b;
    } else {
      out.push_back({a->u, a->w + factor * b->w});
      ++a;
      ++b;
    }
  }
  return from_entries(dim_, std::move(out));
}

}  // namespace pwl
