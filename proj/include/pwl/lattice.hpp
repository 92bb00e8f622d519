#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace pwl {

/// A point or step of Z^ν.
class LatticeVector {
 public:
  LatticeVector() = default;
  explicit LatticeVector(std::vector<int> coords) : coords_(std::move(coords)) {}
  LatticeVector(std::initializer_list<int> coords) : coords_(coords) {}

  static LatticeVector zero(int dim) { return LatticeVector(std::vector<int>(dim, 0)); }
  static LatticeVector unit(int dim, int axis, int sign = 1);

  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  int operator[](std::size_t i) const { return coords_[i]; }
  int& operator[](std::size_t i) { return coords_[i]; }
  std::span<const int> coords() const noexcept { return coords_; }

  LatticeVector operator-() const;
  bool is_zero() const noexcept;
  int sup_norm() const noexcept;
  double norm() const noexcept;
  std::vector<double> to_real() const { return {coords_.begin(), coords_.end()}; }

  friend auto operator<=>(const LatticeVector&, const LatticeVector&) = default;
  friend bool operator==(const LatticeVector&, const LatticeVector&) = default;

 private:
  std::vector<int> coords_;
};

/// Finite-support signed measure on Z^ν. Entries are sorted, distinct and nonzero.
class SignedKernel {
 public:
  struct Entry {
    LatticeVector u;
    double w;
  };

  SignedKernel() = default;
  explicit SignedKernel(int dim) : dim_(dim) {}

  /// Throws DimensionMismatch on a wrong-length vector and InvalidArgument on a
  /// duplicate vector or a non-finite weight. Zero weights are dropped.
  static SignedKernel from_entries(int dim, std::vector<Entry> entries);

  int dim() const noexcept { return dim_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  double weight(const LatticeVector& u) const;
  double total() const noexcept;
  int radius() const noexcept;

  SignedKernel scaled(double factor) const;
  /// this + factor·other, dropping entries that cancel to exactly zero.
  SignedKernel plus(const SignedKernel& other, double factor = 1.0) const;

 private:
  int dim_ = 0;
  std::vector<Entry> entries_;
};

}  // namespace pwl
