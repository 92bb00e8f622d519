#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "pwl/kernels.hpp"

namespace pwl {

/// Dense centered box [−R, R]^ν, row-major with the last axis contiguous.
class Box {
 public:
  Box(int dim, int radius);

  int dim() const noexcept { return dim_; }
  int radius() const noexcept { return radius_; }
  int extent() const noexcept { return 2 * radius_ + 1; }
  std::size_t size() const noexcept { return size_; }
  std::ptrdiff_t stride(int axis) const { return strides_[axis]; }
  std::size_t origin() const noexcept { return origin_; }

  bool contains(std::span<const int> x) const noexcept;
  std::size_t index(std::span<const int> x) const;
  std::ptrdiff_t offset(std::span<const int> u) const;
  LatticeVector site(std::size_t index) const;

 private:
  int dim_;
  int radius_;
  std::size_t size_;
  std::size_t origin_;
  std::vector<std::ptrdiff_t> strides_;
};

/// Discrete convolution with a finite signed kernel on a Box:
/// out(x) = Σ_u w(u)·in(x − u), with sites outside the box treated as zero.
class Stencil {
 public:
  Stencil(const Box& box, const SignedKernel& kernel);

  void apply(std::span<const double> in, std::span<double> out) const;
  void apply_add(std::span<const double> in, std::span<double> out, double scale = 1.0) const;

 private:
  struct Tap {
    std::vector<int> shift;
    std::ptrdiff_t offset;
    double weight;
  };
  void accumulate_rows(int row_begin, int row_end, std::span<const double> in,
                       std::span<double> out, double scale) const;

  const Box* box_;
  std::vector<Tap> taps_;
};

/// Probability (or signed) mass over a box at a fixed time.
struct MassField {
  int dim = 0;
  int radius = 0;
  int time = 0;
  std::vector<double> values;
  /// Mass that left the box during evolution (0 when the box is exact).
  double leaked = 0.0;

  Box box() const { return Box(dim, radius); }
  double at(const LatticeVector& x) const;
  double total() const;
};

/// Taboo field with the origin removed; the mass arriving at the origin at the
/// final time is the first-return mass. first_returns[k] holds f_k for k = 1..n.
struct TabooField {
  MassField field;
  double first_return = 0.0;
  std::vector<double> first_returns;
};

/// p_0..p_N with p_n = P_n(0,0).
struct ReturnSequence {
  std::vector<double> values;

  double operator[](std::size_t n) const { return values[n]; }
  std::size_t horizon() const noexcept { return values.empty() ? 0 : values.size() - 1; }
};

/// Radius for which n steps of the walk never leave the box.
int exact_radius(const ValidatedSpec& spec, int n);

// All evolutions throw BoxTooSmall when strict and radius < exact_radius(spec, n).
// A radius ≤ 0 selects exact_radius.
MassField evolve_free(const ValidatedSpec& spec, int n, int radius = 0, bool strict = true);
MassField evolve_perturbed(const ValidatedSpec& spec, int n, int radius = 0, bool strict = true);
TabooField evolve_taboo(const ValidatedSpec& spec, int n, int radius = 0, bool use_free = true,
                        bool strict = true);

ReturnSequence return_sequence(const ValidatedSpec& spec, int horizon);
/// Π_n(0,0) for n = 0..N.
ReturnSequence perturbed_return_sequence(const ValidatedSpec& spec, int horizon);

/// ρ_n = P_n(0,·) − P⁰_n(0,·). At the origin this is P_n(0,0).
MassField rho(const ValidatedSpec& spec, int n, int radius = 0);

/// ρ_n evaluated from the alternating chain sum over intermediate origin visits,
/// using only free return probabilities and free fields. Throws CapExceeded for
/// n > kRhoDirectCap. The origin entry is copied from rho().
inline constexpr int kRhoDirectCap = 64;
MassField rho_direct(const ValidatedSpec& spec, int n, int radius = 0);

/// CSV: '#' metadata lines (dim, n, R, kernel), header x_1..x_ν,value, one row per site.
void write_csv(std::ostream& os, const MassField& field, const ValidatedSpec& spec);

}  // namespace pwl
