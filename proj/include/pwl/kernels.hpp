#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pwl/lattice.hpp"

namespace pwl {

/// Raw kernel description: free step P, antisymmetric perturbation a,
/// symmetric perturbation s and its strength ε. The origin row is P + ε·s + a.
struct WalkSpec {
  SignedKernel free;
  SignedKernel anti;
  SignedKernel sym;
  double epsilon = 0.0;
};

class ValidatedSpec;
ValidatedSpec validate(const WalkSpec& spec);

namespace testing {
// Bypasses validation. Only for mutation tests of the verification suite.
ValidatedSpec unchecked(const WalkSpec& spec);
}  // namespace testing

/// A WalkSpec whose invariants have been checked. The only way to obtain one is
/// validate(), so every downstream operation can rely on them.
class ValidatedSpec {
 public:
  int dim() const noexcept { return spec_.free.dim(); }
  const SignedKernel& free() const noexcept { return spec_.free; }
  const SignedKernel& anti() const noexcept { return spec_.anti; }
  const SignedKernel& sym() const noexcept { return spec_.sym; }
  double epsilon() const noexcept { return spec_.epsilon; }
  const WalkSpec& raw() const noexcept { return spec_; }

  /// c = ε·s + a, the extra weight of the origin row.
  const SignedKernel& perturbation() const noexcept { return perturbation_; }
  /// P + c.
  const SignedKernel& origin_row() const noexcept { return origin_row_; }

  /// max |u|∞ over the union of supports (at least 1).
  int max_radius() const noexcept { return max_radius_; }
  /// True when the free walk lives on a bipartite sublattice (period 2).
  bool periodic() const noexcept { return periodic_; }
  bool has_symmetric_part() const noexcept { return epsilon() != 0.0 && !sym().empty(); }
  bool has_antisymmetric_part() const noexcept { return !anti().empty(); }

  /// Stable 64-bit FNV-1a digest of the canonical kernel content.
  std::uint64_t hash() const noexcept { return hash_; }
  std::string hash_hex() const;

 private:
  explicit ValidatedSpec(WalkSpec spec);

  friend ValidatedSpec validate(const WalkSpec&);
  friend ValidatedSpec testing::unchecked(const WalkSpec&);

  WalkSpec spec_;
  SignedKernel perturbation_;
  SignedKernel origin_row_;
  int max_radius_ = 1;
  bool periodic_ = false;
  std::uint64_t hash_ = 0;
};

struct RawMoment {
  std::vector<int> exponents;  // multi-index k, |k| ≤ L
  double free = 0.0;           // Σ u^k P(u)
  double perturbation = 0.0;   // Σ u^k c(u)
};

/// Covariance B of P, drift d = Σ u·a(u), and raw moments of P and c.
struct MomentData {
  Eigen::MatrixXd covariance;
  Eigen::VectorXd drift;
  Eigen::MatrixXd covariance_inverse;
  double covariance_det = 0.0;
  int order = 3;
  std::vector<RawMoment> raw;

  int dim() const noexcept { return static_cast<int>(drift.size()); }
};

/// Throws DegenerateCovariance if B is not positive definite.
MomentData moments(const ValidatedSpec& spec, int order = 3);

/// Kernel-spec JSON: {"dim": ν, "P": [{"u": [..], "w": ..}, ..], "a": [..], "s": [..], "epsilon": ..}.
WalkSpec parse_spec_json(std::string_view text);
WalkSpec load_spec_file(const std::filesystem::path& path);
std::string spec_to_json(const WalkSpec& spec);

}  // namespace pwl
