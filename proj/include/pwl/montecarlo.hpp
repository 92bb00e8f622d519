#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "pwl/kernels.hpp"

namespace pwl {

/// Walker's alias table over a finite kernel with nonnegative weights.
class AliasTable {
 public:
  explicit AliasTable(const SignedKernel& kernel);

  /// u ∈ [0, 1).
  std::size_t pick(double u) const noexcept;
  std::size_t size() const noexcept { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

/// Counter-based generator: draw i of trajectory t depends only on (seed, t, i),
/// so any sharding of trajectories reproduces the serial stream.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next() noexcept;
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct EmpiricalField {
  int dim = 0;
  int n = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::map<LatticeVector, std::uint64_t> counts;

  double estimate(const LatticeVector& x) const;
};

EmpiricalField sample(const ValidatedSpec& spec, int n, std::uint64_t samples, std::uint64_t seed);

/// Σ_x x·estimate(x).
std::vector<double> drift_estimate(const EmpiricalField& field);

/// MassField CSV schema plus count and stderr columns.
void write_csv(std::ostream& os, const EmpiricalField& field, const ValidatedSpec& spec);

}  // namespace pwl
