#include "pwl/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>
#include <unordered_map>

#include "pwl/error.hpp"
#include "pwl/exact_engine.hpp"
#include "pwl/format.hpp"
#include "pwl/parallel.hpp"

namespace pwl {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

AliasTable::AliasTable(const SignedKernel& kernel) {
  const std::size_t n = kernel.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "alias table over an empty kernel");
  std::vector<double> w;
  w.reserve(n);
  double total = 0.0;
  for (const auto& e : kernel) {
    w.push_back(std::max(0.0, e.w));
    total += w.back();
  }
  if (!(total > 0.0)) throw Error(ErrorCode::NotAProbability, "kernel has no positive mass");

  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = w[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    large.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (std::uint32_t i : large) prob_[i] = 1.0, alias_[i] = i;
  for (std::uint32_t i : small) prob_[i] = 1.0, alias_[i] = i;
}

std::size_t AliasTable::pick(double u) const noexcept {
  const double scaled = u * static_cast<double>(prob_.size());
  std::size_t i = static_cast<std::size_t>(scaled);
  if (i >= prob_.size()) i = prob_.size() - 1;
  return scaled - static_cast<double>(i) < prob_[i] ? i : alias_[i];
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix(seed ^ mix(stream * kGolden + 0x632be59bd9b4e019ULL))) {}

std::uint64_t CounterRng::next() noexcept { return mix(key_ + (++counter_) * kGolden); }

double EmpiricalField::estimate(const LatticeVector& x) const {
  if (samples == 0) return 0.0;
  auto it = counts.find(x);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(samples);
}

EmpiricalField sample(const ValidatedSpec& spec, int n, std::uint64_t samples, std::uint64_t seed) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "number of steps must be ≥ 0");
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  const int dim = spec.dim();
  const AliasTable free_table(spec.free());
  const AliasTable origin_table(spec.origin_row());
  auto steps = [dim](const SignedKernel& k) {
    std::vector<int> flat;
    for (const auto& e : k)
      for (int i = 0; i < dim; ++i) flat.push_back(e.u[i]);
    return flat;
  };
  const std::vector<int> free_steps = steps(spec.free());
  const std::vector<int> origin_steps = steps(spec.origin_row());

  const Box box(dim, std::max(1, n * spec.max_radius()));
  const bool dense = box.size() <= (std::size_t{1} << 22);

  std::vector<std::uint64_t> merged_dense(dense ? box.size() : 0, 0);
  std::unordered_map<std::size_t, std::uint64_t> merged_sparse;
  std::mutex merge;

  constexpr std::uint64_t kBlock = 4096;
  const std::uint64_t blocks = (samples + kBlock - 1) / kBlock;
  parallel_for(0, static_cast<int>(blocks), [&](int lo, int hi) {
    std::vector<std::uint64_t> local_dense(dense ? box.size() : 0, 0);
    std::unordered_map<std::size_t, std::uint64_t> local_sparse;
    std::vector<int> pos(dim);
    const std::uint64_t first = static_cast<std::uint64_t>(lo) * kBlock;
    const std::uint64_t last = std::min(samples, static_cast<std::uint64_t>(hi) * kBlock);
    for (std::uint64_t t = first; t < last; ++t) {
      CounterRng rng(seed, t);
      std::fill(pos.begin(), pos.end(), 0);
      for (int step = 0; step < n; ++step) {
        const bool at_origin = std::all_of(pos.begin(), pos.end(), [](int c) { return c == 0; });
        const std::size_t k = (at_origin ? origin_table : free_table).pick(rng.uniform());
        const int* u = (at_origin ? origin_steps : free_steps).data() + k * static_cast<std::size_t>(dim);
        for (int i = 0; i < dim; ++i) pos[i] += u[i];
      }
      const std::size_t idx = box.index(pos);
      if (dense)
        ++local_dense[idx];
      else
        ++local_sparse[idx];
    }
    std::lock_guard lock(merge);
    if (dense)
      for (std::size_t i = 0; i < local_dense.size(); ++i) merged_dense[i] += local_dense[i];
    else
      for (const auto& [idx, c] : local_sparse) merged_sparse[idx] += c;
  });

  EmpiricalField field{dim, n, samples, seed, {}};
  if (dense) {
    for (std::size_t i = 0; i < merged_dense.size(); ++i)
      if (merged_dense[i] != 0) field.counts.emplace(box.site(i), merged_dense[i]);
  } else {
    for (const auto& [idx, c] : merged_sparse) field.counts.emplace(box.site(idx), c);
  }
  return field;
}

std::vector<double> drift_estimate(const EmpiricalField& field) {
  if (field.samples == 0) throw Error(ErrorCode::InvalidArgument, "empty field");
  std::vector<double> mean(field.dim, 0.0);
  for (const auto& [x, c] : field.counts)
    for (int i = 0; i < field.dim; ++i) mean[i] += x[i] * static_cast<double>(c);
  for (double& m : mean) m /= static_cast<double>(field.samples);
  return mean;
}

void write_csv(std::ostream& os, const EmpiricalField& field, const ValidatedSpec& spec) {
  os << "# dim=" << field.dim << "\n# n=" << field.n << "\n# R=" << std::max(1, field.n * spec.max_radius())
     << "\n# kernel=" << spec.hash_hex() << "\n# samples=" << field.samples << "\n# seed=" << field.seed
     << "\n";
  for (int i = 1; i <= field.dim; ++i) os << "x_" << i << ",";
  os << "value,count,stderr\n";
  const double N = static_cast<double>(field.samples);
  for (const auto& [x, c] : field.counts) {
    const double p = static_cast<double>(c) / N;
    for (int v : x.coords()) os << v << ",";
    os << format_double(p) << ',' << c << ',' << format_double(std::sqrt(p * (1.0 - p) / N)) << '\n';
  }
}

}  // namespace pwl
