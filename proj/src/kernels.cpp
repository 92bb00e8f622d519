#include "pwl/kernels.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>

#include "json.hpp"

#include "pwl/error.hpp"

namespace pwl {
namespace {

constexpr double kSumTolerance = 1e-12;
constexpr double kParityTolerance = 1e-14;
constexpr double kNegativeTolerance = 1e-15;

void check_parity(const SignedKernel& k, int sign, ErrorCode code, const char* name) {
  for (const auto& e : k) {
    const double mirror = k.weight(-e.u);
    if (std::abs(e.w - sign * mirror) > kParityTolerance)
      throw Error(code, std::string(name) + " fails " + (sign > 0 ? "u ↦ −u symmetry" : "antisymmetry") +
                            " at a support vector");
  }
}

// A homomorphism Z^ν → Z/2 that is odd on every free step makes the walk bipartite.
bool is_bipartite(const SignedKernel& free) {
  const int dim = free.dim();
  if (dim > 20) return false;
  for (unsigned mask = 1; mask < (1u << dim); ++mask) {
    bool all_odd = true;
    for (const auto& e : free) {
      int parity = 0;
      for (int i = 0; i < dim; ++i)
        if (mask & (1u << i)) parity += e.u[i];
      if ((parity & 1) == 0) {
        all_odd = false;
        break;
      }
    }
    if (all_odd) return true;
  }
  return false;
}

// Breadth-first reachability on [−R, R]^ν. Forward uses the origin row at 0 and the
// free row elsewhere; backward follows the same edges reversed.
std::vector<char> reachable(const SignedKernel& free, const SignedKernel& origin_row, int radius,
                            bool backward) {
  const int dim = free.dim();
  const int extent = 2 * radius + 1;
  std::size_t size = 1;
  for (int i = 0; i < dim; ++i) size *= static_cast<std::size_t>(extent);

  auto encode = [&](const std::vector<int>& x) {
    std::size_t idx = 0;
    for (int i = 0; i < dim; ++i) idx = idx * extent + static_cast<std::size_t>(x[i] + radius);
    return idx;
  };
  auto inside = [&](const std::vector<int>& x) {
    for (int c : x)
      if (c < -radius || c > radius) return false;
    return true;
  };
  auto is_origin = [](const std::vector<int>& x) {
    for (int c : x)
      if (c != 0) return false;
    return true;
  };

  std::vector<char> seen(size, 0);
  std::queue<std::vector<int>> todo;
  std::vector<int> origin(dim, 0);
  seen[encode(origin)] = 1;
  todo.push(origin);
  while (!todo.empty()) {
    std::vector<int> x = todo.front();
    todo.pop();
    auto visit = [&](const std::vector<int>& y) {
      if (!inside(y)) return;
      const std::size_t idx = encode(y);
      if (!seen[idx]) {
        seen[idx] = 1;
        todo.push(y);
      }
    };
    if (!backward) {
      const SignedKernel& row = is_origin(x) ? origin_row : free;
      for (const auto& e : row) {
        if (e.w <= 0.0) continue;
        std::vector<int> y = x;
        for (int i = 0; i < dim; ++i) y[i] += e.u[i];
        visit(y);
      }
    } else {
      // predecessors y of x: y ≠ 0 with x − y ∈ supp P, or y = 0 with x ∈ supp(origin row)
      for (const auto& e : free) {
        std::vector<int> y = x;
        for (int i = 0; i < dim; ++i) y[i] -= e.u[i];
        if (!is_origin(y)) visit(y);
      }
      if (origin_row.weight(LatticeVector(x)) > 0.0) visit(origin);
    }
  }

  std::vector<char> units(2 * static_cast<std::size_t>(dim), 0);
  for (int i = 0; i < dim; ++i)
    for (int s = 0; s < 2; ++s) {
      std::vector<int> e(dim, 0);
      e[i] = s == 0 ? 1 : -1;
      units[2 * i + s] = seen[encode(e)];
    }
  return units;
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t digest(const WalkSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::int32_t dim = spec.free.dim();
  h = fnv1a(h, &dim, sizeof dim);
  for (const SignedKernel* k : {&spec.free, &spec.anti, &spec.sym}) {
    const std::uint64_t count = k->size();
    h = fnv1a(h, &count, sizeof count);
    for (const auto& e : *k) {
      for (int c : e.u.coords()) {
        const std::int32_t c32 = c;
        h = fnv1a(h, &c32, sizeof c32);
      }
      const auto bits = std::bit_cast<std::uint64_t>(e.w);
      h = fnv1a(h, &bits, sizeof bits);
    }
  }
  const auto eps = std::bit_cast<std::uint64_t>(spec.epsilon);
  return fnv1a(h, &eps, sizeof eps);
}

SignedKernel parse_kernel(const nlohmann::json& doc, const char* key, int dim) {
  std::vector<SignedKernel::Entry> entries;
  if (doc.contains(key)) {
    const auto& arr = doc.at(key);
    if (!arr.is_array()) throw Error(ErrorCode::Parse, std::string("\"") + key + "\" must be an array");
    for (const auto& item : arr) {
      if (!item.is_object() || !item.contains("u") || !item.contains("w"))
        throw Error(ErrorCode::Parse, std::string("entries of \"") + key + "\" need \"u\" and \"w\"");
      entries.push_back({LatticeVector(item.at("u").get<std::vector<int>>()), item.at("w").get<double>()});
    }
  }
  return SignedKernel::from_entries(dim, std::move(entries));
}

nlohmann::json kernel_json(const SignedKernel& k) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : k) {
    std::vector<int> u(e.u.coords().begin(), e.u.coords().end());
    arr.push_back({{"u", u}, {"w", e.w}});
  }
  return arr;
}

}  // namespace

ValidatedSpec::ValidatedSpec(WalkSpec spec) : spec_(std::move(spec)) {
  const int dim = spec_.free.dim();
  if (spec_.anti.dim() == 0) spec_.anti = SignedKernel(dim);
  if (spec_.sym.dim() == 0) spec_.sym = SignedKernel(dim);
  perturbation_ = spec_.anti.plus(spec_.sym, spec_.epsilon);
  origin_row_ = spec_.free.plus(perturbation_);
  max_radius_ = std::max({1, spec_.free.radius(), spec_.anti.radius(), spec_.sym.radius()});
  periodic_ = is_bipartite(spec_.free);
  hash_ = digest(spec_);
}

std::string ValidatedSpec::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
  return buf;
}

namespace testing {
ValidatedSpec unchecked(const WalkSpec& spec) { return ValidatedSpec(spec); }
}  // namespace testing

ValidatedSpec validate(const WalkSpec& spec) {
  const int dim = spec.free.dim();
  if (dim < 1) throw Error(ErrorCode::DimensionMismatch, "free kernel has no dimension");
  for (const SignedKernel* k : {&spec.anti, &spec.sym})
    if (k->dim() != 0 && k->dim() != dim)
      throw Error(ErrorCode::DimensionMismatch, "perturbation dimension differs from the free kernel");
  if (!std::isfinite(spec.epsilon) || spec.epsilon < 0.0)
    throw Error(ErrorCode::InvalidArgument, "epsilon must be finite and ≥ 0");

  for (const auto& e : spec.free)
    if (e.w < 0.0) throw Error(ErrorCode::NotAProbability, "negative free weight");
  if (std::abs(spec.free.total() - 1.0) > kSumTolerance)
    throw Error(ErrorCode::NotAProbability, "free weights do not sum to 1");
  check_parity(spec.free, +1, ErrorCode::NotSymmetric, "P");
  check_parity(spec.anti, -1, ErrorCode::NotAntisymmetric, "a");
  check_parity(spec.sym, +1, ErrorCode::NotSymmetric, "s");

  ValidatedSpec out(spec);
  for (const auto& e : out.origin_row())
    if (e.w < -kNegativeTolerance)
      throw Error(ErrorCode::NotAProbability, "origin row has a negative entry");
  if (std::abs(out.origin_row().total() - 1.0) > kSumTolerance)
    throw Error(ErrorCode::NotAProbability, "origin row does not sum to 1");

  const int box = 4 * out.max_radius();
  for (bool backward : {false, true}) {
    const auto units = reachable(out.free(), out.origin_row(), box, backward);
    for (char ok : units)
      if (!ok)
        throw Error(ErrorCode::Reducible, backward ? "origin not reachable from a unit neighbour"
                                                   : "a unit neighbour is not reachable from the origin");
  }
  return out;
}

MomentData moments(const ValidatedSpec& spec, int order) {
  if (order < 2) throw Error(ErrorCode::InvalidArgument, "moment order must be at least 2");
  const int dim = spec.dim();
  MomentData m;
  m.order = order;
  m.covariance = Eigen::MatrixXd::Zero(dim, dim);
  m.drift = Eigen::VectorXd::Zero(dim);
  for (const auto& e : spec.free())
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m.covariance(i, j) += e.u[i] * static_cast<double>(e.u[j]) * e.w;
  for (const auto& e : spec.anti())
    for (int i = 0; i < dim; ++i) m.drift(i) += e.u[i] * e.w;

  Eigen::LLT<Eigen::MatrixXd> llt(m.covariance);
  if (llt.info() != Eigen::Success || m.covariance.determinant() <= 1e-14)
    throw Error(ErrorCode::DegenerateCovariance, "covariance of P is not positive definite");
  m.covariance_inverse = llt.solve(Eigen::MatrixXd::Identity(dim, dim));
  m.covariance_det = m.covariance.determinant();

  // every multi-index with |k| ≤ order, in lexicographic order
  std::vector<int> k(dim, 0);
  while (true) {
    int degree = 0;
    for (int c : k) degree += c;
    if (degree <= order) {
      RawMoment rm{k, 0.0, 0.0};
      auto mono = [&](const LatticeVector& u) {
        double v = 1.0;
        for (int i = 0; i < dim; ++i) v *= std::pow(static_cast<double>(u[i]), k[i]);
        return v;
      };
      for (const auto& e : spec.free()) rm.free += mono(e.u) * e.w;
      for (const auto& e : spec.perturbation()) rm.perturbation += mono(e.u) * e.w;
      m.raw.push_back(std::move(rm));
    }
    int axis = dim - 1;
    while (axis >= 0 && k[axis] == order) k[axis--] = 0;
    if (axis < 0) break;
    ++k[axis];
  }
  return m;
}

WalkSpec parse_spec_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("dim") || !doc.contains("P"))
      throw Error(ErrorCode::Parse, "kernel spec needs \"dim\" and \"P\"");
    const int dim = doc.at("dim").get<int>();
    if (dim < 1) throw Error(ErrorCode::DimensionMismatch, "\"dim\" must be at least 1");
    WalkSpec spec;
    spec.free = parse_kernel(doc, "P", dim);
    spec.anti = parse_kernel(doc, "a", dim);
    spec.sym = parse_kernel(doc, "s", dim);
    spec.epsilon = doc.value("epsilon", 0.0);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
}

WalkSpec load_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec_json(buf.str());
}

std::string spec_to_json(const WalkSpec& spec) {
  nlohmann::json doc;
  doc["dim"] = spec.free.dim();
  doc["P"] = kernel_json(spec.free);
  doc["a"] = kernel_json(spec.anti);
  doc["s"] = kernel_json(spec.sym);
  doc["epsilon"] = spec.epsilon;
  return doc.dump(2);
}

}  // namespace pwl
