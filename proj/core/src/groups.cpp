#include "ncerg/groups.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace ncerg::groups {
namespace {

Code unit(int i, std::int64_t sign = 1) {
  Code c;
  c[static_cast<std::size_t>(i)] = sign;
  return c;
}

std::int64_t reduce(std::int64_t v, std::int64_t m) {
  const std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

// Least-squares slope of ys against xs.
double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx == 0.0 ? 0.0 : sxy / sxx;
}

}  // namespace

GroupModel::GroupModel(GroupKind kind, int rank, std::int64_t modulus,
                       std::vector<Code> generators)
    : kind_(kind), rank_(rank), modulus_(modulus), generators_(std::move(generators)) {}

GroupModel GroupModel::integer_lattice(int d) {
  if (d < 1 || d > kMaxRank) throw DomainError("lattice rank must lie in [1, 6]");
  std::vector<Code> gens;
  for (int i = 0; i < d; ++i) {
    gens.push_back(unit(i, 1));
    gens.push_back(unit(i, -1));
  }
  return GroupModel(GroupKind::kIntegerLattice, d, 0, std::move(gens));
}

GroupModel GroupModel::heisenberg(bool with_center) {
  std::vector<Code> gens = {unit(0, 1), unit(0, -1), unit(1, 1), unit(1, -1)};
  if (with_center) {
    gens.push_back(unit(2, 1));
    gens.push_back(unit(2, -1));
  }
  return GroupModel(GroupKind::kHeisenberg, 3, 0, std::move(gens));
}

GroupModel GroupModel::cyclic_product(std::int64_t modulus, int d) {
  if (modulus < 1) throw DomainError("cyclic modulus must be positive");
  if (d < 1 || d > kMaxRank) throw DomainError("cyclic rank must lie in [1, 6]");
  std::vector<Code> gens;
  for (int i = 0; i < d; ++i) {
    gens.push_back(unit(i, reduce(1, modulus)));
    gens.push_back(unit(i, reduce(-1, modulus)));
  }
  std::sort(gens.begin(), gens.end());
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
  return GroupModel(GroupKind::kCyclicProduct, d, modulus, std::move(gens));
}

GroupModel GroupModel::locally_finite(int levels) {
  if (levels < 1 || levels > 62) throw DomainError("locally finite model supports 1..62 levels");
  std::vector<Code> gens;
  for (int i = 0; i < levels; ++i) {
    Code c;
    c[0] = std::int64_t{1} << i;
    gens.push_back(c);
  }
  return GroupModel(GroupKind::kLocallyFinite, 1, 2, std::move(gens));
}

GroupModel GroupModel::with_generators(std::vector<Code> generators) const {
  std::unordered_set<Code, CodeHash> set(generators.begin(), generators.end());
  for (const Code& g : generators) {
    if (!set.contains(inverse(g))) {
      throw DomainError("generating set must be symmetric: missing inverse of " + format(g));
    }
  }
  GroupModel copy = *this;
  copy.generators_ = std::move(generators);
  return copy;
}

std::string GroupModel::name() const {
  switch (kind_) {
    case GroupKind::kIntegerLattice:
      return rank_ == 1 ? "Z" : "Z^" + std::to_string(rank_);
    case GroupKind::kHeisenberg:
      return "heisenberg";
    case GroupKind::kCyclicProduct:
      return "cyclic:" + std::to_string(modulus_) + "^" + std::to_string(rank_);
    case GroupKind::kLocallyFinite:
      return "locfin";
  }
  return "?";
}

Code GroupModel::multiply(const Code& g, const Code& h) const {
  Code r;
  switch (kind_) {
    case GroupKind::kIntegerLattice:
      for (int i = 0; i < rank_; ++i) r[i] = g[i] + h[i];
      break;
    case GroupKind::kHeisenberg:
      // [[1,a,c],[0,1,b],[0,0,1]] · [[1,a',c'],[0,1,b'],[0,0,1]]
      r[0] = g[0] + h[0];
      r[1] = g[1] + h[1];
      r[2] = g[2] + h[2] + g[0] * h[1];
      break;
    case GroupKind::kCyclicProduct:
      for (int i = 0; i < rank_; ++i) r[i] = reduce(g[i] + h[i], modulus_);
      break;
    case GroupKind::kLocallyFinite:
      r[0] = g[0] ^ h[0];
      break;
  }
  return r;
}

Code GroupModel::inverse(const Code& g) const {
  Code r;
  switch (kind_) {
    case GroupKind::kIntegerLattice:
      for (int i = 0; i < rank_; ++i) r[i] = -g[i];
      break;
    case GroupKind::kHeisenberg:
      r[0] = -g[0];
      r[1] = -g[1];
      r[2] = g[0] * g[1] - g[2];
      break;
    case GroupKind::kCyclicProduct:
      for (int i = 0; i < rank_; ++i) r[i] = reduce(-g[i], modulus_);
      break;
    case GroupKind::kLocallyFinite:
      r = g;
      break;
  }
  return r;
}

Code GroupModel::power(const Code& g, std::int64_t k) const {
  Code base = k < 0 ? inverse(g) : g;
  std::uint64_t e = k < 0 ? static_cast<std::uint64_t>(-k) : static_cast<std::uint64_t>(k);
  Code result = identity();
  while (e > 0) {
    if (e & 1u) result = multiply(result, base);
    base = multiply(base, base);
    e >>= 1u;
  }
  return result;
}

Code GroupModel::make(std::initializer_list<std::int64_t> coords) const {
  Code c;
  std::size_t i = 0;
  for (std::int64_t v : coords) {
    if (i >= kMaxRank) throw StructuralError("too many coordinates");
    c[i++] = kind_ == GroupKind::kCyclicProduct ? reduce(v, modulus_) : v;
  }
  return c;
}

std::string GroupModel::format(const Code& g) const {
  std::ostringstream out;
  if (kind_ == GroupKind::kLocallyFinite) {
    out << "0x" << std::hex << g[0];
    return out.str();
  }
  out << '(';
  for (int i = 0; i < rank_; ++i) out << (i ? " " : "") << g[i];
  out << ')';
  return out.str();
}

// ---------------------------------------------------------------------------
// Balls

int Ball::length(const Code& g) const {
  const auto it = index.find(g);
  return it == index.end() ? -1 : lengths[it->second];
}

std::vector<Code> Ball::boundary() const {
  std::vector<Code> out;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (lengths[i] == radius) out.push_back(elements[i]);
  }
  return out;
}

std::size_t Ball::size_at(int r) const {
  // Breadth-first order: lengths are non-decreasing.
  return static_cast<std::size_t>(
      std::upper_bound(lengths.begin(), lengths.end(), r) - lengths.begin());
}

std::vector<int> Ball::geodesic(std::size_t i) const {
  std::vector<int> word;
  while (i != 0) {
    word.push_back(parent_generator[i]);
    i = parent[i];
  }
  std::reverse(word.begin(), word.end());
  return word;
}

Ball ball(const GroupModel& group, int n, std::size_t cap) {
  if (n < 0) throw DomainError("ball radius must be non-negative");
  Ball b;
  b.radius = n;
  b.elements.push_back(group.identity());
  b.lengths.push_back(0);
  b.parent.push_back(0);
  b.parent_generator.push_back(-1);
  b.index.emplace(group.identity(), 0);
  std::size_t layer_begin = 0;
  const auto& gens = group.generators();
  for (int r = 1; r <= n; ++r) {
    const std::size_t layer_end = b.elements.size();
    for (std::size_t i = layer_begin; i < layer_end; ++i) {
      for (std::size_t j = 0; j < gens.size(); ++j) {
        const Code h = group.multiply(b.elements[i], gens[j]);
        if (b.index.contains(h)) continue;
        if (b.elements.size() >= cap) {
          throw CapExceeded("ball of radius " + std::to_string(n) + " in " + group.name() +
                            " exceeds the element cap " + std::to_string(cap));
        }
        b.index.emplace(h, b.elements.size());
        b.elements.push_back(h);
        b.lengths.push_back(r);
        b.parent.push_back(i);
        b.parent_generator.push_back(static_cast<int>(j));
      }
    }
    layer_begin = layer_end;
    if (layer_begin == b.elements.size()) break;  // finite group exhausted
  }
  return b;
}

std::vector<Code> product_set_power(const GroupModel& group, int n, std::size_t cap) {
  if (n < 0) throw DomainError("power must be non-negative");
  std::unordered_set<Code, CodeHash> current{group.identity()};
  for (int r = 0; r < n; ++r) {
    std::unordered_set<Code, CodeHash> next;
    for (const Code& g : current) {
      for (const Code& v : group.generators()) {
        next.insert(group.multiply(g, v));
        if (next.size() > cap) throw CapExceeded("product set exceeds the element cap");
      }
    }
    current = std::move(next);
  }
  std::vector<Code> out(current.begin(), current.end());
  std::sort(out.begin(), out.end());
  return out;
}

Rational folner_ratio(const GroupModel& group, std::span<const Code> set, const Code& g) {
  if (set.empty()) throw DomainError("folner_ratio requires a non-empty set");
  std::unordered_set<Code, CodeHash> base(set.begin(), set.end());
  std::unordered_set<Code, CodeHash> shifted;
  for (const Code& f : base) shifted.insert(group.multiply(f, g));
  std::int64_t diff = 0;
  for (const Code& f : base) diff += shifted.contains(f) ? 0 : 1;
  for (const Code& f : shifted) diff += base.contains(f) ? 0 : 1;
  return Rational(diff, static_cast<std::int64_t>(base.size()));
}

GrowthFit growth_exponent(const GroupModel& group, int n_max, std::size_t cap) {
  if (n_max < 4) throw DomainError("growth_exponent requires n_max >= 4");
  const Ball b = ball(group, n_max, cap);
  GrowthFit fit;
  for (int r = 0; r <= n_max; ++r) fit.sizes.push_back(b.size_at(r));
  std::vector<double> xs;
  std::vector<double> ys;
  for (int r = n_max / 2; r <= n_max; ++r) {
    xs.push_back(std::log(static_cast<double>(r)));
    ys.push_back(std::log(static_cast<double>(fit.sizes[static_cast<std::size_t>(r)])));
  }
  if (fit.sizes[static_cast<std::size_t>(n_max / 2)] == fit.sizes.back()) {
    fit.degenerate = true;
    fit.exponent = 0.0;
    return fit;
  }
  fit.exponent = slope(xs, ys);
  return fit;
}

AnnulusFit annulus_decay(const GroupModel& group, int n_max, std::size_t cap) {
  if (n_max < 3) throw DomainError("annulus_decay requires n_max >= 3");
  const Ball b = ball(group, n_max, cap);
  AnnulusFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (int r = 1; r < n_max; ++r) {
    const double inner = static_cast<double>(b.size_at(r));
    const double shell = static_cast<double>(b.size_at(r + 1)) - inner;
    fit.ratios.push_back(shell / inner);
    if (shell > 0.0) {
      xs.push_back(std::log(static_cast<double>(r)));
      ys.push_back(std::log(shell / inner));
    }
  }
  if (xs.size() >= 2) {
    fit.delta = -slope(xs, ys);
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    fit.constant = std::exp(my + fit.delta * mx);
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Heisenberg structure

HeisenbergNormalForm heisenberg_normal_form(const Code& g) {
  // x^a y^b = (a, b, ab) in matrix coordinates, so the central exponent is the
  // corner entry minus ab.
  return {g[0], g[1], g[2] - g[0] * g[1]};
}

Code evaluate_normal_form(const GroupModel& heisenberg, const HeisenbergNormalForm& nf) {
  if (heisenberg.kind() != GroupKind::kHeisenberg) {
    throw StructuralError("normal forms are defined on the Heisenberg model");
  }
  const Code x = heisenberg.make({1, 0, 0});
  const Code y = heisenberg.make({0, 1, 0});
  const Code z = heisenberg.make({0, 0, 1});
  return heisenberg.multiply(heisenberg.multiply(heisenberg.power(x, nf.a), heisenberg.power(y, nf.b)),
                             heisenberg.power(z, nf.c));
}

BassBounds verify_bass_bounds(const GroupModel& group, int n, std::size_t cap) {
  if (n < 1) throw DomainError("verify_bass_bounds requires n >= 1");
  const Ball b = ball(group, n, cap);
  BassBounds out;
  for (const Code& g : b.elements) {
    if (group.kind() == GroupKind::kHeisenberg) {
      const auto nf = heisenberg_normal_form(g);
      out.max_a = std::max(out.max_a, std::abs(nf.a));
      out.max_b = std::max(out.max_b, std::abs(nf.b));
      out.max_c = std::max(out.max_c, std::abs(nf.c));
    } else {
      for (int i = 0; i < group.rank(); ++i) out.max_a = std::max(out.max_a, std::abs(g[i]));
    }
  }
  const double nn = static_cast<double>(n);
  out.c_ab = static_cast<double>(std::max(out.max_a, out.max_b)) / nn;
  out.c_z = static_cast<double>(out.max_c) / (nn * nn);
  return out;
}

std::vector<Code> locally_finite_chain(int n, std::size_t cap) {
  if (n < 0 || n > 62) throw DomainError("chain level must lie in [0, 62]");
  const std::uint64_t size = std::uint64_t{1} << n;
  if (size > cap) throw CapExceeded("subgroup G_" + std::to_string(n) + " exceeds the element cap");
  std::vector<Code> out(size);
  for (std::uint64_t m = 0; m < size; ++m) out[m][0] = static_cast<std::int64_t>(m);
  return out;
}

int coset_word_constant(const GroupModel& group, std::span<const Code> representatives,
                        std::span<const Code> subgroup_generators,
                        const std::function<bool(const Code&)>& in_subgroup, int max_n,
                        std::size_t cap) {
  std::vector<Code> sym(subgroup_generators.begin(), subgroup_generators.end());
  for (const Code& t : subgroup_generators) sym.push_back(group.inverse(t));
  std::sort(sym.begin(), sym.end());
  sym.erase(std::unique(sym.begin(), sym.end()), sym.end());
  const Ball words = ball(group.with_generators(std::move(sym)), max_n, cap);

  int needed = 0;
  for (const Code& u1 : representatives) {
    for (const Code& u2 : representatives) {
      for (int e1 : {1, -1}) {
        for (int e2 : {1, -1}) {
          const Code w = group.multiply(group.power(u1, e1), group.power(u2, e2));
          int best = -1;
          for (const Code& u : representatives) {
            const Code t = group.multiply(group.inverse(u), w);
            if (!in_subgroup(t)) continue;
            const int len = words.length(t);
            if (len >= 0 && (best < 0 || len < best)) best = len;
          }
          if (best < 0) return -1;
          needed = std::max(needed, best);
        }
      }
    }
  }
  return needed;
}

}  // namespace ncerg::groups
