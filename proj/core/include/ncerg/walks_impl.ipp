#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <unordered_set>

namespace ncerg::walks {
namespace detail {

// Neumaier-compensated sum for doubles, plain sum for exact scalars.
template <class Scalar>
struct Accumulator {
  Scalar sum{};
  void add(const Scalar& v) { sum += v; }
  Scalar value() const { return sum; }
};

template <>
struct Accumulator<double> {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

template <class Scalar>
bool near(const Scalar& a, const Scalar& b) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return std::abs(a - b) <= 1e-12;
  } else {
    return a == b;
  }
}

}  // namespace detail

template <class Scalar>
BasicDensity<Scalar>::BasicDensity(groups::GroupModel group, groups::CodeMap<Scalar> mass)
    : group_(std::move(group)), mass_(std::move(mass)) {
  for (const auto& [g, m] : mass_) {
    if (m < Scalar(0)) throw DomainError("density masses must be non-negative");
  }
  if (!detail::near(total_mass(), Scalar(1))) throw DomainError("density must have total mass 1");
  if (!is_symmetric()) throw DomainError("density must be symmetric: f(g) = f(g⁻¹)");
}

template <class Scalar>
BasicDensity<Scalar> BasicDensity<Scalar>::point_mass(const groups::GroupModel& group,
                                                      const groups::Code& g) {
  groups::CodeMap<Scalar> m;
  m.emplace(g, Scalar(1));
  return BasicDensity(group, std::move(m));
}

template <class Scalar>
BasicDensity<Scalar> BasicDensity<Scalar>::uniform(const groups::GroupModel& group,
                                                   std::span<const groups::Code> support) {
  std::unordered_set<groups::Code, groups::CodeHash> set(support.begin(), support.end());
  if (set.empty()) throw DomainError("uniform density needs a non-empty support");
  groups::CodeMap<Scalar> m;
  const Scalar w = Scalar(1) / Scalar(static_cast<long long>(set.size()));
  for (const auto& g : set) m.emplace(g, w);
  return BasicDensity(group, std::move(m));
}

template <class Scalar>
Scalar BasicDensity<Scalar>::at(const groups::Code& g) const {
  const auto it = mass_.find(g);
  return it == mass_.end() ? Scalar(0) : it->second;
}

template <class Scalar>
Scalar BasicDensity<Scalar>::total_mass() const {
  detail::Accumulator<Scalar> acc;
  for (const auto& [g, m] : mass_) acc.add(m);
  return acc.value();
}

template <class Scalar>
bool BasicDensity<Scalar>::is_symmetric() const {
  for (const auto& [g, m] : mass_) {
    if (!detail::near(m, at(group_.inverse(g)))) return false;
  }
  return true;
}

template <class Scalar>
double BasicDensity<Scalar>::to_double(const groups::Code& g) const {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return at(g);
  } else {
    return static_cast<double>(at(g));
  }
}

template <class Scalar>
BasicDensity<Scalar> convolve(const BasicDensity<Scalar>& f, const BasicDensity<Scalar>& h,
                              std::size_t cap) {
  const auto& group = f.group();
  groups::CodeMap<detail::Accumulator<Scalar>> acc;
  acc.reserve(f.support_size() * 2);
  for (const auto& [a, fa] : f.mass()) {
    for (const auto& [b, hb] : h.mass()) {
      acc[group.multiply(a, b)].add(fa * hb);
      if (acc.size() > cap) {
        throw CapExceeded("convolution support exceeds the cap " + std::to_string(cap));
      }
    }
  }
  groups::CodeMap<Scalar> out;
  out.reserve(acc.size());
  for (const auto& [g, v] : acc) out.emplace(g, v.value());
  return BasicDensity<Scalar>(group, std::move(out), typename BasicDensity<Scalar>::Trusted{});
}

template <class Scalar>
BasicDensity<Scalar> convolution_power(const BasicDensity<Scalar>& f, int k, std::size_t cap) {
  if (k < 1) throw DomainError("convolution_power requires k >= 1");
  std::optional<BasicDensity<Scalar>> result;
  BasicDensity<Scalar> base = f;
  while (true) {
    if (k & 1) result = result ? convolve(*result, base, cap) : base;
    k >>= 1;
    if (k == 0) break;
    base = convolve(base, base, cap);
  }
  return *result;
}

template <class Scalar>
BasicDensity<Scalar> cesaro_mean(const BasicDensity<Scalar>& f, int terms, std::size_t cap) {
  if (terms < 1) throw DomainError("cesaro_mean needs at least one term");
  groups::CodeMap<detail::Accumulator<Scalar>> acc;
  BasicDensity<Scalar> power = f;
  for (int k = 1; k <= terms; ++k) {
    if (k > 1) power = convolve(power, f, cap);
    for (const auto& [g, m] : power.mass()) acc[g].add(m);
  }
  groups::CodeMap<Scalar> out;
  out.reserve(acc.size());
  const Scalar scale = Scalar(1) / Scalar(terms);
  for (const auto& [g, v] : acc) out.emplace(g, v.value() * scale);
  return BasicDensity<Scalar>(f.group(), std::move(out), typename BasicDensity<Scalar>::Trusted{});
}

template <class Scalar>
BasicDensity<Scalar> lazy_walk(const groups::GroupModel& group) {
  std::vector<groups::Code> support = group.generators();
  support.push_back(group.identity());
  return BasicDensity<Scalar>::uniform(group, support);
}

template <class Scalar>
DominationResult<Scalar> domination_constant(const groups::GroupModel& group, int n,
                                             std::size_t cap) {
  if (n < 1) throw DomainError("domination_constant requires n >= 1");
  const auto f = lazy_walk<Scalar>(group);
  const int terms = 2 * n * n;
  auto cesaro = cesaro_mean(f, terms, cap);
  // Word balls for V ∪ {e} coincide with those of V.
  const groups::Ball b = groups::ball(group, n, cap);
  const Scalar inv_volume = Scalar(1) / Scalar(static_cast<long long>(b.size()));
  DominationResult<Scalar> out{Scalar(0), group.identity(), b.size(), cesaro};
  bool first = true;
  for (const auto& g : b.elements) {
    const Scalar s = cesaro.at(g);
    if (s == Scalar(0)) throw DomainError("Cesàro sum vanishes inside the ball");
    const Scalar c = inv_volume / s;
    if (first || c > out.c) {
      out.c = c;
      out.argmax = g;
      first = false;
    }
  }
  return out;
}

}  // namespace ncerg::walks
