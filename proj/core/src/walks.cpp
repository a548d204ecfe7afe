#include "ncerg/walks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ncerg::walks {

using algebra::Element;

GaussianCheck gaussian_lower_check(const Density& f, int k, int radius_cap, std::size_t cap) {
  if (k < 1) throw DomainError("gaussian_lower_check requires k >= 1");
  if (radius_cap < 0) throw DomainError("radius cap must be non-negative");
  const auto power = convolution_power(f, k, cap);
  const int radius = std::min(k, radius_cap);
  const int root = static_cast<int>(std::floor(std::sqrt(static_cast<double>(k))));
  const groups::Ball b = groups::ball(f.group(), std::max(radius, root), cap);
  const double volume = static_cast<double>(b.size_at(root));

  GaussianCheck out;
  out.c_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b.lengths[i] > radius) break;
    const double dist = b.lengths[i];
    const double value = power.at(b.elements[i]) * volume * std::exp(dist * dist / k);
    ++out.points;
    if (value < out.c_min) {
      out.c_min = value;
      out.argmin = b.elements[i];
    }
  }
  return out;
}

MarkovDomination markov_domination_check(const ergodic::ActionModel& action, int n,
                                         const Element& x, std::size_t cap) {
  if (n < 1) throw DomainError("markov_domination_check requires n >= 1");
  if (!algebra::is_positive(x)) throw DomainError("markov_domination_check needs a positive x");
  const auto& group = action.group();

  const groups::Ball b = groups::ball(group, n, cap);
  Element lhs(action.algebra());
  for (const auto& g : b.elements) lhs += action.apply(g, x);
  lhs *= 1.0 / static_cast<double>(b.size());

  const auto dom = domination_constant<double>(group, n, cap);
  // Σ_{k ≤ 2n²} T^k x = 2n² Σ_g S(g) α_g x with S the Cesàro mean density.
  Element weighted(action.algebra());
  for (const auto& [g, s] : dom.cesaro.mass()) {
    Element term = action.apply(g, x);
    term *= s;
    weighted += term;
  }
  const double c = dom.c;
  MarkovDomination out{lhs, weighted * (2.0 * c), c, 0.0, 0.0, x.norm_inf()};
  out.margin = (out.rhs - lhs).hermitian_part().min_eigenvalue();
  out.tight_margin = (weighted * c - lhs).hermitian_part().min_eigenvalue();
  return out;
}

Element markov_power_sum(const ergodic::ActionModel& action, int terms, const Element& x) {
  std::vector<groups::Code> support = action.group().generators();
  support.push_back(action.group().identity());
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  const double w = 1.0 / static_cast<double>(support.size());
  Element y = x;
  Element sum(action.algebra());
  for (int k = 1; k <= terms; ++k) {
    Element next(action.algebra());
    for (const auto& g : support) next += action.apply(g, y);
    next *= w;
    y = std::move(next);
    sum += y;
  }
  return sum;
}

}  // namespace ncerg::walks
