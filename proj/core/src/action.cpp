#include "ncerg/action.hpp"

#include <algorithm>
#include <cmath>

namespace ncerg::ergodic {

using algebra::Element;
using groups::Code;

ActionModel::ActionModel(ActionKind kind, groups::GroupModel group, algebra::AlgebraPtr algebra)
    : kind_(kind), group_(std::move(group)), algebra_(std::move(algebra)) {}

ActionModel ActionModel::trivial(groups::GroupModel group, algebra::AlgebraPtr algebra) {
  return ActionModel(ActionKind::kTrivial, std::move(group), std::move(algebra));
}

ActionModel ActionModel::permutation(groups::GroupModel group, algebra::AlgebraPtr algebra,
                                     SiteAction site_action) {
  ActionModel a(ActionKind::kPermutation, std::move(group), std::move(algebra));
  a.site_action_ = std::move(site_action);
  return a;
}

ActionModel ActionModel::conjugation(groups::GroupModel group, algebra::AlgebraPtr algebra,
                                     std::vector<Element> generator_unitaries) {
  if (generator_unitaries.size() != group.generators().size()) {
    throw StructuralError("one unitary per generator is required");
  }
  for (const Element& u : generator_unitaries) {
    const Element check = u.adjoint() * u;
    if (check.max_abs_diff(Element::identity(algebra)) > 1e-10) {
      throw DomainError("generator unitaries must be unitary");
    }
  }
  ActionModel a(ActionKind::kConjugation, std::move(group), std::move(algebra));
  a.generator_unitaries_ = std::move(generator_unitaries);
  a.unitaries_ = std::make_shared<UnitaryTable>();
  return a;
}

ActionModel ActionModel::product(groups::GroupModel group, algebra::AlgebraPtr algebra,
                                 SiteAction site_action, std::vector<Element> generator_unitaries) {
  ActionModel a = conjugation(std::move(group), std::move(algebra), std::move(generator_unitaries));
  for (const Element& u : a.generator_unitaries_) {
    for (std::size_t s = 1; s < u.sites(); ++s) {
      if (u.block(s).rows() != u.block(0).rows() ||
          (u.block(s) - u.block(0)).cwiseAbs().maxCoeff() > 1e-12) {
        throw DomainError("product actions need site-constant unitaries");
      }
    }
  }
  a.kind_ = ActionKind::kProduct;
  a.site_action_ = std::move(site_action);
  return a;
}

ActionModel ActionModel::cyclic_shift(std::size_t m, int dim) {
  if (m == 0) throw DomainError("cyclic shift needs at least one site");
  const auto mm = static_cast<std::int64_t>(m);
  return permutation(groups::GroupModel::integer_lattice(1), algebra::TracialAlgebra::uniform(m, dim),
                     [mm](const Code& g, std::size_t s) {
                       std::int64_t t = (static_cast<std::int64_t>(s) + g[0]) % mm;
                       if (t < 0) t += mm;
                       return static_cast<std::size_t>(t);
                     });
}

ActionModel ActionModel::unitary_conjugation(const algebra::Matrix& u) {
  auto alg = algebra::TracialAlgebra::create({1.0}, {static_cast<int>(u.rows())});
  const Element forward = Element::from_blocks(alg, {u});
  return conjugation(groups::GroupModel::integer_lattice(1), alg, {forward, forward.adjoint()});
}

ActionModel ActionModel::heisenberg_affine(std::int64_t q, bool with_center) {
  if (q < 2) throw DomainError("affine Heisenberg model needs q >= 2");
  const auto group = groups::GroupModel::heisenberg(with_center);
  const auto sites = static_cast<std::size_t>(q * q * q);
  auto site_action = [group, q](const Code& g, std::size_t s) {
    const auto si = static_cast<std::int64_t>(s);
    const Code h = group.make({si % q, (si / q) % q, si / (q * q)});
    const Code r = group.multiply(g, h);
    auto red = [q](std::int64_t v) { return ((v % q) + q) % q; };
    return static_cast<std::size_t>(red(r[0]) + q * red(r[1]) + q * q * red(r[2]));
  };
  return permutation(group, algebra::TracialAlgebra::uniform(sites, 1), std::move(site_action));
}

ActionModel ActionModel::flip_chain(int levels) {
  if (levels < 0 || levels > 20) throw DomainError("flip chain supports 0..20 levels");
  const std::size_t sites = std::size_t{1} << levels;
  const auto mask = static_cast<std::int64_t>(sites - 1);
  return permutation(groups::GroupModel::locally_finite(std::max(levels, 1)),
                     algebra::TracialAlgebra::uniform(sites, 1),
                     [mask](const Code& g, std::size_t s) {
                       return static_cast<std::size_t>(static_cast<std::int64_t>(s) ^ (g[0] & mask));
                     });
}

Element ActionModel::permute(const Code& g, const Element& x) const {
  Element y(algebra_);
  const Code ginv = group_.inverse(g);
  // (α_g x)_s = x_{g⁻¹·s}
  for (std::size_t s = 0; s < algebra_->sites(); ++s) {
    const std::size_t src = site_action_(ginv, s);
    if (algebra_->dim(src) != algebra_->dim(s)) {
      throw StructuralError("site action mixes block dimensions");
    }
    y.block(s) = x.block(src);
  }
  return y;
}

Element ActionModel::unitary(const Code& g) const {
  if (!unitaries_) throw StructuralError("this action carries no unitaries");
  std::lock_guard lock(unitaries_->mutex);
  auto& cache = *unitaries_;
  if (const auto it = cache.table.find(g); it != cache.table.end()) return it->second;
  int radius = std::max(1, 2 * cache.radius);
  while (true) {
    const groups::Ball b = groups::ball(group_, radius);
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (cache.table.contains(b.elements[i])) continue;
      if (i == 0) {
        cache.table.emplace(b.elements[0], Element::identity(algebra_));
        continue;
      }
      const Element& parent = cache.table.at(b.elements[b.parent[i]]);
      const auto gen = static_cast<std::size_t>(b.parent_generator[i]);
      cache.table.emplace(b.elements[i], parent * generator_unitaries_[gen]);
    }
    cache.radius = radius;
    if (b.contains(g)) return cache.table.at(g);
    // A saturated ball means g lies outside the generated group.
    if (b.size_at(radius - 1) == b.size()) break;
    radius *= 2;
  }
  throw DomainError("element " + group_.format(g) + " is not reachable from the generators");
}

Element ActionModel::apply(const Code& g, const Element& x) const {
  if (!x.algebra()->same_shape(*algebra_)) {
    throw StructuralError("element does not belong to the acted-on algebra");
  }
  switch (kind_) {
    case ActionKind::kTrivial:
      return x;
    case ActionKind::kPermutation:
      return permute(g, x);
    case ActionKind::kConjugation: {
      const Element u = unitary(g);
      return u * x * u.adjoint();
    }
    case ActionKind::kProduct: {
      const Element u = unitary(g);
      return u * permute(g, x) * u.adjoint();
    }
  }
  return x;
}

double ActionModel::homomorphism_defect(const std::vector<std::pair<Code, Code>>& pairs,
                                        const Element& x) const {
  double worst = 0.0;
  const double tau = algebra::trace(x).real();
  for (const auto& [g, h] : pairs) {
    const Element composed = apply(g, apply(h, x));
    const Element direct = apply(group_.multiply(g, h), x);
    worst = std::max(worst, composed.max_abs_diff(direct));
    worst = std::max(worst, std::abs(algebra::trace(direct).real() - tau));
  }
  return worst;
}

}  // namespace ncerg::ergodic
