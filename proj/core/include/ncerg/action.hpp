#pragma once

// Trace-preserving actions α: G → Aut(M) of group models on tracial
// algebras: site permutations, inner automorphisms Ad u_g, and products.

#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ncerg/algebra.hpp"
#include "ncerg/groups.hpp"

namespace ncerg::ergodic {

enum class ActionKind { kTrivial, kPermutation, kConjugation, kProduct };

/// A left action of the group on the sites: (g, s) ↦ g·s.
using SiteAction = std::function<std::size_t(const groups::Code&, std::size_t)>;

class ActionModel {
 public:
  static ActionModel trivial(groups::GroupModel group, algebra::AlgebraPtr algebra);
  /// (α_g x)_s = x_{g⁻¹·s}.
  static ActionModel permutation(groups::GroupModel group, algebra::AlgebraPtr algebra,
                                 SiteAction site_action);
  /// α_g x = u_g x u_g*, with u_g the product of the generator unitaries
  /// along a geodesic word. `generator_unitaries[j]` belongs to generator j.
  static ActionModel conjugation(groups::GroupModel group, algebra::AlgebraPtr algebra,
                                 std::vector<algebra::Element> generator_unitaries);
  /// (α_g x)_s = u_g x_{g⁻¹·s} u_g*; the unitaries must be constant over sites.
  static ActionModel product(groups::GroupModel group, algebra::AlgebraPtr algebra,
                             SiteAction site_action,
                             std::vector<algebra::Element> generator_unitaries);

  /// Z acting on C(Z_m) ⊗ M_dim by translation, V = {−1, 1}.
  static ActionModel cyclic_shift(std::size_t m, int dim = 1);
  /// Z acting on M_d (one site) by Ad u^k.
  static ActionModel unitary_conjugation(const algebra::Matrix& u);
  /// The Heisenberg group acting on C(H(Z_q)) ≅ C(Z_q³) by left multiplication
  /// modulo q. Site index of (a, b, c) is a + q b + q² c.
  static ActionModel heisenberg_affine(std::int64_t q, bool with_center = true);
  /// ⊕ Z/2Z acting on C^{2^levels} by XOR on site indices.
  static ActionModel flip_chain(int levels);

  ActionKind kind() const { return kind_; }
  const groups::GroupModel& group() const { return group_; }
  const algebra::AlgebraPtr& algebra() const { return algebra_; }
  /// sup_g ‖α_g‖ on M; every model here acts by automorphisms.
  double sup_norm() const { return 1.0; }

  algebra::Element apply(const groups::Code& g, const algebra::Element& x) const;

  /// Checks α_g α_h = α_{gh} and trace invariance on the given triples of
  /// group elements, returning the worst discrepancy on x.
  double homomorphism_defect(const std::vector<std::pair<groups::Code, groups::Code>>& pairs,
                             const algebra::Element& x) const;

  /// u_g for conjugation and product actions.
  algebra::Element unitary(const groups::Code& g) const;

 private:
  ActionModel(ActionKind kind, groups::GroupModel group, algebra::AlgebraPtr algebra);

  algebra::Element permute(const groups::Code& g, const algebra::Element& x) const;

  struct UnitaryTable {
    std::mutex mutex;
    int radius = -1;
    groups::CodeMap<algebra::Element> table;
  };

  ActionKind kind_;
  groups::GroupModel group_;
  algebra::AlgebraPtr algebra_;
  SiteAction site_action_;
  std::vector<algebra::Element> generator_unitaries_;
  std::shared_ptr<UnitaryTable> unitaries_;
};

}  // namespace ncerg::ergodic
