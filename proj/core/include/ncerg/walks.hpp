#pragma once

// Finitely supported symmetric densities on group models, convolution powers,
// Gaussian lower-bound diagnostics and the domination of normalized ball
// indicators by Cesàro sums of convolution powers.

#include <cstddef>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ncerg/action.hpp"
#include "ncerg/algebra.hpp"
#include "ncerg/groups.hpp"

namespace ncerg::walks {

using Exact = boost::multiprecision::cpp_rational;

inline constexpr std::size_t kDefaultSupportCap = 5'000'000;

template <class Scalar>
class BasicDensity {
 public:
  /// Validates total mass 1 and symmetry (exactly for Exact, within 1e-12
  /// otherwise).
  BasicDensity(groups::GroupModel group, groups::CodeMap<Scalar> mass);

  /// δ_g; symmetric only when g is an involution (or e).
  static BasicDensity point_mass(const groups::GroupModel& group, const groups::Code& g);
  /// Uniform mass on a symmetric finite set (duplicates ignored).
  static BasicDensity uniform(const groups::GroupModel& group, std::span<const groups::Code> support);

  const groups::GroupModel& group() const { return group_; }
  const groups::CodeMap<Scalar>& mass() const { return mass_; }
  std::size_t support_size() const { return mass_.size(); }
  Scalar at(const groups::Code& g) const;
  Scalar total_mass() const;
  bool is_symmetric() const;
  double to_double(const groups::Code& g) const;

 private:
  struct Trusted {};
  BasicDensity(groups::GroupModel group, groups::CodeMap<Scalar> mass, Trusted)
      : group_(std::move(group)), mass_(std::move(mass)) {}

  template <class S>
  friend BasicDensity<S> convolve(const BasicDensity<S>&, const BasicDensity<S>&, std::size_t);
  template <class S>
  friend BasicDensity<S> cesaro_mean(const BasicDensity<S>&, int, std::size_t);

  groups::GroupModel group_;
  groups::CodeMap<Scalar> mass_;
};

using Density = BasicDensity<double>;
using ExactDensity = BasicDensity<Exact>;

/// (f ⋆ h)(g) = Σ_{ab = g} f(a) h(b).
template <class Scalar>
BasicDensity<Scalar> convolve(const BasicDensity<Scalar>& f, const BasicDensity<Scalar>& h,
                              std::size_t cap = kDefaultSupportCap);

/// f^{⋆k} by binary powering; k ≥ 1.
template <class Scalar>
BasicDensity<Scalar> convolution_power(const BasicDensity<Scalar>& f, int k,
                                       std::size_t cap = kDefaultSupportCap);

/// (1/K) Σ_{k=1}^{K} f^{⋆k}, one convolution per step.
template <class Scalar>
BasicDensity<Scalar> cesaro_mean(const BasicDensity<Scalar>& f, int terms,
                                 std::size_t cap = kDefaultSupportCap);

/// Uniform density on V ∪ {e} for the group's generating set V.
template <class Scalar>
BasicDensity<Scalar> lazy_walk(const groups::GroupModel& group);

struct GaussianCheck {
  double c_min = 0.0;
  groups::Code argmin;
  std::size_t points = 0;
};

/// min over g ∈ B_{min(k, radius_cap)} of f^{⋆k}(g) · |B_{⌊√k⌋}| · e^{d(e,g)²/k},
/// with d the word metric of the group's generators.
GaussianCheck gaussian_lower_check(const Density& f, int k, int radius_cap,
                                   std::size_t cap = kDefaultSupportCap);

template <class Scalar>
struct DominationResult {
  Scalar c{};                       ///< least c with χ_{B_n}/|B_n| ≤ c · S
  groups::Code argmax;              ///< an element where the bound is tight
  std::size_t ball_size = 0;
  BasicDensity<Scalar> cesaro;      ///< S = (1/2n²) Σ_{k ≤ 2n²} f^{⋆k}
};

/// Least constant c with χ_{B_n}/|B_n| ≤ (c/2n²) Σ_{k=1}^{2n²} f^{⋆k} for the
/// lazy walk f on V ∪ {e}.
template <class Scalar>
DominationResult<Scalar> domination_constant(const groups::GroupModel& group, int n,
                                             std::size_t cap = kDefaultSupportCap);

struct MarkovDomination {
  algebra::Element lhs;      ///< A_n x
  algebra::Element rhs;      ///< (c/n²) Σ_{k=1}^{2n²} T^k x
  double c = 0.0;
  double margin = 0.0;       ///< λ_min(rhs − lhs)
  double tight_margin = 0.0; ///< λ_min((c/2n²) Σ T^k x − A_n x)
  double scale = 0.0;        ///< ‖x‖_∞, for relative tolerances
};

/// Compares the ball average with the Cesàro sum of powers of
/// T = (1/|V ∪ {e}|) Σ_{g ∈ V ∪ {e}} α_g on a positive element x.
MarkovDomination markov_domination_check(const ergodic::ActionModel& action, int n,
                                         const algebra::Element& x,
                                         std::size_t cap = kDefaultSupportCap);

/// Σ_{k=1}^{K} T^k x by direct iteration of T on the algebra; an independent
/// route to the right-hand side of markov_domination_check.
algebra::Element markov_power_sum(const ergodic::ActionModel& action, int terms,
                                  const algebra::Element& x);

}  // namespace ncerg::walks

#include "ncerg/walks_impl.ipp"
