#pragma once

// Maximal norms ‖sup⁺ x_n‖_p of positive sequences, Cuculescu projections
// and weak/strong type witnesses on finite tracial algebras.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ncerg/algebra.hpp"

namespace ncerg::maximal {

/// x_1, ..., x_N ⪰ 0 in a common algebra. Elements are stored as their
/// hermitian parts.
class PositiveSequence {
 public:
  explicit PositiveSequence(std::vector<algebra::Element> elements,
                            double tol = algebra::kPositivityTol);

  const algebra::AlgebraPtr& algebra() const { return elements_.front().algebra(); }
  std::size_t size() const { return elements_.size(); }
  const algebra::Element& operator[](std::size_t n) const { return elements_[n]; }
  std::span<const algebra::Element> elements() const { return elements_; }

  void push_back(algebra::Element x, double tol = algebra::kPositivityTol);
  PositiveSequence prefix(std::size_t count) const;

 private:
  std::vector<algebra::Element> elements_;
};

enum class Solver {
  kBarrier,            ///< log-det barrier with Newton centering
  kProjectedGradient,  ///< gradient steps on τ(a^p) with Dykstra projections
};

struct SolverOptions {
  Solver solver = Solver::kBarrier;
  double rel_tol = 1e-7;  ///< projected gradient: stagnation threshold
  int window = 10;        ///< projected gradient: sweeps per stagnation test
  int max_sweeps = 10'000;
  double gap_tol = 1e-12;  ///< barrier: relative duality gap at exit
};

struct MaximalWitness {
  algebra::Element majorant;    ///< a with a ⪰ x_n for every n
  double value = 0.0;           ///< ‖a‖_p
  double certificate_gap = 0.0; ///< relative gap on τ(a^p); 0 when exact
};

/// inf{‖a‖_p : a ⪰ x_n for all n}, p ∈ (1, ∞). The problem splits over the
/// blocks; 1×1 blocks and blocks with a dominating x_n are solved exactly.
MaximalWitness sup_plus_norm(const PositiveSequence& seq, double p,
                             const SolverOptions& options = {});

struct CuculescuResult {
  std::vector<algebra::Projection> q;  ///< q_1, ..., q_N
  algebra::Projection e;               ///< q_N (1 for an empty sequence)
};

/// q_n = q_{n−1} · 1_{[−λ, λ]}(q_{n−1} x_n q_{n−1}), restricted to the
/// range of q_{n−1}. The x_n must be hermitian.
CuculescuResult cuculescu(std::span<const algebra::Element> seq, double lambda);

struct WeakTypeWitness {
  algebra::Projection projection;  ///< e
  double lambda = 0.0;
  double defect = 0.0;          ///< τ(1 − e)
  double bound_constant = 0.0;  ///< C with τ(1 − e) = C^p λ^{−p} ‖x‖_p^p
  /// ‖f‖_1/λ; only meaningful when `guarantee_applies`.
  double guarantee = 0.0;
  bool guarantee_applies = false;
  double max_compressed_norm = 0.0;  ///< max_n ‖e x_n e‖_∞
};

/// Cuculescu witness for an arbitrary hermitian sequence; ‖x‖_p is taken
/// from the last element. No martingale guarantee is asserted.
WeakTypeWitness weak_type_witness(std::span<const algebra::Element> seq, double lambda, double p);

/// E_1 f, ..., E_N f for an increasing filtration given by partitions, each
/// refining the previous one.
std::vector<algebra::Element> martingale(const algebra::Element& f,
                                         std::span<const algebra::Partition> filtration);

/// Witness for the martingale of a positive f along the filtration; the
/// classical bound τ(1 − e) ≤ ‖f‖_1/λ applies.
WeakTypeWitness weak_type_witness(const algebra::Element& f,
                                  std::span<const algebra::Partition> filtration,
                                  double lambda, double p);

using PositiveMap = std::function<algebra::Element(const algebra::Element&)>;

/// max over the test set of ‖sup⁺_i S_i x‖_p / ‖x‖_p, a lower bound on the
/// strong type (p, p) constant of the family.
double strong_type_estimate(std::span<const PositiveMap> family, double p,
                            std::span<const algebra::Element> testset,
                            const SolverOptions& options = {});

}  // namespace ncerg::maximal
