#pragma once

// Ball and subgroup averages of group actions, the mean ergodic projection,
// convergence diagnostics, transference and iterated one-parameter averages.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ncerg/action.hpp"
#include "ncerg/algebra.hpp"
#include "ncerg/dyadic.hpp"
#include "ncerg/groups.hpp"
#include "ncerg/maximal.hpp"

namespace ncerg::ergodic {

struct AverageOptions {
  std::size_t cap = groups::kDefaultElementCap;
  /// Assert that the average is unital, trace preserving, and positive on
  /// positive inputs.
  bool verify = true;
};

/// (1/|S|) Σ_{g ∈ S} α_g x, summed by pairwise reduction.
algebra::Element set_average(const ActionModel& action, std::span<const groups::Code> set,
                             const algebra::Element& x, const AverageOptions& options = {});

/// A_n x = (1/|B_n|) Σ_{g ∈ B_n} α_g x.
algebra::Element ball_average(const ActionModel& action, int n, const algebra::Element& x,
                              const AverageOptions& options = {});

/// Average over G_n = (Z/2Z)^n for an action of the locally finite model.
algebra::Element subgroup_average(const ActionModel& action, int n, const algebra::Element& x,
                                  const AverageOptions& options = {});

/// T x = (1/|V ∪ {e}|) Σ_{g ∈ V ∪ {e}} α_g x.
algebra::Element step_average(const ActionModel& action, const algebra::Element& x);

struct ProjectionOptions {
  std::size_t ball_budget = 4096;  ///< largest |B_R| used for the smoothing average
  int max_radius = 4096;
  int max_iterations = 100'000;
  double step_tol = 1e-10;   ///< ‖T y − y‖_2 at exit
  double fixed_tol = 1e-9;   ///< max_v ‖α_v y − y‖_∞ at exit, relative to ‖x‖_∞
};

struct MeanProjection {
  algebra::Element value;  ///< Px
  int radius = 0;          ///< R of the smoothing average A_R
  int iterations = 0;
  double step_residual = 0.0;   ///< ‖T Px − Px‖_2
  double fixed_residual = 0.0;  ///< max_v ‖α_v Px − Px‖_∞
};

/// Px = lim A_n x, computed by iterating A_R on A_R x for the largest
/// affordable R until T y = y. Throws NonConvergence with the last residual
/// at the iteration cap.
MeanProjection mean_projection(const ActionModel& action, const algebra::Element& x,
                               const ProjectionOptions& options = {});

struct CoboundaryCheck {
  int n = 0;
  groups::Code g0;
  double lhs = 0.0;             ///< ‖A_n x‖_∞
  double bound = 0.0;           ///< |F g0 △ F| / |F| · ‖y‖_∞
  double lhs_count = 0.0;       ///< ‖Σ_{g ∈ F} α_g x‖_∞
  std::int64_t folner_count = 0;  ///< |F g0 △ F|
  std::size_t set_size = 0;       ///< |F|
  groups::Rational folner;
  /// lhs_count == folner_count · ‖y‖_∞ in floating point; exact whenever y
  /// takes integer values.
  bool equality = false;
};

/// Compares A_n(y − α_{g0} y) with the Følner bound on F = B_n.
CoboundaryCheck coboundary_check(const ActionModel& action, int n, const algebra::Element& y,
                                 const groups::Code& g0, std::size_t cap = groups::kDefaultElementCap);

/// The ±1 step function on Z_m attaining ‖Σ_{|g| ≤ n} α_g (y − α_{g0} y)‖_∞ =
/// |B_n g0 △ B_n| at the site 0, for the cyclic shift with m > 2(n + |g0|) + 1.
algebra::Element extremal_coboundary_input(const ActionModel& shift, int n, std::int64_t g0);

struct LacunaryStep {
  int k = 0;
  dyadic::AnnulusChoice choice;
};

/// r_k = annulus_radius(space, k, width) for k_min ≤ k ≤ k_max, so that
/// 2^k ≤ r_k < 2^{k+1}.
std::vector<LacunaryStep> lacunary_schedule(const dyadic::HomogeneousSpace& space, int k_max,
                                            std::int64_t width, int k_min = 0);
std::vector<int> radii(std::span<const LacunaryStep> schedule);

struct ShellDifference {
  double lhs = 0.0;    ///< ‖A_r x − A_{r−w} x‖_p
  double bound = 0.0;  ///< 2 |B_r \ B_{r−w}| / |B_r| · ‖x‖_p
};

/// The annulus estimate for consecutive ball averages on a positive x.
ShellDifference shell_difference(const ActionModel& action, int r, int w,
                                 const algebra::Element& x, double p,
                                 std::size_t cap = groups::kDefaultElementCap);

struct WitnessRow {
  std::size_t start = 0;  ///< index into the schedule where the tail begins
  int start_radius = 0;
  double lambda = 0.0;
  double defect = 0.0;      ///< τ(1 − e)
  double two_sided = 0.0;   ///< max over the tail of ‖e (A_n x − Px) e‖_∞
  double one_sided = 0.0;   ///< max over the tail of ‖(A_n x − Px) e‖_∞
};

struct AverageReport {
  std::vector<int> schedule;
  std::vector<double> ps;
  std::vector<double> lambdas;
  algebra::Element projection;
  /// norms[k][j] = ‖A_{r_k} x − Px‖_{p_j}.
  std::vector<std::vector<double>> norms;
  /// tail_sup[k][j] = ‖sup⁺_{i ≥ k} |A_{r_i} x − Px|‖_{p_j}, empty optional
  /// when p_j ∉ (1, ∞).
  std::vector<std::vector<std::optional<double>>> tail_sup;
  std::vector<WitnessRow> witnesses;
  /// Tail sup⁺ norms are non-increasing in the start index within 1e-8.
  bool tails_monotone = true;
};

/// Convergence diagnostics on an increasing schedule of radii.
AverageReport convergence_report(const ActionModel& action, const algebra::Element& x,
                                 std::span<const double> ps, std::span<const int> schedule,
                                 std::span<const double> lambdas = {},
                                 const ProjectionOptions& projection = {},
                                 std::size_t cap = groups::kDefaultElementCap);

/// A finitely supported probability measure on the group.
using Measure = groups::CodeMap<double>;

struct TransferenceResult {
  double c_transferred = 0.0;  ///< ‖sup⁺ A'_n f‖_p / ‖f‖_p on ℓ∞(D) ⊗ M
  double c_direct = 0.0;       ///< ‖sup⁺ A_n x‖_p / ‖x‖_p
  double folner_factor = 0.0;  ///< (|FK| / |F|)^{1/p}
  groups::Rational fk_ratio;   ///< |FK| / |F|
  std::size_t domain_size = 0; ///< |D|, D = F K K⁻¹
  bool holds = false;          ///< c_direct ≤ c_transferred · folner_factor + 1e-6
  bool folner_warning = false; ///< |FK| / |F| > 1 + epsilon
};

/// Builds f(h) = χ_{FK}(h) α_h x on D and compares the maximal constants of
/// the translation averages A'_n f(g) = Σ_h μ_n(h) f(gh) with those of
/// A_n x = Σ_h μ_n(h) α_h x.
TransferenceResult transference_check(const ActionModel& action, std::span<const Measure> measures,
                                      std::span<const groups::Code> folner_set,
                                      const algebra::Element& x, double p, double epsilon = 0.05,
                                      const maximal::SolverOptions& solver = {});

/// Uniform probability measure on B_n.
Measure ball_measure(const groups::GroupModel& group, int n,
                     std::size_t cap = groups::kDefaultElementCap);

struct IteratedAverage {
  algebra::Element ball;      ///< A_n x
  algebra::Element iterated;  ///< M_x M_y M_z x
  std::int64_t range_a = 0, range_b = 0, range_c = 0;  ///< Bass bounds on B_n
  double constant = 0.0;   ///< least c″ with A_n x ⪯ c″ · iterated
  double box_bound = 0.0;  ///< (2L_a+1)(2L_b+1)(2L_c+1) / |B_n|, an a priori c″
};

/// M_t y = (1/(2L_t+1)) Σ_{|l| ≤ L_t} α_{t^l} y for t = x, y, z, composed in
/// normal-form order, against the ball average on a positive x.
IteratedAverage iterated_z_average(const ActionModel& action, int n, const algebra::Element& x,
                                   std::size_t cap = groups::kDefaultElementCap);

/// λ_min(A_n(x²) · s − (A_n x)²) with s = 1 when `contractive`, otherwise
/// sup_g ‖α_g‖.
double kadison_check(const ActionModel& action, int n, const algebra::Element& x,
                     bool contractive = true, std::size_t cap = groups::kDefaultElementCap);

/// λ_min(Σ w_i y_i² − (Σ w_i y_i)²) for hermitian y_i and weights summing to 1.
double kadison_check(std::span<const double> weights, std::span<const algebra::Element> ys);

}  // namespace ncerg::ergodic
