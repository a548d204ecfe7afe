#pragma once

// Adjacent dyadic systems on Z^d with Mei's explicit shifts, ball covering,
// and doubling/annulus diagnostics for homogeneous metric measure spaces.
//
// Scales are indexed by level s ≥ 0 with cells of side 2^s; level s is the
// partition P_{-s} of the negative-index convention. The d+1 systems are
//
//   P^i_{-s} = { [α_s^(i) + m 2^s, α_s^(i) + (m+1) 2^s) : m ∈ Z }^d,
//   α_s^(i)  = Σ_{j<s} 2^j ξ_j^(i) mod 2^s,   ξ^(i)_{(d+1)n+l} = δ_{i,l}.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "ncerg/algebra.hpp"
#include "ncerg/errors.hpp"
#include "ncerg/groups.hpp"

namespace ncerg::dyadic {

inline constexpr int kMaxDim = 4;

using Rational = boost::rational<std::int64_t>;
using Point = std::array<std::int64_t, kMaxDim>;

enum class Metric { kLinf, kL1 };

/// α_k^(i) for the d+1 systems on Z^d; k ≤ 62.
std::uint64_t mei_shift(int d, int i, int k);

/// 2^{3d(d+2)}, the covering constant for the Mei systems on Z^d (d ≤ 2).
std::int64_t mei_covering_bound(int d);

/// Half-open box ∏_j [lo_j, lo_j + side).
struct Box {
  int d = 1;
  Point lo{};
  std::int64_t side = 1;

  bool contains(const Point& x) const;
  bool contains(const Box& other) const;
  std::int64_t volume() const;
  friend bool operator==(const Box&, const Box&) = default;
};

class DyadicSystem {
 public:
  /// System i ∈ [0, d] on the window [0, 2^window_log2)^d. In periodic mode
  /// the window is the torus (Z/2^W)^d; otherwise cells live on Z^d and the
  /// window bounds the admissible centers.
  DyadicSystem(int d, int index, int window_log2, bool periodic = false);

  int dim() const { return d_; }
  int index() const { return index_; }
  int window_log2() const { return window_log2_; }
  bool periodic() const { return periodic_; }
  std::int64_t window_side() const { return std::int64_t{1} << window_log2_; }
  int max_level() const { return window_log2_; }

  std::int64_t offset(int level) const;
  bool in_window(const Point& x) const;

  /// The cell of level `level` containing x, with lo ≤ x < lo + side in
  /// lifted coordinates. Throws DomainError for x outside the window.
  Box cell_of(int level, const Point& x) const;

  /// All level-`level` cells meeting the window (clipped cells included).
  std::vector<Box> cells_meeting_window(int level) const;

 private:
  int d_;
  int index_;
  int window_log2_;
  bool periodic_;
};

std::vector<DyadicSystem> adjacent_systems(int d, int window_log2, bool periodic = false);

/// Cardinality of the closed radius-r ball in Z^d.
std::int64_t lattice_ball_volume(int d, std::int64_t r, Metric metric);

struct CoverResult {
  int system = 0;
  int level = 0;
  Box cell;
  Rational ratio;  ///< μ(Q) / μ(B)
};

/// Smallest-ratio cell containing B(x, r): levels are scanned upwards and the
/// first level with a covering cell wins, ties going to the smaller system
/// index. Throws DomainError when no level up to the window size covers B.
CoverResult cover_ball(std::span<const DyadicSystem> systems, const Point& x, std::int64_t r,
                       Metric metric = Metric::kLinf);

struct PartitionCheck {
  std::size_t points_checked = 0;
  std::size_t violations = 0;
};

/// Every window point lies in exactly one level-`level` cell; counted by
/// iterating the cell list, independently of cell_of.
PartitionCheck check_partition(const DyadicSystem& system, int level);
/// Every level-`level` cell lies inside a level-(level+1) cell.
PartitionCheck check_refinement(const DyadicSystem& system, int level);

/// Minimal eigenvalue of ratio · E_Q f(x) − A_r f(x) for f an algebra-valued
/// function on the window (sites in row-major order), zero outside it.
double martingale_domination_margin(const DyadicSystem& system, const algebra::Element& f,
                                    const Point& x, std::int64_t r, const CoverResult& cover,
                                    Metric metric = Metric::kLinf);

/// A translation-invariant metric measure space, described by its ball
/// volumes V(r) = μ(B(x, r)).
class HomogeneousSpace {
 public:
  HomogeneousSpace(std::string name, std::function<std::int64_t(std::int64_t)> volume,
                   std::int64_t max_radius);

  static HomogeneousSpace lattice(int d, Metric metric = Metric::kLinf);
  /// Word metric of a group model; balls enumerated once up to max_radius.
  static HomogeneousSpace word_metric(const groups::GroupModel& group, int max_radius,
                                      std::size_t cap = groups::kDefaultElementCap);

  const std::string& name() const { return name_; }
  std::int64_t max_radius() const { return max_radius_; }
  std::int64_t volume(std::int64_t r) const;

 private:
  std::string name_;
  std::function<std::int64_t(std::int64_t)> volume_;
  std::int64_t max_radius_;
};

struct DoublingResult {
  Rational value;
  std::int64_t radius = 0;  ///< a radius attaining the maximum
};

/// max over the radii of μ(B(2r)) / μ(B(r)).
DoublingResult doubling_constant(const HomogeneousSpace& space, std::span<const std::int64_t> radii);

struct AnnulusChoice {
  std::int64_t radius = 0;
  Rational shell_ratio;  ///< μ(B(r+k) \ B(r)) / μ(B(r))
  Rational constant;     ///< shell_ratio · r / k
};

/// The radius r ∈ [2^i, 2^{i+1}) minimizing the normalized shell constant
/// μ(B(r+k) \ B(r)) · r / (k μ(B(r))); ties go to the smaller radius.
AnnulusChoice annulus_radius(const HomogeneousSpace& space, int i, std::int64_t k);

}  // namespace ncerg::dyadic
