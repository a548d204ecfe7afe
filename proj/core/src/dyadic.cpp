#include "ncerg/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ncerg::dyadic {
namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  std::int64_t out = 1;
  for (std::int64_t j = 1; j <= k; ++j) out = out * (n - k + j) / j;
  return out;
}

// Calls visit(p) for every point of ∏_j [lo_j, lo_j + extent_j).
template <class Visit>
void for_each_point(int d, const Point& lo, const Point& extent, Visit&& visit) {
  Point p = lo;
  for (int j = 0; j < d; ++j) {
    if (extent[j] <= 0) return;
  }
  while (true) {
    visit(p);
    int j = 0;
    while (j < d) {
      if (++p[j] < lo[j] + extent[j]) break;
      p[j] = lo[j];
      ++j;
    }
    if (j == d) return;
  }
}

}  // namespace

std::uint64_t mei_shift(int d, int i, int k) {
  if (d < 1 || i < 0 || i > d) throw DomainError("mei_shift requires 0 <= i <= d");
  if (k < 0 || k > 62) throw DomainError("mei_shift requires 0 <= k <= 62");
  std::uint64_t alpha = 0;
  for (int j = 0; j < k; ++j) {
    if (j % (d + 1) == i) alpha += std::uint64_t{1} << j;
  }
  return alpha;  // already < 2^k
}

std::int64_t mei_covering_bound(int d) {
  const int exponent = 3 * d * (d + 2);
  if (exponent > 62) throw DomainError("covering bound overflows 64-bit integers");
  return std::int64_t{1} << exponent;
}

bool Box::contains(const Point& x) const {
  for (int j = 0; j < d; ++j) {
    if (x[j] < lo[j] || x[j] >= lo[j] + side) return false;
  }
  return true;
}

bool Box::contains(const Box& other) const {
  for (int j = 0; j < d; ++j) {
    if (other.lo[j] < lo[j] || other.lo[j] + other.side > lo[j] + side) return false;
  }
  return true;
}

std::int64_t Box::volume() const {
  std::int64_t v = 1;
  for (int j = 0; j < d; ++j) v *= side;
  return v;
}

// ---------------------------------------------------------------------------

DyadicSystem::DyadicSystem(int d, int index, int window_log2, bool periodic)
    : d_(d), index_(index), window_log2_(window_log2), periodic_(periodic) {
  if (d < 1 || d > kMaxDim) throw DomainError("dyadic systems support 1 <= d <= 4");
  if (index < 0 || index > d) throw DomainError("system index must lie in [0, d]");
  if (window_log2 < 0 || window_log2 * d > 40) {
    throw DomainError("window 2^W per axis must satisfy 0 <= W*d <= 40");
  }
}

std::int64_t DyadicSystem::offset(int level) const {
  return static_cast<std::int64_t>(mei_shift(d_, index_, level));
}

bool DyadicSystem::in_window(const Point& x) const {
  for (int j = 0; j < d_; ++j) {
    if (x[j] < 0 || x[j] >= window_side()) return false;
  }
  return true;
}

Box DyadicSystem::cell_of(int level, const Point& x) const {
  if (level < 0 || level > max_level()) throw DomainError("level outside [0, W]");
  Point y = x;
  if (periodic_) {
    for (int j = 0; j < d_; ++j) y[j] = mod(x[j], window_side());
  } else if (!in_window(x)) {
    throw DomainError("point lies outside the dyadic window");
  }
  const std::int64_t side = std::int64_t{1} << level;
  const std::int64_t alpha = offset(level);
  Box b{d_, {}, side};
  for (int j = 0; j < d_; ++j) b.lo[j] = alpha + side * floor_div(y[j] - alpha, side);
  return b;
}

std::vector<Box> DyadicSystem::cells_meeting_window(int level) const {
  if (level < 0 || level > max_level()) throw DomainError("level outside [0, W]");
  const std::int64_t side = std::int64_t{1} << level;
  const std::int64_t alpha = offset(level);
  std::int64_t m_lo = 0;
  std::int64_t m_hi = 0;
  if (periodic_) {
    // 2^{W-level} cells per axis, represented with lo in [alpha, 2^W).
    m_lo = 0;
    m_hi = (window_side() >> level) - 1;
  } else {
    m_lo = floor_div(-alpha, side);
    m_hi = floor_div(window_side() - 1 - alpha, side);
  }
  const std::int64_t per_axis = m_hi - m_lo + 1;
  Point start{};
  Point extent{};
  for (int j = 0; j < d_; ++j) {
    start[j] = m_lo;
    extent[j] = per_axis;
  }
  std::vector<Box> cells;
  for_each_point(d_, start, extent, [&](const Point& m) {
    Box b{d_, {}, side};
    for (int j = 0; j < d_; ++j) b.lo[j] = alpha + side * m[j];
    cells.push_back(b);
  });
  return cells;
}

std::vector<DyadicSystem> adjacent_systems(int d, int window_log2, bool periodic) {
  std::vector<DyadicSystem> out;
  for (int i = 0; i <= d; ++i) out.emplace_back(d, i, window_log2, periodic);
  return out;
}

std::int64_t lattice_ball_volume(int d, std::int64_t r, Metric metric) {
  if (r < 0) return 0;
  if (metric == Metric::kLinf) {
    std::int64_t v = 1;
    for (int j = 0; j < d; ++j) v *= 2 * r + 1;
    return v;
  }
  // |{y ∈ Z^d : |y|_1 ≤ r}| = Σ_j 2^j C(d, j) C(r, j).
  std::int64_t v = 0;
  for (int j = 0; j <= d; ++j) v += (std::int64_t{1} << j) * binomial(d, j) * binomial(r, j);
  return v;
}

CoverResult cover_ball(std::span<const DyadicSystem> systems, const Point& x, std::int64_t r,
                       Metric metric) {
  if (systems.empty()) throw DomainError("cover_ball needs at least one system");
  if (r < 0) throw DomainError("ball radius must be non-negative");
  const DyadicSystem& first = systems.front();
  const int d = first.dim();
  if (first.periodic() && 2 * r + 1 > first.window_side()) {
    throw DomainError("ball wraps around the periodic window; use a larger window");
  }
  const std::int64_t volume = lattice_ball_volume(d, r, metric);
  // Both metrics have the same bounding box, and every ℓ¹ ball touches all
  // faces of it, so box containment decides containment for either metric.
  Box ball_box{d, {}, 2 * r + 1};
  for (int j = 0; j < d; ++j) ball_box.lo[j] = x[j] - r;

  for (int level = 0; level <= first.max_level(); ++level) {
    for (const DyadicSystem& sys : systems) {
      Box cell = sys.cell_of(level, x);
      if (sys.periodic()) {
        // Lift the cell so that it contains x itself, not its reduction.
        for (int j = 0; j < d; ++j) {
          cell.lo[j] += x[j] - mod(x[j], sys.window_side());
        }
      }
      const bool whole_torus = sys.periodic() && level == sys.max_level();
      if (whole_torus || cell.contains(ball_box)) {
        return CoverResult{sys.index(), level, cell, Rational(cell.volume(), volume)};
      }
    }
  }
  throw DomainError("no cell up to side 2^" + std::to_string(first.max_level()) +
                    " covers the ball of radius " + std::to_string(r) +
                    "; increase the window size W");
}

PartitionCheck check_partition(const DyadicSystem& system, int level) {
  const int d = system.dim();
  const std::int64_t side = system.window_side();
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) total *= static_cast<std::size_t>(side);
  std::vector<int> hits(total, 0);
  auto index_of = [&](const Point& p) {
    std::size_t idx = 0;
    for (int j = d - 1; j >= 0; --j) idx = idx * static_cast<std::size_t>(side) + static_cast<std::size_t>(p[j]);
    return idx;
  };
  for (const Box& cell : system.cells_meeting_window(level)) {
    Point extent{};
    for (int j = 0; j < d; ++j) extent[j] = cell.side;
    for_each_point(d, cell.lo, extent, [&](const Point& p) {
      Point q = p;
      for (int j = 0; j < d; ++j) {
        if (system.periodic()) {
          q[j] = mod(p[j], side);
        } else if (p[j] < 0 || p[j] >= side) {
          return;
        }
      }
      ++hits[index_of(q)];
    });
  }
  PartitionCheck out;
  out.points_checked = total;
  out.violations = static_cast<std::size_t>(
      std::count_if(hits.begin(), hits.end(), [](int h) { return h != 1; }));
  return out;
}

PartitionCheck check_refinement(const DyadicSystem& system, int level) {
  if (level >= system.max_level()) throw DomainError("refinement needs level < W");
  PartitionCheck out;
  const std::int64_t coarse_side = std::int64_t{1} << (level + 1);
  const std::int64_t alpha = system.offset(level + 1);
  for (const Box& cell : system.cells_meeting_window(level)) {
    ++out.points_checked;
    Box parent{system.dim(), {}, coarse_side};
    for (int j = 0; j < system.dim(); ++j) {
      parent.lo[j] = alpha + coarse_side * floor_div(cell.lo[j] - alpha, coarse_side);
    }
    if (!parent.contains(cell)) ++out.violations;
  }
  return out;
}

double martingale_domination_margin(const DyadicSystem& system, const algebra::Element& f,
                                    const Point& x, std::int64_t r, const CoverResult& cover,
                                    Metric metric) {
  const int d = system.dim();
  const std::int64_t side = system.window_side();
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) total *= static_cast<std::size_t>(side);
  if (f.sites() != total) throw StructuralError("function does not live on the dyadic window");
  const int bd = f.algebra()->dim(0);

  auto value_at = [&](const Point& p, algebra::Matrix& acc) {
    std::size_t idx = 0;
    for (int j = d - 1; j >= 0; --j) {
      std::int64_t c = p[j];
      if (system.periodic()) {
        c = mod(c, side);
      } else if (c < 0 || c >= side) {
        return;
      }
      idx = idx * static_cast<std::size_t>(side) + static_cast<std::size_t>(c);
    }
    acc += f.block(idx);
  };

  algebra::Matrix ball_sum = algebra::Matrix::Zero(bd, bd);
  Point lo{};
  Point extent{};
  for (int j = 0; j < d; ++j) {
    lo[j] = x[j] - r;
    extent[j] = 2 * r + 1;
  }
  for_each_point(d, lo, extent, [&](const Point& p) {
    if (metric == Metric::kL1) {
      std::int64_t dist = 0;
      for (int j = 0; j < d; ++j) dist += std::abs(p[j] - x[j]);
      if (dist > r) return;
    }
    value_at(p, ball_sum);
  });

  algebra::Matrix cell_sum = algebra::Matrix::Zero(bd, bd);
  const bool whole_torus = system.periodic() && cover.level == system.max_level();
  for (int j = 0; j < d; ++j) extent[j] = cover.cell.side;
  for_each_point(d, whole_torus ? Point{} : cover.cell.lo, extent,
                 [&](const Point& p) { value_at(p, cell_sum); });

  const double ball_volume = static_cast<double>(lattice_ball_volume(d, r, metric));
  const double cell_volume = static_cast<double>(cover.cell.volume());
  const double ratio = boost::rational_cast<double>(cover.ratio);
  algebra::Matrix gap = ratio * cell_sum / cell_volume - ball_sum / ball_volume;
  gap = 0.5 * (gap + gap.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<algebra::Matrix> es(gap, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// ---------------------------------------------------------------------------

HomogeneousSpace::HomogeneousSpace(std::string name,
                                   std::function<std::int64_t(std::int64_t)> volume,
                                   std::int64_t max_radius)
    : name_(std::move(name)), volume_(std::move(volume)), max_radius_(max_radius) {}

HomogeneousSpace HomogeneousSpace::lattice(int d, Metric metric) {
  const std::string label = std::string("Z^") + std::to_string(d) +
                            (metric == Metric::kLinf ? " (linf)" : " (l1)");
  return HomogeneousSpace(
      label, [d, metric](std::int64_t r) { return lattice_ball_volume(d, r, metric); },
      std::numeric_limits<std::int32_t>::max());
}

HomogeneousSpace HomogeneousSpace::word_metric(const groups::GroupModel& group, int max_radius,
                                               std::size_t cap) {
  const groups::Ball b = groups::ball(group, max_radius, cap);
  std::vector<std::int64_t> sizes;
  for (int r = 0; r <= max_radius; ++r) sizes.push_back(static_cast<std::int64_t>(b.size_at(r)));
  return HomogeneousSpace(
      group.name() + " (word metric)",
      [sizes = std::move(sizes)](std::int64_t r) {
        return sizes[static_cast<std::size_t>(std::clamp<std::int64_t>(
            r, 0, static_cast<std::int64_t>(sizes.size()) - 1))];
      },
      max_radius);
}

std::int64_t HomogeneousSpace::volume(std::int64_t r) const {
  if (r > max_radius_) {
    throw DomainError("radius " + std::to_string(r) + " exceeds the enumerated range of " + name_);
  }
  return volume_(std::max<std::int64_t>(r, 0));
}

DoublingResult doubling_constant(const HomogeneousSpace& space,
                                 std::span<const std::int64_t> radii) {
  if (radii.empty()) throw DomainError("doubling_constant needs at least one radius");
  DoublingResult best{Rational(0), 0};
  for (std::int64_t r : radii) {
    if (r <= 0) throw DomainError("radii must be positive");
    const Rational q(space.volume(2 * r), space.volume(r));
    if (q > best.value) best = {q, r};
  }
  return best;
}

AnnulusChoice annulus_radius(const HomogeneousSpace& space, int i, std::int64_t k) {
  if (i < 0 || i > 40) throw DomainError("scale index must lie in [0, 40]");
  const std::int64_t lo = std::int64_t{1} << i;
  if (k < 1 || k > lo) throw DomainError("annulus width must satisfy 1 <= k <= 2^i");
  AnnulusChoice best;
  bool have = false;
  for (std::int64_t r = lo; r < 2 * lo; ++r) {
    const std::int64_t inner = space.volume(r);
    const Rational shell(space.volume(r + k) - inner, inner);
    const Rational c = shell * Rational(r, k);
    if (!have || c < best.constant) {
      best = {r, shell, c};
      have = true;
    }
  }
  return best;
}

}  // namespace ncerg::dyadic
