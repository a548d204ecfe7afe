#include "ncerg/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace ncerg::ergodic {

using algebra::Element;
using groups::Code;

namespace {

// Binary-counter pairwise summation: partial sums of equal size are merged
// as soon as they appear, so rounding grows like log(count).
class PairwiseSum {
 public:
  explicit PairwiseSum(algebra::AlgebraPtr algebra) : algebra_(std::move(algebra)) {}

  void add(Element term) {
    int level = 0;
    while (!stack_.empty() && stack_.back().second == level) {
      term += stack_.back().first;
      stack_.pop_back();
      ++level;
    }
    stack_.emplace_back(std::move(term), level);
  }

  Element total() const {
    Element sum(algebra_);
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) sum += it->first;
    return sum;
  }

 private:
  algebra::AlgebraPtr algebra_;
  std::vector<std::pair<Element, int>> stack_;
};

std::int64_t mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

void verify_average(const ActionModel& action, const Element& x, const Element& y) {
  const double scale = 1.0 + x.norm_inf();
  if (std::abs(algebra::trace(y) - algebra::trace(x)) > 1e-10 * scale) {
    throw StructuralError("average is not trace preserving");
  }
  const Element one = Element::identity(action.algebra());
  for (const Code& v : action.group().generators()) {
    if (action.apply(v, one).max_abs_diff(one) > 1e-10) {
      throw StructuralError("action is not unital on generator " + action.group().format(v));
    }
  }
  if (algebra::is_positive(x) && !algebra::is_positive(y)) {
    throw StructuralError("average of a positive element is not positive");
  }
}

std::vector<Code> step_support(const groups::GroupModel& group) {
  std::vector<Code> support = group.generators();
  support.push_back(group.identity());
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  return support;
}

double fixed_residual(const ActionModel& action, const Element& y) {
  double worst = 0.0;
  for (const Code& v : action.group().generators()) {
    worst = std::max(worst, (action.apply(v, y) - y).norm_inf());
  }
  return worst;
}

void require_positive(const Element& x, const char* what) {
  if (!algebra::is_positive(x)) throw DomainError(std::string(what) + " requires a positive x");
}

}  // namespace

// ---------------------------------------------------------------------------
// Averages

Element set_average(const ActionModel& action, std::span<const Code> set, const Element& x,
                    const AverageOptions& options) {
  if (set.empty()) throw DomainError("cannot average over an empty set");
  PairwiseSum sum(action.algebra());
  for (const Code& g : set) sum.add(action.apply(g, x));
  Element y = sum.total();
  y *= 1.0 / static_cast<double>(set.size());
  if (options.verify) verify_average(action, x, y);
  return y;
}

Element ball_average(const ActionModel& action, int n, const Element& x,
                     const AverageOptions& options) {
  if (n < 0) throw DomainError("ball radius must be non-negative");
  const groups::Ball b = groups::ball(action.group(), n, options.cap);
  return set_average(action, b.elements, x, options);
}

Element subgroup_average(const ActionModel& action, int n, const Element& x,
                         const AverageOptions& options) {
  if (action.group().kind() != groups::GroupKind::kLocallyFinite) {
    throw StructuralError("subgroup averages need an action of the locally finite model");
  }
  if (n < 0) throw DomainError("subgroup index must be non-negative");
  const std::vector<Code> subgroup = groups::locally_finite_chain(n, options.cap);
  return set_average(action, subgroup, x, options);
}

Element step_average(const ActionModel& action, const Element& x) {
  AverageOptions options;
  options.verify = false;
  return set_average(action, step_support(action.group()), x, options);
}

// ---------------------------------------------------------------------------
// Mean ergodic projection

MeanProjection mean_projection(const ActionModel& action, const Element& x,
                               const ProjectionOptions& options) {
  if (options.ball_budget < 1 || options.max_radius < 1) {
    throw DomainError("mean_projection needs a positive ball budget and radius");
  }
  // Largest ball within budget, growing the radius geometrically.
  groups::Ball smoother = groups::ball(action.group(), 0);
  for (int r = 1; r <= options.max_radius; r *= 2) {
    groups::Ball b;
    try {
      b = groups::ball(action.group(), r, options.ball_budget);
    } catch (const CapExceeded&) {
      break;
    }
    const bool saturated = b.size() == smoother.size();
    smoother = std::move(b);
    if (saturated) break;
  }

  AverageOptions quiet;
  quiet.verify = false;
  const double scale = std::max(1.0, x.norm_inf());
  MeanProjection out{set_average(action, smoother.elements, x, quiet), smoother.radius, 0, 0.0, 0.0};
  for (int it = 0; it <= options.max_iterations; ++it) {
    out.iterations = it;
    out.step_residual = algebra::lp_norm(step_average(action, out.value) - out.value, 2.0);
    out.fixed_residual = fixed_residual(action, out.value);
    if (out.step_residual < options.step_tol && out.fixed_residual < options.fixed_tol * scale) {
      // A few more sweeps while they still pay off bring Px to rounding level.
      for (int extra = 0; extra < 8 && out.step_residual > 1e-15 * scale; ++extra) {
        Element next = set_average(action, smoother.elements, out.value, quiet);
        const double res = algebra::lp_norm(step_average(action, next) - next, 2.0);
        if (!(res < 0.5 * out.step_residual)) break;
        out.value = std::move(next);
        out.step_residual = res;
        out.fixed_residual = fixed_residual(action, out.value);
        ++out.iterations;
      }
      return out;
    }
    out.value = set_average(action, smoother.elements, out.value, quiet);
  }
  throw NonConvergence("mean_projection did not converge; residual " +
                           std::to_string(out.step_residual),
                       out.step_residual);
}

// ---------------------------------------------------------------------------
// Coboundaries and lacunary schedules

CoboundaryCheck coboundary_check(const ActionModel& action, int n, const Element& y,
                                 const Code& g0, std::size_t cap) {
  if (n < 0) throw DomainError("ball radius must be non-negative");
  const groups::Ball b = groups::ball(action.group(), n, cap);
  const Element x = y - action.apply(g0, y);
  PairwiseSum sum(action.algebra());
  for (const Code& g : b.elements) sum.add(action.apply(g, x));

  CoboundaryCheck out;
  out.n = n;
  out.g0 = g0;
  out.set_size = b.size();
  out.lhs_count = sum.total().norm_inf();
  out.lhs = out.lhs_count / static_cast<double>(b.size());
  out.folner = groups::folner_ratio(action.group(), b.elements, g0);
  const groups::Rational count = out.folner * groups::Rational(static_cast<std::int64_t>(b.size()));
  out.folner_count = count.numerator();
  const double ynorm = y.norm_inf();
  out.bound = boost::rational_cast<double>(out.folner) * ynorm;
  out.equality = out.lhs_count == static_cast<double>(out.folner_count) * ynorm;
  return out;
}

Element extremal_coboundary_input(const ActionModel& shift, int n, std::int64_t g0) {
  const auto& group = shift.group();
  if (group.kind() != groups::GroupKind::kIntegerLattice || group.rank() != 1 ||
      shift.kind() != ActionKind::kPermutation) {
    throw StructuralError("extremal coboundary inputs need a shift action of Z");
  }
  if (n < 0) throw DomainError("ball radius must be non-negative");
  const auto m = static_cast<std::int64_t>(shift.algebra()->sites());
  const std::int64_t k = std::abs(g0);
  if (m <= 2 * (n + k) + 1) throw DomainError("extremal coboundary input needs m > 2(n + |g0|) + 1");
  // Σ_{|g| ≤ n} α_g x at site 0 reads y at −g; the terms that survive the
  // telescoping are y(t) for t ∈ [n−k+1, n] with sign + and t ∈ [−n−k, −n−1]
  // with sign −, mirrored when g0 < 0.
  std::vector<double> v(static_cast<std::size_t>(m), 0.0);
  const std::int64_t sign = g0 >= 0 ? 1 : -1;
  for (std::int64_t t = 1; t <= k; ++t) {
    v[static_cast<std::size_t>(mod(sign * (n - k + t), m))] = 1.0;
    v[static_cast<std::size_t>(mod(sign * (-n - t), m))] = -1.0;
  }
  return Element::from_values(shift.algebra(), v);
}

std::vector<LacunaryStep> lacunary_schedule(const dyadic::HomogeneousSpace& space, int k_max,
                                            std::int64_t width, int k_min) {
  if (k_min < 0 || k_max < k_min) throw DomainError("lacunary schedule needs 0 <= k_min <= k_max");
  std::vector<LacunaryStep> out;
  for (int k = k_min; k <= k_max; ++k) out.push_back({k, dyadic::annulus_radius(space, k, width)});
  return out;
}

std::vector<int> radii(std::span<const LacunaryStep> schedule) {
  std::vector<int> out;
  out.reserve(schedule.size());
  for (const auto& step : schedule) out.push_back(static_cast<int>(step.choice.radius));
  return out;
}

ShellDifference shell_difference(const ActionModel& action, int r, int w, const Element& x,
                                 double p, std::size_t cap) {
  if (w < 1 || w > r) throw DomainError("shell width must satisfy 1 <= w <= r");
  require_positive(x, "shell_difference");
  const groups::Ball b = groups::ball(action.group(), r, cap);
  const std::size_t inner = b.size_at(r - w);
  PairwiseSum inner_sum(action.algebra());
  PairwiseSum shell_sum(action.algebra());
  for (std::size_t i = 0; i < b.size(); ++i) {
    (i < inner ? inner_sum : shell_sum).add(action.apply(b.elements[i], x));
  }
  const Element inner_total = inner_sum.total();
  const Element outer = (inner_total + shell_sum.total()) * (1.0 / static_cast<double>(b.size()));
  const Element inner_avg = inner_total * (1.0 / static_cast<double>(inner));
  const double shell = static_cast<double>(b.size() - inner) / static_cast<double>(b.size());
  return {algebra::lp_norm(outer - inner_avg, p), 2.0 * shell * algebra::lp_norm(x, p)};
}

// ---------------------------------------------------------------------------
// Convergence report

AverageReport convergence_report(const ActionModel& action, const Element& x,
                                 std::span<const double> ps, std::span<const int> schedule,
                                 std::span<const double> lambdas,
                                 const ProjectionOptions& projection, std::size_t cap) {
  if (schedule.empty()) throw DomainError("convergence_report needs a non-empty schedule");
  if (schedule.front() < 0) throw DomainError("schedule radii must be non-negative");
  for (std::size_t k = 1; k < schedule.size(); ++k) {
    if (schedule[k] <= schedule[k - 1]) throw DomainError("schedule must be strictly increasing");
  }
  for (double p : ps) {
    if (!(p >= 1.0)) throw DomainError("norm exponents must be >= 1");
  }
  for (double l : lambdas) {
    if (!(l > 0.0)) throw DomainError("witness thresholds must be positive");
  }

  AverageReport report{{}, {}, {}, mean_projection(action, x, projection).value, {}, {}, {}, true};
  report.schedule.assign(schedule.begin(), schedule.end());
  report.ps.assign(ps.begin(), ps.end());
  report.lambdas.assign(lambdas.begin(), lambdas.end());

  // Prefix sums along the breadth-first order give every A_{r_k} x in one pass.
  const groups::Ball b = groups::ball(action.group(), schedule.back(), cap);
  std::vector<Element> diffs;
  PairwiseSum sum(action.algebra());
  std::size_t i = 0;
  for (int r : schedule) {
    const std::size_t end = b.size_at(r);
    for (; i < end; ++i) sum.add(action.apply(b.elements[i], x));
    Element avg = sum.total() * (1.0 / static_cast<double>(end));
    diffs.push_back((avg - report.projection).hermitian_part());
  }

  for (const Element& d : diffs) {
    std::vector<double> row;
    for (double p : ps) row.push_back(algebra::lp_norm(d, p));
    report.norms.push_back(std::move(row));
  }

  std::vector<Element> moduli;
  for (const Element& d : diffs) moduli.push_back(algebra::abs(d));
  for (std::size_t k = 0; k < diffs.size(); ++k) {
    std::vector<std::optional<double>> row;
    for (double p : ps) {
      if (p > 1.0 && !std::isinf(p)) {
        maximal::PositiveSequence tail(std::vector<Element>(moduli.begin() + k, moduli.end()));
        row.emplace_back(maximal::sup_plus_norm(tail, p).value);
      } else {
        row.emplace_back(std::nullopt);
      }
    }
    report.tail_sup.push_back(std::move(row));
  }
  for (std::size_t k = 1; k < report.tail_sup.size(); ++k) {
    for (std::size_t j = 0; j < ps.size(); ++j) {
      const auto& prev = report.tail_sup[k - 1][j];
      const auto& cur = report.tail_sup[k][j];
      if (prev && cur && *cur > *prev + 1e-8 * (1.0 + *prev)) report.tails_monotone = false;
    }
  }

  for (std::size_t k = 0; k < diffs.size(); ++k) {
    const std::span<const Element> tail(diffs.begin() + static_cast<std::ptrdiff_t>(k), diffs.end());
    for (double lambda : lambdas) {
      const maximal::CuculescuResult cut = maximal::cuculescu(tail, lambda);
      WitnessRow row{k, schedule[k], lambda, std::max(0.0, 1.0 - cut.e.trace()), 0.0, 0.0};
      const Element& e = cut.e.element();
      for (const Element& d : tail) {
        row.two_sided = std::max(row.two_sided, (e * d * e).norm_inf());
        row.one_sided = std::max(row.one_sided, (d * e).norm_inf());
      }
      report.witnesses.push_back(row);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Transference

Measure ball_measure(const groups::GroupModel& group, int n, std::size_t cap) {
  const groups::Ball b = groups::ball(group, n, cap);
  Measure mu;
  const double w = 1.0 / static_cast<double>(b.size());
  for (const Code& g : b.elements) mu.emplace(g, w);
  return mu;
}

TransferenceResult transference_check(const ActionModel& action, std::span<const Measure> measures,
                                      std::span<const Code> folner_set, const Element& x, double p,
                                      double epsilon, const maximal::SolverOptions& solver) {
  if (measures.empty()) throw DomainError("transference_check needs at least one measure");
  if (folner_set.empty()) throw DomainError("transference_check needs a non-empty set F");
  require_positive(x, "transference_check");
  const auto& group = action.group();

  // Supports in a fixed order so that sums are reproducible.
  std::vector<std::vector<std::pair<Code, double>>> supports;
  std::set<Code> k_set;
  for (const Measure& mu : measures) {
    std::vector<std::pair<Code, double>> terms;
    double mass = 0.0;
    for (const auto& [g, w] : mu) {
      if (w < 0.0) throw DomainError("measures must be non-negative");
      if (w == 0.0) continue;
      terms.emplace_back(g, w);
      k_set.insert(g);
      mass += w;
    }
    if (std::abs(mass - 1.0) > 1e-9) throw DomainError("measures must have total mass 1");
    std::sort(terms.begin(), terms.end());
    supports.push_back(std::move(terms));
  }

  const std::set<Code> f_set(folner_set.begin(), folner_set.end());
  std::set<Code> fk_set;
  for (const Code& f : f_set) {
    for (const Code& k : k_set) fk_set.insert(group.multiply(f, k));
  }
  std::set<Code> d_set;
  for (const Code& u : fk_set) {
    for (const Code& k : k_set) d_set.insert(group.multiply(u, group.inverse(k)));
  }
  const std::vector<Code> domain(d_set.begin(), d_set.end());
  groups::CodeMap<std::size_t> position;
  for (std::size_t i = 0; i < domain.size(); ++i) position.emplace(domain[i], i);

  const auto& base = *action.algebra();
  const std::size_t sites = base.sites();
  std::vector<double> weights;
  std::vector<int> dims;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    for (std::size_t s = 0; s < sites; ++s) {
      weights.push_back(base.weight(s) / static_cast<double>(domain.size()));
      dims.push_back(base.dim(s));
    }
  }
  const auto big = algebra::TracialAlgebra::create(std::move(weights), std::move(dims));

  Element f(big);
  for (const Code& h : fk_set) {
    const Element image = action.apply(h, x);
    const std::size_t at = position.at(h) * sites;
    for (std::size_t s = 0; s < sites; ++s) f.block(at + s) = image.block(s);
  }

  std::vector<maximal::PositiveMap> translated;
  std::vector<maximal::PositiveMap> direct;
  for (const auto& terms : supports) {
    translated.emplace_back([&, terms](const Element& in) {
      Element out(big);
      for (std::size_t i = 0; i < domain.size(); ++i) {
        for (const auto& [h, w] : terms) {
          const auto it = position.find(group.multiply(domain[i], h));
          if (it == position.end()) continue;
          for (std::size_t s = 0; s < sites; ++s) {
            out.block(i * sites + s) += w * in.block(it->second * sites + s);
          }
        }
      }
      return out;
    });
    direct.emplace_back([&, terms](const Element& in) {
      Element out(action.algebra());
      for (const auto& [h, w] : terms) out += action.apply(h, in) * w;
      return out;
    });
  }

  TransferenceResult out;
  out.domain_size = domain.size();
  const std::vector<Element> f_test{f};
  const std::vector<Element> x_test{x};
  out.c_transferred = maximal::strong_type_estimate(translated, p, f_test, solver);
  out.c_direct = maximal::strong_type_estimate(direct, p, x_test, solver);
  out.fk_ratio = groups::Rational(static_cast<std::int64_t>(fk_set.size()),
                                  static_cast<std::int64_t>(f_set.size()));
  out.folner_factor = std::pow(boost::rational_cast<double>(out.fk_ratio), 1.0 / p);
  out.holds = out.c_direct <= out.c_transferred * out.folner_factor + 1e-6;
  out.folner_warning = boost::rational_cast<double>(out.fk_ratio) > 1.0 + epsilon;
  return out;
}

// ---------------------------------------------------------------------------
// Iterated one-parameter averages

IteratedAverage iterated_z_average(const ActionModel& action, int n, const Element& x,
                                   std::size_t cap) {
  const auto& group = action.group();
  if (group.kind() != groups::GroupKind::kHeisenberg) {
    throw StructuralError("iterated_z_average needs an action of the Heisenberg group");
  }
  if (n < 1) throw DomainError("iterated_z_average requires n >= 1");
  require_positive(x, "iterated_z_average");

  const groups::BassBounds bass = groups::verify_bass_bounds(group, n, cap);
  AverageOptions quiet;
  quiet.cap = cap;
  quiet.verify = false;
  const groups::Ball b = groups::ball(group, n, cap);
  IteratedAverage out{set_average(action, b.elements, x, quiet), x};
  out.range_a = bass.max_a;
  out.range_b = bass.max_b;
  out.range_c = bass.max_c;

  auto one_parameter = [&](const Code& t, std::int64_t range, const Element& y) {
    std::vector<Code> powers;
    for (std::int64_t l = -range; l <= range; ++l) powers.push_back(group.power(t, l));
    return set_average(action, powers, y, quiet);
  };
  // α_g = α_x^a α_y^b α_z^c for g = x^a y^b z^c, so z acts first.
  Element y = one_parameter(group.make({0, 0, 1}), out.range_c, x);
  y = one_parameter(group.make({0, 1, 0}), out.range_b, y);
  out.iterated = one_parameter(group.make({1, 0, 0}), out.range_a, y);

  out.constant = algebra::least_domination_constant(out.ball, out.iterated);
  out.box_bound = static_cast<double>((2 * out.range_a + 1) * (2 * out.range_b + 1) *
                                      (2 * out.range_c + 1)) /
                  static_cast<double>(b.size());
  return out;
}

// ---------------------------------------------------------------------------
// Kadison inequality

double kadison_check(const ActionModel& action, int n, const Element& x, bool contractive,
                     std::size_t cap) {
  if (!x.is_hermitian(1e-10 * (1.0 + x.norm_inf()))) {
    throw DomainError("kadison_check requires a hermitian x");
  }
  AverageOptions options;
  options.cap = cap;
  options.verify = false;
  const Element h = x.hermitian_part();
  const Element avg = ball_average(action, n, h, options);
  const Element avg_sq = ball_average(action, n, h * h, options);
  const double s = contractive ? 1.0 : action.sup_norm();
  return (avg_sq * s - avg * avg).hermitian_part().min_eigenvalue();
}

double kadison_check(std::span<const double> weights, std::span<const Element> ys) {
  if (weights.size() != ys.size() || ys.empty()) {
    throw DomainError("kadison_check needs one weight per element");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw DomainError("weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("weights must sum to 1");
  Element mean(ys.front().algebra());
  Element mean_sq(ys.front().algebra());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const Element h = ys[i].hermitian_part();
    mean += h * weights[i];
    mean_sq += (h * h) * weights[i];
  }
  return (mean_sq - mean * mean).hermitian_part().min_eigenvalue();
}

}  // namespace ncerg::ergodic
