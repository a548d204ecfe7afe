#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ncerg/algebra.hpp"
#include "ncerg/cli/run.hpp"
#include "ncerg/dyadic.hpp"
#include "ncerg/ergodic.hpp"
#include "ncerg/maximal.hpp"
#include "ncerg/walks.hpp"

namespace ncerg::cli {

namespace {

using algebra::Element;
using ergodic::ActionModel;
using groups::Code;
using Rng = std::mt19937_64;

std::size_t cap_of(const ExperimentConfig& c) { return c.cap ? c.cap : groups::kDefaultElementCap; }

std::string rational_string(const groups::Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string exact_string(const walks::Exact& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

int parse_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw std::invalid_argument("bad " + what + " '" + s + "'");
  return v;
}

std::vector<double> or_default(const std::vector<double>& v, std::vector<double> fallback) {
  return v.empty() ? fallback : v;
}

struct ActionSpec {
  std::string kind;
  int size = 0;
};

ActionSpec parse_action(const std::string& spec, const std::string& fallback) {
  const std::string s = spec.empty() ? fallback : spec;
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("action spec '" + s + "' needs <kind>:<size>");
  ActionSpec a{s.substr(0, colon), parse_int(s.substr(colon + 1), "action size")};
  if (a.kind != "shift" && a.kind != "heisenberg" && a.kind != "conj" && a.kind != "flip") {
    throw std::invalid_argument("unknown action kind '" + a.kind + "'");
  }
  if (a.size < 1) throw std::invalid_argument("action size must be positive");
  return a;
}

ActionModel make_action(const ActionSpec& a, Rng& rng) {
  if (a.kind == "shift") return ActionModel::cyclic_shift(static_cast<std::size_t>(a.size));
  if (a.kind == "heisenberg") return ActionModel::heisenberg_affine(a.size);
  if (a.kind == "flip") return ActionModel::flip_chain(a.size);
  // Haar-like unitary from the QR factorization of a Gaussian matrix.
  std::normal_distribution<double> g;
  algebra::Matrix z(a.size, a.size);
  for (int i = 0; i < a.size; ++i) {
    for (int j = 0; j < a.size; ++j) z(i, j) = algebra::Complex(g(rng), g(rng));
  }
  Eigen::HouseholderQR<algebra::Matrix> qr(z);
  algebra::Matrix q = qr.householderQ();
  for (int j = 0; j < a.size; ++j) {
    const algebra::Complex r = qr.matrixQR()(j, j);
    q.col(j) *= std::abs(r) > 0 ? r / std::abs(r) : 1.0;
  }
  return ActionModel::unitary_conjugation(q);
}

Element random_input(const ActionModel& act, Rng& rng) {
  if (act.algebra()->commutative()) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(act.algebra()->sites());
    for (double& x : v) x = u(rng);
    return Element::from_values(act.algebra(), v);
  }
  return algebra::random_hermitian(act.algebra(), rng, true);
}

std::string format_point(const dyadic::Point& p, int d) {
  std::string s;
  for (int j = 0; j < d; ++j) s += (j ? " " : "") + std::to_string(p[j]);
  return s;
}

// ---------------------------------------------------------------------------

Report run_balls(const ExperimentConfig& c) {
  const auto g = parse_group(c.group);
  const auto b = groups::ball(g, c.n, cap_of(c));
  Report rep("balls", {"group", "r", "size", "sphere"});
  for (int r = 0; r <= c.n; ++r) {
    const auto size = static_cast<std::int64_t>(b.size_at(r));
    const auto inner = r ? static_cast<std::int64_t>(b.size_at(r - 1)) : 0;
    rep.row({g.name(), std::int64_t{r}, size, size - inner});
  }
  rep.constant({"ball_size", std::to_string(b.size()), static_cast<double>(b.size()), "empirical"});
  return rep;
}

Report run_growth(const ExperimentConfig& c) {
  const auto g = parse_group(c.group);
  const auto fit = groups::growth_exponent(g, c.n, cap_of(c));
  Report rep("growth", {"group", "r", "size"});
  for (std::size_t r = 0; r < fit.sizes.size(); ++r) {
    rep.row({g.name(), static_cast<std::int64_t>(r), static_cast<std::int64_t>(fit.sizes[r])});
  }
  std::string reference = "empirical";
  switch (g.kind()) {
    case groups::GroupKind::kIntegerLattice: reference = "d(G)=" + std::to_string(g.rank()); break;
    case groups::GroupKind::kHeisenberg: reference = "d(G)=4"; break;
    default: reference = "d(G)=0"; break;
  }
  rep.constant({"growth_exponent", format_double(fit.exponent), fit.exponent, reference});
  return rep;
}

Report run_folner(const ExperimentConfig& c) {
  const auto g = parse_group(c.group);
  const auto b = groups::ball(g, c.n, cap_of(c));
  Report rep("folner", {"group", "r", "generator", "ratio_exact", "ratio"});
  for (int r = 0; r <= c.n; ++r) {
    const std::span<const Code> set(b.elements.data(), b.size_at(r));
    for (const Code& v : g.generators()) {
      const auto ratio = groups::folner_ratio(g, set, v);
      rep.row({g.name(), std::int64_t{r}, g.format(v), rational_string(ratio),
               boost::rational_cast<double>(ratio)});
      rep.check(ratio <= groups::Rational(2), "Følner ratio above 2");
    }
  }
  return rep;
}

Report run_dyadic(const ExperimentConfig& c) {
  if (c.d < 1 || c.d > 3) throw std::invalid_argument("--d must be 1, 2 or 3");
  if (c.window < 2 || (c.window & (c.window - 1)) != 0) {
    throw std::invalid_argument("--window must be a power of two");
  }
  if (c.rmax < 1) throw std::invalid_argument("--rmax must be positive");
  const int w = static_cast<int>(std::countr_zero(static_cast<std::uint64_t>(c.window)));
  const auto metric = c.metric == "l1" ? dyadic::Metric::kL1 : dyadic::Metric::kLinf;
  const auto systems = dyadic::adjacent_systems(c.d, w);
  const auto bound = dyadic::Rational(dyadic::mei_covering_bound(c.d));
  Report rep("dyadic", {"d", "x", "r", "i", "k", "ratio", "ratio_exact", "bound"});
  dyadic::Rational worst(0);

  auto visit = [&](const dyadic::Point& x, std::int64_t r) {
    const auto res = dyadic::cover_ball(systems, x, r, metric);
    rep.row({std::int64_t{c.d}, format_point(x, c.d), r, std::int64_t{res.system},
             std::int64_t{-res.level}, boost::rational_cast<double>(res.ratio),
             rational_string(res.ratio), std::to_string(bound.numerator())});
    rep.check(res.ratio <= bound, "covering ratio above the Mei constant");
    worst = std::max(worst, res.ratio);
  };
  if (c.d == 1) {
    for (std::int64_t x = 0; x < c.window; ++x) {
      for (std::int64_t r = 1; r <= c.rmax; ++r) visit(dyadic::Point{x}, r);
    }
  } else {
    Rng rng(c.seed);
    std::uniform_int_distribution<std::int64_t> coord(0, c.window - 1), radius(1, c.rmax);
    for (int s = 0; s < c.samples; ++s) {
      dyadic::Point x{};
      for (int j = 0; j < c.d; ++j) x[j] = coord(rng);
      visit(x, radius(rng));
    }
  }
  rep.constant({"max_ratio", rational_string(worst), boost::rational_cast<double>(worst),
                std::to_string(bound.numerator()), true, worst <= bound});
  return rep;
}

template <class Scalar>
Report walk_table(const groups::GroupModel& g, const ExperimentConfig& c) {
  const auto res = walks::domination_constant<Scalar>(g, c.n, cap_of(c));
  const auto ball = groups::ball(g, c.n, cap_of(c));
  Report rep("walk-dominate", {"g", "lhs", "rhs", "ratio"});
  const Scalar lhs = Scalar(1) / Scalar(static_cast<std::int64_t>(ball.size()));
  for (const Code& code : ball.elements) {
    const Scalar rhs = res.cesaro.at(code);
    const Scalar ratio = lhs / rhs;
    if constexpr (std::is_same_v<Scalar, walks::Exact>) {
      rep.row({g.format(code), exact_string(lhs), exact_string(rhs), exact_string(ratio)});
      rep.check(lhs <= res.c * rhs, "ball indicator not dominated");
    } else {
      rep.row({g.format(code), lhs, rhs, ratio});
      rep.check(lhs <= res.c * rhs * (1 + 1e-12), "ball indicator not dominated");
    }
  }
  if constexpr (std::is_same_v<Scalar, walks::Exact>) {
    rep.constant({"c", exact_string(res.c), static_cast<double>(res.c), "empirical"});
  } else {
    rep.constant({"c", format_double(res.c), res.c, "empirical"});
  }
  return rep;
}

Report run_walk(const ExperimentConfig& c) {
  if (c.n < 1) throw std::invalid_argument("--n must be at least 1");
  const auto g = parse_group(c.group);
  Report rep = c.exact ? walk_table<walks::Exact>(g, c) : walk_table<double>(g, c);
  if (c.action.empty()) return rep;

  // Operator form on an action: one row per random positive input.
  Rng rng(c.seed);
  const auto act = make_action(parse_action(c.action, ""), rng);
  Report markov("walk-dominate", {"trial", "n", "c", "margin", "tight_margin", "scale"});
  for (int t = 0; t < c.trials; ++t) {
    const Element x = random_input(act, rng);
    const auto res = walks::markov_domination_check(act, c.n, x, cap_of(c));
    markov.row({std::int64_t{t}, std::int64_t{c.n}, res.c, res.margin, res.tight_margin, res.scale});
    markov.check(res.margin >= -1e-9 * res.scale, "rhs - lhs not positive semidefinite");
  }
  return markov;
}

std::vector<algebra::Partition> dyadic_filtration(int levels) {
  std::vector<algebra::Partition> out;
  const std::size_t sites = std::size_t{1} << levels;
  for (int k = 1; k <= levels; ++k) {
    const std::size_t width = std::size_t{1} << (levels - k);
    algebra::Partition p;
    for (std::size_t lo = 0; lo < sites; lo += width) {
      std::vector<std::size_t> cell;
      for (std::size_t s = lo; s < lo + width; ++s) cell.push_back(s);
      p.push_back(std::move(cell));
    }
    out.push_back(std::move(p));
  }
  return out;
}

Report run_maximal(const ExperimentConfig& c) {
  if (c.sites < 2 || (c.sites & (c.sites - 1)) != 0) throw std::invalid_argument("--sites must be a power of two");
  if (c.dim < 1) throw std::invalid_argument("--dim must be positive");
  const auto ps = or_default(c.ps, {2.0});
  const auto lambdas = or_default(c.lambdas, {0.25, 0.5, 1.0, 2.0});
  for (double p : ps) {
    if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("maximal needs p in (1, inf)");
  }
  const int levels = std::countr_zero(static_cast<unsigned>(c.sites));
  const auto filtration = dyadic_filtration(levels);
  const auto alg = algebra::TracialAlgebra::uniform(static_cast<std::size_t>(c.sites), c.dim);
  Rng rng(c.seed);
  Report rep("maximal", {"trial", "kind", "param", "value", "reference", "ratio", "bound"});
  double worst_strong = 0.0;
  for (int t = 0; t < c.trials; ++t) {
    const Element f = algebra::random_hermitian(alg, rng, true);
    const double l1 = algebra::lp_norm(f, 1.0);
    for (double lambda : lambdas) {
      const auto w = maximal::weak_type_witness(f, filtration, lambda, ps.front());
      rep.row({std::int64_t{t}, "weak", lambda, w.defect, w.guarantee, w.defect * lambda / l1, "1"});
      rep.check(w.defect <= w.guarantee + 1e-9, "tau(1 - e) above ||f||_1 / lambda");
    }
    const maximal::PositiveSequence seq(maximal::martingale(f, filtration));
    for (double p : ps) {
      const auto m = maximal::sup_plus_norm(seq, p);
      double single = 0.0;
      for (const Element& x : seq.elements()) single = std::max(single, algebra::lp_norm(x, p));
      const double ratio = m.value / algebra::lp_norm(f, p);
      rep.row({std::int64_t{t}, "strong", p, m.value, single, ratio, "empirical"});
      rep.check(m.value >= single * (1 - 1e-9), "maximal norm below a single term");
      worst_strong = std::max(worst_strong, ratio);
    }
  }
  rep.constant({"doob_ratio", format_double(worst_strong), worst_strong, "empirical"});
  return rep;
}

std::vector<int> ergodic_schedule(const ExperimentConfig& c, const ActionModel& act) {
  if (!c.schedule.empty()) return c.schedule;
  if (c.rmax < 1) throw std::invalid_argument("empty schedule: pass --schedule or --rmax >= 1");
  const int k_max = std::bit_width(static_cast<unsigned>(c.rmax)) - 1;
  const auto& g = act.group();
  const auto space = g.kind() == groups::GroupKind::kIntegerLattice
                         ? dyadic::HomogeneousSpace::lattice(g.rank(), dyadic::Metric::kL1)
                         : dyadic::HomogeneousSpace::word_metric(g, (2 << k_max) + 1, cap_of(c));
  return ergodic::radii(ergodic::lacunary_schedule(space, k_max, 1));
}

Report run_ergodic(const ExperimentConfig& c) {
  Rng rng(c.seed);
  const auto act = make_action(parse_action(c.action, "shift:256"), rng);
  const auto schedule = ergodic_schedule(c, act);
  if (schedule.empty()) throw std::invalid_argument("empty schedule");
  const auto ps = or_default(c.ps, {2.0});
  const auto lambdas = or_default(c.lambdas, {0.1});
  const Element x = random_input(act, rng);
  const auto report = ergodic::convergence_report(act, x, ps, schedule, lambdas, {}, cap_of(c));

  Report rep("ergodic-converge", {"kind", "k", "radius", "param", "value", "bound"});
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    for (std::size_t j = 0; j < ps.size(); ++j) {
      rep.row({"norm", static_cast<std::int64_t>(k), std::int64_t{schedule[k]}, ps[j], report.norms[k][j],
               "empirical"});
      if (report.tail_sup[k][j]) {
        rep.row({"tail_sup", static_cast<std::int64_t>(k), std::int64_t{schedule[k]}, ps[j],
                 *report.tail_sup[k][j], "empirical"});
      }
    }
  }
  for (const auto& w : report.witnesses) {
    rep.row({"witness_defect", static_cast<std::int64_t>(w.start), std::int64_t{w.start_radius}, w.lambda,
             w.defect, "empirical"});
    rep.row({"witness_two_sided", static_cast<std::int64_t>(w.start), std::int64_t{w.start_radius},
             w.lambda, w.two_sided, "empirical"});
    rep.row({"witness_one_sided", static_cast<std::int64_t>(w.start), std::int64_t{w.start_radius},
             w.lambda, w.one_sided, "empirical"});
  }
  rep.constant({"tails_monotone", report.tails_monotone ? "true" : "false",
                report.tails_monotone ? 1.0 : 0.0, "non-increasing within 1e-8", true,
                report.tails_monotone});

  const auto& g = act.group();
  if (g.kind() == groups::GroupKind::kIntegerLattice && g.rank() == 1 &&
      act.kind() == ergodic::ActionKind::kPermutation) {
    const auto m = static_cast<int>(act.algebra()->sites());
    for (std::size_t k = 0; k < schedule.size(); ++k) {
      const int n = schedule[k];
      if (m <= 2 * (n + 1) + 1) continue;
      const auto y = ergodic::extremal_coboundary_input(act, n, 1);
      const auto cb = ergodic::coboundary_check(act, n, y, g.make({1}), cap_of(c));
      rep.row({"coboundary", static_cast<std::int64_t>(k), std::int64_t{n}, 1.0, cb.lhs,
               format_double(cb.bound)});
      rep.check(cb.lhs <= cb.bound * (1 + 1e-15), "coboundary average above the Følner bound");
      rep.check(cb.equality, "extremal coboundary does not attain the Følner bound");
    }
  }
  return rep;
}

Report run_transference(const ExperimentConfig& c) {
  Rng rng(c.seed);
  const auto act = make_action(parse_action(c.action, "shift:16"), rng);
  const auto& g = act.group();
  if (g.kind() != groups::GroupKind::kIntegerLattice || g.rank() != 1) {
    throw std::invalid_argument("transference runs on actions of Z");
  }
  const int big_n = std::max(c.n, 1);
  std::vector<ergodic::Measure> measures;
  for (int k = 0; k <= big_n; ++k) measures.push_back(ergodic::ball_measure(g, k, cap_of(c)));
  std::vector<int> ls = c.folner;
  if (ls.empty()) ls = {big_n, 5 * big_n, 20 * big_n};
  const auto ps = or_default(c.ps, {2.0});
  Element x = random_input(act, rng);
  x += Element::identity(act.algebra()) * 0.05;

  Report rep("transference", {"L", "p", "c_direct", "c_transferred", "folner_factor", "fk_ratio",
                              "domain", "holds", "warning"});
  for (int l : ls) {
    if (l < 0) throw std::invalid_argument("--folner values must be non-negative");
    std::vector<Code> f;
    for (int t = -l; t <= l; ++t) f.push_back(g.make({t}));
    for (double p : ps) {
      if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("transference needs p in (1, inf)");
      const auto res = ergodic::transference_check(act, measures, f, x, p);
      rep.row({std::int64_t{l}, p, res.c_direct, res.c_transferred, res.folner_factor,
               rational_string(res.fk_ratio), static_cast<std::int64_t>(res.domain_size),
               res.holds ? "true" : "false", res.folner_warning ? "true" : "false"});
      rep.check(res.holds, "direct constant above the transferred bound");
    }
  }
  return rep;
}

Report run_iterated(const ExperimentConfig& c) {
  Rng rng(c.seed);
  const auto act = make_action(parse_action(c.action, "heisenberg:5"), rng);
  if (c.n < 1) throw std::invalid_argument("--n must be at least 1");
  std::vector<double> v(act.algebra()->sites(), 0.0);
  v[0] = 1.0;
  const Element x = Element::from_values(act.algebra(), v);
  Report rep("iterated", {"n", "constant", "box_bound", "range_a", "range_b", "range_c"});
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int n = 1; n <= c.n; ++n) {
    const auto it = ergodic::iterated_z_average(act, n, x, cap_of(c));
    rep.row({std::int64_t{n}, it.constant, it.box_bound, it.range_a, it.range_b, it.range_c});
    rep.check(std::isfinite(it.constant) && it.constant <= it.box_bound * (1 + 1e-12),
              "ball average not dominated by the iterated average");
    if (n >= 2) {
      lo = std::min(lo, it.constant);
      hi = std::max(hi, it.constant);
    }
  }
  if (hi > 0.0) rep.constant({"constant_spread", format_double(hi / lo), hi / lo, "empirical"});
  return rep;
}

Report run_subgroup(const ExperimentConfig& c) {
  const int levels = std::max(c.n, 1);
  const auto act = ActionModel::flip_chain(levels);
  Rng rng(c.seed);
  Report rep("subgroup", {"trial", "n", "idempotency", "tower", "bound"});
  for (int t = 0; t < c.trials; ++t) {
    const Element x = random_input(act, rng);
    for (int n = 0; n < levels; ++n) {
      const auto a = ergodic::subgroup_average(act, n, x);
      const auto up = ergodic::subgroup_average(act, n + 1, x);
      const double idem = ergodic::subgroup_average(act, n, a).max_abs_diff(a);
      const double tower = ergodic::subgroup_average(act, n + 1, a).max_abs_diff(up);
      rep.row({std::int64_t{t}, std::int64_t{n}, idem, tower, "1e-12"});
      rep.check(idem <= 1e-12 && tower <= 1e-12, "subgroup averages fail the tower property");
    }
  }
  return rep;
}

}  // namespace

groups::GroupModel parse_group(const std::string& spec) {
  if (spec == "Z") return groups::GroupModel::integer_lattice(1);
  if (spec == "heisenberg") return groups::GroupModel::heisenberg();
  if (spec == "heisenberg-t") return groups::GroupModel::heisenberg(true);
  if (spec == "locfin") return groups::GroupModel::locally_finite();
  if (spec.rfind("Zd:", 0) == 0) {
    const int d = parse_int(spec.substr(3), "lattice rank");
    if (d < 1 || d > 8) throw std::invalid_argument("lattice rank must be in [1, 8]");
    return groups::GroupModel::integer_lattice(d);
  }
  if (spec.rfind("cyclic:", 0) == 0) {
    const auto body = spec.substr(7);
    const auto caret = body.find('^');
    if (caret == std::string::npos) throw std::invalid_argument("cyclic group spec needs <m>^<d>");
    const int m = parse_int(body.substr(0, caret), "modulus");
    const int d = parse_int(body.substr(caret + 1), "rank");
    if (m < 2 || d < 1 || d > 8) throw std::invalid_argument("cyclic group needs m >= 2 and 1 <= d <= 8");
    return groups::GroupModel::cyclic_product(m, d);
  }
  throw std::invalid_argument("unknown group spec '" + spec + "'");
}

Report execute(const ExperimentConfig& config) {
  validate(config);
  const auto& cmd = config.command;
  if (cmd == "balls") return run_balls(config);
  if (cmd == "growth") return run_growth(config);
  if (cmd == "folner") return run_folner(config);
  if (cmd == "dyadic") return run_dyadic(config);
  if (cmd == "walk-dominate") return run_walk(config);
  if (cmd == "maximal") return run_maximal(config);
  if (cmd == "ergodic-converge") return run_ergodic(config);
  if (cmd == "transference") return run_transference(config);
  if (cmd == "iterated") return run_iterated(config);
  return run_subgroup(config);
}

}  // namespace ncerg::cli
