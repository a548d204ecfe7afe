#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "ncerg/ergodic.hpp"
#include "support/generators.hpp"

using namespace ncerg;
using algebra::Complex;
using algebra::Element;
using algebra::Matrix;
using ergodic::ActionModel;
using groups::Code;
using groups::GroupModel;

namespace {

Element point_mass(const algebra::AlgebraPtr& alg, std::size_t at, double value = 1.0) {
  std::vector<double> v(alg->sites(), 0.0);
  v[at] = value;
  return Element::from_values(alg, v);
}

Element scalar(const algebra::AlgebraPtr& alg, Complex c) {
  return Element::identity(alg) * c;
}

// Orthogonal projection onto the solutions of u X u* = X in M_d, found as
// the null space of (conj(u) ⊗ u − 1) acting on vec(X).
Matrix commutant_projection(const Matrix& u, const Matrix& x) {
  const Eigen::Index d = u.rows();
  Matrix op(d * d, d * d);
  const Matrix uc = u.conjugate();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) op.block(i * d, j * d, d, d) = uc(i, j) * u;
  }
  op -= Matrix::Identity(d * d, d * d);
  Eigen::JacobiSVD<Matrix> svd(op, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > 1e-9;
  const Matrix kernel = svd.matrixV().rightCols(d * d - rank);
  const Eigen::Map<const Eigen::VectorXcd> vx(x.data(), d * d);
  const Eigen::VectorXcd proj = kernel * (kernel.adjoint() * vx);
  return Eigen::Map<const Matrix>(proj.data(), d, d);
}

double trace_value(const Element& x) { return algebra::trace(x).real(); }

}  // namespace

TEST_CASE("ball averages") {
  testing::Rng rng(1);
  SUBCASE("trivial action") {
    const auto alg = algebra::TracialAlgebra::uniform(3, 2);
    const auto act = ActionModel::trivial(GroupModel::integer_lattice(2), alg);
    const auto x = testing::random_hermitian(alg, rng);
    for (int n = 0; n <= 3; ++n) CHECK(ergodic::ball_average(act, n, x).max_abs_diff(x) < 1e-14);
  }
  SUBCASE("shift wraps to the uniform vector") {
    const auto act = ActionModel::cyclic_shift(16);
    const auto x = point_mass(act.algebra(), 0);
    // B_n covers 2n+1 ≥ 16 translates; n = 7 hits each site except one twice.
    const auto a = ergodic::ball_average(act, 7, x);
    std::vector<double> expected(16, 1.0 / 15.0);
    expected[8] = 0.0;
    CHECK(a.max_abs_diff(Element::from_values(act.algebra(), expected)) < 1e-15);
    const auto full = ergodic::ball_average(act, 8, x);
    for (std::size_t s = 0; s < 16; ++s) {
      CHECK(full.block(s)(0, 0).real() == doctest::Approx(s == 8 ? 2.0 / 17 : 1.0 / 17));
    }
  }
  SUBCASE("conjugation preserves the trace") {
    const auto act = ActionModel::unitary_conjugation(testing::random_unitary(2, rng));
    const auto x = testing::random_positive(act.algebra(), rng);
    for (int n = 0; n <= 5; ++n) {
      const auto a = ergodic::ball_average(act, n, x);
      CHECK(std::abs(trace_value(a) - trace_value(x)) < 1e-12);
      CHECK(algebra::is_positive(a));
    }
    const auto one = Element::identity(act.algebra());
    CHECK(ergodic::ball_average(act, 4, one).max_abs_diff(one) < 1e-13);
  }
  SUBCASE("agrees with direct summation on Heisenberg") {
    const auto act = ActionModel::heisenberg_affine(3);
    const auto x = testing::random_nonnegative_values(act.algebra(), rng, 1.0);
    const auto b = groups::ball(act.group(), 2);
    Element sum(act.algebra());
    for (const Code& g : b.elements) sum += act.apply(g, x);
    sum *= 1.0 / static_cast<double>(b.size());
    CHECK(ergodic::ball_average(act, 2, x).max_abs_diff(sum) < 1e-14);
  }
  SUBCASE("errors") {
    const auto act = ActionModel::cyclic_shift(4);
    const auto x = point_mass(act.algebra(), 1);
    CHECK_THROWS_AS(ergodic::ball_average(act, -1, x), DomainError);
    CHECK_THROWS_AS(ergodic::set_average(act, {}, x), DomainError);
    ergodic::AverageOptions tiny;
    tiny.cap = 2;
    CHECK_THROWS_AS(ergodic::ball_average(act, 3, x, tiny), CapExceeded);
  }
}

TEST_CASE("subgroup averages") {
  const auto flip = ActionModel::flip_chain(1);
  const auto x = Element::from_values(flip.algebra(), std::vector<double>{3.0, 1.0});
  CHECK(ergodic::subgroup_average(flip, 0, x).max_abs_diff(x) == 0.0);
  CHECK(ergodic::subgroup_average(flip, 1, x).max_abs_diff(
            Element::from_values(flip.algebra(), std::vector<double>{2.0, 2.0})) < 1e-15);

  testing::Rng rng(2);
  const auto chain = ActionModel::flip_chain(5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto y = testing::random_nonnegative_values(chain.algebra(), rng, 2.0);
    for (int n = 0; n <= 5; ++n) {
      const auto a = ergodic::subgroup_average(chain, n, y);
      CHECK(ergodic::subgroup_average(chain, n, a).max_abs_diff(a) < 1e-14);
      if (n < 5) {
        const auto up = ergodic::subgroup_average(chain, n + 1, y);
        CHECK(ergodic::subgroup_average(chain, n + 1, a).max_abs_diff(up) < 1e-14);
        CHECK(ergodic::subgroup_average(chain, n, up).max_abs_diff(up) < 1e-14);
      }
      // Averages over G_n are conditional expectations onto blocks of 2^n sites.
      algebra::Partition cells;
      for (std::size_t lo = 0; lo < 32; lo += std::size_t{1} << n) {
        std::vector<std::size_t> cell;
        for (std::size_t s = lo; s < lo + (std::size_t{1} << n); ++s) cell.push_back(s);
        cells.push_back(cell);
      }
      CHECK(a.max_abs_diff(algebra::conditional_expectation(y, cells)) < 1e-14);
    }
  }
  CHECK_THROWS_AS(ergodic::subgroup_average(ActionModel::cyclic_shift(4), 1,
                                            point_mass(ActionModel::cyclic_shift(4).algebra(), 0)),
                  StructuralError);
}

TEST_CASE("mean projection") {
  testing::Rng rng(3);
  SUBCASE("trivial action") {
    const auto alg = algebra::TracialAlgebra::uniform(2, 2);
    const auto act = ActionModel::trivial(GroupModel::integer_lattice(1), alg);
    const auto x = testing::random_hermitian(alg, rng);
    CHECK(ergodic::mean_projection(act, x).value.max_abs_diff(x) < 1e-14);
  }
  SUBCASE("ergodic shifts give the trace") {
    for (std::size_t m : {7u, 16u, 64u, 256u}) {
      const auto act = ActionModel::cyclic_shift(m);
      const auto x = testing::random_nonnegative_values(act.algebra(), rng, 3.0);
      const auto px = ergodic::mean_projection(act, x);
      CHECK(px.value.max_abs_diff(scalar(act.algebra(), trace_value(x))) < 1e-9);
      CHECK(px.fixed_residual < 1e-9 * x.norm_inf());
      CHECK(px.step_residual < 1e-10);
    }
  }
  SUBCASE("Heisenberg affine model") {
    const auto act = ActionModel::heisenberg_affine(5);
    const auto x = testing::random_nonnegative_values(act.algebra(), rng, 1.0);
    const auto px = ergodic::mean_projection(act, x);
    CHECK(px.value.max_abs_diff(scalar(act.algebra(), trace_value(x))) < 1e-9);
  }
  SUBCASE("diagonal conjugation") {
    const double theta = std::numbers::sqrt2;
    Matrix u = Matrix::Zero(2, 2);
    u(0, 0) = 1.0;
    u(1, 1) = std::polar(1.0, theta);
    const auto act = ActionModel::unitary_conjugation(u);
    for (int trial = 0; trial < 4; ++trial) {
      const auto x = testing::random_hermitian(act.algebra(), rng);
      const auto px = ergodic::mean_projection(act, x);
      Matrix diag = x.block(0);
      diag(0, 1) = diag(1, 0) = 0.0;
      CHECK(Matrix(px.value.block(0)).isApprox(diag, 1e-9));
      CHECK(Matrix(px.value.block(0)).isApprox(commutant_projection(u, x.block(0)), 1e-9));
    }
  }
  SUBCASE("random unitary on M_3 against the commutation equation") {
    const Matrix u = testing::random_unitary(3, rng);
    const auto act = ActionModel::unitary_conjugation(u);
    const auto x = testing::random_hermitian(act.algebra(), rng);
    const auto px = ergodic::mean_projection(act, x);
    CHECK((Matrix(px.value.block(0)) - commutant_projection(u, x.block(0))).norm() < 1e-8);
  }
  SUBCASE("shift times diagonal conjugation") {
    const auto alg = algebra::TracialAlgebra::uniform(8, 2);
    Matrix u = Matrix::Identity(2, 2);
    u(1, 1) = std::polar(1.0, 0.7);
    const auto z = GroupModel::integer_lattice(1);
    // Generators are ordered as in z.generators(); u_{-1} = u*.
    std::vector<Element> us;
    for (const Code& v : z.generators()) {
      us.push_back(Element::from_blocks(alg, std::vector<Matrix>(8, v[0] > 0 ? u : Matrix(u.adjoint()))));
    }
    const auto act = ActionModel::product(
        z, alg,
        [](const Code& g, std::size_t s) {
          return static_cast<std::size_t>(((static_cast<std::int64_t>(s) + g[0]) % 8 + 8) % 8);
        },
        us);
    const auto x = testing::random_hermitian(act.algebra(), rng);
    // Fixed points are site-constant diagonal matrices.
    Matrix mean = Matrix::Zero(2, 2);
    for (std::size_t s = 0; s < 8; ++s) mean += x.block(s) / 8.0;
    mean(0, 1) = mean(1, 0) = 0.0;
    const auto px = ergodic::mean_projection(act, x);
    for (std::size_t s = 0; s < 8; ++s) CHECK(Matrix(px.value.block(s)).isApprox(mean, 1e-9));
  }
}

TEST_CASE("mean splitting on shifts") {
  testing::Rng rng(4);
  const auto act = ActionModel::cyclic_shift(32, 2);
  const auto x = testing::random_hermitian(act.algebra(), rng);
  const auto px = ergodic::mean_projection(act, x).value;
  for (int n : {0, 3, 10}) CHECK(ergodic::ball_average(act, n, px).max_abs_diff(px) < 1e-12);
  const auto rest = x - px;
  for (int trial = 0; trial < 5; ++trial) {
    // Fixed points are site-constant matrices.
    const auto m = testing::random_hermitian(algebra::TracialAlgebra::uniform(1, 2), rng);
    const std::vector<Matrix> blocks(32, m.block(0));
    const auto fixed = Element::from_blocks(act.algebra(), blocks);
    CHECK(std::abs(algebra::inner(fixed, rest)) < 1e-9);
  }
  double prev = 1e300;
  for (int n : {2, 4, 8, 16}) {
    const double norm = algebra::lp_norm(ergodic::ball_average(act, n, rest), 2.0);
    CHECK(norm <= prev + 1e-12);
    prev = norm;
  }
  CHECK(algebra::lp_norm(ergodic::ball_average(act, 16, rest), 2.0) < 0.1);
}

TEST_CASE("mean projection reports non-convergence") {
  testing::Rng rng(5);
  const auto act = ActionModel::cyclic_shift(256);
  const auto x = testing::random_nonnegative_values(act.algebra(), rng, 1.0);
  ergodic::ProjectionOptions opts;
  opts.ball_budget = 3;
  opts.max_iterations = 5;
  CHECK_THROWS_AS(ergodic::mean_projection(act, x, opts), NonConvergence);
}

TEST_CASE("coboundaries obey the Følner bound") {
  testing::Rng rng(6);
  const auto act = ActionModel::cyclic_shift(64);
  const auto& z = act.group();
  for (int n = 1; n <= 8; ++n) {
    for (std::int64_t g0 : {1, 2, 3, -2}) {
      const auto y = ergodic::extremal_coboundary_input(act, n, g0);
      const auto res = ergodic::coboundary_check(act, n, y, z.make({g0}));
      CHECK(res.folner == groups::Rational(2 * std::abs(g0), 2 * n + 1));
      CHECK(res.lhs <= res.bound + 1e-15);
      CHECK(res.bound == doctest::Approx(2.0 * std::abs(g0) / (2 * n + 1)));
      CHECK(res.equality);
      CHECK(res.lhs_count == static_cast<double>(res.folner_count));
    }
  }
  // A one-signed y only reaches half of the symmetric difference.
  std::vector<double> v(64, 0.0);
  for (std::size_t s = 0; s < 20; ++s) v[s] = 1.0;
  const auto half = ergodic::coboundary_check(act, 4, Element::from_values(act.algebra(), v), z.make({2}));
  CHECK(half.lhs_count == 2.0);
  CHECK(!half.equality);
  CHECK_THROWS_AS(ergodic::extremal_coboundary_input(act, 30, 2), DomainError);
  for (int trial = 0; trial < 5; ++trial) {
    const auto r = testing::random_nonnegative_values(act.algebra(), rng, 1.0);
    for (int n : {2, 5, 9}) {
      const auto res = ergodic::coboundary_check(act, n, r, z.make({2}));
      CHECK(res.lhs <= res.bound * (1 + 1e-12));
    }
  }
}

TEST_CASE("convergence report") {
  testing::Rng rng(7);
  SUBCASE("fixed points give zero norms") {
    const auto act = ActionModel::cyclic_shift(16);
    const auto x = scalar(act.algebra(), 0.5);
    const std::vector<double> ps{1.0, 2.0};
    const std::vector<int> sched{1, 2, 4};
    const auto rep = ergodic::convergence_report(act, x, ps, sched);
    for (const auto& row : rep.norms) {
      for (double v : row) CHECK(v < 1e-14);
    }
  }
  SUBCASE("random x on C(Z_64)") {
    const auto act = ActionModel::cyclic_shift(64);
    const auto x = testing::random_nonnegative_values(act.algebra(), rng, 1.0);
    const std::vector<double> ps{2.0, 4.0};
    const std::vector<int> sched{1, 2, 4, 8, 16, 32, 64, 128, 256};
    const std::vector<double> lambdas{0.05, 0.2};
    const auto rep = ergodic::convergence_report(act, x, ps, sched, lambdas);
    REQUIRE(rep.norms.size() == sched.size());
    for (std::size_t k = 1; k < sched.size(); ++k) CHECK(rep.norms[k][0] <= rep.norms[k - 1][0] + 1e-12);
    CHECK(rep.norms.back()[0] < 1e-2);
    CHECK(rep.tails_monotone);
    for (std::size_t k = 0; k < sched.size(); ++k) {
      REQUIRE(rep.tail_sup[k][0].has_value());
      CHECK(*rep.tail_sup[k][0] >= rep.norms[k][0] - 1e-8);
    }
    CHECK(*rep.tail_sup.back()[1] < *rep.tail_sup.front()[1]);
    CHECK(!rep.witnesses.empty());
    for (const auto& w : rep.witnesses) {
      CHECK(w.defect >= 0.0);
      CHECK(w.two_sided <= w.one_sided + 1e-12);
    }
  }
  SUBCASE("exponent outside (1, ∞) has no tail sup") {
    const auto act = ActionModel::cyclic_shift(8);
    const auto x = point_mass(act.algebra(), 0);
    const std::vector<double> ps{1.0};
    const std::vector<int> sched{1, 2};
    CHECK(!ergodic::convergence_report(act, x, ps, sched).tail_sup[0][0].has_value());
  }
  SUBCASE("schedule validation") {
    const auto act = ActionModel::cyclic_shift(8);
    const auto x = point_mass(act.algebra(), 0);
    const std::vector<double> ps{2.0};
    CHECK_THROWS_AS(ergodic::convergence_report(act, x, ps, std::vector<int>{}), DomainError);
    CHECK_THROWS_AS(ergodic::convergence_report(act, x, ps, std::vector<int>{2, 2}), DomainError);
  }
}

TEST_CASE("lacunary schedules") {
  const auto z = dyadic::HomogeneousSpace::lattice(1);
  const auto sched = ergodic::lacunary_schedule(z, 6, 1);
  const auto r = ergodic::radii(sched);
  REQUIRE(r.size() == 7);
  for (std::size_t k = 0; k < r.size(); ++k) CHECK(r[k] == (1 << k));

  const auto z2 = dyadic::HomogeneousSpace::lattice(2);
  const auto s2 = ergodic::lacunary_schedule(z2, 5, 1, 3);
  CHECK(s2.front().k == 3);
  CHECK(s2.front().choice.radius >= 8);
  CHECK(s2.front().choice.radius < 16);
  for (std::size_t k = 1; k < s2.size(); ++k) CHECK(s2[k].choice.radius > s2[k - 1].choice.radius);

  const auto h = dyadic::HomogeneousSpace::word_metric(GroupModel::heisenberg(), 20);
  const auto rh = ergodic::radii(ergodic::lacunary_schedule(h, 3, 1));
  for (std::size_t k = 0; k < rh.size(); ++k) {
    CHECK(rh[k] >= (1 << k));
    CHECK(rh[k] < (2 << k));
  }
  CHECK_THROWS_AS(ergodic::lacunary_schedule(z, 2, 1, 3), DomainError);
}

TEST_CASE("shell differences") {
  testing::Rng rng(8);
  const auto act = ActionModel::cyclic_shift(128);
  for (int trial = 0; trial < 4; ++trial) {
    const auto x = testing::random_nonnegative_values(act.algebra(), rng, 1.0);
    for (int r : {4, 8, 16, 32}) {
      for (int w : {1, 2, 4}) {
        for (double p : {1.0, 2.0, 3.0}) {
          const auto sd = ergodic::shell_difference(act, r, w, x, p);
          CHECK(sd.lhs <= sd.bound * (1 + 1e-12));
          // On Z the shell has 2w points.
          const double expected = 2.0 * (2.0 * w) / (2.0 * r + 1) * algebra::lp_norm(x, p);
          CHECK(sd.bound == doctest::Approx(expected));
        }
      }
    }
  }
  const auto hact = ActionModel::heisenberg_affine(5);
  const auto hx = testing::random_nonnegative_values(hact.algebra(), rng, 1.0);
  const auto sd = ergodic::shell_difference(hact, 4, 1, hx, 2.0);
  CHECK(sd.lhs <= sd.bound * (1 + 1e-12));
  CHECK_THROWS_AS(ergodic::shell_difference(act, 2, 3, point_mass(act.algebra(), 0), 2.0), DomainError);
}

TEST_CASE("transference") {
  testing::Rng rng(9);
  SUBCASE("point masses") {
    const auto act = ActionModel::cyclic_shift(8);
    const auto& z = act.group();
    ergodic::Measure delta;
    delta[z.identity()] = 1.0;
    const std::vector<ergodic::Measure> mus{delta, delta};
    const std::vector<Code> f{z.make({0}), z.make({1})};
    const auto x = testing::random_nonnegative_values(act.algebra(), rng, 1.0) +
                   scalar(act.algebra(), 0.1);
    const auto res = ergodic::transference_check(act, mus, f, x, 2.0);
    CHECK(res.c_transferred == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.c_direct == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.holds);
  }
  SUBCASE("shift with interval averages") {
    const auto act = ActionModel::cyclic_shift(16);
    const auto& z = act.group();
    const int big_n = 2;
    std::vector<ergodic::Measure> mus;
    for (int n = 0; n <= big_n; ++n) mus.push_back(ergodic::ball_measure(z, n));
    for (int l : {2, 5, 10, 40}) {
      std::vector<Code> f;
      for (int t = -l; t <= l; ++t) f.push_back(z.make({t}));
      const auto x = testing::random_nonnegative_values(act.algebra(), rng, 1.0) +
                     scalar(act.algebra(), 0.05);
      for (double p : {1.5, 2.0, 4.0}) {
        const auto res = ergodic::transference_check(act, mus, f, x, p);
        CHECK(res.fk_ratio == groups::Rational(2 * (l + big_n) + 1, 2 * l + 1));
        CHECK(res.folner_factor ==
              doctest::Approx(std::pow((2.0 * (l + big_n) + 1) / (2.0 * l + 1), 1.0 / p)));
        CHECK(res.holds);
        CHECK(res.c_direct <= res.c_transferred * res.folner_factor + 1e-6);
        CHECK(res.domain_size == static_cast<std::size_t>(2 * (l + 2 * big_n) + 1));
        if (l == 40) {
          CHECK(res.folner_factor <= 1.05);
          CHECK(!res.folner_warning);
        }
        if (l == 2) CHECK(res.folner_warning);
      }
    }
  }
  SUBCASE("noncommutative") {
    const auto act = ActionModel::unitary_conjugation(testing::random_unitary(3, rng));
    const auto& z = act.group();
    std::vector<ergodic::Measure> mus;
    for (int n = 0; n <= 2; ++n) mus.push_back(ergodic::ball_measure(z, n));
    std::vector<Code> f;
    for (int t = -20; t <= 20; ++t) f.push_back(z.make({t}));
    const auto x = testing::random_positive(act.algebra(), rng) + scalar(act.algebra(), 0.05);
    const auto res = ergodic::transference_check(act, mus, f, x, 2.0);
    CHECK(res.holds);
    CHECK(res.c_direct >= 1.0 - 1e-9);
  }
  SUBCASE("errors") {
    const auto act = ActionModel::cyclic_shift(4);
    const auto x = scalar(act.algebra(), 1.0);
    const std::vector<Code> f{act.group().identity()};
    CHECK_THROWS_AS(ergodic::transference_check(act, std::vector<ergodic::Measure>{}, f, x, 2.0),
                    DomainError);
    ergodic::Measure half;
    half[act.group().identity()] = 0.5;
    CHECK_THROWS_AS(ergodic::transference_check(act, std::vector{half}, f, x, 2.0), DomainError);
  }
}

TEST_CASE("iterated one-parameter averages") {
  SUBCASE("trivial action") {
    const auto alg = algebra::TracialAlgebra::uniform(2, 1);
    const auto act = ActionModel::trivial(GroupModel::heisenberg(true), alg);
    const auto x = Element::from_values(alg, std::vector<double>{1.0, 2.0});
    const auto it = ergodic::iterated_z_average(act, 2, x);
    CHECK(it.ball.max_abs_diff(x) < 1e-14);
    CHECK(it.iterated.max_abs_diff(x) < 1e-14);
    CHECK(it.constant == doctest::Approx(1.0));
  }
  SUBCASE("affine model with point masses") {
    for (std::int64_t q : {5, 7}) {
      const auto act = ActionModel::heisenberg_affine(q);
      const auto x = point_mass(act.algebra(), 0);
      std::vector<double> cs;
      for (int n = 1; n <= 4; ++n) {
        const auto it = ergodic::iterated_z_average(act, n, x);
        CHECK(std::isfinite(it.constant));
        CHECK(it.constant > 0.0);
        CHECK(it.constant <= it.box_bound * (1 + 1e-12));
        CHECK((it.iterated * it.constant - it.ball).min_eigenvalue() >= -1e-12);
        if (n >= 2) cs.push_back(it.constant);
      }
      const auto [lo, hi] = std::minmax_element(cs.begin(), cs.end());
      CHECK(*hi <= 2.0 * *lo);
    }
  }
  SUBCASE("errors") {
    const auto shift = ActionModel::cyclic_shift(4);
    CHECK_THROWS_AS(ergodic::iterated_z_average(shift, 1, point_mass(shift.algebra(), 0)),
                    StructuralError);
    const auto act = ActionModel::heisenberg_affine(3);
    CHECK_THROWS_AS(ergodic::iterated_z_average(act, 0, point_mass(act.algebra(), 0)), DomainError);
    CHECK_THROWS_AS(ergodic::iterated_z_average(act, 1, point_mass(act.algebra(), 0, -1.0)),
                    DomainError);
  }
}

TEST_CASE("Kadison inequality") {
  testing::Rng rng(10);
  const auto act = ActionModel::unitary_conjugation(testing::random_unitary(4, rng));
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = testing::random_positive(act.algebra(), rng);
    CHECK(std::abs(ergodic::kadison_check(act, 0, x)) < 1e-12);
    CHECK(ergodic::kadison_check(act, 3, x) >= -1e-9);
    CHECK(ergodic::kadison_check(act, 3, x, false) >= -1e-9);
  }
  const auto alg = algebra::TracialAlgebra::uniform(1, 1);
  const std::vector<double> w{0.5, 0.5};
  const std::vector<Element> ys{scalar(alg, 1.0), scalar(alg, 3.0)};
  CHECK(ergodic::kadison_check(w, ys) == doctest::Approx(1.0));
  const auto alg2 = algebra::TracialAlgebra::uniform(1, 3);
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<Element> hs{testing::random_hermitian(alg2, rng), testing::random_hermitian(alg2, rng),
                                  testing::random_hermitian(alg2, rng)};
    const std::vector<double> ws{0.2, 0.3, 0.5};
    CHECK(ergodic::kadison_check(ws, hs) >= -1e-12);
  }
  CHECK_THROWS_AS(ergodic::kadison_check(std::vector<double>{0.5}, ys), DomainError);
}
