#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "ncerg/action.hpp"
#include "ncerg/ergodic.hpp"
#include "ncerg/maximal.hpp"
#include "support/generators.hpp"
#include "support/grid_oracle.hpp"

using namespace ncerg;
using algebra::Element;
using algebra::Matrix;
using algebra::TracialAlgebra;
using maximal::PositiveSequence;

namespace {

Element values(const algebra::AlgebraPtr& alg, std::vector<double> v) {
  return Element::from_values(alg, v);
}

Matrix random_real_psd(testing::Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix y(2, 2);
  for (int i = 0; i < 4; ++i) y.data()[i] = g(rng);
  Matrix x = y.transpose() * y;
  return x / x.cwiseAbs().maxCoeff();
}

void check_feasible(const maximal::MaximalWitness& w, const PositiveSequence& seq) {
  const double tol = 1e-8 * (1.0 + w.majorant.norm_inf());
  for (const Element& x : seq.elements()) {
    CHECK((w.majorant - x).hermitian_part().min_eigenvalue() >= -tol);
  }
}

}  // namespace

TEST_CASE("sup_plus_norm: commutative and single-element examples") {
  auto c2 = TracialAlgebra::uniform(2);
  const PositiveSequence seq({values(c2, {1, 0}), values(c2, {0, 1})});
  const auto w = maximal::sup_plus_norm(seq, 2.0);
  CHECK(w.majorant.max_abs_diff(values(c2, {1, 1})) == 0.0);
  CHECK(w.value == doctest::Approx(1.0));
  CHECK(w.certificate_gap == 0.0);

  testing::Rng rng(1);
  auto alg = TracialAlgebra::create({0.3, 0.7}, {2, 3});
  const Element x = testing::random_positive(alg, rng);
  for (double p : {1.2, 2.0, 4.0}) {
    const auto single = maximal::sup_plus_norm(PositiveSequence({x}), p);
    CHECK(single.value == doctest::Approx(algebra::lp_norm(x, p)).epsilon(1e-12));
  }
}

TEST_CASE("sup_plus_norm: domain errors") {
  auto c2 = TracialAlgebra::uniform(2);
  const PositiveSequence seq({values(c2, {1, 0})});
  CHECK_THROWS_AS(maximal::sup_plus_norm(seq, 1.0), DomainError);
  CHECK_THROWS_AS(maximal::sup_plus_norm(seq, algebra::kInfinity), DomainError);
  CHECK_THROWS_AS(PositiveSequence({values(c2, {1, -1})}), DomainError);
  CHECK_THROWS_AS(PositiveSequence({}), DomainError);
}

TEST_CASE("sup_plus_norm: 2x2 example against the grid oracle") {
  auto m2 = TracialAlgebra::create({1.0}, {2});
  Matrix x1(2, 2), x2(2, 2);
  x1 << 1, 0, 0, 0;
  x2 << 0.5, 0.5, 0.5, 0.5;
  const PositiveSequence seq({Element::from_blocks(m2, {x1}), Element::from_blocks(m2, {x2})});
  for (double p : {1.5, 2.0, 3.0}) {
    const auto w = maximal::sup_plus_norm(seq, p);
    const auto grid = testing::grid_sup_plus({x1, x2}, p);
    CHECK(std::abs(w.value - grid.value) < 1e-3);
    CHECK(w.value <= grid.value + 1e-9);
    check_feasible(w, seq);
  }
}

TEST_CASE("sup_plus_norm: random real 2x2 pairs against the grid oracle") {
  testing::Rng rng(77);
  auto m2 = TracialAlgebra::create({1.0}, {2});
  for (int t = 0; t < 5; ++t) {
    const Matrix a = random_real_psd(rng), b = random_real_psd(rng);
    const PositiveSequence seq({Element::from_blocks(m2, {a}), Element::from_blocks(m2, {b})});
    const auto w = maximal::sup_plus_norm(seq, 2.0);
    CHECK(std::abs(w.value - testing::grid_sup_plus({a, b}, 2.0).value) < 1e-3);
  }
}

TEST_CASE("sup_plus_norm: both solvers agree") {
  testing::Rng rng(8);
  maximal::SolverOptions pg;
  pg.solver = maximal::Solver::kProjectedGradient;
  for (int t = 0; t < 6; ++t) {
    auto alg = TracialAlgebra::create({0.5, 0.5}, {2, 3});
    std::vector<Element> xs;
    for (int n = 0; n < 3; ++n) xs.push_back(testing::random_positive(alg, rng));
    const PositiveSequence seq(xs);
    const auto a = maximal::sup_plus_norm(seq, 1.8);
    const auto b = maximal::sup_plus_norm(seq, 1.8, pg);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-5));
    CHECK(a.certificate_gap < 1e-10);
    check_feasible(b, seq);
  }
}

TEST_CASE("sup_plus_norm properties on random sequences") {
  testing::Rng rng(2024);
  for (int t = 0; t < 25; ++t) {
    auto alg = testing::random_algebra(rng, 3, 3);
    std::uniform_int_distribution<int> len(1, 4);
    std::uniform_real_distribution<double> pd(1.1, 4.0);
    const double p = pd(rng);
    std::vector<Element> xs;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) xs.push_back(testing::random_positive(alg, rng));
    PositiveSequence seq(xs);
    const auto w = maximal::sup_plus_norm(seq, p);
    check_feasible(w, seq);

    double best_single = 0.0;
    for (const Element& x : xs) best_single = std::max(best_single, algebra::lp_norm(x, p));
    CHECK(w.value >= best_single - 1e-6);

    // Appending an element never lowers the maximal norm.
    seq.push_back(testing::random_positive(alg, rng));
    const auto longer = maximal::sup_plus_norm(seq, p);
    CHECK(longer.value >= w.value - 1e-8);
    // Appending an element already dominated by the majorant changes nothing.
    seq.push_back(w.majorant * 0.5);
    CHECK(maximal::sup_plus_norm(seq, p).value == doctest::Approx(longer.value).epsilon(1e-9));
  }
}

TEST_CASE("sup_plus_norm: commutative oracle") {
  testing::Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    auto alg = TracialAlgebra::uniform(6);
    std::vector<Element> xs;
    std::vector<double> pointwise(6, 0.0);
    for (int n = 0; n < 4; ++n) {
      xs.push_back(testing::random_nonnegative_values(alg, rng));
      for (std::size_t s = 0; s < 6; ++s) {
        pointwise[s] = std::max(pointwise[s], xs.back().block(s)(0, 0).real());
      }
    }
    const double p = 1.5 + 0.1 * t;
    const auto w = maximal::sup_plus_norm(PositiveSequence(xs), p);
    double sum = 0.0;
    for (double v : pointwise) sum += std::pow(v, p) / 6.0;
    CHECK(std::abs(w.value - std::pow(sum, 1.0 / p)) < 1e-9);
  }
}

TEST_CASE("cuculescu examples") {
  auto c2 = TracialAlgebra::uniform(2);
  const std::vector<Element> small{values(c2, {0.5, 1.0}), values(c2, {0.2, 0.0})};
  CHECK(maximal::cuculescu(small, 1.0).e.element().max_abs_diff(Element::identity(c2)) == 0.0);

  const std::vector<Element> tall{values(c2, {3, 0})};
  const auto cut = maximal::cuculescu(tall, 1.0);
  CHECK(cut.e.element().max_abs_diff(values(c2, {0, 1})) < 1e-15);
  CHECK(1.0 - cut.e.trace() == doctest::Approx(0.5));
  CHECK(1.0 - cut.e.trace() <= algebra::lp_norm(tall[0], 1.0) / 1.0);

  auto m2 = TracialAlgebra::create({1.0}, {2});
  Matrix m(2, 2);
  m << 2, 1, 1, 2;
  const std::vector<Element> seq{Element::from_blocks(m2, {m})};
  const auto e = maximal::cuculescu(seq, 2.0).e.element();
  Matrix expected(2, 2);
  expected << 0.5, -0.5, -0.5, 0.5;
  CHECK(e.max_abs_diff(Element::from_blocks(m2, {expected})) < 1e-12);
  CHECK((e * seq[0] * e).max_abs_diff(e) < 1e-12);

  CHECK_THROWS_AS(maximal::cuculescu(seq, 0.0), DomainError);
  CHECK_THROWS_AS(maximal::cuculescu(seq, -1.0), DomainError);
}

TEST_CASE("cuculescu properties") {
  testing::Rng rng(99);
  for (int t = 0; t < 40; ++t) {
    auto alg = testing::random_algebra(rng, 3, 4);
    std::vector<Element> xs;
    for (int n = 0; n < 6; ++n) xs.push_back(testing::random_positive(alg, rng) * 2.0);
    const double lambda = 0.3 + 0.05 * t;
    const auto cut = maximal::cuculescu(xs, lambda);
    const Element& e = cut.e.element();
    CHECK((e * e).max_abs_diff(e) < 1e-8);
    for (const Element& x : xs) CHECK((e * x * e).norm_inf() <= lambda * (1.0 + 1e-8));
    // Prefix witnesses shrink: τ(q_n) is non-increasing.
    for (std::size_t n = 1; n < cut.q.size(); ++n) {
      CHECK(cut.q[n].trace() <= cut.q[n - 1].trace() + 1e-12);
      const auto prefix = maximal::cuculescu(std::span(xs).first(n + 1), lambda);
      CHECK(prefix.e.element().max_abs_diff(cut.q[n].element()) < 1e-10);
    }
  }
}

TEST_CASE("weak type witnesses on martingales") {
  auto c4 = TracialAlgebra::uniform(4);
  const auto filtration = testing::dyadic_filtration(2);

  const auto constant = maximal::weak_type_witness(Element::identity(c4), filtration, 2.0, 1.0);
  CHECK(constant.defect == 0.0);
  CHECK(constant.projection.element().max_abs_diff(Element::identity(c4)) == 0.0);

  // E_1 f = (2,2,0,0) is cut first, E_2 f = (4,0,0,0) then sees only {2,3}.
  const auto spike = maximal::weak_type_witness(values(c4, {4, 0, 0, 0}), filtration, 1.0, 1.0);
  CHECK(spike.defect == doctest::Approx(0.5));
  CHECK(spike.guarantee_applies);
  CHECK(spike.guarantee == doctest::Approx(1.0));
  CHECK(spike.defect <= spike.guarantee);

  testing::Rng rng(17);
  auto alg = TracialAlgebra::uniform(8, 2);
  const auto filt8 = testing::dyadic_filtration(3);
  for (int t = 0; t < 30; ++t) {
    const Element f = testing::random_positive(alg, rng) * 3.0;
    for (double lambda : {0.5, 1.0, 2.0}) {
      const auto w = maximal::weak_type_witness(f, filt8, lambda, 1.0);
      CHECK(w.defect <= algebra::lp_norm(f, 1.0) / lambda + 1e-9);
      CHECK(w.max_compressed_norm <= lambda * (1.0 + 1e-8));
    }
  }

  CHECK_THROWS_AS(maximal::weak_type_witness(values(c4, {1, -1, 0, 0}), filtration, 1.0, 1.0),
                  DomainError);
  const std::vector<algebra::Partition> decreasing{filtration[1], filtration[0]};
  CHECK_THROWS_AS(maximal::martingale(values(c4, {1, 1, 1, 1}), decreasing), StructuralError);
}

TEST_CASE("weak type witness on a raw sequence reports the realized constant") {
  auto c2 = TracialAlgebra::uniform(2);
  const std::vector<Element> seq{values(c2, {3, 0})};
  const auto w = maximal::weak_type_witness(seq, 1.0, 2.0);
  CHECK_FALSE(w.guarantee_applies);
  // τ(1−e) = 1/2 = C² λ⁻² ‖x‖₂², ‖x‖₂² = 4.5.
  CHECK(w.bound_constant == doctest::Approx(std::sqrt(0.5 / 4.5)));
}

TEST_CASE("strong type estimates") {
  testing::Rng rng(3);
  auto alg = TracialAlgebra::uniform(8, 2);
  std::vector<Element> testset;
  for (int i = 0; i < 5; ++i) testset.push_back(testing::random_positive(alg, rng));

  const std::vector<maximal::PositiveMap> identity{[](const Element& x) { return x; }};
  CHECK(maximal::strong_type_estimate(identity, 2.0, testset) == doctest::Approx(1.0));

  const algebra::Partition halves{{0, 1, 2, 3}, {4, 5, 6, 7}};
  const std::vector<maximal::PositiveMap> expectation{
      [&](const Element& x) { return algebra::conditional_expectation(x, halves); }};
  CHECK(maximal::strong_type_estimate(expectation, 2.0, testset) <= 1.0 + 1e-6);

  CHECK_THROWS_AS(maximal::strong_type_estimate(identity, 2.0, {}), DomainError);
}

TEST_CASE("strong type estimate for shift averages is stable in the number of maps") {
  const auto shift = ergodic::ActionModel::cyclic_shift(32);
  testing::Rng rng(50);
  std::vector<Element> testset;
  for (int i = 0; i < 50; ++i) testset.push_back(testing::random_nonnegative_values(shift.algebra(), rng));
  auto family = [&](int count) {
    std::vector<maximal::PositiveMap> maps;
    for (int n = 1; n <= count; ++n) {
      maps.emplace_back([&shift, n](const Element& x) { return ergodic::ball_average(shift, n, x); });
    }
    return maps;
  };
  const double c4 = maximal::strong_type_estimate(family(4), 2.0, testset);
  const double c8 = maximal::strong_type_estimate(family(8), 2.0, testset);
  CHECK(c8 >= c4 - 1e-9);
  CHECK(c8 <= 1.1 * c4);
}
