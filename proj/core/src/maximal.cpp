#include "ncerg/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace ncerg::maximal {

using algebra::Element;
using algebra::Matrix;
using algebra::Projection;

namespace {

using EigenSolver = Eigen::SelfAdjointEigenSolver<Matrix>;

Matrix hermitian(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double min_eig(const Matrix& m) {
  EigenSolver es(hermitian(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Matrix matrix_power(const Matrix& a, double p) {
  EigenSolver es(hermitian(a));
  const Eigen::VectorXd v =
      es.eigenvalues().unaryExpr([p](double l) { return std::pow(std::max(l, 0.0), p); });
  return es.eigenvectors() * v.asDiagonal() * es.eigenvectors().adjoint();
}

double trace_power(const Matrix& a, double p) {
  EigenSolver es(hermitian(a), Eigen::EigenvaluesOnly);
  double total = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    total += std::pow(std::max(es.eigenvalues()(i), 0.0), p);
  }
  return total;
}

// Orthonormal basis of the real space of d×d hermitian matrices under
// ⟨h, k⟩ = tr(h k).
std::vector<Matrix> hermitian_basis(int d) {
  std::vector<Matrix> basis;
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    Matrix e = Matrix::Zero(d, d);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      Matrix re = Matrix::Zero(d, d);
      re(i, j) = re(j, i) = r;
      basis.push_back(re);
      Matrix im = Matrix::Zero(d, d);
      im(i, j) = algebra::Complex(0.0, r);
      im(j, i) = algebra::Complex(0.0, -r);
      basis.push_back(im);
    }
  }
  return basis;
}

struct BlockSolution {
  Matrix a;
  double gap = 0.0;  // absolute bound on the suboptimality of tr(a^p)
};

// S = (Σ x_n^p)^{1/p} shifted by a multiple of 1 onto the boundary of the
// feasible set, plus `margin`.
Matrix initial_majorant(const std::vector<Matrix>& xs, double p, double margin) {
  const int d = static_cast<int>(xs.front().rows());
  Matrix sum = Matrix::Zero(d, d);
  for (const Matrix& x : xs) sum += matrix_power(x, p);
  Matrix a = matrix_power(sum, 1.0 / p);
  double shift = std::numeric_limits<double>::infinity();
  for (const Matrix& x : xs) shift = std::min(shift, min_eig(a - x));
  a -= shift * Matrix::Identity(d, d);
  a += margin * Matrix::Identity(d, d);
  return a;
}

// Blocks are normalized so that max ‖x_n‖_∞ = 1 before either solver runs.
BlockSolution solve_barrier(const std::vector<Matrix>& xs, double p, const SolverOptions& opt) {
  const int d = static_cast<int>(xs.front().rows());
  const auto basis = hermitian_basis(d);
  const auto K = static_cast<Eigen::Index>(basis.size());
  const double m = static_cast<double>(xs.size()) * d;

  // Returns false when a − x_n is not positive definite for some n.
  auto barrier = [&](const Matrix& a, double& value) {
    value = 0.0;
    for (const Matrix& x : xs) {
      Eigen::LLT<Matrix> llt(hermitian(a - x));
      if (llt.info() != Eigen::Success) return false;
      const Matrix& factor = llt.matrixLLT();
      for (Eigen::Index i = 0; i < d; ++i) {
        const double l = factor(i, i).real();
        if (!(l > 0.0)) return false;
        value -= 2.0 * std::log(l);
      }
    }
    return true;
  };

  Matrix a = initial_majorant(xs, p, 0.05);
  double t = m / std::max(trace_power(a, p), 1e-12);

  for (int outer = 0; outer < 200; ++outer) {
    for (int it = 0; it < 100; ++it) {
      EigenSolver es(hermitian(a));
      const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
      const Matrix& u = es.eigenvectors();

      // First divided differences of λ ↦ p λ^{p−1}.
      Eigen::MatrixXd psi1(d, d);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          const double li = lam(i), lj = lam(j);
          if (std::abs(li - lj) > 1e-9 * std::max({li, lj, 1e-300})) {
            psi1(i, j) = p * (std::pow(li, p - 1) - std::pow(lj, p - 1)) / (li - lj);
          } else {
            const double mid = std::max(0.5 * (li + lj), 1e-300);
            psi1(i, j) = p * (p - 1) * std::pow(mid, p - 2);
          }
        }
      }
      const Eigen::MatrixXd sqrt_psi1 = psi1.cwiseSqrt();

      Eigen::VectorXd grad = Eigen::VectorXd::Zero(K);
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(K, K);
      Eigen::MatrixXcd w(K, d * d);
      for (Eigen::Index k = 0; k < K; ++k) {
        const Matrix bt = u.adjoint() * basis[k] * u;
        double g = 0.0;
        for (int i = 0; i < d; ++i) g += p * std::pow(lam(i), p - 1) * bt(i, i).real();
        grad(k) = t * g;
        const Matrix scaled = bt.cwiseProduct(sqrt_psi1.cast<algebra::Complex>());
        w.row(k) = Eigen::Map<const Eigen::RowVectorXcd>(scaled.data(), d * d);
      }
      hess += t * (w * w.adjoint()).real();

      bool interior = true;
      for (const Matrix& x : xs) {
        Eigen::LLT<Matrix> llt(hermitian(a - x));
        if (llt.info() != Eigen::Success) {
          interior = false;
          break;
        }
        const Matrix linv = llt.matrixL().solve(Matrix::Identity(d, d));
        Eigen::MatrixXcd c(K, d * d);
        for (Eigen::Index k = 0; k < K; ++k) {
          const Matrix ck = linv * basis[k] * linv.adjoint();
          grad(k) -= ck.trace().real();
          c.row(k) = Eigen::Map<const Eigen::RowVectorXcd>(ck.data(), d * d);
        }
        hess += (c * c.adjoint()).real();
      }
      if (!interior) throw NonConvergence("barrier iterate left the feasible set", 1.0);

      const Eigen::VectorXd step = hess.ldlt().solve(-grad);
      const double decrement = -grad.dot(step);
      if (!(decrement > 2e-12)) break;

      Matrix direction = Matrix::Zero(d, d);
      for (Eigen::Index k = 0; k < K; ++k) direction += step(k) * basis[k];

      double base_barrier = 0.0;
      barrier(a, base_barrier);
      const double base = t * trace_power(a, p) + base_barrier;
      double s = 1.0;
      bool moved = false;
      while (s > 1e-14) {
        const Matrix cand = a + s * direction;
        double cand_barrier = 0.0;
        if (barrier(cand, cand_barrier)) {
          const double value = t * trace_power(cand, p) + cand_barrier;
          if (value <= base - 0.25 * s * decrement) {
            a = cand;
            moved = true;
            break;
          }
        }
        s *= 0.5;
      }
      if (!moved) break;
    }
    const double objective = trace_power(a, p);
    if (m / t <= opt.gap_tol * std::max(objective, 1e-300)) break;
    t *= 20.0;
  }
  return {a, m / t};
}

// Euclidean projection onto ∩_n {a ⪰ x_n} by Dykstra's cyclic scheme; the
// projection onto one cone is x + (a − x)_+.
Matrix dykstra_project(const Matrix& z, const std::vector<Matrix>& xs) {
  const int d = static_cast<int>(z.rows());
  std::vector<Matrix> increments(xs.size(), Matrix::Zero(d, d));
  Matrix y = z;
  for (int cycle = 0; cycle < 500; ++cycle) {
    const Matrix start = y;
    for (std::size_t n = 0; n < xs.size(); ++n) {
      const Matrix v = y + increments[n];
      EigenSolver es(hermitian(v - xs[n]));
      const Eigen::VectorXd pos = es.eigenvalues().cwiseMax(0.0);
      const Matrix proj = xs[n] + es.eigenvectors() * pos.asDiagonal() * es.eigenvectors().adjoint();
      increments[n] = v - proj;
      y = proj;
    }
    if ((y - start).norm() <= 1e-13 * (1.0 + y.norm())) break;
  }
  return y;
}

BlockSolution solve_projected_gradient(const std::vector<Matrix>& xs, double p,
                                       const SolverOptions& opt) {
  const int d = static_cast<int>(xs.front().rows());
  Matrix a = initial_majorant(xs, p, 0.0);
  double objective = trace_power(a, p);
  std::deque<double> history{objective};
  double eta = 0.5 / p;
  double gap = 0.0;

  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    const Matrix grad = p * matrix_power(a, p - 1);
    bool improved = false;
    while (eta > 1e-16) {
      const Matrix cand = dykstra_project(a - eta * grad, xs);
      const double value = trace_power(cand, p);
      if (value <= objective) {
        a = cand;
        objective = value;
        eta *= 1.5;
        improved = true;
        break;
      }
      eta *= 0.5;
    }
    history.push_back(objective);
    if (static_cast<int>(history.size()) > opt.window + 1) history.pop_front();
    if (!improved) break;
    if (static_cast<int>(history.size()) == opt.window + 1) {
      gap = (history.front() - history.back()) / std::max(history.back(), 1e-300);
      if (gap < opt.rel_tol) break;
    }
  }

  // Exact feasibility: shift by the largest violation.
  double violation = 0.0;
  for (const Matrix& x : xs) violation = std::max(violation, -min_eig(a - x));
  a += violation * Matrix::Identity(d, d);
  return {a, gap * trace_power(a, p)};
}

BlockSolution solve_block(std::vector<Matrix> xs, double p, const SolverOptions& opt) {
  const int d = static_cast<int>(xs.front().rows());
  double scale = 0.0;
  for (const Matrix& x : xs) {
    scale = std::max(scale, x.rows() == 1 ? std::abs(x(0, 0)) : EigenSolver(hermitian(x), Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff());
  }
  if (scale == 0.0) return {Matrix::Zero(d, d), 0.0};
  if (d == 1) {
    double best = 0.0;
    for (const Matrix& x : xs) best = std::max(best, x(0, 0).real());
    return {Matrix::Constant(1, 1, best), 0.0};
  }
  // A dominating element is itself the optimal majorant, since a ⪰ x
  // implies tr(a^p) ≥ tr(x^p).
  for (const Matrix& candidate : xs) {
    const bool dominates = std::all_of(xs.begin(), xs.end(), [&](const Matrix& x) {
      return min_eig(candidate - x) >= -1e-13 * scale;
    });
    if (dominates) return {candidate, 0.0};
  }
  for (Matrix& x : xs) x /= scale;
  BlockSolution sol = opt.solver == Solver::kBarrier ? solve_barrier(xs, p, opt)
                                                     : solve_projected_gradient(xs, p, opt);
  sol.a *= scale;
  sol.gap *= std::pow(scale, p);
  return sol;
}

void require_exponent(double p) {
  if (!(p > 1.0) || std::isinf(p)) throw DomainError("sup_plus_norm requires p in (1, inf)");
}

}  // namespace

// ---------------------------------------------------------------------------
// PositiveSequence

PositiveSequence::PositiveSequence(std::vector<Element> elements, double tol) {
  if (elements.empty()) throw DomainError("a positive sequence needs at least one element");
  for (Element& x : elements) push_back(std::move(x), tol);
}

void PositiveSequence::push_back(Element x, double tol) {
  if (!elements_.empty() && !x.algebra()->same_shape(*algebra())) {
    throw StructuralError("sequence elements belong to different algebras");
  }
  if (!algebra::is_positive(x, tol)) throw DomainError("sequence element is not positive");
  elements_.push_back(x.hermitian_part());
}

PositiveSequence PositiveSequence::prefix(std::size_t count) const {
  if (count == 0 || count > elements_.size()) throw DomainError("prefix length out of range");
  return PositiveSequence(std::vector<Element>(elements_.begin(), elements_.begin() + count));
}

// ---------------------------------------------------------------------------
// Maximal norm

MaximalWitness sup_plus_norm(const PositiveSequence& seq, double p, const SolverOptions& options) {
  require_exponent(p);
  const auto& alg = seq.algebra();
  Element a(alg);
  double gap_sum = 0.0;
  for (std::size_t s = 0; s < alg->sites(); ++s) {
    std::vector<Matrix> xs;
    xs.reserve(seq.size());
    for (const Element& x : seq.elements()) xs.emplace_back(x.block(s));
    BlockSolution sol = solve_block(std::move(xs), p, options);
    a.block(s) = sol.a;
    gap_sum += alg->weight(s) * sol.gap / alg->dim(s);
  }
  MaximalWitness w{std::move(a), 0.0, 0.0};
  w.value = algebra::lp_norm(w.majorant, p);
  const double objective = std::pow(w.value, p);
  w.certificate_gap = objective > 0.0 ? gap_sum / objective : 0.0;
  return w;
}

// ---------------------------------------------------------------------------
// Cuculescu projections

CuculescuResult cuculescu(std::span<const Element> seq, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("cuculescu requires lambda > 0");
  if (seq.empty()) throw DomainError("cuculescu needs a non-empty sequence");
  const auto& alg = seq.front().algebra();
  for (const Element& x : seq) {
    if (!x.algebra()->same_shape(*alg)) throw StructuralError("sequence mixes algebras");
    if (!x.is_hermitian(1e-10 * (1.0 + x.norm_inf()))) {
      throw DomainError("cuculescu requires hermitian elements");
    }
  }

  // Orthonormal bases of range(q_n), one per block.
  std::vector<Matrix> bases;
  for (std::size_t s = 0; s < alg->sites(); ++s) {
    bases.push_back(Matrix::Identity(alg->dim(s), alg->dim(s)));
  }

  CuculescuResult out{{}, Projection::identity(alg)};
  for (const Element& x : seq) {
    Element q(alg);
    for (std::size_t s = 0; s < alg->sites(); ++s) {
      Matrix& basis = bases[s];
      if (basis.cols() > 0) {
        const Matrix y = hermitian(basis.adjoint() * x.block(s) * basis);
        EigenSolver es(y);
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
          if (std::abs(es.eigenvalues()(i)) <= lambda) keep.push_back(i);
        }
        Matrix next(basis.rows(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j) {
          next.col(static_cast<Eigen::Index>(j)) = basis * es.eigenvectors().col(keep[j]);
        }
        basis = std::move(next);
      }
      q.block(s) = basis * basis.adjoint();
    }
    out.q.emplace_back(std::move(q));
  }
  out.e = out.q.back();
  return out;
}

// ---------------------------------------------------------------------------
// Weak and strong type

namespace {

WeakTypeWitness witness_from(std::span<const Element> seq, double lambda, double p,
                             const Element& x) {
  if (!(p >= 1.0) || std::isinf(p)) throw DomainError("weak_type_witness requires p in [1, inf)");
  CuculescuResult cut = cuculescu(seq, lambda);
  WeakTypeWitness w{cut.e, lambda, 0.0, 0.0, 0.0, false, 0.0};
  w.defect = std::max(0.0, 1.0 - cut.e.trace());
  const double norm = algebra::lp_norm(x, p);
  if (w.defect == 0.0) {
    w.bound_constant = 0.0;
  } else if (norm == 0.0) {
    w.bound_constant = algebra::kInfinity;
  } else {
    w.bound_constant = lambda * std::pow(w.defect, 1.0 / p) / norm;
  }
  const Element& e = cut.e.element();
  for (const Element& xn : seq) {
    w.max_compressed_norm = std::max(w.max_compressed_norm, (e * xn * e).norm_inf());
  }
  return w;
}

bool refines(const algebra::Partition& fine, const algebra::Partition& coarse, std::size_t sites) {
  std::vector<std::size_t> owner(sites, sites);
  for (std::size_t c = 0; c < coarse.size(); ++c) {
    for (std::size_t s : coarse[c]) {
      if (s < sites) owner[s] = c;
    }
  }
  for (const auto& cell : fine) {
    for (std::size_t s : cell) {
      if (s >= sites || owner[s] != owner[cell.front()]) return false;
    }
  }
  return true;
}

}  // namespace

WeakTypeWitness weak_type_witness(std::span<const Element> seq, double lambda, double p) {
  if (seq.empty()) throw DomainError("weak_type_witness needs a non-empty sequence");
  return witness_from(seq, lambda, p, seq.back());
}

std::vector<Element> martingale(const Element& f, std::span<const algebra::Partition> filtration) {
  std::vector<Element> out;
  out.reserve(filtration.size());
  for (std::size_t k = 0; k < filtration.size(); ++k) {
    if (k > 0 && !refines(filtration[k], filtration[k - 1], f.sites())) {
      throw StructuralError("filtration is not increasing");
    }
    out.push_back(algebra::conditional_expectation(f, filtration[k]));
  }
  return out;
}

WeakTypeWitness weak_type_witness(const Element& f, std::span<const algebra::Partition> filtration,
                                  double lambda, double p) {
  if (!algebra::is_positive(f)) throw DomainError("martingale witness requires a positive f");
  if (filtration.empty()) throw DomainError("filtration must not be empty");
  const std::vector<Element> seq = martingale(f, filtration);
  WeakTypeWitness w = witness_from(seq, lambda, p, f);
  w.guarantee_applies = true;
  w.guarantee = algebra::lp_norm(f, 1.0) / lambda;
  return w;
}

double strong_type_estimate(std::span<const PositiveMap> family, double p,
                            std::span<const Element> testset, const SolverOptions& options) {
  if (testset.empty()) throw DomainError("strong_type_estimate needs a non-empty test set");
  if (family.empty()) throw DomainError("strong_type_estimate needs a non-empty family");
  double best = 0.0;
  for (const Element& x : testset) {
    const double norm = algebra::lp_norm(x, p);
    if (norm == 0.0) continue;
    std::vector<Element> images;
    images.reserve(family.size());
    for (const PositiveMap& map : family) images.push_back(map(x));
    const MaximalWitness w = sup_plus_norm(PositiveSequence(std::move(images)), p, options);
    best = std::max(best, w.value / norm);
  }
  return best;
}

}  // namespace ncerg::maximal
