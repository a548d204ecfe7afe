#include "ncerg/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ncerg::algebra {
namespace {

using EigenSolver = Eigen::SelfAdjointEigenSolver<Matrix>;

// Hermitian part of a block, so that eigensolvers see exact symmetry.
Matrix symmetrized(const ConstBlockView& b) { return 0.5 * (b + b.adjoint()); }

}  // namespace

// ---------------------------------------------------------------------------
// TracialAlgebra

TracialAlgebra::TracialAlgebra(std::vector<double> weights, std::vector<int> dims)
    : weights_(std::move(weights)), dims_(std::move(dims)) {
  offsets_.reserve(dims_.size() + 1);
  offsets_.push_back(0);
  for (int d : dims_) {
    offsets_.push_back(offsets_.back() + static_cast<std::size_t>(d) * d);
    max_dim_ = std::max(max_dim_, d);
  }
}

std::shared_ptr<const TracialAlgebra> TracialAlgebra::create(std::vector<double> weights,
                                                             std::vector<int> dims) {
  if (weights.empty()) throw StructuralError("tracial algebra needs at least one site");
  if (weights.size() != dims.size()) {
    throw StructuralError("weights and block dimensions differ in length");
  }
  long double total = 0.0L;
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("site weights must be positive");
    total += w;
  }
  if (std::abs(static_cast<double>(total) - 1.0) > 1e-12) {
    throw DomainError("site weights must sum to 1, got " +
                      std::to_string(static_cast<double>(total)));
  }
  for (int d : dims) {
    if (d < 1) throw StructuralError("block dimension must be at least 1");
  }
  return std::shared_ptr<const TracialAlgebra>(
      new TracialAlgebra(std::move(weights), std::move(dims)));
}

std::shared_ptr<const TracialAlgebra> TracialAlgebra::uniform(std::size_t sites, int dim) {
  if (sites == 0) throw StructuralError("tracial algebra needs at least one site");
  std::vector<double> w(sites, 1.0 / static_cast<double>(sites));
  return create(std::move(w), std::vector<int>(sites, dim));
}

bool TracialAlgebra::same_shape(const TracialAlgebra& other) const {
  return this == &other || (dims_ == other.dims_ && weights_ == other.weights_);
}

// ---------------------------------------------------------------------------
// Element

Element::Element(AlgebraPtr algebra)
    : algebra_(std::move(algebra)), data_(algebra_->storage_size(), Complex(0.0, 0.0)) {}

Element Element::identity(AlgebraPtr algebra) {
  Element x(std::move(algebra));
  for (std::size_t s = 0; s < x.sites(); ++s) x.block(s).setIdentity();
  return x;
}

Element Element::from_values(AlgebraPtr algebra, std::span<const double> values) {
  if (values.size() != algebra->sites()) {
    throw StructuralError("value count does not match the number of sites");
  }
  Element x(std::move(algebra));
  for (std::size_t s = 0; s < x.sites(); ++s) {
    x.block(s).setIdentity();
    x.block(s) *= values[s];
  }
  return x;
}

Element Element::from_blocks(AlgebraPtr algebra, const std::vector<Matrix>& blocks) {
  if (blocks.size() != algebra->sites()) {
    throw StructuralError("block count does not match the number of sites");
  }
  Element x(std::move(algebra));
  for (std::size_t s = 0; s < blocks.size(); ++s) {
    const int d = x.algebra_->dim(s);
    if (blocks[s].rows() != d || blocks[s].cols() != d) {
      throw StructuralError("block " + std::to_string(s) + " has the wrong shape");
    }
    x.block(s) = blocks[s];
  }
  return x;
}

BlockView Element::block(std::size_t s) {
  const int d = algebra_->dim(s);
  return BlockView(data_.data() + algebra_->offset(s), d, d);
}

ConstBlockView Element::block(std::size_t s) const {
  const int d = algebra_->dim(s);
  return ConstBlockView(data_.data() + algebra_->offset(s), d, d);
}

void Element::require_same_parent(const Element& other) const {
  if (!algebra_->same_shape(*other.algebra_)) {
    throw StructuralError("elements belong to different tracial algebras");
  }
}

Element Element::adjoint() const {
  Element y(algebra_);
  for (std::size_t s = 0; s < sites(); ++s) y.block(s) = block(s).adjoint();
  return y;
}

bool Element::is_hermitian(double tol) const {
  for (std::size_t s = 0; s < sites(); ++s) {
    const auto b = block(s);
    if ((b - b.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

Element Element::hermitian_part() const {
  Element y(algebra_);
  for (std::size_t s = 0; s < sites(); ++s) y.block(s) = symmetrized(block(s));
  return y;
}

Element& Element::operator+=(const Element& other) {
  require_same_parent(other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Element& Element::operator-=(const Element& other) {
  require_same_parent(other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Element& Element::operator*=(Complex scalar) {
  for (auto& v : data_) v *= scalar;
  return *this;
}

Element& Element::operator*=(double scalar) {
  for (auto& v : data_) v *= scalar;
  return *this;
}

Element operator*(const Element& a, const Element& b) {
  a.require_same_parent(b);
  Element c(a.algebra_);
  if (a.algebra_->commutative()) {
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] = a.data_[i] * b.data_[i];
    return c;
  }
  for (std::size_t s = 0; s < a.sites(); ++s) c.block(s).noalias() = a.block(s) * b.block(s);
  return c;
}

double Element::norm_inf() const {
  double best = 0.0;
  for (std::size_t s = 0; s < sites(); ++s) {
    const auto b = block(s);
    if (b.rows() == 1) {
      best = std::max(best, std::abs(b(0, 0)));
    } else {
      Eigen::JacobiSVD<Matrix> svd(b);
      best = std::max(best, svd.singularValues()(0));
    }
  }
  return best;
}

double Element::min_eigenvalue() const {
  double best = kInfinity;
  for (std::size_t s = 0; s < sites(); ++s) {
    const auto b = block(s);
    if (b.rows() == 1) {
      best = std::min(best, b(0, 0).real());
    } else {
      EigenSolver es(symmetrized(b), Eigen::EigenvaluesOnly);
      best = std::min(best, es.eigenvalues()(0));
    }
  }
  return best;
}

double Element::max_eigenvalue() const {
  double best = -kInfinity;
  for (std::size_t s = 0; s < sites(); ++s) {
    const auto b = block(s);
    if (b.rows() == 1) {
      best = std::max(best, b(0, 0).real());
    } else {
      EigenSolver es(symmetrized(b), Eigen::EigenvaluesOnly);
      best = std::max(best, es.eigenvalues()(b.rows() - 1));
    }
  }
  return best;
}

double Element::max_abs_diff(const Element& other) const {
  require_same_parent(other);
  double best = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    best = std::max(best, std::abs(data_[i] - other.data_[i]));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Projection

Projection::Projection(Element e, double tol) : e_(std::move(e)) {
  if (!e_.is_hermitian(tol)) throw DomainError("projection must be self-adjoint");
  if ((e_ * e_).max_abs_diff(e_) > tol) throw DomainError("projection must be idempotent");
}

Projection Projection::identity(AlgebraPtr algebra) {
  return Projection(Element::identity(std::move(algebra)), Unchecked{});
}

Projection Projection::zero(AlgebraPtr algebra) {
  return Projection(Element::zero(std::move(algebra)), Unchecked{});
}

double Projection::trace() const { return algebra::trace(e_).real(); }

Projection Projection::complement() const {
  return Projection(Element::identity(e_.algebra()) - e_, Unchecked{});
}

// ---------------------------------------------------------------------------
// Trace, norms and functional calculus

Complex trace(const Element& x) {
  const auto& alg = *x.algebra();
  Complex total(0.0, 0.0);
  for (std::size_t s = 0; s < alg.sites(); ++s) {
    total += alg.weight(s) * x.block(s).trace() / static_cast<double>(alg.dim(s));
  }
  return total;
}

Complex inner(const Element& x, const Element& y) {
  const auto& alg = *x.algebra();
  if (!alg.same_shape(*y.algebra())) {
    throw StructuralError("elements belong to different tracial algebras");
  }
  Complex total(0.0, 0.0);
  for (std::size_t s = 0; s < alg.sites(); ++s) {
    const Complex hs = (x.block(s).adjoint() * y.block(s)).trace();
    total += alg.weight(s) * hs / static_cast<double>(alg.dim(s));
  }
  return total;
}

double lp_norm(const Element& x, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm requires p >= 1");
  if (std::isinf(p)) return x.norm_inf();
  const auto& alg = *x.algebra();
  // Scale by ‖x‖_∞ before raising to p to avoid overflow for large p.
  const double scale = x.norm_inf();
  if (scale == 0.0) return 0.0;
  double total = 0.0;
  for (std::size_t s = 0; s < alg.sites(); ++s) {
    const auto b = x.block(s);
    double block_sum = 0.0;
    if (b.rows() == 1) {
      block_sum = std::pow(std::abs(b(0, 0)) / scale, p);
    } else {
      Eigen::JacobiSVD<Matrix> svd(b);
      for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        block_sum += std::pow(svd.singularValues()(i) / scale, p);
      }
    }
    total += alg.weight(s) * block_sum / static_cast<double>(alg.dim(s));
  }
  return scale * std::pow(total, 1.0 / p);
}

Element apply_function(const Element& x, const std::function<double(double)>& f) {
  Element y(x.algebra());
  for (std::size_t s = 0; s < x.sites(); ++s) {
    const auto b = x.block(s);
    if (b.rows() == 1) {
      y.block(s)(0, 0) = f(b(0, 0).real());
      continue;
    }
    EigenSolver es(symmetrized(b));
    Eigen::VectorXd values = es.eigenvalues().unaryExpr(f);
    y.block(s) = es.eigenvectors() * values.asDiagonal() * es.eigenvectors().adjoint();
  }
  return y;
}

Element abs(const Element& x) {
  return apply_function((x.adjoint() * x).hermitian_part(),
                        [](double v) { return std::sqrt(std::max(v, 0.0)); });
}

Element positive_part(const Element& x) {
  return apply_function(x, [](double v) { return std::max(v, 0.0); });
}

bool is_positive(const Element& x, double tol) {
  if (!x.is_hermitian(1e-10 * (1.0 + x.norm_inf()))) return false;
  return x.min_eigenvalue() >= -tol * (1.0 + x.norm_inf());
}

Projection spectral_projection(const Element& x, double lo, double hi) {
  if (!x.is_hermitian(1e-10 * (1.0 + x.norm_inf()))) {
    throw DomainError("spectral_projection requires a hermitian element");
  }
  if (lo > hi) return Projection::zero(x.algebra());
  Element e = apply_function(x, [lo, hi](double v) { return v >= lo && v <= hi ? 1.0 : 0.0; });
  return Projection(std::move(e), Projection::Unchecked{});
}

Element conditional_expectation(const Element& x, const Partition& partition) {
  const auto& alg = *x.algebra();
  std::vector<int> seen(alg.sites(), 0);
  Element y(x.algebra());
  for (const auto& cell : partition) {
    if (cell.empty()) throw StructuralError("partition has an empty cell");
    const int d = alg.dim(cell.front());
    Matrix acc = Matrix::Zero(d, d);
    double mass = 0.0;
    for (std::size_t s : cell) {
      if (s >= alg.sites()) throw StructuralError("partition names a site outside the algebra");
      if (alg.dim(s) != d) throw StructuralError("partition cell mixes block dimensions");
      ++seen[s];
      acc += alg.weight(s) * x.block(s);
      mass += alg.weight(s);
    }
    acc /= mass;
    for (std::size_t s : cell) y.block(s) = acc;
  }
  if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; })) {
    throw StructuralError("partition does not cover every site exactly once");
  }
  return y;
}

double least_domination_constant(const Element& lower, const Element& upper, double tol) {
  if (!lower.algebra()->same_shape(*upper.algebra())) {
    throw StructuralError("elements belong to different tracial algebras");
  }
  double best = 0.0;
  for (std::size_t s = 0; s < lower.sites(); ++s) {
    const auto lo = lower.block(s);
    const auto up = upper.block(s);
    const double scale = std::max({1.0, up.cwiseAbs().maxCoeff(), lo.cwiseAbs().maxCoeff()});
    if (lo.rows() == 1) {
      const double l = lo(0, 0).real();
      const double u = up(0, 0).real();
      if (l <= tol * scale) continue;
      if (u <= tol * scale) return kInfinity;
      best = std::max(best, l / u);
      continue;
    }
    EigenSolver es(symmetrized(up));
    const auto& values = es.eigenvalues();
    const Eigen::Index d = values.size();
    Eigen::Index first = 0;
    while (first < d && values(first) <= tol * scale) ++first;
    const Matrix basis = es.eigenvectors().rightCols(d - first);
    // Any part of `lower` outside range(upper) cannot be dominated.
    const Matrix lo_sym = symmetrized(lo);
    if (first > 0) {
      const Matrix kernel = es.eigenvectors().leftCols(first);
      if ((kernel.adjoint() * lo_sym * kernel).cwiseAbs().maxCoeff() > tol * scale) {
        return kInfinity;
      }
    }
    if (first == d) continue;
    const Eigen::VectorXd inv_sqrt = values.tail(d - first).cwiseSqrt().cwiseInverse();
    const Matrix whitened =
        inv_sqrt.asDiagonal() * (basis.adjoint() * lo_sym * basis) * inv_sqrt.asDiagonal();
    EigenSolver ws(0.5 * (whitened + whitened.adjoint()), Eigen::EigenvaluesOnly);
    best = std::max(best, ws.eigenvalues()(ws.eigenvalues().size() - 1));
  }
  return best;
}

}  // namespace ncerg::algebra
