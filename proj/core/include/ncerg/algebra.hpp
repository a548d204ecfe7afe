#pragma once

// Finite-dimensional tracial algebras ⊕_s M_{d_s} with the normalized trace
// τ(x) = Σ_s w_s · tr(x_s)/d_s, and the operator calculus used by the
// maximal and ergodic modules.

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ncerg/errors.hpp"

namespace ncerg::algebra {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using BlockView = Eigen::Map<Matrix>;
using ConstBlockView = Eigen::Map<const Matrix>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Relative tolerance of the positivity test: x ⪰ 0 iff
/// λ_min(x) ≥ −kPositivityTol · (1 + ‖x‖_∞).
inline constexpr double kPositivityTol = 1e-9;

class TracialAlgebra {
 public:
  /// Weights must be positive and sum to 1 (within 1e-12); dims must be ≥ 1.
  static std::shared_ptr<const TracialAlgebra> create(std::vector<double> weights,
                                                      std::vector<int> dims);
  /// `sites` copies of M_dim with uniform weights, i.e. L∞(Z_sites) ⊗ M_dim.
  static std::shared_ptr<const TracialAlgebra> uniform(std::size_t sites, int dim = 1);

  std::size_t sites() const { return weights_.size(); }
  double weight(std::size_t s) const { return weights_[s]; }
  int dim(std::size_t s) const { return dims_[s]; }
  std::size_t offset(std::size_t s) const { return offsets_[s]; }
  /// Number of complex scalars in the flat storage of an element.
  std::size_t storage_size() const { return offsets_.back(); }
  std::span<const double> weights() const { return weights_; }
  std::span<const int> dims() const { return dims_; }

  bool commutative() const { return max_dim_ == 1; }
  int max_dim() const { return max_dim_; }

  bool same_shape(const TracialAlgebra& other) const;

 private:
  TracialAlgebra(std::vector<double> weights, std::vector<int> dims);

  std::vector<double> weights_;
  std::vector<int> dims_;
  std::vector<std::size_t> offsets_;
  int max_dim_ = 1;
};

using AlgebraPtr = std::shared_ptr<const TracialAlgebra>;

/// An element of a TracialAlgebra, stored as one contiguous column-major
/// array of blocks. Value type; the parent algebra is shared.
class Element {
 public:
  explicit Element(AlgebraPtr algebra);

  static Element zero(AlgebraPtr algebra) { return Element(std::move(algebra)); }
  static Element identity(AlgebraPtr algebra);
  /// Site-constant scalars: x_s = values[s] · 1_{d_s}.
  static Element from_values(AlgebraPtr algebra, std::span<const double> values);
  static Element from_blocks(AlgebraPtr algebra, const std::vector<Matrix>& blocks);

  const AlgebraPtr& algebra() const { return algebra_; }
  std::size_t sites() const { return algebra_->sites(); }

  BlockView block(std::size_t s);
  ConstBlockView block(std::size_t s) const;
  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  Element adjoint() const;
  bool is_hermitian(double tol = 1e-10) const;
  /// Replaces every block by (b + b*)/2.
  Element hermitian_part() const;

  Element& operator+=(const Element& other);
  Element& operator-=(const Element& other);
  Element& operator*=(Complex scalar);
  Element& operator*=(double scalar);

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(Element a, double s) { return a *= s; }
  friend Element operator*(double s, Element a) { return a *= s; }
  friend Element operator*(Element a, Complex s) { return a *= s; }
  /// Blockwise operator product.
  friend Element operator*(const Element& a, const Element& b);

  /// Largest singular value over all blocks.
  double norm_inf() const;
  /// Smallest eigenvalue over all blocks; requires a hermitian element.
  double min_eigenvalue() const;
  double max_eigenvalue() const;

  /// Largest entrywise distance, for structural comparisons in tests.
  double max_abs_diff(const Element& other) const;

 private:
  void require_same_parent(const Element& other) const;

  AlgebraPtr algebra_;
  std::vector<Complex> data_;
};

/// e = e* = e², checked at construction (eigenvalues in {0,1} within 1e-8).
class Projection {
 public:
  explicit Projection(Element e, double tol = 1e-8);
  static Projection identity(AlgebraPtr algebra);
  static Projection zero(AlgebraPtr algebra);

  const Element& element() const { return e_; }
  double trace() const;
  Projection complement() const;

 private:
  struct Unchecked {};
  Projection(Element e, Unchecked) : e_(std::move(e)) {}
  friend Projection spectral_projection(const Element&, double, double);

  Element e_;
};

/// A partition of the sites of an algebra into cells.
using Partition = std::vector<std::vector<std::size_t>>;

Complex trace(const Element& x);
/// τ(x* y).
Complex inner(const Element& x, const Element& y);

/// τ(|x|^p)^{1/p} for p ∈ [1, ∞); the largest singular value for p = ∞.
double lp_norm(const Element& x, double p);

/// f(x) by eigendecomposition of each block; x must be hermitian.
Element apply_function(const Element& x, const std::function<double(double)>& f);
/// |x| = (x* x)^{1/2}.
Element abs(const Element& x);
Element positive_part(const Element& x);

bool is_positive(const Element& x, double tol = kPositivityTol);

/// Projection onto the eigenspaces of x with eigenvalue in [lo, hi]. lo > hi
/// gives the zero projection.
Projection spectral_projection(const Element& x, double lo, double hi);

/// Weighted average of the blocks of each cell, broadcast back over the
/// cell. Throws StructuralError if the cells do not partition the sites or a
/// cell mixes block dimensions.
Element conditional_expectation(const Element& x, const Partition& partition);

/// Least c ≥ 0 with c · upper − lower ⪰ 0, computed blockwise on the range of
/// `upper`. Returns +∞ when `lower` is not supported inside that range.
double least_domination_constant(const Element& lower, const Element& upper,
                                 double tol = 1e-10);

/// Random element with independent Gaussian entries made hermitian, scaled to
/// ‖x‖_∞ ≈ 1. Positive when `positive` (x = y*y/‖y*y‖_∞).
template <class Rng>
Element random_hermitian(const AlgebraPtr& algebra, Rng& rng, bool positive = false);

}  // namespace ncerg::algebra

#include "ncerg/algebra_random.ipp"
