#pragma once

#include <random>

namespace ncerg::algebra {

template <class Rng>
Element random_hermitian(const AlgebraPtr& algebra, Rng& rng, bool positive) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Element x(algebra);
  for (std::size_t s = 0; s < algebra->sites(); ++s) {
    const int d = algebra->dim(s);
    Matrix y(d, d);
    for (int c = 0; c < d; ++c) {
      for (int r = 0; r < d; ++r) {
        y(r, c) = d == 1 ? Complex(gauss(rng), 0.0) : Complex(gauss(rng), gauss(rng));
      }
    }
    x.block(s) = positive ? Matrix(y.adjoint() * y) : Matrix(0.5 * (y + y.adjoint()));
  }
  const double scale = x.norm_inf();
  if (scale > 0.0) x *= 1.0 / scale;
  return x;
}

}  // namespace ncerg::algebra
