#pragma once

// Seeded instance generators for the property tests.

#include <cstdint>
#include <random>
#include <vector>

#include "ncerg/algebra.hpp"

namespace ncerg::testing {

using Rng = std::mt19937_64;

inline algebra::AlgebraPtr random_algebra(Rng& rng, int max_sites = 4, int max_dim = 3) {
  std::uniform_int_distribution<int> sites_dist(1, max_sites);
  std::uniform_int_distribution<int> dim_dist(1, max_dim);
  std::uniform_real_distribution<double> weight_dist(0.2, 1.0);
  const int sites = sites_dist(rng);
  std::vector<double> weights;
  std::vector<int> dims;
  double total = 0.0;
  for (int s = 0; s < sites; ++s) {
    weights.push_back(weight_dist(rng));
    dims.push_back(dim_dist(rng));
    total += weights.back();
  }
  for (double& w : weights) w /= total;
  // Renormalize the last weight so the sum is 1 to rounding.
  double head = 0.0;
  for (int s = 0; s + 1 < sites; ++s) head += weights[static_cast<std::size_t>(s)];
  weights.back() = 1.0 - head;
  return algebra::TracialAlgebra::create(weights, dims);
}

inline algebra::Element random_positive(const algebra::AlgebraPtr& alg, Rng& rng) {
  return algebra::random_hermitian(alg, rng, true);
}

inline algebra::Element random_hermitian(const algebra::AlgebraPtr& alg, Rng& rng) {
  return algebra::random_hermitian(alg, rng, false);
}

/// Non-negative scalar values drawn uniformly per site.
inline algebra::Element random_nonnegative_values(const algebra::AlgebraPtr& alg, Rng& rng,
                                                  double hi = 1.0) {
  std::uniform_real_distribution<double> dist(0.0, hi);
  std::vector<double> v(alg->sites());
  for (double& x : v) x = dist(rng);
  return algebra::Element::from_values(alg, v);
}

/// A random unitary (QR of a complex Gaussian matrix).
inline algebra::Matrix random_unitary(int d, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  algebra::Matrix m(d, d);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) m(r, c) = {g(rng), g(rng)};
  }
  Eigen::HouseholderQR<algebra::Matrix> qr(m);
  return qr.householderQ() * algebra::Matrix::Identity(d, d);
}

/// Dyadic filtration of Z_{2^levels}: partition k groups sites into blocks
/// of size 2^{levels-k}, k = 1..levels.
inline std::vector<algebra::Partition> dyadic_filtration(int levels) {
  std::vector<algebra::Partition> out;
  const std::size_t n = std::size_t{1} << levels;
  for (int k = 1; k <= levels; ++k) {
    const std::size_t block = n >> k;
    algebra::Partition p;
    for (std::size_t start = 0; start < n; start += block) {
      std::vector<std::size_t> cell;
      for (std::size_t s = start; s < start + block; ++s) cell.push_back(s);
      p.push_back(cell);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace ncerg::testing
