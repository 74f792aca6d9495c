// Copyright 2026 The seedless-di Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seedless/random_ops.hpp"

#include <cmath>

namespace seedless::random {

using linalg::Complex;
using linalg::ComplexMatrix;

ComplexMatrix ginibre(Rng& rng, std::size_t rows, std::size_t cols) {
  ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const double scale = std::sqrt(0.5);
  for (Eigen::Index c = 0; c < g.cols(); ++c) {
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(r, c) = scale * Complex(re, im);
    }
  }
  return g;
}

ComplexMatrix haar_unitary(Rng& rng, std::size_t dim) {
  const ComplexMatrix g = ginibre(rng, dim, dim);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0) q.col(j) *= d / mag;
  }
  return q;
}

ComplexMatrix ginibre_density_matrix(Rng& rng, std::size_t dim, std::size_t rank) {
  const ComplexMatrix g = ginibre(rng, dim, rank);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

linalg::ComplexVector random_pure_state(Rng& rng, std::size_t dim) {
  linalg::ComplexVector v = ginibre(rng, dim, 1).col(0);
  v.normalize();
  return v;
}

ComplexMatrix random_hermitian(Rng& rng, std::size_t dim, double lo, double hi) {
  const ComplexMatrix u = haar_unitary(rng, dim);
  linalg::RealVector lambda(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda(i) = rng.uniform(lo, hi);
  ComplexMatrix h = u * lambda.cast<Complex>().asDiagonal() * u.adjoint();
  return 0.5 * (h + h.adjoint());
}

}  // namespace seedless::random
