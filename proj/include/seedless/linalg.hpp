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

// Dense complex linear algebra shared by every module. Matrices are Eigen
// MatrixXcd; tensor products use the big-endian convention (the first factor
// varies slowest), so the basis index of |x_1 ... x_n> is
// x_1 d_2...d_n + ... + x_n.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace seedless::linalg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Largest total Hilbert-space dimension any dense routine will accept.
inline constexpr std::size_t kMaxDimension = std::size_t{1} << 12;

ComplexMatrix identity(std::size_t dim);

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron_all(std::span<const ComplexMatrix> factors);

/// max_ij |M - M^dagger|_ij
double hermiticity_defect(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = 1e-12);

/// Eigenvalues of the Hermitian part (M + M^dagger)/2, ascending.
RealVector hermitian_eigenvalues(const ComplexMatrix& m);
double min_eigenvalue(const ComplexMatrix& m);

/// Sum of singular values.
double trace_norm(const ComplexMatrix& m);

/// tr(a b) without forming the product.
Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Partial trace over the leading factor of dimension dim / keep_dim; keeps
/// the trailing keep_dim factor.
ComplexMatrix trace_out_leading(const ComplexMatrix& m, std::size_t keep_dim);

/// Partial trace over the trailing factor of dimension trace_dim.
ComplexMatrix trace_out_trailing(const ComplexMatrix& m, std::size_t trace_dim);

/// tr_1[(x (x) 1) m] where m acts on (dim of x) (x) rest.
ComplexMatrix contract_leading(const ComplexMatrix& m, const ComplexMatrix& x);

/// Reorders tensor factors: output factor j is input factor perm[j].
ComplexMatrix permute_subsystems(const ComplexMatrix& m,
                                 std::span<const std::size_t> dims,
                                 std::span<const std::size_t> perm);

/// |v><v|
ComplexMatrix projector(const ComplexVector& v);

}  // namespace seedless::linalg
