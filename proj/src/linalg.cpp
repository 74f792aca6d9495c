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

#include "seedless/linalg.hpp"

#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "seedless/errors.hpp"

namespace seedless::linalg {

ComplexMatrix identity(std::size_t dim) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix kron_all(std::span<const ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::Ones(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return m.rows() == m.cols() && (m.size() == 0 || hermiticity_defect(m) <= tol);
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("eigenvalues of a non-square matrix");
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
  return solver.eigenvalues();
}

double min_eigenvalue(const ComplexMatrix& m) { return hermitian_eigenvalues(m).minCoeff(); }

double trace_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) throw DimensionMismatch("trace_of_product");
  return (a.array() * b.transpose().array()).sum();
}

ComplexMatrix trace_out_leading(const ComplexMatrix& m, std::size_t keep_dim) {
  const auto d = static_cast<std::size_t>(m.rows());
  if (keep_dim == 0 || d % keep_dim != 0 || m.rows() != m.cols()) {
    throw DimensionMismatch("trace_out_leading: kept factor does not divide the dimension");
  }
  const auto k = static_cast<Eigen::Index>(keep_dim);
  const auto lead = static_cast<Eigen::Index>(d / keep_dim);
  ComplexMatrix out = ComplexMatrix::Zero(k, k);
  for (Eigen::Index i = 0; i < lead; ++i) out += m.block(i * k, i * k, k, k);
  return out;
}

ComplexMatrix trace_out_trailing(const ComplexMatrix& m, std::size_t trace_dim) {
  const auto d = static_cast<std::size_t>(m.rows());
  if (trace_dim == 0 || d % trace_dim != 0 || m.rows() != m.cols()) {
    throw DimensionMismatch("trace_out_trailing: traced factor does not divide the dimension");
  }
  const auto t = static_cast<Eigen::Index>(trace_dim);
  const auto keep = static_cast<Eigen::Index>(d / trace_dim);
  ComplexMatrix out(keep, keep);
  for (Eigen::Index i = 0; i < keep; ++i) {
    for (Eigen::Index j = 0; j < keep; ++j) {
      out(i, j) = m.block(i * t, j * t, t, t).trace();
    }
  }
  return out;
}

ComplexMatrix contract_leading(const ComplexMatrix& m, const ComplexMatrix& x) {
  const Eigen::Index d = x.rows();
  if (d == 0 || x.cols() != d || m.rows() != m.cols() || m.rows() % d != 0) {
    throw DimensionMismatch("contract_leading: operator does not match the leading factor");
  }
  const Eigen::Index rest = m.rows() / d;
  ComplexMatrix out = ComplexMatrix::Zero(rest, rest);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const Complex w = x(i, j);
      if (w == Complex(0.0, 0.0)) continue;
      out += w * m.block(j * rest, i * rest, rest, rest);
    }
  }
  return out;
}

ComplexMatrix permute_subsystems(const ComplexMatrix& m, std::span<const std::size_t> dims,
                                 std::span<const std::size_t> perm) {
  const std::size_t n = dims.size();
  if (perm.size() != n) throw DimensionMismatch("permute_subsystems: permutation length");
  const std::size_t total =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  if (static_cast<std::size_t>(m.rows()) != total || m.rows() != m.cols()) {
    throw DimensionMismatch("permute_subsystems: matrix does not match factor dimensions");
  }
  std::vector<bool> seen(n, false);
  for (auto p : perm) {
    if (p >= n || seen[p]) throw PreconditionViolation("permute_subsystems: not a permutation");
    seen[p] = true;
  }

  // Strides of the input factors.
  std::vector<std::size_t> in_stride(n, 1);
  for (std::size_t f = n; f-- > 1;) in_stride[f - 1] = in_stride[f] * dims[f];

  // map[out_index] = in_index
  std::vector<Eigen::Index> map(total);
  std::vector<std::size_t> digit(n, 0);
  for (std::size_t out = 0; out < total; ++out) {
    std::size_t in = 0;
    for (std::size_t j = 0; j < n; ++j) in += digit[j] * in_stride[perm[j]];
    map[out] = static_cast<Eigen::Index>(in);
    for (std::size_t j = n; j-- > 0;) {
      if (++digit[j] < dims[perm[j]]) break;
      digit[j] = 0;
    }
  }

  const auto t = static_cast<Eigen::Index>(total);
  ComplexMatrix out(t, t);
  for (Eigen::Index c = 0; c < t; ++c) {
    for (Eigen::Index r = 0; r < t; ++r) out(r, c) = m(map[r], map[c]);
  }
  return out;
}

ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

}  // namespace seedless::linalg
