// Copyright 2026 The opspace authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OPSPACE_LINALG_HPP
#define OPSPACE_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace opspace {

using cx = std::complex<double>;

/// Kronecker product with row-index-major block layout:
/// (A ⊗ B)[(i*rb + p), (j*cb + q)] = A(i,j) * B(p,q).
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Vectorization |i><j| -> |i> ⊗ |j>*, i.e. vec(A)[i*dim + j] = A(i,j).
/// Under this convention B ρ C maps to (B ⊗ Cᵀ) vec(ρ) and
/// vec(A)† vec(B) = Tr(A†B).
inline Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& op) {
  if (op.rows() != op.cols()) throw std::invalid_argument("vectorize: operator must be square");
  const Eigen::Index d = op.rows();
  Eigen::VectorXcd v(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = op(i, j);
  return v;
}

inline Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
  if (d * d != v.size()) throw std::invalid_argument("unvectorize: length is not a perfect square");
  Eigen::MatrixXcd op(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) op(i, j) = v(i * d + j);
  return op;
}

/// Hilbert-Schmidt inner product Tr(A†B).
inline cx hs_inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a.adjoint() * b).trace();
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace opspace

#endif  // OPSPACE_LINALG_HPP
