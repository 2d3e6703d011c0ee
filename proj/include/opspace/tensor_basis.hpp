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

#ifndef OPSPACE_TENSOR_BASIS_HPP
#define OPSPACE_TENSOR_BASIS_HPP

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "opspace/clebsch_gordan.hpp"
#include "opspace/linalg.hpp"
#include "opspace/spin.hpp"

namespace opspace {

/// Orthonormal spherical tensor operator basis {T^k_q} for a spin-j system:
/// rank k = 0..2j, component q = -k..k, ordered by the flat index k^2+k+q so
/// each rank sector occupies a contiguous block. Operators are simultaneous
/// eigenoperators of the adjoint Casimir (eigenvalue k(k+1)) and of [Jz, .]
/// (eigenvalue q), orthonormal under Tr(A†B).
struct TensorBasis {
  SpinSystem spin;
  int max_rank = 0;  // 2j = N
  int op_dim = 0;    // D = (N+1)^2
  std::vector<Eigen::MatrixXcd> tensors;  // flat order
  Eigen::MatrixXcd vectorized;            // D x D, column f = vec(T^k_q)

  static int flat_index(int k, int q) { return k * k + k + q; }
  static std::pair<int, int> kq_of(int flat) {
    int k = static_cast<int>(std::sqrt(static_cast<double>(flat)));
    while ((k + 1) * (k + 1) <= flat) ++k;
    while (k * k > flat) --k;
    return {k, flat - k * k - k};
  }

  const Eigen::MatrixXcd& tensor(int k, int q) const {
    if (k < 0 || k > max_rank || std::abs(q) > k)
      throw std::invalid_argument("TensorBasis::tensor: (k,q) out of range");
    return tensors[flat_index(k, q)];
  }
};

/// One rank-k multiplet (components ordered q = -k..k).
struct TensorMultiplet {
  int rank = 0;
  std::vector<Eigen::MatrixXcd> components;

  const Eigen::MatrixXcd& component(int q) const {
    if (std::abs(q) > rank) throw std::invalid_argument("TensorMultiplet: |q| > k");
    return components[q + rank];
  }
};

/// Same container as TensorBasis, but quantized along x: columns are
/// eigenoperators of [Jx, .] with eigenvalue q_x (rank structure unchanged).
struct XTensorBasis {
  TensorBasis basis;
};

/// T^k_q = sum_{m,m'} (-1)^{j-m} <j m'; j -m | k q> |j m'><j m|.
inline TensorBasis build_tensor_basis(const SpinSystem& spin) {
  TensorBasis b;
  b.spin = spin;
  b.max_rank = spin.n_spins;
  b.op_dim = spin.dim * spin.dim;
  b.tensors.resize(b.op_dim);
  b.vectorized.resize(b.op_dim, b.op_dim);

  const int two_j = spin.n_spins;
  for (int k = 0; k <= b.max_rank; ++k) {
    for (int q = -k; q <= k; ++q) {
      Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(spin.dim, spin.dim);
      for (int rk = 0; rk < spin.dim; ++rk) {    // row: m'
        for (int rb = 0; rb < spin.dim; ++rb) {  // col: m
          const int two_mp = two_j - 2 * rk;
          const int two_m = two_j - 2 * rb;
          if (two_mp - two_m != 2 * q) continue;  // CG selection: q = m' - m
          const double cg =
              clebsch_gordan_value(two_j, two_mp, two_j, -two_m, 2 * k, 2 * q);
          const int jmm = (two_j - two_m) / 2;  // j - m is an integer here
          t(rk, rb) = ((jmm & 1) ? -1.0 : 1.0) * cg;
        }
      }
      const int f = TensorBasis::flat_index(k, q);
      b.tensors[f] = t;
      b.vectorized.col(f) = vectorize(t);
    }
  }
  return b;
}

/// Frobenius residuals of the defining adjoint-action relations at (k,q):
///   [Jz, T^k_q] = q T^k_q,  [J±, T^k_q] = sqrt(k(k+1)-q(q±1)) T^k_{q±1}.
struct LadderResiduals {
  double z = 0.0;
  double plus = 0.0;
  double minus = 0.0;
  double max() const { return std::max({z, plus, minus}); }
};

inline LadderResiduals verify_ladder(const TensorBasis& basis, int k, int q) {
  if (k < 0 || k > basis.max_rank || std::abs(q) > k)
    throw std::invalid_argument("verify_ladder: (k,q) out of range");
  const auto& t = basis.tensor(k, q);
  const double kk1 = static_cast<double>(k) * (k + 1);
  LadderResiduals r;
  r.z = (commutator(basis.spin.jz, t) - static_cast<double>(q) * t).norm();

  const double cp = std::sqrt(std::max(0.0, kk1 - static_cast<double>(q) * (q + 1)));
  Eigen::MatrixXcd up = commutator(basis.spin.jp, t);
  if (q + 1 <= k) up -= cp * basis.tensor(k, q + 1);
  r.plus = up.norm();

  const double cm = std::sqrt(std::max(0.0, kk1 - static_cast<double>(q) * (q - 1)));
  Eigen::MatrixXcd dn = commutator(basis.spin.jm, t);
  if (q - 1 >= -k) dn -= cm * basis.tensor(k, q - 1);
  r.minus = dn.norm();
  return r;
}

inline TensorMultiplet multiplet(const TensorBasis& basis, int k) {
  if (k < 0 || k > basis.max_rank) throw std::invalid_argument("multiplet: k out of range");
  TensorMultiplet m;
  m.rank = k;
  m.components.reserve(2 * k + 1);
  for (int q = -k; q <= k; ++q) m.components.push_back(basis.tensor(k, q));
  return m;
}

/// Irreducible tensor product [V^{k1} x U^{k2}]^K_Q =
/// sum_{q1,q2} <k1 q1; k2 q2 | K Q> V^{k1}_{q1} U^{k2}_{q2}.
inline Eigen::MatrixXcd couple_tensors(const TensorMultiplet& v, const TensorMultiplet& u, int big_k,
                                       int big_q) {
  if (big_k < std::abs(v.rank - u.rank) || big_k > v.rank + u.rank)
    throw std::invalid_argument("couple_tensors: K violates the triangle rule");
  if (std::abs(big_q) > big_k) throw std::invalid_argument("couple_tensors: |Q| > K");
  const Eigen::Index d = v.components.front().rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (int q1 = -v.rank; q1 <= v.rank; ++q1) {
    const int q2 = big_q - q1;
    if (std::abs(q2) > u.rank) continue;
    const double cg = clebsch_gordan_value(2 * v.rank, 2 * q1, 2 * u.rank, 2 * q2, 2 * big_k, 2 * big_q);
    if (cg != 0.0) out += cg * (v.component(q1) * u.component(q2));
  }
  return out;
}

/// Debug fixture dump: [{"k":..,"q":..,"matrix":[[re,im],...] row-major}, ...]
inline void dump_basis_json(const TensorBasis& basis, std::ostream& os) {
  os << "[\n";
  bool first = true;
  for (int k = 0; k <= basis.max_rank; ++k) {
    for (int q = -k; q <= k; ++q) {
      if (!first) os << ",\n";
      first = false;
      os << "  {\"k\": " << k << ", \"q\": " << q << ", \"matrix\": [";
      const auto& t = basis.tensor(k, q);
      for (Eigen::Index i = 0; i < t.rows(); ++i)
        for (Eigen::Index j = 0; j < t.cols(); ++j) {
          if (i != 0 || j != 0) os << ", ";
          char buf[64];
          std::snprintf(buf, sizeof(buf), "[%.17g, %.17g]", t(i, j).real(), t(i, j).imag());
          os << buf;
        }
      os << "]}";
    }
  }
  os << "\n]\n";
}

}  // namespace opspace

#endif  // OPSPACE_TENSOR_BASIS_HPP
