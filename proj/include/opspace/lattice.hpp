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

#ifndef OPSPACE_LATTICE_HPP
#define OPSPACE_LATTICE_HPP

#include <optional>
#include <stdexcept>
#include <vector>

#include "opspace/superop.hpp"

namespace opspace {

/// Raised when numerically extracted structure contradicts the structure the
/// extraction assumes (e.g. weight on forbidden lattice links).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Projector onto the rank-k eigenspace of the adjoint Casimir,
/// P^(k) = sum_q vec(T^k_q) vec(T^k_q)†, in the product basis.
inline Superoperator projector(const TensorBasis& basis, int k) {
  if (k < 0 || k > basis.max_rank) throw std::invalid_argument("projector: k out of range");
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(basis.op_dim, basis.op_dim);
  for (int q = -k; q <= k; ++q) {
    const auto v = basis.vectorized.col(TensorBasis::flat_index(k, q));
    p += v * v.adjoint();
  }
  return Superoperator{std::move(p), BasisTag::product};
}

/// Rank-coupling strengths C(k, k') = Frobenius norm of the (k' -> k) block
/// of the tensor-basis Liouvillian; rows are destination ranks.
inline Eigen::MatrixXd rank_coupling_matrix(const Superoperator& l_tensor,
                                            const TensorBasis& basis) {
  if (l_tensor.basis != BasisTag::tensor)
    throw std::invalid_argument("rank_coupling_matrix: expected a tensor-basis superoperator");
  const int n_ranks = basis.max_rank + 1;
  Eigen::MatrixXd c(n_ranks, n_ranks);
  for (int k = 0; k < n_ranks; ++k)
    for (int kp = 0; kp < n_ranks; ++kp) {
      const int row0 = k * k, rows = 2 * k + 1;
      const int col0 = kp * kp, cols = 2 * kp + 1;
      c(k, kp) = l_tensor.m.block(row0, col0, rows, cols).norm();
    }
  return c;
}

/// Hopping-model view of a collective Liouvillian on the (k,q) lattice.
///
/// gamma(k,q) is the on-site decay in rate units, -Re of the tensor-basis
/// diagonal. The dissipative rank hops t± are stored with the Gamma/N
/// prefactor divided out, so they depend only on the lattice geometry:
///   L[(k+1,q),(k,q)] = (Gamma/N) t_plus(k,q),
///   L[(k-1,q),(k,q)] = (Gamma/N) t_minus(k,q).
/// The coherent component hops w±(k,q) = sqrt(k(k+1)-q(q±1))/2 are analytic.
struct LatticeCouplings {
  int max_rank = 0;
  double omega = 0.0;
  double rate = 0.0;  // Gamma/N
  std::vector<double> gamma;    // flat (k,q)
  std::vector<cx> t_plus;       // flat (k,q), valid for k < max_rank, |q| <= k
  std::vector<cx> t_minus;      // flat (k,q), valid for k >= 1, |q| <= k-1
  std::vector<double> w_plus;   // flat (k,q)
  std::vector<double> w_minus;  // flat (k,q)
  Eigen::MatrixXd rank_coupling;

  bool has_t_plus(int k, int q) const { return k < max_rank && std::abs(q) <= k; }
  bool has_t_minus(int k, int q) const { return k >= 1 && std::abs(q) <= k - 1; }
};

/// Max residuals on lattice links the model structure forbids, relative to
/// the largest Liouvillian element. The dissipative part may only act on-site
/// and along k -> k±1 at fixed q; the coherent part only along q -> q±1 at
/// fixed k.
struct SelectionRuleReport {
  double scale = 0.0;                      // max |element| of L_tensor
  double dissipative_q_changing = 0.0;     // q' != q
  double dissipative_far_rank = 0.0;       // |k - k'| >= 2
  double dissipative_imag_on_lattice = 0.0;  // Im part of on-site/t± links
  double coherent_off_pattern = 0.0;       // anything but (k, q±1) <- (k, q)

  double max_forbidden() const {
    return std::max({dissipative_q_changing, dissipative_far_rank, dissipative_imag_on_lattice,
                     coherent_off_pattern});
  }
  bool ok(double tol = 1e-10) const { return max_forbidden() <= tol * scale; }
};

namespace detail {

/// Rebuilds the coherent-only (Gamma = 0) tensor-basis generator so the
/// dissipative part can be isolated.
inline Eigen::MatrixXcd coherent_part(const ModelSpec& spec, const TensorBasis& basis) {
  ModelSpec coh = spec;
  coh.gamma = 0.0;
  return build_liouvillian(coh, basis).tensor.m;
}

}  // namespace detail

inline SelectionRuleReport verify_selection_rules(const Superoperator& l_tensor,
                                                  const TensorBasis& basis,
                                                  const ModelSpec& spec) {
  if (l_tensor.basis != BasisTag::tensor)
    throw std::invalid_argument("verify_selection_rules: expected a tensor-basis superoperator");
  const Eigen::MatrixXcd coh = detail::coherent_part(spec, basis);
  const Eigen::MatrixXcd diss = l_tensor.m - coh;

  SelectionRuleReport rep;
  rep.scale = std::max(max_abs(l_tensor.m), 1e-300);
  for (int f = 0; f < basis.op_dim; ++f) {
    const auto [k, q] = TensorBasis::kq_of(f);
    for (int g = 0; g < basis.op_dim; ++g) {
      const auto [kp, qp] = TensorBasis::kq_of(g);
      const double d = std::abs(diss(f, g));
      if (qp != q)
        rep.dissipative_q_changing = std::max(rep.dissipative_q_changing, d);
      else if (std::abs(k - kp) >= 2)
        rep.dissipative_far_rank = std::max(rep.dissipative_far_rank, d);
      else
        rep.dissipative_imag_on_lattice =
            std::max(rep.dissipative_imag_on_lattice, std::abs(diss(f, g).imag()));
      const bool coherent_allowed = (k == kp) && (std::abs(q - qp) == 1);
      if (!coherent_allowed)
        rep.coherent_off_pattern = std::max(rep.coherent_off_pattern, std::abs(coh(f, g)));
    }
  }
  return rep;
}

inline LatticeCouplings extract_couplings(const Superoperator& l_tensor, const TensorBasis& basis,
                                          const ModelSpec& spec) {
  const SelectionRuleReport rep = verify_selection_rules(l_tensor, basis, spec);
  if (rep.max_forbidden() > 1e-8 * rep.scale)
    throw ConsistencyError("extract_couplings: off-selection-rule weight above 1e-8 of scale");

  const Eigen::MatrixXcd diss = l_tensor.m - detail::coherent_part(spec, basis);
  LatticeCouplings c;
  c.max_rank = basis.max_rank;
  c.omega = spec.omega;
  c.rate = spec.rate();
  c.gamma.assign(basis.op_dim, 0.0);
  c.t_plus.assign(basis.op_dim, cx(0, 0));
  c.t_minus.assign(basis.op_dim, cx(0, 0));
  c.w_plus.assign(basis.op_dim, 0.0);
  c.w_minus.assign(basis.op_dim, 0.0);

  const double inv_rate = c.rate > 0.0 ? 1.0 / c.rate : 0.0;
  for (int k = 0; k <= c.max_rank; ++k)
    for (int q = -k; q <= k; ++q) {
      const int f = TensorBasis::flat_index(k, q);
      c.gamma[f] = -l_tensor.m(f, f).real();
      const double kk1 = static_cast<double>(k) * (k + 1);
      c.w_plus[f] = 0.5 * std::sqrt(std::max(0.0, kk1 - static_cast<double>(q) * (q + 1)));
      c.w_minus[f] = 0.5 * std::sqrt(std::max(0.0, kk1 - static_cast<double>(q) * (q - 1)));
      if (c.has_t_plus(k, q))
        c.t_plus[f] = diss(TensorBasis::flat_index(k + 1, q), f) * inv_rate;
      if (c.has_t_minus(k, q))
        c.t_minus[f] = diss(TensorBasis::flat_index(k - 1, q), f) * inv_rate;
    }
  c.rank_coupling = rank_coupling_matrix(l_tensor, basis);
  return c;
}

/// Reassembles the generator from on-site terms plus the four neighbor hops;
/// for the collective models this reproduces L_tensor exactly (the lattice
/// picture is lossless).
inline Superoperator reconstruct_liouvillian(const LatticeCouplings& c) {
  const int dim = (c.max_rank + 1) * (c.max_rank + 1);
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(dim, dim);
  const cx minus_i_omega = cx(0.0, -c.omega);
  for (int k = 0; k <= c.max_rank; ++k)
    for (int q = -k; q <= k; ++q) {
      const int f = TensorBasis::flat_index(k, q);
      l(f, f) = -c.gamma[f];
      if (q + 1 <= k) l(TensorBasis::flat_index(k, q + 1), f) = minus_i_omega * c.w_plus[f];
      if (q - 1 >= -k) l(TensorBasis::flat_index(k, q - 1), f) = minus_i_omega * c.w_minus[f];
      if (c.has_t_plus(k, q)) l(TensorBasis::flat_index(k + 1, q), f) = c.rate * c.t_plus[f];
      if (c.has_t_minus(k, q)) l(TensorBasis::flat_index(k - 1, q), f) = c.rate * c.t_minus[f];
    }
  return Superoperator{std::move(l), BasisTag::tensor};
}

/// Both |t| orderings along each k-link (the site convention compares the
/// outgoing amplitudes at (k,q); the bond convention compares forward and
/// backward amplitudes across the same bond (k,q)<->(k+1,q)).
struct NonreciprocityReport {
  struct Bond {
    int k, q;
    double t_up;         // |t_plus(k,q)|
    double t_down_bond;  // |t_minus(k+1,q)|
    double t_down_site;  // |t_minus(k,q)|, 0 when undefined
  };
  std::vector<Bond> bonds;
  bool upward_dominant_bond = true;  // |t_plus(k,q)| > |t_minus(k+1,q)| on every bond
  bool upward_dominant_site = true;  // |t_plus(k,q)| > |t_minus(k,q)| where both exist
};

inline NonreciprocityReport nonreciprocity_report(const LatticeCouplings& c) {
  NonreciprocityReport rep;
  for (int k = 0; k < c.max_rank; ++k)
    for (int q = -k; q <= k; ++q) {
      const int f = TensorBasis::flat_index(k, q);
      NonreciprocityReport::Bond b;
      b.k = k;
      b.q = q;
      b.t_up = std::abs(c.t_plus[f]);
      b.t_down_bond = std::abs(c.t_minus[TensorBasis::flat_index(k + 1, q)]);
      b.t_down_site = c.has_t_minus(k, q) ? std::abs(c.t_minus[f]) : 0.0;
      if (b.t_up <= b.t_down_bond) rep.upward_dominant_bond = false;
      if (c.has_t_minus(k, q) && b.t_up <= b.t_down_site) rep.upward_dominant_site = false;
      rep.bonds.push_back(b);
    }
  return rep;
}

}  // namespace opspace

#endif  // OPSPACE_LATTICE_HPP
