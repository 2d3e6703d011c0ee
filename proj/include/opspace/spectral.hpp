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

#ifndef OPSPACE_SPECTRAL_HPP
#define OPSPACE_SPECTRAL_HPP

#include <algorithm>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "opspace/lattice.hpp"
#include "opspace/superop.hpp"

namespace opspace {

/// The generator is defective within numerical tolerance: eigenvectors inside
/// a degenerate eigenvalue cluster do not span it (exceptional point).
class ExceptionalPointError : public std::runtime_error {
 public:
  ExceptionalPointError(std::vector<int> cluster, cx eigenvalue)
      : std::runtime_error("exceptional point: defective eigenvalue cluster"),
        cluster_indices(std::move(cluster)),
        cluster_eigenvalue(eigenvalue) {}
  std::vector<int> cluster_indices;
  cx cluster_eigenvalue;
};

/// Eigenvalues with biorthogonally normalized left/right systems:
/// left.col(n)† right.col(m) = delta_{nm}; right columns have unit 2-norm.
struct SpectralData {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd right;
  Eigen::MatrixXcd left;
  std::vector<double> biorthogonal_condition;  // 1/|l̂†r̂| before normalization
  double matrix_norm = 0.0;                    // Frobenius norm of the input
  BasisTag basis = BasisTag::tensor;

  Eigen::Index size() const { return eigenvalues.size(); }
};

namespace detail {

/// Greedy global pairing of left eigenvalues (conjugated) to right ones.
inline std::vector<int> pair_by_eigenvalue(const Eigen::VectorXcd& right_vals,
                                           const Eigen::VectorXcd& left_vals_conj, double tol) {
  const int n = static_cast<int>(right_vals.size());
  struct Entry {
    double d;
    int i, j;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      entries.push_back({std::abs(right_vals(i) - left_vals_conj(j)), i, j});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.d != b.d) return a.d < b.d;
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  std::vector<int> match(n, -1);
  std::vector<bool> used(n, false);
  int placed = 0;
  for (const auto& e : entries) {
    if (match[e.i] >= 0 || used[e.j]) continue;
    match[e.i] = e.j;
    used[e.j] = true;
    if (++placed == n) break;
  }
  for (int i = 0; i < n; ++i)
    if (std::abs(right_vals(i) - left_vals_conj(match[i])) > tol)
      throw std::runtime_error("decompose: left/right eigenvalue pairing failed");
  return match;
}

}  // namespace detail

/// Dense non-Hermitian eigendecomposition with explicit left/right pairing.
/// Left vectors come from the adjoint decomposition and are matched by
/// eigenvalue; clusters closer than 1e-8*norm are biorthogonalized jointly,
/// and a singular cluster overlap raises ExceptionalPointError.
inline SpectralData decompose(const Superoperator& l) {
  const Eigen::Index n = l.m.rows();
  SpectralData sd;
  sd.basis = l.basis;
  sd.matrix_norm = l.m.norm();
  const double scale = std::max(sd.matrix_norm, 1e-300);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> right_solver(l.m);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> left_solver(l.m.adjoint());
  if (right_solver.info() != Eigen::Success || left_solver.info() != Eigen::Success)
    throw std::runtime_error("decompose: eigensolver failed to converge");

  sd.eigenvalues = right_solver.eigenvalues();
  sd.right = right_solver.eigenvectors();
  const Eigen::VectorXcd left_vals_conj = left_solver.eigenvalues().conjugate();
  // Pairing tolerance is looser than the cluster tolerance: near an
  // exceptional point the two solvers disagree at O(sqrt(eps)), and the
  // defect must still be reported as ExceptionalPointError downstream.
  const std::vector<int> match =
      detail::pair_by_eigenvalue(sd.eigenvalues, left_vals_conj, 1e-6 * scale);
  sd.left.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) sd.left.col(i) = left_solver.eigenvectors().col(match[i]);

  for (Eigen::Index i = 0; i < n; ++i) {
    sd.right.col(i).normalize();
    sd.left.col(i).normalize();
  }

  // Cluster nearly equal eigenvalues (union-find over pairwise distance).
  const double cluster_tol = 1e-8 * scale;
  std::vector<int> parent(n);
  for (Eigen::Index i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(sd.eigenvalues(i) - sd.eigenvalues(j)) < cluster_tol)
        parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
  std::vector<std::vector<int>> clusters(n);
  for (Eigen::Index i = 0; i < n; ++i) clusters[find(static_cast<int>(i))].push_back(static_cast<int>(i));

  sd.biorthogonal_condition.assign(n, 0.0);
  for (const auto& cluster : clusters) {
    if (cluster.empty()) continue;
    const int c = static_cast<int>(cluster.size());
    Eigen::MatrixXcd rc(n, c), lc(n, c);
    for (int a = 0; a < c; ++a) {
      rc.col(a) = sd.right.col(cluster[a]);
      lc.col(a) = sd.left.col(cluster[a]);
    }
    const Eigen::MatrixXcd overlap = lc.adjoint() * rc;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smin = svd.singularValues()(c - 1);
    // Columns are unit vectors, so the overlap's singular values measure the
    // left-right alignment directly. A defective cluster computed in doubles
    // shows smin at the sqrt(eps) scale (~1e-8); diagonalizable degeneracies
    // sit at O(1). The threshold is absolute on purpose: near a Jordan pair
    // every overlap entry collapses together, leaving smin/smax of order one.
    if (smin < 1e-6) {
      cx mean = 0.0;
      for (int idx : cluster) mean += sd.eigenvalues(idx);
      throw ExceptionalPointError(cluster, mean / static_cast<double>(c));
    }
    // lc <- lc * overlap^{-dagger} makes lc† rc the identity on the cluster.
    const Eigen::MatrixXcd lc_fixed = lc * overlap.inverse().adjoint();
    for (int a = 0; a < c; ++a) {
      sd.left.col(cluster[a]) = lc_fixed.col(a);
      sd.biorthogonal_condition[cluster[a]] = 1.0 / smin;
    }
  }
  return sd;
}

inline int steady_state_index(const SpectralData& sd) {
  int best = 0;
  for (int i = 1; i < sd.size(); ++i)
    if (std::abs(sd.eigenvalues(i)) < std::abs(sd.eigenvalues(best))) best = i;
  return best;
}

/// Rank/site weight profile of one eigenmode: w_kq = |c_kq|^2 with the vector
/// normalized to unit Euclidean length, w_k = sum_q w_kq, and the k-resolved
/// participation ratio PR_k = 1 / sum_k w_k^2.
struct ModeProfile {
  int mode = 0;
  Eigen::VectorXd w_kq;          // flat (k,q)
  std::vector<double> w_k;       // per rank
  double participation_ratio = 1.0;
};

/// Profile an arbitrary coefficient vector given in a tensor-ordered basis.
inline ModeProfile profile_vector(const Eigen::VectorXcd& coeffs) {
  const int dim = static_cast<int>(coeffs.size());
  const int n_ranks = TensorBasis::kq_of(dim - 1).first + 1;
  ModeProfile p;
  const Eigen::VectorXcd c = coeffs / coeffs.norm();
  p.w_kq = c.cwiseAbs2();
  p.w_k.assign(n_ranks, 0.0);
  for (int f = 0; f < dim; ++f) p.w_k[TensorBasis::kq_of(f).first] += p.w_kq(f);
  double s2 = 0.0;
  for (double w : p.w_k) s2 += w * w;
  p.participation_ratio = 1.0 / s2;
  return p;
}

/// z-quantized profile: the right eigenvector entries are already tensor
/// coefficients when the decomposition was done in the tensor basis.
inline ModeProfile profile_mode(const SpectralData& sd, int mode) {
  if (sd.basis != BasisTag::tensor)
    throw std::invalid_argument("profile_mode: spectral data must be in the tensor basis");
  if (mode < 0 || mode >= sd.size()) throw std::invalid_argument("profile_mode: bad mode index");
  ModeProfile p = profile_vector(sd.right.col(mode));
  p.mode = mode;
  return p;
}

/// x-quantized profile: coefficients are re-expressed in the rotated basis
/// before squaring, c_x = Bx† Bz c.
inline ModeProfile profile_mode(const SpectralData& sd, int mode, const TensorBasis& zbasis,
                                const XTensorBasis& xbasis) {
  if (sd.basis != BasisTag::tensor)
    throw std::invalid_argument("profile_mode: spectral data must be in the tensor basis");
  if (mode < 0 || mode >= sd.size()) throw std::invalid_argument("profile_mode: bad mode index");
  const Eigen::VectorXcd cx_coeffs =
      xbasis.basis.vectorized.adjoint() * (zbasis.vectorized * sd.right.col(mode));
  ModeProfile p = profile_vector(cx_coeffs);
  p.mode = mode;
  return p;
}

/// The conjugate pair with the largest real part among oscillatory modes
/// (|Im| above 1e-8 * max(Omega, scale)); first member has Im > 0. Returns
/// nullopt when the spectrum is purely relaxational. Works on bare
/// eigenvalues so the question stays answerable when the generator is
/// defective (the Omega -> 0 relaxation limit has true Jordan blocks).
inline std::optional<std::pair<int, int>> slowest_oscillatory_pair(
    const Eigen::VectorXcd& eigenvalues, double omega, double scale) {
  const double threshold = 1e-8 * std::max(std::abs(omega), scale);
  const int n = static_cast<int>(eigenvalues.size());
  int best = -1;
  for (int i = 0; i < n; ++i) {
    if (eigenvalues(i).imag() <= threshold) continue;
    if (best < 0 || eigenvalues(i).real() > eigenvalues(best).real()) best = i;
  }
  if (best < 0) return std::nullopt;
  const cx target = std::conj(eigenvalues(best));
  int partner = -1;
  double dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (i == best || eigenvalues(i).imag() >= -threshold) continue;
    const double d = std::abs(eigenvalues(i) - target);
    if (d < dist) {
      dist = d;
      partner = i;
    }
  }
  if (partner < 0 || dist > 1e-8 * std::max(std::abs(omega), scale))
    throw std::runtime_error("slowest_oscillatory_pair: conjugate partner not found");
  return std::make_pair(best, partner);
}

inline std::optional<std::pair<int, int>> slowest_oscillatory_pair(const SpectralData& sd,
                                                                   double omega) {
  return slowest_oscillatory_pair(sd.eigenvalues, omega, sd.matrix_norm);
}

/// Follows one eigenvalue along a parameter sweep by nearest-lambda
/// continuity, halving the step whenever the match is ambiguous.
struct TrackedMode {
  int index = 0;
  cx eigenvalue;
};

inline TrackedMode track_mode(const std::function<Superoperator(double)>& build, double p_from,
                              double p_to, cx lambda_from, int max_depth = 24) {
  const SpectralData sd = decompose(build(p_to));
  int best = 0, second = -1;
  for (int i = 1; i < sd.size(); ++i)
    if (std::abs(sd.eigenvalues(i) - lambda_from) < std::abs(sd.eigenvalues(best) - lambda_from))
      best = i;
  for (int i = 0; i < sd.size(); ++i) {
    if (i == best) continue;
    if (second < 0 ||
        std::abs(sd.eigenvalues(i) - lambda_from) < std::abs(sd.eigenvalues(second) - lambda_from))
      second = i;
  }
  const double d_best = std::abs(sd.eigenvalues(best) - lambda_from);
  const double d_second = second >= 0 ? std::abs(sd.eigenvalues(second) - lambda_from)
                                      : std::numeric_limits<double>::infinity();
  const bool ambiguous = d_second < 2.0 * d_best && d_best > 1e-12 * std::max(1.0, sd.matrix_norm);
  if (!ambiguous || max_depth <= 0) return TrackedMode{best, sd.eigenvalues(best)};
  const double mid = 0.5 * (p_from + p_to);
  const TrackedMode half = track_mode(build, p_from, mid, lambda_from, max_depth - 1);
  return track_mode(build, mid, p_to, half.eigenvalue, max_depth - 1);
}

}  // namespace opspace

#endif  // OPSPACE_SPECTRAL_HPP
