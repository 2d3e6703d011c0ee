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

#ifndef OPSPACE_SPIN_HPP
#define OPSPACE_SPIN_HPP

#include <cmath>
#include <stdexcept>

#include "opspace/linalg.hpp"

namespace opspace {

/// Collective spin-j algebra for N spin-1/2 constituents in the maximally
/// polarized sector, j = N/2. Matrices are dense complex in the |j m> basis
/// ordered by descending m (m = j first). Immutable after construction.
struct SpinSystem {
  int n_spins = 0;  // N
  double j = 0.0;   // N/2
  int dim = 0;      // 2j+1 = N+1
  Eigen::MatrixXcd jx, jy, jz, jp, jm, j2;

  /// m value carried by basis row r (r = 0 is m = j).
  double m_of_row(int r) const { return j - r; }
};

inline SpinSystem build_spin_system(int n_spins) {
  if (n_spins < 1) throw std::invalid_argument("build_spin_system: N must be >= 1");
  SpinSystem s;
  s.n_spins = n_spins;
  s.j = 0.5 * n_spins;
  s.dim = n_spins + 1;

  s.jz = Eigen::MatrixXcd::Zero(s.dim, s.dim);
  s.jp = Eigen::MatrixXcd::Zero(s.dim, s.dim);
  for (int r = 0; r < s.dim; ++r) {
    const double m = s.j - r;
    s.jz(r, r) = m;
    // J+ |j m> = sqrt(j(j+1) - m(m+1)) |j m+1>; m+1 sits one row above.
    if (r > 0) s.jp(r - 1, r) = std::sqrt(s.j * (s.j + 1.0) - m * (m + 1.0));
  }
  s.jm = s.jp.adjoint();
  s.jx = 0.5 * (s.jp + s.jm);
  s.jy = cx(0.0, -0.5) * (s.jp - s.jm);
  s.j2 = s.jx * s.jx + s.jy * s.jy + s.jz * s.jz;
  return s;
}

inline Eigen::MatrixXcd commutator(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("commutator: operands must be square and of equal dimension");
  return a * b - b * a;
}

}  // namespace opspace

#endif  // OPSPACE_SPIN_HPP
