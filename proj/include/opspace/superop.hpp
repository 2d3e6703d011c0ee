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

#ifndef OPSPACE_SUPEROP_HPP
#define OPSPACE_SUPEROP_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "opspace/linalg.hpp"
#include "opspace/spin.hpp"
#include "opspace/tensor_basis.hpp"

namespace opspace {

enum class BasisTag { product, tensor };

/// Dense superoperator on vectorized operator space, D = (N+1)^2, tagged with
/// the basis its matrix elements refer to (|m><m'| product basis or the
/// spherical tensor basis).
struct Superoperator {
  Eigen::MatrixXcd m;
  BasisTag basis = BasisTag::product;

  Eigen::Index dim() const { return m.rows(); }
};

enum class SpinAxis { x, y, z, plus, minus };

/// Adjoint generator in vectorized form: S_alpha = J_alpha ⊗ 1 - 1 ⊗ J_alphaᵀ,
/// so that unvectorize(S_alpha vec(O)) = [J_alpha, O].
inline Superoperator adjoint_superoperator(const SpinSystem& spin, SpinAxis axis) {
  const Eigen::MatrixXcd* op = nullptr;
  switch (axis) {
    case SpinAxis::x: op = &spin.jx; break;
    case SpinAxis::y: op = &spin.jy; break;
    case SpinAxis::z: op = &spin.jz; break;
    case SpinAxis::plus: op = &spin.jp; break;
    case SpinAxis::minus: op = &spin.jm; break;
    default: throw std::invalid_argument("adjoint_superoperator: invalid axis");
  }
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(spin.dim, spin.dim);
  return Superoperator{kron(*op, eye) - kron(eye, op->transpose()), BasisTag::product};
}

/// Adjoint Casimir K^2 = S_x^2 + S_y^2 + S_z^2; eigenvalue k(k+1) on the
/// rank-k tensor sector.
inline Superoperator casimir_superoperator(const SpinSystem& spin) {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(spin.dim * spin.dim, spin.dim * spin.dim);
  for (SpinAxis ax : {SpinAxis::x, SpinAxis::y, SpinAxis::z}) {
    const Eigen::MatrixXcd s = adjoint_superoperator(spin, ax).m;
    acc += s * s;
  }
  return Superoperator{std::move(acc), BasisTag::product};
}

/// Generic Lindblad generator in vectorized (product basis) form:
///   L = -i(H ⊗ 1 - 1 ⊗ Hᵀ)
///       + rate * sum_mu [ Lmu ⊗ conj(Lmu) - 1/2 (Lmu†Lmu ⊗ 1 + 1 ⊗ (Lmu†Lmu)ᵀ) ].
inline Superoperator lindblad_superoperator(const Eigen::MatrixXcd& hamiltonian,
                                            const std::vector<Eigen::MatrixXcd>& jumps,
                                            double rate) {
  const Eigen::Index d = hamiltonian.rows();
  if (hamiltonian.cols() != d) throw std::invalid_argument("lindblad_superoperator: H must be square");
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(d, d);
  Eigen::MatrixXcd l = cx(0.0, -1.0) * (kron(hamiltonian, eye) - kron(eye, hamiltonian.transpose()));
  for (const auto& jump : jumps) {
    if (jump.rows() != d || jump.cols() != d)
      throw std::invalid_argument("lindblad_superoperator: jump operator dimension mismatch");
    const Eigen::MatrixXcd jj = jump.adjoint() * jump;
    l += rate * (kron(jump, jump.conjugate()) - 0.5 * (kron(jj, eye) + kron(eye, jj.transpose())));
  }
  return Superoperator{std::move(l), BasisTag::product};
}

enum class ModelKind { precession, btc };

/// Collective model family: H = Omega Jx with collective rate Gamma/N and a
/// single jump operator, Jz (precession) or J- (btc). Omega = 0 with the btc
/// jump is the pure-relaxation limit.
struct ModelSpec {
  ModelKind kind = ModelKind::btc;
  int n_spins = 1;
  double omega = 1.0;
  double gamma = 1.0;

  static ModelSpec precession(int n, double omega, double gamma) {
    return make(ModelKind::precession, n, omega, gamma);
  }
  static ModelSpec btc(int n, double omega, double gamma) {
    return make(ModelKind::btc, n, omega, gamma);
  }

  double gamma_over_omega() const { return gamma / omega; }
  double rate() const { return gamma / n_spins; }

  Eigen::MatrixXcd hamiltonian(const SpinSystem& spin) const { return omega * spin.jx; }
  Eigen::MatrixXcd jump(const SpinSystem& spin) const {
    return kind == ModelKind::precession ? spin.jz : spin.jm;
  }

  std::string kind_name() const { return kind == ModelKind::precession ? "precession" : "btc"; }

  nlohmann::json to_json() const {
    nlohmann::json j{{"kind", kind_name()}, {"N", n_spins}, {"omega", omega}, {"gamma", gamma}};
    if (omega != 0.0) j["gamma_over_omega"] = gamma / omega;
    return j;
  }

  static ModelSpec from_json(const nlohmann::json& j) {
    const std::string kind_str = j.at("kind").get<std::string>();
    ModelKind kind;
    if (kind_str == "precession") kind = ModelKind::precession;
    else if (kind_str == "btc") kind = ModelKind::btc;
    else throw std::invalid_argument("ModelSpec: unknown kind '" + kind_str + "'");
    const int n = j.at("N").get<int>();
    const double omega = j.at("omega").get<double>();
    double gamma;
    if (j.contains("gamma")) gamma = j.at("gamma").get<double>();
    else gamma = j.at("gamma_over_omega").get<double>() * omega;
    return make(kind, n, omega, gamma);
  }

 private:
  static ModelSpec make(ModelKind kind, int n, double omega, double gamma) {
    if (n < 1) throw std::invalid_argument("ModelSpec: N must be >= 1");
    if (gamma < 0.0) throw std::invalid_argument("ModelSpec: Gamma must be >= 0");
    ModelSpec s;
    s.kind = kind;
    s.n_spins = n;
    s.omega = omega;
    s.gamma = gamma;
    return s;
  }
};

/// Liouvillian in both representations; the tensor-basis form is the
/// canonical one for lattice extraction (L_tensor = B† L_product B).
struct Liouvillian {
  Superoperator product;
  Superoperator tensor;
};

inline Liouvillian build_liouvillian(const ModelSpec& spec, const TensorBasis& basis) {
  if (basis.spin.n_spins != spec.n_spins)
    throw std::invalid_argument("build_liouvillian: basis built for a different N");
  const SpinSystem& spin = basis.spin;
  Superoperator lp = lindblad_superoperator(spec.hamiltonian(spin), {spec.jump(spin)}, spec.rate());
  Superoperator lt{basis.vectorized.adjoint() * lp.m * basis.vectorized, BasisTag::tensor};
  return Liouvillian{std::move(lp), std::move(lt)};
}

}  // namespace opspace

#endif  // OPSPACE_SUPEROP_HPP
