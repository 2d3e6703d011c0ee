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

#ifndef OPSPACE_DYNAMICS_HPP
#define OPSPACE_DYNAMICS_HPP

#include <optional>
#include <string>
#include <vector>

#include "opspace/spectral.hpp"
#include "opspace/superop.hpp"

namespace opspace {

/// Tensor expansion coefficients a_{k,q}(t) of the density operator, in flat
/// (k,q) order. For a unit-trace state a_{0,0} = 1/sqrt(N+1), constant in
/// time; Hermiticity shows as a_{k,-q} = (-1)^q conj(a_{k,q}).
struct CoefficientState {
  double t = 0.0;
  Eigen::VectorXcd a;
};

/// Initial-state selector: a small preset library plus an explicit density
/// matrix escape hatch.
struct StatePrep {
  enum class Kind { polarized, maximally_mixed, coherent, explicit_matrix };
  Kind kind = Kind::polarized;
  double theta = 0.0;
  double phi = 0.0;
  Eigen::MatrixXcd rho;  // explicit_matrix only

  static StatePrep polarized() { return StatePrep{}; }
  static StatePrep maximally_mixed() { return StatePrep{Kind::maximally_mixed, 0, 0, {}}; }
  static StatePrep coherent(double theta, double phi) {
    return StatePrep{Kind::coherent, theta, phi, {}};
  }
  static StatePrep explicit_matrix(Eigen::MatrixXcd rho) {
    return StatePrep{Kind::explicit_matrix, 0, 0, std::move(rho)};
  }

  /// "polarized" | "mixed" | "coherent:<theta>,<phi>"
  static StatePrep parse(const std::string& text) {
    if (text == "polarized") return polarized();
    if (text == "mixed") return maximally_mixed();
    if (text.rfind("coherent:", 0) == 0) {
      const std::string args = text.substr(9);
      const auto comma = args.find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("StatePrep: expected coherent:<theta>,<phi>");
      return coherent(std::stod(args.substr(0, comma)), std::stod(args.substr(comma + 1)));
    }
    throw std::invalid_argument("StatePrep: unknown state '" + text + "'");
  }

  std::string name() const {
    switch (kind) {
      case Kind::polarized: return "polarized";
      case Kind::maximally_mixed: return "mixed";
      case Kind::coherent:
        return "coherent:" + std::to_string(theta) + "," + std::to_string(phi);
      default: return "explicit";
    }
  }
};

namespace detail {

inline Eigen::MatrixXcd matrix_exp_of_hermitian(const Eigen::MatrixXcd& h, cx factor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXcd phases = (factor * es.eigenvalues().cast<cx>().array()).exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Density matrix for a preset, |theta,phi> = e^{-i phi Jz} e^{-i theta Jy} |j j>.
inline Eigen::MatrixXcd prepare_density_matrix(const StatePrep& prep, const SpinSystem& spin) {
  switch (prep.kind) {
    case StatePrep::Kind::polarized: {
      Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(spin.dim, spin.dim);
      rho(0, 0) = 1.0;
      return rho;
    }
    case StatePrep::Kind::maximally_mixed:
      return Eigen::MatrixXcd::Identity(spin.dim, spin.dim) / static_cast<double>(spin.dim);
    case StatePrep::Kind::coherent: {
      const Eigen::MatrixXcd rot = detail::matrix_exp_of_hermitian(spin.jz, cx(0, -prep.phi)) *
                                   detail::matrix_exp_of_hermitian(spin.jy, cx(0, -prep.theta));
      Eigen::VectorXcd top = Eigen::VectorXcd::Zero(spin.dim);
      top(0) = 1.0;
      const Eigen::VectorXcd psi = rot * top;
      return psi * psi.adjoint();
    }
    case StatePrep::Kind::explicit_matrix: {
      const Eigen::MatrixXcd& rho = prep.rho;
      if (rho.rows() != spin.dim || rho.cols() != spin.dim)
        throw std::invalid_argument("prepare_density_matrix: dimension mismatch");
      if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("prepare_density_matrix: matrix is not Hermitian");
      if (std::abs(rho.trace() - cx(1.0)) > 1e-12)
        throw std::invalid_argument("prepare_density_matrix: trace is not one");
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()));
      if (es.eigenvalues().minCoeff() < -1e-12)
        throw std::invalid_argument("prepare_density_matrix: matrix is not positive semidefinite");
      return rho;
    }
  }
  throw std::invalid_argument("prepare_density_matrix: bad kind");
}

/// a_{k,q}(0) = Tr[(T^k_q)† rho(0)].
inline CoefficientState initial_state(const StatePrep& prep, const SpinSystem& spin,
                                      const TensorBasis& basis) {
  const Eigen::MatrixXcd rho = prepare_density_matrix(prep, spin);
  return CoefficientState{0.0, basis.vectorized.adjoint() * vectorize(rho)};
}

inline Eigen::MatrixXcd density_matrix_of(const CoefficientState& state, const TensorBasis& basis) {
  return unvectorize(basis.vectorized * state.a);
}

inline cx expectation(const CoefficientState& state, const TensorBasis& basis,
                      const Eigen::MatrixXcd& observable) {
  if (observable.rows() != basis.spin.dim || observable.cols() != basis.spin.dim)
    throw std::invalid_argument("expectation: observable dimension mismatch");
  return (observable * density_matrix_of(state, basis)).trace();
}

struct EvolveResult {
  std::vector<CoefficientState> states;
  bool integrator_only = false;       // spectral path refused (exceptional point)
  double cross_check_deviation = 0.0; // max relative spectral/integrator gap
};

namespace detail {

inline double integrator_step(const ModelSpec& spec) {
  // 0.005 keeps the RK4 global error a factor ~20 under the 1e-8 cross-check
  // bound at desk scale (measured worst case N=5, Gamma/Omega=2).
  double h = 0.005;
  if (spec.omega != 0.0) h = std::min(h, 0.005 / std::abs(spec.omega));
  if (spec.gamma > 0.0) h = std::min(h, 0.005 * spec.n_spins / spec.gamma);
  return h;
}

/// Classic fixed-step RK4 for da/dt = L a, sampling at the requested times.
inline std::vector<Eigen::VectorXcd> rk4_path(const Eigen::MatrixXcd& l,
                                              const Eigen::VectorXcd& a0,
                                              const std::vector<double>& times, double h) {
  std::vector<Eigen::VectorXcd> out;
  out.reserve(times.size());
  Eigen::VectorXcd a = a0;
  double t = 0.0;
  for (double target : times) {
    const double span = target - t;
    if (span > 0.0) {
      const int steps = std::max(1, static_cast<int>(std::ceil(span / h - 1e-12)));
      const double dt = span / steps;
      for (int s = 0; s < steps; ++s) {
        const Eigen::VectorXcd k1 = l * a;
        const Eigen::VectorXcd k2 = l * (a + 0.5 * dt * k1);
        const Eigen::VectorXcd k3 = l * (a + 0.5 * dt * k2);
        const Eigen::VectorXcd k4 = l * (a + dt * k3);
        a += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      t = target;
    }
    out.push_back(a);
  }
  return out;
}

}  // namespace detail

/// a(t) = exp(L t) a(0), via spectral propagation when the generator is
/// diagonalizable (with the RK4 path as a mandatory cross-check), or the
/// integrator alone at an exceptional point.
inline EvolveResult evolve(const Superoperator& l_tensor, const CoefficientState& state0,
                           const std::vector<double>& times, const ModelSpec& spec) {
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || (i > 0 && times[i] < times[i - 1]))
      throw std::invalid_argument("evolve: times must be sorted and nonnegative");
  }

  EvolveResult result;
  const double h = detail::integrator_step(spec);
  const std::vector<Eigen::VectorXcd> rk = detail::rk4_path(l_tensor.m, state0.a, times, h);

  std::optional<SpectralData> sd;
  try {
    sd = decompose(l_tensor);
  } catch (const ExceptionalPointError&) {
    result.integrator_only = true;
  }
  Eigen::VectorXcd amplitudes;
  if (sd) amplitudes = sd->left.adjoint() * state0.a;

  for (size_t i = 0; i < times.size(); ++i) {
    Eigen::VectorXcd a;
    if (sd) {
      const Eigen::VectorXcd phases =
          (times[i] * sd->eigenvalues.array()).exp() * amplitudes.array();
      a = sd->right * phases;
      const double rel = (a - rk[i]).norm() / std::max(a.norm(), 1e-30);
      result.cross_check_deviation = std::max(result.cross_check_deviation, rel);
    } else {
      a = rk[i];
    }
    result.states.push_back(CoefficientState{times[i], std::move(a)});
  }
  if (sd && result.cross_check_deviation > 1e-8)
    throw ConsistencyError("evolve: spectral and integrator paths disagree beyond 1e-8");
  return result;
}

/// Block-triangular split of a trace-preserving generator whose basis puts
/// the identity mode first: the traceless block M, the constant source the
/// identity sector injects, and the source overlaps s_alpha with M's left
/// eigenmodes.
struct SourceDecomposition {
  Eigen::MatrixXcd m_block;      // (D-1) x (D-1)
  SpectralData spectrum;         // of m_block
  Eigen::VectorXcd source;       // coefficient-space drive, length D-1
  Eigen::VectorXcd s_alpha;      // per mode
  Eigen::VectorXcd c0;           // per-mode initial coefficients, once attached
  double lambda_zero_threshold = 0.0;
  bool initial_attached = false;

  bool mode_is_secular(int alpha) const {
    return std::abs(spectrum.eigenvalues(alpha)) < lambda_zero_threshold;
  }
  bool has_secular_mode() const {
    for (int i = 0; i < spectrum.size(); ++i)
      if (mode_is_secular(i)) return true;
    return false;
  }
};

inline SourceDecomposition source_decompose(const Superoperator& l_tensor,
                                            const ModelSpec& spec) {
  if (l_tensor.basis != BasisTag::tensor)
    throw std::invalid_argument("source_decompose: expected a tensor-basis superoperator");
  const Eigen::Index d = l_tensor.dim();
  const double scale = std::max(max_abs(l_tensor.m), 1e-300);
  if ((l_tensor.m.row(0).cwiseAbs().maxCoeff()) > 1e-12 * scale)
    throw ConsistencyError("source_decompose: generator is not trace preserving");

  SourceDecomposition dec;
  dec.m_block = l_tensor.m.bottomRightCorner(d - 1, d - 1);
  dec.spectrum = decompose(Superoperator{dec.m_block, BasisTag::tensor});
  // identity coefficient is a_{0,0} = 1/sqrt(N+1)
  dec.source = l_tensor.m.block(1, 0, d - 1, 1) / std::sqrt(static_cast<double>(spec.n_spins + 1));
  dec.s_alpha = dec.spectrum.left.adjoint() * dec.source;
  dec.lambda_zero_threshold =
      1e-12 * std::max(std::abs(spec.omega), spec.gamma / spec.n_spins);
  return dec;
}

inline void attach_initial(SourceDecomposition& dec, const CoefficientState& state0) {
  dec.c0 = dec.spectrum.left.adjoint() * state0.a.tail(state0.a.size() - 1);
  dec.initial_attached = true;
}

namespace detail {

/// (e^z - 1)/z, series-stabilized: the direct form loses eps/|z| digits to
/// cancellation for small z.
inline cx phi1(cx z) {
  if (std::abs(z) < 1e-4) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
  return (std::exp(z) - 1.0) / z;
}

}  // namespace detail

/// c(t) = e^{lt} c0 + (e^{lt}-1)/l s, with the secular limit c0 + t s at l=0.
inline cx driven_coefficient(cx lambda, cx c0, cx s, double t, double zero_threshold) {
  if (std::abs(lambda) < zero_threshold) return c0 + t * s;
  return std::exp(lambda * t) * c0 + t * detail::phi1(lambda * t) * s;
}

inline cx coefficient_trajectory(const SourceDecomposition& dec, int alpha, double t) {
  if (!dec.initial_attached)
    throw std::logic_error("coefficient_trajectory: no initial state attached");
  if (alpha < 0 || alpha >= dec.spectrum.size())
    throw std::invalid_argument("coefficient_trajectory: bad mode index");
  return driven_coefficient(dec.spectrum.eigenvalues(alpha), dec.c0(alpha), dec.s_alpha(alpha), t,
                            dec.lambda_zero_threshold);
}

/// k=1 coefficients in the symmetric/antisymmetric combinations
/// a_± = (a_{1,1} ± a_{1,-1}) / sqrt(2).
struct PrecessionK1 {
  cx a10, a_plus, a_minus;

  static PrecessionK1 from_state(const CoefficientState& state) {
    const cx am1 = state.a(TensorBasis::flat_index(1, -1));
    const cx a10v = state.a(TensorBasis::flat_index(1, 0));
    const cx ap1 = state.a(TensorBasis::flat_index(1, 1));
    const double inv = 1.0 / std::sqrt(2.0);
    return PrecessionK1{a10v, (ap1 + am1) * inv, (ap1 - am1) * inv};
  }
  cx a_1m1() const { return (a_plus - a_minus) / std::sqrt(2.0); }
  cx a_1p1() const { return (a_plus + a_minus) / std::sqrt(2.0); }
};

/// Closed-form k=1 evolution of the precession model. The antisymmetric mode
/// decays at Gamma/2N; (a10, a+) propagate under [[0, -iw],[-iw, -Gamma/2N]],
/// handled uniformly through complex frequencies so the kappa = 2 coalescence
/// takes the secular t e^{lambda t} branch automatically.
inline PrecessionK1 precession_analytic(const ModelSpec& spec, const PrecessionK1& init,
                                        double t) {
  if (spec.kind != ModelKind::precession)
    throw std::invalid_argument("precession_analytic: precession model required");
  const double decay = spec.gamma / (2.0 * spec.n_spins);
  PrecessionK1 out;
  out.a_minus = init.a_minus * std::exp(-decay * t);

  const double mean = -0.5 * decay;  // half trace of the 2x2 block
  Eigen::Matrix2cd m;
  m << 0.0, cx(0, -spec.omega), cx(0, -spec.omega), -decay;
  const Eigen::Matrix2cd a_part = m - mean * Eigen::Matrix2cd::Identity();
  // traceless 2x2: A^2 = -det(A) I, so exp(At) = cos(mu t) I + sin(mu t)/mu A
  // with mu^2 = det(A); mu is real below the exceptional point (kappa < 2),
  // zero at it, imaginary beyond.
  const cx mu2 = a_part(0, 0) * a_part(1, 1) - a_part(0, 1) * a_part(1, 0);
  const cx mu = std::sqrt(mu2);
  cx cos_term, sinc_term;
  if (std::abs(mu * t) < 1e-8) {
    const cx x2 = mu2 * t * t;
    cos_term = 1.0 - x2 / 2.0;       // cos(mu t)
    sinc_term = t * (1.0 - x2 / 6.0);  // sin(mu t)/mu
  } else {
    cos_term = std::cos(mu * t);
    sinc_term = std::sin(mu * t) / mu;
  }
  const Eigen::Matrix2cd prop =
      std::exp(mean * t) * (cos_term * Eigen::Matrix2cd::Identity() + sinc_term * a_part);
  const Eigen::Vector2cd v = prop * Eigen::Vector2cd(init.a10, init.a_plus);
  out.a10 = v(0);
  out.a_plus = v(1);
  return out;
}

}  // namespace opspace

#endif  // OPSPACE_DYNAMICS_HPP
