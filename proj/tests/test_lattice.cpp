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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <future>

#include "opspace/lattice.hpp"

using namespace opspace;

namespace {

struct Fixture {
  TensorBasis basis;
  ModelSpec spec;
  Liouvillian liou;
  Fixture(ModelKind kind, int n, double omega, double gamma)
      : basis(build_tensor_basis(build_spin_system(n))),
        spec(kind == ModelKind::btc ? ModelSpec::btc(n, omega, gamma)
                                    : ModelSpec::precession(n, omega, gamma)),
        liou(build_liouvillian(spec, basis)) {}
};

}  // namespace

TEST_CASE("projectors resolve the Casimir eigenspaces") {
  const TensorBasis b = build_tensor_basis(build_spin_system(3));
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(b.op_dim, b.op_dim);
  for (int k = 0; k <= b.max_rank; ++k) {
    const Superoperator p = projector(b, k);
    CHECK((p.m - p.m.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((p.m * p.m - p.m).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(p.m.trace() - cx(2 * k + 1)) < 1e-12);
    sum += p.m;
  }
  CHECK((sum - Eigen::MatrixXcd::Identity(b.op_dim, b.op_dim)).cwiseAbs().maxCoeff() < 1e-12);

  // rank-1 projector of the k=0 sector
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(projector(b, 0).m);
  CHECK(svd.singularValues()(0) == doctest::Approx(1.0));
  CHECK(svd.singularValues()(1) < 1e-12);

  const Superoperator p1 = projector(b, 1);
  const Superoperator k2 = casimir_superoperator(b.spin);
  CHECK((p1.m * k2.m * p1.m - 2.0 * p1.m).cwiseAbs().maxCoeff() < 1e-10);

  CHECK_THROWS_AS(projector(b, b.max_rank + 1), std::invalid_argument);
  CHECK_THROWS_AS(projector(b, -1), std::invalid_argument);
}

TEST_CASE("rank coupling anchors at N=1") {
  const double gamma = 0.85;
  const Fixture f(ModelKind::btc, 1, 1.4, gamma);
  const Eigen::MatrixXd c = rank_coupling_matrix(f.liou.tensor, f.basis);
  // L[T^0_0] = -Gamma T^1_0 at j = 1/2, so the 0 -> 1 coupling is exactly Gamma.
  CHECK(std::abs(c(1, 0) - gamma) < 1e-12);
  // Trace preservation empties the whole k=0 destination row.
  CHECK(c(0, 0) < 1e-14);
  CHECK(c(0, 1) < 1e-14);
}

TEST_CASE("rank coupling is nearest-neighbor and non-reciprocal for btc") {
  const Fixture f(ModelKind::btc, 7, 1.0, 1.0);
  const Eigen::MatrixXd c = rank_coupling_matrix(f.liou.tensor, f.basis);
  const double scale = c.maxCoeff();
  for (int k = 0; k <= 7; ++k)
    for (int kp = 0; kp <= 7; ++kp)
      if (std::abs(k - kp) >= 2) CHECK(c(k, kp) < 1e-10 * scale);
  for (int k = 0; k < 7; ++k) {
    CAPTURE(k);
    CHECK(std::abs(c(k + 1, k) - c(k, k + 1)) > 1e-6 * scale);
    CHECK(c(k + 1, k) > c(k, k + 1));  // weight flows away from low ranks
  }
}

TEST_CASE("precession couples no distinct ranks") {
  const Fixture f(ModelKind::precession, 5, 1.0, 0.7);
  const Eigen::MatrixXd c = rank_coupling_matrix(f.liou.tensor, f.basis);
  for (int k = 0; k <= 5; ++k)
    for (int kp = 0; kp <= 5; ++kp)
      if (k != kp) CHECK(c(k, kp) < 1e-10 * c.maxCoeff());
  // and all k-changing matrix elements vanish, coherent part included
  for (int fidx = 0; fidx < f.basis.op_dim; ++fidx)
    for (int g = 0; g < f.basis.op_dim; ++g)
      if (TensorBasis::kq_of(fidx).first != TensorBasis::kq_of(g).first)
        CHECK(std::abs(f.liou.tensor.m(fidx, g)) < 1e-10);
}

TEST_CASE("selection rules hold for btc at N in {3,5,7}") {
  for (int n : {3, 5, 7}) {
    CAPTURE(n);
    const Fixture f(ModelKind::btc, n, 1.0, 1.0);
    const SelectionRuleReport rep = verify_selection_rules(f.liou.tensor, f.basis, f.spec);
    CHECK(rep.dissipative_q_changing < 1e-10 * rep.scale);
    CHECK(rep.dissipative_far_rank < 1e-10 * rep.scale);
    CHECK(rep.coherent_off_pattern < 1e-10 * rep.scale);
    CHECK(rep.ok());
  }
}

TEST_CASE("extracted couplings: analytic pieces and symmetries") {
  const Fixture f(ModelKind::btc, 7, 1.0, 1.0);
  const LatticeCouplings c = extract_couplings(f.liou.tensor, f.basis, f.spec);

  SUBCASE("w is the analytic coherent hop and reciprocal in q") {
    CHECK(c.w_plus[TensorBasis::flat_index(1, 0)] == 0.5 * std::sqrt(2.0));
    for (int k = 0; k <= c.max_rank; ++k)
      for (int q = -k; q < k; ++q) {
        // identical closed forms, so equality is exact
        CHECK(c.w_plus[TensorBasis::flat_index(k, q)] ==
              c.w_minus[TensorBasis::flat_index(k, q + 1)]);
      }
  }

  SUBCASE("on-site decay is nonnegative and q-symmetric") {
    for (int k = 0; k <= c.max_rank; ++k)
      for (int q = 0; q <= k; ++q) {
        const double gp = c.gamma[TensorBasis::flat_index(k, q)];
        const double gm = c.gamma[TensorBasis::flat_index(k, -q)];
        CHECK(gp >= -1e-12);
        CHECK(std::abs(gp - gm) < 1e-10);
      }
  }

  SUBCASE("mean on-site decay increases strictly with rank") {
    double prev = -1.0;
    for (int k = 1; k <= c.max_rank; ++k) {
      double mean = 0.0;
      for (int q = -k; q <= k; ++q) mean += c.gamma[TensorBasis::flat_index(k, q)];
      mean /= (2 * k + 1);
      CAPTURE(k);
      CHECK(mean > prev);
      prev = mean;
    }
  }

  SUBCASE("rank hopping is non-reciprocal, stronger upward") {
    const NonreciprocityReport rep = nonreciprocity_report(c);
    CHECK(rep.upward_dominant_bond);  // |t+(k,q)| > |t-(k+1,q)| across every bond
    for (const auto& b : rep.bonds) {
      CAPTURE(b.k);
      CAPTURE(b.q);
      CHECK(b.t_up > b.t_down_bond);
    }
  }
}

TEST_CASE("precession sector blocks take the tridiagonal hopping form") {
  const int n = 5;
  const double omega = 1.3, gamma = 0.9;
  const Fixture f(ModelKind::precession, n, omega, gamma);
  for (int k = 0; k <= n; ++k) {
    const int sz = 2 * k + 1;
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(sz, sz);
    for (int q = -k; q <= k; ++q) {
      const double kk1 = static_cast<double>(k) * (k + 1);
      expected(q + k, q + k) = -gamma / (2.0 * n) * q * q;
      if (q + 1 <= k)
        expected(q + 1 + k, q + k) =
            cx(0, -omega) * 0.5 * std::sqrt(kk1 - static_cast<double>(q) * (q + 1));
      if (q - 1 >= -k)
        expected(q - 1 + k, q + k) =
            cx(0, -omega) * 0.5 * std::sqrt(kk1 - static_cast<double>(q) * (q - 1));
    }
    const Eigen::MatrixXcd block = f.liou.tensor.m.block(k * k, k * k, sz, sz);
    CAPTURE(k);
    CHECK((block - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("lattice view is lossless for both models") {
  for (int n : {3, 5, 7}) {
    for (auto kind : {ModelKind::btc, ModelKind::precession}) {
      CAPTURE(n);
      const Fixture f(kind, n, 1.0, 0.8);
      const LatticeCouplings c = extract_couplings(f.liou.tensor, f.basis, f.spec);
      const Superoperator rec = reconstruct_liouvillian(c);
      const double scale = max_abs(f.liou.tensor.m);
      CHECK((rec.m - f.liou.tensor.m).cwiseAbs().maxCoeff() < 1e-10 * scale);
    }
  }
}

TEST_CASE("parameter sweeps run concurrently over shared immutable inputs") {
  // One basis shared read-only across workers; builders and extraction are
  // pure, so the concurrent sweep must reproduce the serial one exactly.
  const int n = 5;
  const TensorBasis basis = build_tensor_basis(build_spin_system(n));
  const std::vector<double> gammas = {0.3, 0.7, 1.1, 1.9};

  std::vector<Eigen::MatrixXd> serial;
  for (double g : gammas) {
    const ModelSpec spec = ModelSpec::btc(n, 1.0, g);
    serial.push_back(
        extract_couplings(build_liouvillian(spec, basis).tensor, basis, spec).rank_coupling);
  }

  std::vector<std::future<Eigen::MatrixXd>> jobs;
  for (double g : gammas)
    jobs.push_back(std::async(std::launch::async, [&basis, n, g] {
      const ModelSpec spec = ModelSpec::btc(n, 1.0, g);
      return extract_couplings(build_liouvillian(spec, basis).tensor, basis, spec).rank_coupling;
    }));
  for (size_t i = 0; i < jobs.size(); ++i)
    CHECK((jobs[i].get() - serial[i]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("corrupted generator fails the internal consistency gate") {
  Fixture f(ModelKind::btc, 4, 1.0, 1.0);
  // weight on a forbidden link: (k,q) = (3,0) <- (1,0)
  f.liou.tensor.m(TensorBasis::flat_index(3, 0), TensorBasis::flat_index(1, 0)) = 1e-4;
  CHECK_THROWS_AS(extract_couplings(f.liou.tensor, f.basis, f.spec), ConsistencyError);
}
