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

// End-to-end checks of the opspace binary: exit codes, file contracts, and
// byte-level determinism.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path kWorkRoot = fs::temp_directory_path() / "opspace_cli_test";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(OPSPACE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

struct Workspace {
  fs::path dir;
  explicit Workspace(const std::string& name) : dir(kWorkRoot / name) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
};

}  // namespace

TEST_CASE("coupling-matrix writes the documented files and anchors") {
  Workspace ws("coupling");
  const fs::path out = ws.dir / "run";
  REQUIRE(run_cli("coupling-matrix --n 1 --omega 1.2 --gamma-over-omega 0.75 --out " +
                  out.string()) == 0);
  REQUIRE(fs::exists(out / "coupling_matrix.csv"));
  REQUIRE(fs::exists(out / "nonreciprocity.csv"));
  REQUIRE(fs::exists(out / "manifest.json"));

  const auto rows = read_csv(out / "coupling_matrix.csv");
  REQUIRE(rows.size() == 3);  // header + 2 ranks
  CHECK(rows[0][0] == "k");
  // C(1 <- 0) = Gamma = 0.75 * 1.2
  CHECK(std::stod(rows[2][1]) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(std::abs(std::stod(rows[1][1])) < 1e-13);  // trace preservation empties row k=0
  CHECK(std::abs(std::stod(rows[1][2])) < 1e-13);

  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["model"]["kind"] == "btc");
  CHECK(manifest["model"]["N"] == 1);
  CHECK(manifest["nonreciprocity"]["upward_dominant_bond"] == true);
  CHECK(manifest["tolerances"].contains("zero_entry_rel"));
}

TEST_CASE("identical configuration produces byte-identical output") {
  Workspace ws("determinism");
  const fs::path a = ws.dir / "a", b = ws.dir / "b";
  const std::string args = "spectrum --n 5 --gamma-over-omega 0.5 --x-basis";
  REQUIRE(run_cli(args + " --out " + a.string()) == 0);
  REQUIRE(run_cli(args + " --out " + b.string()) == 0);
  for (const char* name : {"spectrum.csv", "mode_weights.csv", "manifest.json"})
    CHECK(slurp(a / name) == slurp(b / name));

  const auto spec_rows = read_csv(a / "spectrum.csv");
  REQUIRE(spec_rows.size() == 37);  // header + 36 modes
  // slowest mode first: within rounding of the zero eigenvalue
  CHECK(std::abs(std::stod(spec_rows[1][1])) < 1e-10);
  const auto weight_rows = read_csv(a / "mode_weights.csv");
  CHECK(weight_rows[0][2] == "q_x");
  REQUIRE(weight_rows.size() == 1 + 36 * 36);
}

TEST_CASE("evolve honors grid, state, and trajectory schema") {
  Workspace ws("evolve");
  const fs::path out = ws.dir / "run";
  REQUIRE(run_cli("evolve --n 3 --times 0:2:0.25 --state coherent:0.9,0.3 --out " +
                  out.string()) == 0);
  const auto rows = read_csv(out / "trajectory.csv");
  REQUIRE(rows.size() == 10);  // header + 9 samples
  CHECK(rows[0][0] == "t");
  CHECK(rows[0][11] == "jz");
  // a00 is pinned to 1/sqrt(N+1) at every sample
  for (size_t i = 1; i < rows.size(); ++i)
    CHECK(std::stod(rows[i][1]) == doctest::Approx(0.5).epsilon(1e-12));
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["run"]["integrator_only"] == false);
  CHECK(manifest["run"]["cross_check_deviation"].get<double>() < 1e-8);
}

TEST_CASE("config file drives the run and flags override it") {
  Workspace ws("config");
  const fs::path cfg = ws.dir / "model.json";
  std::ofstream(cfg) << R"({"kind":"btc","N":4,"omega":2.0,"gamma_over_omega":0.5})";

  const fs::path out1 = ws.dir / "from_config";
  REQUIRE(run_cli("onsite-decay --config " + cfg.string() + " --out " + out1.string()) == 0);
  auto manifest = nlohmann::json::parse(slurp(out1 / "manifest.json"));
  CHECK(manifest["model"]["N"] == 4);
  CHECK(manifest["model"]["omega"] == 2.0);
  CHECK(manifest["model"]["gamma"] == 1.0);

  const fs::path out2 = ws.dir / "override";
  REQUIRE(run_cli("onsite-decay --config " + cfg.string() + " --n 2 --out " + out2.string()) ==
          0);
  manifest = nlohmann::json::parse(slurp(out2 / "manifest.json"));
  CHECK(manifest["model"]["N"] == 2);
  CHECK(manifest["model"]["omega"] == 2.0);

  const auto rows = read_csv(out2 / "onsite_decay.csv");
  REQUIRE(rows.size() == 1 + 9);  // header + (N+1)^2 sites
}

TEST_CASE("exit codes") {
  Workspace ws("exits");
  SUBCASE("usage errors exit 1") {
    CHECK(run_cli("no-such-command") == 1);
    CHECK(run_cli("evolve --times nonsense --out " + (ws.dir / "x").string()) == 1);
    CHECK(run_cli("evolve --state squeezed --out " + (ws.dir / "y").string()) == 1);
    CHECK(run_cli("perturbative-compare --model precession --out " + (ws.dir / "z").string()) ==
          1);
  }
  SUBCASE("io failures exit 2") {
    const fs::path blocker = ws.dir / "blocker";
    std::ofstream(blocker) << "file in the way";
    CHECK(run_cli("coupling-matrix --n 1 --out " + (blocker / "sub").string()) == 2);
  }
  SUBCASE("numerical refusals exit 3") {
    // kappa = Gamma/(2 N Omega) = 2 exactly: defective generator
    CHECK(run_cli("spectrum --model precession --n 3 --gamma-over-omega 12 --out " +
                  (ws.dir / "ep").string()) == 3);
  }
  SUBCASE("help exits 0") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("spectrum --help") == 0);
  }
}

TEST_CASE("hybridization compares the documented coupling pair") {
  Workspace ws("hybrid");
  const fs::path out = ws.dir / "run";
  REQUIRE(run_cli("hybridization --n 5 --go-list 0.5 2.0 --out " + out.string()) == 0);
  REQUIRE(fs::exists(out / "hybridization_go0.5.csv"));
  REQUIRE(fs::exists(out / "hybridization_go2.csv"));
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  const double pr_weak = manifest["results"]["0.5"]["participation_ratio"].get<double>();
  const double pr_strong = manifest["results"]["2"]["participation_ratio"].get<double>();
  CHECK(pr_weak > 1.0);
  CHECK(pr_strong > pr_weak);

  const auto rows = read_csv(out / "hybridization_go0.5.csv");
  REQUIRE(rows.size() == 7);  // header + k = 0..5
  double total = 0.0;
  for (size_t i = 1; i < rows.size(); ++i) total += std::stod(rows[i][1]);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("heatmap profiles the slowest oscillatory mode on the x lattice") {
  Workspace ws("heatmap");
  const fs::path out = ws.dir / "run";
  REQUIRE(run_cli("heatmap --n 5 --gamma-over-omega 0.5 --out " + out.string()) == 0);
  const auto rows = read_csv(out / "heatmap.csv");
  REQUIRE(rows.size() == 1 + 36);
  CHECK(rows[0][1] == "q_x");
  double total = 0.0;
  for (size_t i = 1; i < rows.size(); ++i) total += std::stod(rows[i][2]);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("dump-basis emits a parseable complete basis") {
  Workspace ws("dump");
  const fs::path out = ws.dir / "run";
  REQUIRE(run_cli("dump-basis --n 2 --out " + out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out / "basis.json"));
  REQUIRE(j.is_array());
  CHECK(j.size() == 9);
}

TEST_CASE("precession-check locates the exceptional point and the Jx rate") {
  Workspace ws("precession");
  const fs::path out = ws.dir / "run";
  REQUIRE(run_cli("precession-check --n 4 --out " + out.string()) == 0);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(std::abs(manifest["results"]["ep_estimate_kappa"].get<double>() - 2.0) <= 1e-3 + 1e-9);
  CHECK(manifest["results"]["jx_decay_relative_error"].get<double>() < 1e-6);
  const auto rows = read_csv(out / "precession_check.csv");
  REQUIRE(rows.size() == 1 + 201);  // header + kappa grid 1.9..2.1 step 1e-3
  // eigenvalues lose ~half their digits right at the coalescence, so the
  // sweep-wide residual bound sits at the sqrt(eps) scale
  for (size_t i = 1; i < rows.size(); ++i)
    CHECK(std::stod(rows[i][7]) < 1e-7);  // closed-form residual column
}

TEST_CASE("perturbative-compare carries both normalizations and the scaling fit") {
  Workspace ws("perturbative");
  const fs::path out = ws.dir / "run";
  REQUIRE(run_cli("perturbative-compare --n 4 --gamma-over-omega 0.1 --out " + out.string()) ==
          0);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(std::abs(manifest["results"]["fitted_slope"].get<double>() - 2.0) < 0.15);
  CHECK(manifest.contains("damping_prefactor_note"));

  const auto rows = read_csv(out / "perturbative_compare.csv");
  REQUIRE(rows.size() == 1 + 25);
  // header: k,q_x,re_op,im_op,re_printed,im_printed,re_exact,im_exact,deviation
  for (size_t i = 1; i < rows.size(); ++i) {
    const double re_op = std::stod(rows[i][2]);
    const double re_printed = std::stod(rows[i][4]);
    if (std::abs(re_op) > 1e-14)
      CHECK(re_printed / re_op == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(std::stod(rows[i][8]) < 0.05);  // matched deviation small at Gamma/Omega = 0.1
  }
}
