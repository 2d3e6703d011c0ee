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

// opspace: collective-spin Lindbladians viewed as hopping problems on the
// (k,q) operator lattice. Every subcommand writes CSV data plus a JSON
// manifest echoing the resolved configuration.
//
// Exit codes: 0 ok, 1 usage, 2 I/O, 3 numerical consistency.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "opspace/opspace.hpp"

namespace fs = std::filesystem;
using namespace opspace;
using nlohmann::json;

namespace {

struct Options {
  std::string model = "btc";
  int n = 7;
  double omega = 1.0;
  double gamma_over_omega = 1.0;
  std::string config_file;
  std::string out_dir = "out";
  bool x_basis = false;
  std::string times = "0:50:0.05";
  std::string state = "polarized";
  std::vector<double> go_list = {0.5, 2.0};
  double kappa_min = 1.9;
  double kappa_max = 2.1;
  double kappa_step = 1e-3;
  std::vector<double> gamma_sweep = {0.2, 0.1, 0.05, 0.025};

  CLI::Option* opt_model = nullptr;
  CLI::Option* opt_n = nullptr;
  CLI::Option* opt_omega = nullptr;
  CLI::Option* opt_go = nullptr;
};

void add_model_flags(CLI::App* cmd, Options& o) {
  o.opt_model = cmd->add_option("--model", o.model, "Model kind: btc or precession")
                    ->check(CLI::IsMember({"btc", "precession"}))
                    ->capture_default_str();
  o.opt_n = cmd->add_option("--n", o.n, "Number of spin-1/2 constituents N")->capture_default_str();
  o.opt_omega = cmd->add_option("--omega", o.omega, "Coherent drive frequency Omega")
                    ->capture_default_str();
  o.opt_go = cmd->add_option("--gamma-over-omega", o.gamma_over_omega,
                             "Collective rate as Gamma/Omega")
                 ->capture_default_str();
  cmd->add_option("--config", o.config_file, "JSON model spec; explicit flags override it");
  cmd->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
}

ModelSpec resolve_spec(const Options& o) {
  ModelSpec spec = ModelSpec::btc(7, 1.0, 1.0);
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) throw io::IoError("cannot read config file " + o.config_file);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    spec = ModelSpec::from_json(j);
  }
  const bool have_model = o.opt_model && o.opt_model->count() > 0;
  const bool have_n = o.opt_n && o.opt_n->count() > 0;
  const bool have_omega = o.opt_omega && o.opt_omega->count() > 0;
  const bool have_go = o.opt_go && o.opt_go->count() > 0;
  const ModelKind kind = have_model
                             ? (o.model == "btc" ? ModelKind::btc : ModelKind::precession)
                             : spec.kind;
  const int n = have_n ? o.n : spec.n_spins;
  const double omega = have_omega ? o.omega : spec.omega;
  double gamma = spec.gamma;
  if (have_go || o.config_file.empty()) gamma = o.gamma_over_omega * omega;
  return kind == ModelKind::btc ? ModelSpec::btc(n, omega, gamma)
                                : ModelSpec::precession(n, omega, gamma);
}

std::vector<double> parse_times(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::invalid_argument("expected --times t0:t1:dt");
  const double t0 = std::stod(text.substr(0, c1));
  const double t1 = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  const double dt = std::stod(text.substr(c2 + 1));
  if (dt <= 0.0 || t1 < t0 || t0 < 0.0) throw std::invalid_argument("bad --times grid");
  std::vector<double> out;
  for (double t = t0; t <= t1 + 1e-9 * dt; t += dt) out.push_back(t);
  return out;
}

json base_manifest(const std::string& command, const ModelSpec& spec) {
  json m{{"artifact", {{"name", kArtifactName}, {"version", kArtifactVersion}}},
         {"command", command},
         {"model", spec.to_json()},
         {"tolerances", io::tolerance_manifest()}};
  if (const char* seed = std::getenv("OPSPACE_SEED")) m["env"]["OPSPACE_SEED"] = seed;
  return m;
}

fs::path prepare_out(const Options& o) {
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec) throw io::IoError("cannot create output directory " + o.out_dir);
  return o.out_dir;
}

/// Deterministic mode ordering: slowest decay first, then ascending Im.
std::vector<int> mode_order(const SpectralData& sd) {
  std::vector<int> order(sd.size());
  for (int i = 0; i < sd.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const cx la = sd.eigenvalues(a), lb = sd.eigenvalues(b);
    if (la.real() != lb.real()) return la.real() > lb.real();
    if (la.imag() != lb.imag()) return la.imag() < lb.imag();
    return a < b;
  });
  return order;
}

// --- subcommands ------------------------------------------------------------

int cmd_coupling_matrix(const Options& o) {
  const ModelSpec spec = resolve_spec(o);
  const fs::path dir = prepare_out(o);
  const TensorBasis basis = build_tensor_basis(build_spin_system(spec.n_spins));
  const Liouvillian liou = build_liouvillian(spec, basis);
  const LatticeCouplings couplings = extract_couplings(liou.tensor, basis, spec);

  std::vector<std::string> header{"k"};
  for (int kp = 0; kp <= basis.max_rank; ++kp) header.push_back("kp=" + std::to_string(kp));
  io::CsvWriter csv(dir / "coupling_matrix.csv", header);
  for (int k = 0; k <= basis.max_rank; ++k) {
    std::vector<io::Cell> cells{k};
    for (int kp = 0; kp <= basis.max_rank; ++kp) cells.push_back(couplings.rank_coupling(k, kp));
    csv.row(cells);
  }

  const NonreciprocityReport rep = nonreciprocity_report(couplings);
  io::CsvWriter nr(dir / "nonreciprocity.csv",
                   {"k", "q", "abs_t_plus", "abs_t_minus_bond", "abs_t_minus_site"});
  for (const auto& bond : rep.bonds)
    nr.row({bond.k, bond.q, bond.t_up, bond.t_down_bond, bond.t_down_site});

  json manifest = base_manifest("coupling-matrix", spec);
  manifest["outputs"] = {"coupling_matrix.csv", "nonreciprocity.csv"};
  manifest["nonreciprocity"] = {{"upward_dominant_bond", rep.upward_dominant_bond},
                                {"upward_dominant_site", rep.upward_dominant_site}};
  io::write_json(dir / "manifest.json", manifest);
  return 0;
}

int cmd_onsite_decay(const Options& o) {
  const ModelSpec spec = resolve_spec(o);
  const fs::path dir = prepare_out(o);
  const TensorBasis basis = build_tensor_basis(build_spin_system(spec.n_spins));
  const Liouvillian liou = build_liouvillian(spec, basis);
  const LatticeCouplings couplings = extract_couplings(liou.tensor, basis, spec);

  io::CsvWriter onsite(dir / "onsite_decay.csv", {"k", "q", "gamma"});
  io::CsvWriter hops(dir / "hoppings.csv", {"k", "q", "re_t_plus", "im_t_plus", "re_t_minus",
                                            "im_t_minus", "w_plus", "w_minus"});
  for (int k = 0; k <= basis.max_rank; ++k)
    for (int q = -k; q <= k; ++q) {
      const int f = TensorBasis::flat_index(k, q);
      onsite.row({k, q, couplings.gamma[f]});
      hops.row({k, q, couplings.t_plus[f].real(), couplings.t_plus[f].imag(),
                couplings.t_minus[f].real(), couplings.t_minus[f].imag(), couplings.w_plus[f],
                couplings.w_minus[f]});
    }

  json manifest = base_manifest("onsite-decay", spec);
  manifest["outputs"] = {"onsite_decay.csv", "hoppings.csv"};
  io::write_json(dir / "manifest.json", manifest);
  return 0;
}

int cmd_spectrum(const Options& o) {
  const ModelSpec spec = resolve_spec(o);
  const fs::path dir = prepare_out(o);
  const TensorBasis basis = build_tensor_basis(build_spin_system(spec.n_spins));
  const XTensorBasis xbasis = o.x_basis ? rotate_basis(basis) : XTensorBasis{};
  const Liouvillian liou = build_liouvillian(spec, basis);
  const SpectralData sd = decompose(liou.tensor);
  const std::vector<int> order = mode_order(sd);

  io::CsvWriter csv(dir / "spectrum.csv", {"n", "re_lambda", "im_lambda", "pr_k",
                                           "biorth_condition"});
  io::CsvWriter weights(dir / "mode_weights.csv",
                        {"n", "k", o.x_basis ? "q_x" : "q", "w_kq"});
  for (size_t row = 0; row < order.size(); ++row) {
    const int i = order[row];
    const ModeProfile profile =
        o.x_basis ? profile_mode(sd, i, basis, xbasis) : profile_mode(sd, i);
    csv.row({row, sd.eigenvalues(i).real(), sd.eigenvalues(i).imag(),
             profile.participation_ratio, sd.biorthogonal_condition[i]});
    for (int k = 0; k <= basis.max_rank; ++k)
      for (int q = -k; q <= k; ++q)
        weights.row({row, k, q, profile.w_kq(TensorBasis::flat_index(k, q))});
  }

  json manifest = base_manifest("spectrum", spec);
  manifest["options"]["x_basis"] = o.x_basis;
  manifest["outputs"] = {"spectrum.csv", "mode_weights.csv"};
  io::write_json(dir / "manifest.json", manifest);
  return 0;
}

int cmd_hybridization(const Options& o) {
  const ModelSpec base = resolve_spec(o);
  const fs::path dir = prepare_out(o);
  const TensorBasis basis = build_tensor_basis(build_spin_system(base.n_spins));

  json manifest = base_manifest("hybridization", base);
  manifest["options"]["gamma_over_omega_list"] = o.go_list;
  std::vector<std::string> outputs;
  for (double go : o.go_list) {
    ModelSpec spec = base;
    spec.gamma = go * base.omega;
    const Liouvillian liou = build_liouvillian(spec, basis);
    const SpectralData sd = decompose(liou.tensor);
    const auto pair = slowest_oscillatory_pair(sd, spec.omega);
    const std::string tag = io::format_double(go);
    if (!pair) {
      manifest["results"][tag] = {{"no_oscillatory_mode", true}};
      continue;
    }
    const ModeProfile profile = profile_mode(sd, pair->first);
    const std::string name = "hybridization_go" + tag + ".csv";
    io::CsvWriter csv(dir / name, {"k", "w_k"});
    for (int k = 0; k <= basis.max_rank; ++k) csv.row({k, profile.w_k[k]});
    outputs.push_back(name);
    manifest["results"][tag] = {
        {"mode_re_lambda", sd.eigenvalues(pair->first).real()},
        {"mode_im_lambda", sd.eigenvalues(pair->first).imag()},
        {"participation_ratio", profile.participation_ratio}};
  }
  manifest["outputs"] = outputs;
  io::write_json(dir / "manifest.json", manifest);
  return 0;
}

int cmd_heatmap(const Options& o) {
  const ModelSpec spec = resolve_spec(o);
  const fs::path dir = prepare_out(o);
  const TensorBasis basis = build_tensor_basis(build_spin_system(spec.n_spins));
  const XTensorBasis xbasis = rotate_basis(basis);
  const Liouvillian liou = build_liouvillian(spec, basis);
  const SpectralData sd = decompose(liou.tensor);
  const auto pair = slowest_oscillatory_pair(sd, spec.omega);
  if (!pair) throw std::invalid_argument("heatmap: spectrum has no oscillatory mode");
  const ModeProfile profile = profile_mode(sd, pair->first, basis, xbasis);

  io::CsvWriter csv(dir / "heatmap.csv", {"k", "q_x", "w_kq"});
  for (int k = 0; k <= basis.max_rank; ++k)
    for (int q = -k; q <= k; ++q)
      csv.row({k, q, profile.w_kq(TensorBasis::flat_index(k, q))});

  json manifest = base_manifest("heatmap", spec);
  manifest["mode"] = {{"re_lambda", sd.eigenvalues(pair->first).real()},
                      {"im_lambda", sd.eigenvalues(pair->first).imag()},
                      {"participation_ratio", profile.participation_ratio}};
  manifest["outputs"] = {"heatmap.csv"};
  io::write_json(dir / "manifest.json", manifest);
  return 0;
}

int cmd_evolve(const Options& o) {
  const ModelSpec spec = resolve_spec(o);
  const fs::path dir = prepare_out(o);
  const std::vector<double> times = parse_times(o.times);
  const StatePrep prep = StatePrep::parse(o.state);
  const SpinSystem spin = build_spin_system(spec.n_spins);
  const TensorBasis basis = build_tensor_basis(spin);
  const Liouvillian liou = build_liouvillian(spec, basis);
  const CoefficientState st0 = initial_state(prep, spin, basis);
  const EvolveResult res = evolve(liou.tensor, st0, times, spec);

  io::CsvWriter csv(dir / "trajectory.csv",
                    {"t", "re_a00", "im_a00", "re_a1m1", "im_a1m1", "re_a10", "im_a10", "re_a1p1",
                     "im_a1p1", "jx", "jy", "jz"});
  for (const auto& st : res.states) {
    const cx a00 = st.a(TensorBasis::flat_index(0, 0));
    const cx a1m1 = st.a(TensorBasis::flat_index(1, -1));
    const cx a10 = st.a(TensorBasis::flat_index(1, 0));
    const cx a1p1 = st.a(TensorBasis::flat_index(1, 1));
    csv.row({st.t, a00.real(), a00.imag(), a1m1.real(), a1m1.imag(), a10.real(), a10.imag(),
             a1p1.real(), a1p1.imag(), expectation(st, basis, spin.jx).real(),
             expectation(st, basis, spin.jy).real(), expectation(st, basis, spin.jz).real()});
  }

  json manifest = base_manifest("evolve", spec);
  manifest["options"] = {{"times", o.times}, {"state", prep.name()}};
  manifest["run"] = {{"integrator_only", res.integrator_only},
                     {"cross_check_deviation", res.cross_check_deviation},
                     {"samples", res.states.size()}};
  manifest["outputs"] = {"trajectory.csv"};
  io::write_json(dir / "manifest.json", manifest);
  return 0;
}

int cmd_precession_check(const Options& o) {
  Options forced = o;
  forced.model = "precession";
  ModelSpec spec = resolve_spec(forced);
  spec = ModelSpec::precession(spec.n_spins, spec.omega, spec.gamma);
  const fs::path dir = prepare_out(o);
  const TensorBasis basis = build_tensor_basis(build_spin_system(spec.n_spins));

  io::CsvWriter csv(dir / "precession_check.csv",
                    {"kappa", "re_lambda_0", "im_lambda_0", "re_lambda_1", "im_lambda_1",
                     "re_lambda_2", "im_lambda_2", "max_residual_vs_analytic",
                     "min_eigenvalue_gap"});
  double ep_estimate = 0.0, ep_gap = std::numeric_limits<double>::infinity();
  for (double kappa = o.kappa_min; kappa <= o.kappa_max + 1e-12;
       kappa += o.kappa_step) {
    const double gamma = kappa * 2.0 * spec.n_spins * spec.omega;
    const Liouvillian liou =
        build_liouvillian(ModelSpec::precession(spec.n_spins, spec.omega, gamma), basis);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(liou.tensor.m.block(1, 1, 3, 3), false);
    Eigen::VectorXcd lams = es.eigenvalues();
    std::sort(lams.data(), lams.data() + 3, [](cx a, cx b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });

    const cx disc = std::sqrt(cx(1.0 - 0.25 * kappa * kappa));
    const std::vector<cx> analytic = {cx(-gamma / (2.0 * spec.n_spins), 0),
                                      cx(-gamma / (4.0 * spec.n_spins), 0) +
                                          cx(0, 1) * spec.omega * disc,
                                      cx(-gamma / (4.0 * spec.n_spins), 0) -
                                          cx(0, 1) * spec.omega * disc};
    double residual = 0.0;
    std::vector<bool> used(3, false);
    for (int i = 0; i < 3; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = -1;
      for (int j = 0; j < 3; ++j) {
        if (used[j]) continue;
        const double d = std::abs(lams(i) - analytic[j]);
        if (d < best) {
          best = d;
          arg = j;
        }
      }
      used[arg] = true;
      residual = std::max(residual, best);
    }
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) gap = std::min(gap, std::abs(lams(i) - lams(j)));
    if (gap < ep_gap) {
      ep_gap = gap;
      ep_estimate = kappa;
    }
    csv.row({kappa, lams(0).real(), lams(0).imag(), lams(1).real(), lams(1).imag(),
             lams(2).real(), lams(2).imag(), residual, gap});
  }

  // <Jx> decay-rate fit at the resolved Gamma
  const SpinSystem spin = basis.spin;
  const Liouvillian liou = build_liouvillian(spec, basis);
  const CoefficientState st0 = initial_state(StatePrep::coherent(M_PI / 2.0, 0.0), spin, basis);
  std::vector<double> times;
  const double horizon = 4.0 * spec.n_spins / std::max(spec.gamma, 1e-6);
  for (int i = 0; i <= 24; ++i) times.push_back(horizon * i / 24.0);
  const EvolveResult res = evolve(liou.tensor, st0, times, spec);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < times.size(); ++i) {
    const double v = expectation(res.states[i], basis, spin.jx).real();
    const double lx = times[i], ly = std::log(std::abs(v));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const int count = static_cast<int>(times.size());
  const double fit_rate = -(count * sxy - sx * sy) / (count * sxx - sx * sx);
  const double expected_rate = spec.gamma / (2.0 * spec.n_spins);

  json manifest = base_manifest("precession-check", spec);
  manifest["options"] = {{"kappa_min", o.kappa_min},
                         {"kappa_max", o.kappa_max},
                         {"kappa_step", o.kappa_step}};
  manifest["results"] = {{"ep_estimate_kappa", ep_estimate},
                         {"ep_min_gap", ep_gap},
                         {"jx_decay_fit_rate", fit_rate},
                         {"jx_decay_expected_rate", expected_rate},
                         {"jx_decay_relative_error",
                          std::abs(fit_rate - expected_rate) / expected_rate}};
  manifest["outputs"] = {"precession_check.csv"};
  io::write_json(dir / "manifest.json", manifest);
  return 0;
}

int cmd_perturbative_compare(const Options& o) {
  ModelSpec spec = resolve_spec(o);
  if (spec.kind != ModelKind::btc)
    throw std::invalid_argument("perturbative-compare requires the btc model");
  const fs::path dir = prepare_out(o);
  const TensorBasis basis = build_tensor_basis(build_spin_system(spec.n_spins));

  const Liouvillian liou = build_liouvillian(spec, basis);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(liou.tensor.m, false);
  const auto rows = perturbative_spectrum(spec, basis.spin);

  // global greedy 1:1 matching of effective modes to exact eigenvalues
  const int d = basis.op_dim;
  struct Entry {
    double dist;
    int eff, exact;
  };
  std::vector<Entry> entries;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      entries.push_back({std::abs(rows[i].lambda_operator - es.eigenvalues()(j)), i, j});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.eff != b.eff ? a.eff < b.eff : a.exact < b.exact;
  });
  std::vector<int> match(d, -1);
  std::vector<bool> used(d, false);
  int placed = 0;
  for (const auto& e : entries) {
    if (match[e.eff] >= 0 || used[e.exact]) continue;
    match[e.eff] = e.exact;
    used[e.exact] = true;
    if (++placed == d) break;
  }

  io::CsvWriter csv(dir / "perturbative_compare.csv",
                    {"k", "q_x", "re_lambda_eff_operator", "im_lambda_eff_operator",
                     "re_lambda_eff_printed", "im_lambda_eff_printed", "re_lambda_exact",
                     "im_lambda_exact", "deviation"});
  for (int i = 0; i < d; ++i) {
    const cx exact = es.eigenvalues()(match[i]);
    csv.row({rows[i].k, rows[i].qx, rows[i].lambda_operator.real(),
             rows[i].lambda_operator.imag(), rows[i].lambda_printed.real(),
             rows[i].lambda_printed.imag(), exact.real(), exact.imag(),
             std::abs(rows[i].lambda_operator - exact)});
  }

  const PerturbationErrorTable table = perturbation_error(spec, o.gamma_sweep, basis);
  io::CsvWriter scaling(dir / "perturbation_scaling.csv",
                        {"gamma", "max_deviation", "pairing_ambiguous"});
  for (const auto& row : table.rows)
    scaling.row({row.gamma, row.max_deviation, row.pairing_ambiguous ? 1 : 0});

  json manifest = base_manifest("perturbative-compare", spec);
  manifest["options"]["gamma_sweep"] = o.gamma_sweep;
  manifest["results"] = {{"fitted_slope", table.fitted_slope}};
  manifest["damping_prefactor_note"] =
      "the two closed-form readings of the effective damping differ by an exact factor 4; "
      "lambda_eff_operator is the eigenvalue of the effective generator and is the value "
      "compared against the exact spectrum, lambda_eff_printed carries the alternative "
      "normalization";
  manifest["outputs"] = {"perturbative_compare.csv", "perturbation_scaling.csv"};
  io::write_json(dir / "manifest.json", manifest);
  return 0;
}

int cmd_dump_basis(const Options& o) {
  const ModelSpec spec = resolve_spec(o);
  const fs::path dir = prepare_out(o);
  const TensorBasis basis = build_tensor_basis(build_spin_system(spec.n_spins));
  std::ofstream out(dir / "basis.json");
  if (!out) throw io::IoError("cannot open basis.json for writing");
  dump_basis_json(basis, out);
  json manifest = base_manifest("dump-basis", spec);
  manifest["outputs"] = {"basis.json"};
  io::write_json(dir / "manifest.json", manifest);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "opspace: collective-spin Lindbladians as hopping problems on the (k,q) operator "
      "lattice"};
  app.require_subcommand(1);

  Options opt_coupling, opt_onsite, opt_spectrum, opt_hybrid, opt_heatmap, opt_evolve,
      opt_precession, opt_perturbative, opt_dump;

  CLI::App* coupling =
      app.add_subcommand("coupling-matrix", "Rank-to-rank coupling strengths of the generator");
  add_model_flags(coupling, opt_coupling);

  CLI::App* onsite =
      app.add_subcommand("onsite-decay", "On-site decay rates and hopping amplitudes");
  add_model_flags(onsite, opt_onsite);

  CLI::App* spectrum = app.add_subcommand("spectrum", "Full eigensystem with rank profiles");
  add_model_flags(spectrum, opt_spectrum);
  spectrum->add_flag("--x-basis", opt_spectrum.x_basis,
                     "Report site weights in the x-quantized basis");

  CLI::App* hybrid = app.add_subcommand(
      "hybridization", "Rank weights of the slowest oscillatory mode across couplings");
  add_model_flags(hybrid, opt_hybrid);
  hybrid->add_option("--go-list", opt_hybrid.go_list, "Gamma/Omega values to compare")
      ->capture_default_str();

  CLI::App* heatmap = app.add_subcommand(
      "heatmap", "(k,q_x) site weights of the slowest oscillatory mode");
  add_model_flags(heatmap, opt_heatmap);

  CLI::App* evolve_cmd = app.add_subcommand("evolve", "Propagate tensor coefficients in time");
  add_model_flags(evolve_cmd, opt_evolve);
  evolve_cmd->add_option("--times", opt_evolve.times, "Time grid t0:t1:dt")
      ->capture_default_str();
  evolve_cmd
      ->add_option("--state", opt_evolve.state,
                   "Initial state: polarized | mixed | coherent:<theta>,<phi>")
      ->capture_default_str();

  CLI::App* precession = app.add_subcommand(
      "precession-check", "k=1 eigensystem sweep against the closed form, with EP search");
  add_model_flags(precession, opt_precession);
  precession->add_option("--kappa-min", opt_precession.kappa_min, "Sweep start")
      ->capture_default_str();
  precession->add_option("--kappa-max", opt_precession.kappa_max, "Sweep end")
      ->capture_default_str();
  precession->add_option("--kappa-step", opt_precession.kappa_step, "Sweep step")
      ->capture_default_str();

  CLI::App* perturbative = app.add_subcommand(
      "perturbative-compare", "Exact spectrum against the first-order effective one");
  add_model_flags(perturbative, opt_perturbative);
  perturbative
      ->add_option("--gamma-sweep", opt_perturbative.gamma_sweep,
                   "Gamma values for the scaling fit")
      ->capture_default_str();

  CLI::App* dump = app.add_subcommand("dump-basis", "Write the tensor basis as JSON");
  add_model_flags(dump, opt_dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(coupling)) return cmd_coupling_matrix(opt_coupling);
    if (app.got_subcommand(onsite)) return cmd_onsite_decay(opt_onsite);
    if (app.got_subcommand(spectrum)) return cmd_spectrum(opt_spectrum);
    if (app.got_subcommand(hybrid)) return cmd_hybridization(opt_hybrid);
    if (app.got_subcommand(heatmap)) return cmd_heatmap(opt_heatmap);
    if (app.got_subcommand(evolve_cmd)) return cmd_evolve(opt_evolve);
    if (app.got_subcommand(precession)) return cmd_precession_check(opt_precession);
    if (app.got_subcommand(perturbative)) return cmd_perturbative_compare(opt_perturbative);
    if (app.got_subcommand(dump)) return cmd_dump_basis(opt_dump);
  } catch (const io::IoError& e) {
    std::cerr << "opspace: io error: " << e.what() << "\n";
    return 2;
  } catch (const ConsistencyError& e) {
    std::cerr << "opspace: consistency failure: " << e.what() << "\n";
    return 3;
  } catch (const ExceptionalPointError& e) {
    std::cerr << "opspace: " << e.what() << " (lambda ~ " << e.cluster_eigenvalue << ")\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "opspace: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "opspace: error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
