// Command-line front end for the kicked-top toolkit: classical stroboscopic
// maps, circuit compilation, concurrence sweeps, O_SCS traces and a tomography
// demo. All angles are radians. Outputs are written atomically (temp file in
// the target directory, then rename).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkt/analysis.hpp"
#include "qkt/classical.hpp"
#include "qkt/floquet.hpp"
#include "qkt/rng.hpp"
#include "qkt/sim.hpp"
#include "qkt/spin.hpp"
#include "qkt/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qkt;

namespace {

constexpr int kConfigVersion = 1;

struct CommonOpts {
  double kappa = 2.5;
  double p = kPi / 2.0;
  double theta = 2.25;
  double phi = 2.0;
  int kicks = 200;
  std::string mode = "exact";
  std::uint64_t shots = 8192;
  double p1 = 0.0;
  double p2 = 0.0;
  std::uint64_t seed = 0;
  int jobs = 0;
  std::string out;
  std::string format = "csv";
  bool mkdirs = false;
  std::string config_path;
};

std::string fmt_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

void write_atomic(const fs::path& target, const std::string& content, bool mkdirs) {
  fs::path dir = target.parent_path();
  if (!dir.empty() && !fs::exists(dir)) {
    if (!mkdirs)
      throw std::runtime_error("output directory does not exist: " + dir.string() +
                               " (pass --mkdirs to create it)");
    fs::create_directories(dir);
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

// Config file: JSON object with a "version" field; every other key must match
// a known option. Flags given on the command line take precedence.
void apply_config(CLI::App* cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CLI::ValidationError("--config", std::string("parse error: ") + e.what());
  }
  if (!j.is_object()) throw CLI::ValidationError("--config", "expected a JSON object");
  if (!j.contains("version"))
    throw CLI::ValidationError("--config", "missing required \"version\" field");
  if (j["version"].get<int>() != kConfigVersion)
    throw CLI::ValidationError("--config", "unsupported config version");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "version") continue;
    CLI::Option* opt = cmd->get_option_no_throw("--" + it.key());
    if (opt == nullptr)
      throw CLI::ValidationError("--config", "unknown key \"" + it.key() + "\"");
    if (opt->count() > 0) continue;  // explicit flag wins
    std::string value =
        it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
    opt->add_result(value);
    opt->run_callback();
  }
}

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_out) {
  cmd->add_option("--kappa", o.kappa, "Chaoticity parameter (dimensionless)")
      ->capture_default_str();
  cmd->add_option("--p", o.p, "Linear rotation angle in radians")->capture_default_str();
  cmd->add_option("--theta", o.theta, "Initial polar angle in radians, [0, pi]")
      ->capture_default_str();
  cmd->add_option("--phi", o.phi, "Initial azimuthal angle in radians, [0, 2pi)")
      ->capture_default_str();
  cmd->add_option("--kicks", o.kicks, "Number of kicks")->capture_default_str();
  cmd->add_option("--mode", o.mode, "Evolution mode: exact|shots|noisy")
      ->check(CLI::IsMember({"exact", "shots", "noisy"}))
      ->capture_default_str();
  cmd->add_option("--shots", o.shots, "Shots per tomography basis")->capture_default_str();
  cmd->add_option("--p1", o.p1, "Depolarizing probability per single-qubit gate")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--p2", o.p2, "Depolarizing probability per CNOT")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "Master seed for all sampling")->capture_default_str();
  cmd->add_option("--jobs", o.jobs, "Worker threads (0 = hardware concurrency)")
      ->capture_default_str();
  auto* out = cmd->add_option("--out", o.out, "Output path");
  if (needs_out) out->required();
  cmd->add_option("--format", o.format, "Output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_flag("--mkdirs", o.mkdirs, "Create missing output directories");
  cmd->add_option("--config", o.config_path, "JSON config file (flags override it)");
}

SweepOptions sweep_options(const CommonOpts& o) {
  SweepOptions s;
  s.shots = o.shots;
  s.noise_p1 = o.p1;
  s.noise_p2 = o.p2;
  s.master_seed = o.seed;
  s.jobs = o.jobs;
  return s;
}

void emit_sweep(const SweepResult& res, const CommonOpts& o) {
  write_atomic(o.out, o.format == "json" ? res.to_json() : res.to_csv(), o.mkdirs);
  std::cout << "wrote " << o.out << " (" << res.values.size() << " values)\n";
}

// ---------------------------------------------------------------- classical

int cmd_classical_map(const CommonOpts& o, int grid_theta, int grid_phi, bool single_point) {
  std::ostringstream csv;
  csv << "kick,x,y,z,theta,phi\n";
  auto emit_traj = [&](const ClassicalState& s0) {
    const auto traj = classical_trajectory(s0, o.kappa, o.kicks);
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const PhasePoint ang = sphere_to_angles(traj[k]);
      csv << k << "," << fmt_sig(traj[k].x, 15) << "," << fmt_sig(traj[k].y, 15) << ","
          << fmt_sig(traj[k].z, 15) << "," << fmt_sig(ang.theta, 15) << ","
          << fmt_sig(ang.phi, 15) << "\n";
    }
  };
  if (single_point) {
    emit_traj(angles_to_sphere(PhasePoint(o.theta, o.phi)));
  } else {
    // row-major, theta outer, phi inner
    const auto thetas = uniform_theta_grid(grid_theta);
    const auto phis = uniform_phi_grid(grid_phi);
    for (double th : thetas)
      for (double ph : phis) emit_traj(angles_to_sphere(PhasePoint(th, ph)));
  }
  write_atomic(o.out, csv.str(), o.mkdirs);
  std::cout << "wrote " << o.out << "\n";
  return 0;
}

// ------------------------------------------------------------------ compile

int cmd_compile(const CommonOpts& o, const std::string& level_name, bool prune,
                const std::string& verify_existing, const std::string& report_path) {
  const GateLevel level = level_name == "ibmq" ? GateLevel::Ibmq : GateLevel::Rotation;
  KickedTopParams params;
  params.kappa = o.kappa;
  params.p = o.p;
  const Mat4 target = Mat4(unitary_power(floquet_2q(params), o.kicks));

  GateSequence seq;
  std::string netlist_text;
  if (!verify_existing.empty()) {
    std::ifstream in(verify_existing);
    if (!in) {
      std::cerr << "error: cannot open " << verify_existing << "\n";
      return 1;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    netlist_text = buf.str();
    try {
      seq = parse_netlist(netlist_text);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  } else {
    seq = compile_qkt(params, o.kicks, level);
    if (prune) seq = prune_identity_gates(seq);
    netlist_text = to_netlist(seq, {{"kappa", fmt_sig(o.kappa, 17)},
                                    {"p", fmt_sig(o.p, 17)},
                                    {"N", std::to_string(o.kicks)}});
    write_atomic(o.out, netlist_text, o.mkdirs);
    // verify what was actually written by re-reading it
    std::ifstream back_in(o.out);
    std::stringstream buf;
    buf << back_in.rdbuf();
    seq = parse_netlist(buf.str());
  }

  const double err = phase_aligned_diff(sequence_matrix(seq), target);
  json report;
  report["kappa"] = o.kappa;
  report["p"] = o.p;
  report["n_kicks"] = o.kicks;
  report["level"] = level_name;
  report["gates"] = seq.gates.size();
  report["cnots"] = seq.cnot_count();
  report["single_qubit_gates"] = seq.single_qubit_count();
  report["reconstruction_error"] = err;
  const bool ok = err < 1e-8;
  report["verified"] = ok;
  if (!report_path.empty()) write_atomic(report_path, report.dump(2) + "\n", o.mkdirs);
  std::cout << report.dump(2) << "\n";
  if (!ok) {
    std::cerr << "error: reconstruction error " << err << " exceeds 1e-8\n";
    return 1;
  }
  return 0;
}

// ------------------------------------------------------------------- sweeps

int cmd_kappa_sweep(const CommonOpts& o, double kmin, double kmax, double kstep) {
  if (kstep <= 0.0 || kmax < kmin) {
    std::cerr << "error: bad kappa grid\n";
    return 1;
  }
  std::vector<double> kappas;
  for (double k = kmin; k <= kmax + 1e-12; k += kstep) kappas.push_back(k);
  SweepResult res = kappa_sweep(PhasePoint(o.theta, o.phi), kappas, o.kicks,
                                mode_from_name(o.mode), sweep_options(o));
  emit_sweep(res, o);
  return 0;
}

int cmd_phase_grid(const CommonOpts& o, int grid_theta, int grid_phi) {
  SweepResult res =
      phase_grid_sweep(o.kappa, uniform_theta_grid(grid_theta), uniform_phi_grid(grid_phi),
                       o.kicks, mode_from_name(o.mode), sweep_options(o));
  emit_sweep(res, o);
  return 0;
}

int cmd_oscs(const CommonOpts& o) {
  const std::vector<double> trace = oscs_trace(PhasePoint(o.theta, o.phi), o.kappa, o.kicks);
  SweepResult res;
  res.observable = "oscs";
  res.axis_names = {"kick"};
  res.axes.emplace_back();
  for (std::size_t k = 0; k < trace.size(); ++k)
    res.axes[0].push_back(static_cast<double>(k + 1));
  res.values = trace;
  res.metadata["kappa"] = fmt_sig(o.kappa, 17);
  res.metadata["theta"] = fmt_sig(o.theta, 17);
  res.metadata["phi"] = fmt_sig(o.phi, 17);
  res.metadata["n_kicks"] = std::to_string(o.kicks);
  res.metadata["mode"] = "exact";
  emit_sweep(res, o);
  return 0;
}

// --------------------------------------------------------------- tomo demo

int cmd_tomo_demo(const CommonOpts& o) {
  KickedTopParams params;
  params.kappa = o.kappa;
  params.p = o.p;
  const GateSequence seq = compile_qkt(params, o.kicks, GateLevel::Rotation);
  const Vec4 psi0 = scs_to_qubits(SpinQuantumNumber(2), PhasePoint(o.theta, o.phi));
  const Vec4 psi = run_circuit(seq, psi0);

  const fs::path dir = o.out;
  if (!fs::exists(dir)) {
    if (!o.mkdirs)
      throw std::runtime_error("output directory does not exist: " + dir.string() +
                               " (pass --mkdirs to create it)");
    fs::create_directories(dir);
  }

  constexpr std::array<PauliBasis, 3> bases{PauliBasis::X, PauliBasis::Y, PauliBasis::Z};
  std::vector<ShotRecord> records;
  int task = 0;
  for (auto b0 : bases)
    for (auto b1 : bases) {
      ShotRecord rec = measure_basis(psi, b0, b1, o.shots,
                                     derive_seed(o.seed, static_cast<std::uint64_t>(task++)));
      write_atomic(dir / ("record_" + rec.basis_label() + ".json"),
                   shot_record_to_json(rec) + "\n", o.mkdirs);
      records.push_back(rec);
    }

  const DensityMatrix rho = tomography(records);
  const DensityMatrix ideal = DensityMatrix::from_pure(psi);
  const double f = fidelity(rho, ideal);

  json jr;
  jr["kappa"] = o.kappa;
  jr["n_kicks"] = o.kicks;
  jr["theta"] = o.theta;
  jr["phi"] = o.phi;
  jr["shots_per_basis"] = o.shots;
  jr["seed"] = o.seed;
  jr["fidelity_to_ideal"] = f;
  json rows = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c)
      row.push_back({{"re", rho.matrix()(r, c).real()}, {"im", rho.matrix()(r, c).imag()}});
    rows.push_back(row);
  }
  jr["rho"] = rows;
  write_atomic(dir / "reconstruction.json", jr.dump(2) + "\n", o.mkdirs);
  std::cout << "fidelity_to_ideal " << fmt_sig(f, 17) << "\n";
  std::cout << "wrote " << (dir / "reconstruction.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qkt: quantum kicked top toolkit.\n"
      "Compiles exact N-kick Floquet unitaries into fixed-size two-qubit\n"
      "circuits, runs them on a statevector simulator with optional shot\n"
      "noise and tomography, and emits chaos diagnostics.\n"
      "All angles are radians; defaults: p = pi/2, 8192 shots per basis."};
  app.require_subcommand(1);

  CommonOpts co;
  int grid_theta = 17, grid_phi = 17;
  bool single_point = false;
  std::string level_name = "rotation";
  bool prune = false;
  std::string verify_existing;
  std::string report_path;
  double kmin = 0.0, kmax = 12.0, kstep = 0.5;

  auto* classical = app.add_subcommand(
      "classical-map", "Stroboscopic classical trajectories on a (theta, phi) grid");
  add_common(classical, co, true);
  classical->add_option("--grid-theta", grid_theta, "Grid points along theta over [0, pi]")
      ->capture_default_str();
  classical->add_option("--grid-phi", grid_phi, "Grid points along phi over [0, 2pi)")
      ->capture_default_str();
  classical->add_flag("--single-point", single_point,
                      "Trace only the point given by --theta/--phi");

  auto* compile = app.add_subcommand(
      "compile", "Compile U^N(kappa) to a gate netlist and verify the result");
  add_common(compile, co, false);
  compile->add_option("--level", level_name, "Gate set: rotation|ibmq")
      ->check(CLI::IsMember({"rotation", "ibmq"}))
      ->capture_default_str();
  compile->add_flag("--prune", prune, "Drop identity rotations (breaks the fixed 46-gate count)");
  compile->add_option("--verify", verify_existing,
                      "Verify an existing netlist against kappa/p/kicks instead of writing");
  compile->add_option("--report", report_path, "Write the JSON verification report here");

  auto* ksweep = app.add_subcommand(
      "kappa-sweep", "Time-averaged concurrence against kappa for one initial SCS");
  add_common(ksweep, co, true);
  ksweep->add_option("--kappa-min", kmin, "Sweep start")->capture_default_str();
  ksweep->add_option("--kappa-max", kmax, "Sweep end (inclusive)")->capture_default_str();
  ksweep->add_option("--kappa-step", kstep, "Sweep step")->capture_default_str();

  auto* pgrid = app.add_subcommand(
      "phase-grid", "Time-averaged concurrence on a (theta, phi) grid at fixed kappa");
  add_common(pgrid, co, true);
  pgrid->add_option("--grid-theta", grid_theta, "Grid points along theta over [0, pi]")
      ->capture_default_str();
  pgrid->add_option("--grid-phi", grid_phi, "Grid points along phi over [0, 2pi)")
      ->capture_default_str();

  auto* oscs_cmd = app.add_subcommand(
      "oscs", "O_SCS delocalization after each kick for one initial SCS");
  add_common(oscs_cmd, co, true);

  auto* tomo = app.add_subcommand(
      "tomo-demo", "Evolve, measure all 9 Pauli bases, reconstruct, report fidelity");
  add_common(tomo, co, true);

  CLI11_PARSE(app, argc, argv);

  CLI::App* active = app.get_subcommands().front();
  try {
    if (!co.config_path.empty()) apply_config(active, co.config_path);
    if (active == classical) return cmd_classical_map(co, grid_theta, grid_phi, single_point);
    if (active == compile) {
      if (verify_existing.empty() && co.out.empty()) {
        std::cerr << "error: compile requires --out (or --verify)\n";
        return 1;
      }
      return cmd_compile(co, level_name, prune, verify_existing, report_path);
    }
    if (active == ksweep) return cmd_kappa_sweep(co, kmin, kmax, kstep);
    if (active == pgrid) return cmd_phase_grid(co, grid_theta, grid_phi);
    if (active == oscs_cmd) return cmd_oscs(co);
    if (active == tomo) return cmd_tomo_demo(co);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: unknown subcommand\n";
  return 1;
}
