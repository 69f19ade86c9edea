#include "qkt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <cstdio>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qkt/floquet.hpp"
#include "qkt/rng.hpp"

namespace qkt {

namespace {

const Mat4& yy_matrix() {
  static const Mat4 yy = [] {
    Mat4 m = Mat4::Zero();
    m(0, 3) = -1.0;
    m(1, 2) = 1.0;
    m(2, 1) = 1.0;
    m(3, 0) = -1.0;
    return m;
  }();
  return yy;
}

std::string fmt_value(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// |<SCS(theta,phi)^(x)2 | psi>|
double scs_overlap(const Vec4& psi, double theta, double phi) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const complexd e = std::exp(-kI * phi);  // conjugated phase
  const complexd v = c * c * psi(0) + c * s * e * (psi(1) + psi(2)) +
                     s * s * e * e * psi(3);
  return std::abs(v);
}

struct KickCircuits {
  std::vector<GateSequence> circuits;  // index k holds the (k+1)-kick compile
};

KickCircuits compile_kick_range(double kappa, int n_kicks) {
  KickedTopParams params;
  params.kappa = kappa;
  KickCircuits out;
  out.circuits.reserve(static_cast<std::size_t>(n_kicks));
  const Mat4 u1 = floquet_2q(params);
  for (int n = 1; n <= n_kicks; ++n)
    out.circuits.push_back(compile_2q(Mat4(unitary_power(u1, n)), GateLevel::Rotation));
  return out;
}

constexpr std::array<PauliBasis, 3> kPauli{PauliBasis::X, PauliBasis::Y, PauliBasis::Z};

std::vector<double> trace_from_circuits(const KickCircuits& circ, const PhasePoint& point,
                                        EvolveMode mode, const SweepOptions& opts,
                                        std::uint64_t cell_index) {
  const Vec4 psi0 = scs_to_qubits(SpinQuantumNumber(2), point);
  std::vector<double> out;
  out.reserve(circ.circuits.size());
  const std::size_t n_kicks = circ.circuits.size();
  switch (mode) {
    case EvolveMode::Exact: {
      for (const auto& seq : circ.circuits) out.push_back(concurrence_pure(run_circuit(seq, psi0)));
      break;
    }
    case EvolveMode::Shots: {
      for (std::size_t k = 0; k < n_kicks; ++k) {
        const Vec4 psi = run_circuit(circ.circuits[k], psi0);
        std::vector<ShotRecord> records;
        records.reserve(9);
        int bi = 0;
        for (auto b0 : kPauli)
          for (auto b1 : kPauli) {
            const std::uint64_t task = (cell_index * n_kicks + k) * 9 + bi++;
            records.push_back(
                measure_basis(psi, b0, b1, opts.shots, derive_seed(opts.master_seed, task)));
          }
        out.push_back(concurrence(tomography(records)));
      }
      break;
    }
    case EvolveMode::Noisy: {
      const DensityMatrix rho0 = DensityMatrix::from_pure(psi0);
      const NoiseConfig noise(opts.noise_p1, opts.noise_p2, opts.master_seed);
      for (const auto& seq : circ.circuits)
        out.push_back(concurrence(run_noisy(seq, rho0, noise)));
      break;
    }
  }
  return out;
}

}  // namespace

double concurrence(const DensityMatrix& rho) {
  const Mat4& yy = yy_matrix();
  const Mat4 rho_tilde = yy * rho.matrix().conjugate() * yy;
  const Mat4 m = rho.matrix() * rho_tilde;
  Eigen::ComplexEigenSolver<Mat4> es(m, /*computeEigenvectors=*/false);
  std::array<double, 4> lam{};
  for (int k = 0; k < 4; ++k) {
    double v = es.eigenvalues()(k).real();
    if (v < 0.0) {
      if (v <= -1e-10)
        throw std::runtime_error("concurrence: eigenvalue of rho*rho~ below -1e-10");
      v = 0.0;
    }
    lam[static_cast<std::size_t>(k)] = v;
  }
  std::sort(lam.begin(), lam.end(), std::greater<>());
  const double c = std::sqrt(lam[0]) - std::sqrt(lam[1]) - std::sqrt(lam[2]) - std::sqrt(lam[3]);
  return std::max(0.0, std::min(1.0, c));
}

double concurrence_pure(const Vec4& psi) {
  const complexd v = psi.transpose() * yy_matrix() * psi;
  return std::min(1.0, std::abs(v));
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(sigma.matrix());
  const Eigen::Vector4d lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Mat4 sqrt_sigma = es.eigenvectors() *
                          lam.asDiagonal().toDenseMatrix().cast<complexd>() *
                          es.eigenvectors().adjoint();
  Mat4 m = sqrt_sigma * rho.matrix() * sqrt_sigma;
  m = 0.5 * (m + Mat4(m.adjoint()));
  Eigen::SelfAdjointEigenSolver<Mat4> es2(m);
  // eigenvalues that vanish analytically come out at +-eps*|lambda_max|; a
  // relative floor keeps their square roots from polluting the trace
  const double floor = 1e-14 * std::max(0.0, es2.eigenvalues().maxCoeff());
  double tr = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double lam = es2.eigenvalues()(k);
    if (lam > floor) tr += std::sqrt(lam);
  }
  return std::min(1.0, tr * tr);
}

double oscs(const Vec4& state, const OscsOptions& opts) {
  const complexd singlet = (state(1) - state(2)) / std::sqrt(2.0);
  if (std::abs(singlet) > 1e-6)
    throw SymmetryViolation("oscs: state has singlet weight " +
                            std::to_string(std::abs(singlet)));

  double best = -1.0, best_th = 0.0, best_ph = 0.0;
  for (int i = 0; i < opts.coarse_theta; ++i) {
    const double th = kPi * i / (opts.coarse_theta - 1);
    for (int k = 0; k < opts.coarse_phi; ++k) {
      const double ph = kTwoPi * k / opts.coarse_phi;
      const double v = scs_overlap(state, th, ph);
      if (v > best) {
        best = v;
        best_th = th;
        best_ph = ph;
      }
    }
  }
  double dt = kPi / (opts.coarse_theta - 1);
  double dp = kTwoPi / opts.coarse_phi;
  while (dt > opts.resolution || dp > opts.resolution) {
    double th0 = best_th, ph0 = best_ph;
    for (int i = -4; i <= 4; ++i)
      for (int k = -4; k <= 4; ++k) {
        const double th = std::clamp(th0 + i * dt / 4.0, 0.0, kPi);
        const double ph = ph0 + k * dp / 4.0;
        const double v = scs_overlap(state, th, ph);
        if (v > best) {
          best = v;
          best_th = th;
          best_ph = ph;
        }
      }
    dt /= 4.0;
    dp /= 4.0;
  }
  return std::min(1.0, best);
}

double time_average(const std::vector<double>& series) {
  if (series.empty()) throw std::invalid_argument("time_average: empty series");
  double sum = 0.0;
  for (double v : series) sum += v;
  return sum / static_cast<double>(series.size());
}

const char* mode_name(EvolveMode m) {
  switch (m) {
    case EvolveMode::Exact: return "exact";
    case EvolveMode::Shots: return "shots";
    case EvolveMode::Noisy: return "noisy";
  }
  throw std::logic_error("mode_name");
}

EvolveMode mode_from_name(const std::string& name) {
  if (name == "exact") return EvolveMode::Exact;
  if (name == "shots") return EvolveMode::Shots;
  if (name == "noisy") return EvolveMode::Noisy;
  throw std::invalid_argument("unknown mode: " + name);
}

std::size_t SweepResult::expected_size() const {
  std::size_t n = 1;
  for (const auto& ax : axes) n *= ax.size();
  return n;
}

std::string SweepResult::to_csv() const {
  // long format: axis columns, then any of kappa/n_kicks/mode carried as
  // constant metadata, then the value
  std::vector<std::string> const_cols;
  for (const char* key : {"kappa", "n_kicks", "mode"}) {
    if (metadata.count(key) &&
        std::find(axis_names.begin(), axis_names.end(), key) == axis_names.end())
      const_cols.push_back(key);
  }
  std::ostringstream out;
  for (const auto& name : axis_names) out << name << ",";
  for (const auto& name : const_cols) out << name << ",";
  out << "value\n";
  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    std::size_t rem = flat;
    for (std::size_t d = axes.size(); d-- > 0;) {
      idx[d] = rem % axes[d].size();
      rem /= axes[d].size();
    }
    for (std::size_t d = 0; d < axes.size(); ++d) out << fmt_value(axes[d][idx[d]]) << ",";
    for (const auto& name : const_cols) out << metadata.at(name) << ",";
    out << fmt_value(values[flat]) << "\n";
  }
  return out.str();
}

std::string SweepResult::to_json() const {
  nlohmann::json j;
  j["observable"] = observable;
  nlohmann::json ax = nlohmann::json::object();
  for (std::size_t d = 0; d < axes.size(); ++d) ax[axis_names[d]] = axes[d];
  j["axes"] = ax;
  j["axis_order"] = axis_names;
  j["values"] = values;
  j["metadata"] = metadata;
  return j.dump(2);
}

std::vector<double> concurrence_trace(const PhasePoint& point, double kappa, int n_kicks,
                                      EvolveMode mode, const SweepOptions& opts,
                                      std::uint64_t cell_index) {
  if (n_kicks < 1) throw std::invalid_argument("concurrence_trace: n_kicks must be >= 1");
  return trace_from_circuits(compile_kick_range(kappa, n_kicks), point, mode, opts,
                             cell_index);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs)
                              : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

SweepResult kappa_sweep(const PhasePoint& point, const std::vector<double>& kappas,
                        int n_kicks, EvolveMode mode, const SweepOptions& opts) {
  if (n_kicks < 1) throw std::invalid_argument("kappa_sweep: n_kicks must be >= 1");
  SweepResult res;
  res.observable = "time_avg_concurrence";
  res.axis_names = {"kappa"};
  res.axes = {kappas};
  res.values.assign(kappas.size(), 0.0);
  res.metadata["theta"] = fmt_value(point.theta);
  res.metadata["phi"] = fmt_value(point.phi);
  res.metadata["n_kicks"] = std::to_string(n_kicks);
  res.metadata["mode"] = mode_name(mode);
  res.metadata["seed"] = std::to_string(opts.master_seed);
  if (mode == EvolveMode::Shots) res.metadata["shots"] = std::to_string(opts.shots);
  if (mode == EvolveMode::Noisy) {
    res.metadata["p1"] = fmt_value(opts.noise_p1);
    res.metadata["p2"] = fmt_value(opts.noise_p2);
  }
  parallel_for(kappas.size(), opts.jobs, [&](std::size_t i) {
    res.values[i] =
        time_average(concurrence_trace(point, kappas[i], n_kicks, mode, opts, i));
  });
  return res;
}

SweepResult phase_grid_sweep(double kappa, const std::vector<double>& thetas,
                             const std::vector<double>& phis, int n_kicks, EvolveMode mode,
                             const SweepOptions& opts) {
  if (n_kicks < 1) throw std::invalid_argument("phase_grid_sweep: n_kicks must be >= 1");
  SweepResult res;
  res.observable = "time_avg_concurrence";
  res.axis_names = {"theta", "phi"};
  res.axes = {thetas, phis};
  res.values.assign(thetas.size() * phis.size(), 0.0);
  res.metadata["kappa"] = fmt_value(kappa);
  res.metadata["n_kicks"] = std::to_string(n_kicks);
  res.metadata["mode"] = mode_name(mode);
  res.metadata["seed"] = std::to_string(opts.master_seed);
  if (mode == EvolveMode::Shots) res.metadata["shots"] = std::to_string(opts.shots);
  if (mode == EvolveMode::Noisy) {
    res.metadata["p1"] = fmt_value(opts.noise_p1);
    res.metadata["p2"] = fmt_value(opts.noise_p2);
  }

  // the per-kick circuits depend only on kappa; share them across all cells
  const KickCircuits circ = compile_kick_range(kappa, n_kicks);
  parallel_for(res.values.size(), opts.jobs, [&](std::size_t cell) {
    const std::size_t i = cell / phis.size();
    const std::size_t k = cell % phis.size();
    const PhasePoint p(thetas[i], phis[k]);
    res.values[cell] = time_average(trace_from_circuits(circ, p, mode, opts, cell));
  });
  return res;
}

std::vector<double> oscs_trace(const PhasePoint& point, double kappa, int n_kicks) {
  if (n_kicks < 0) throw std::invalid_argument("oscs_trace: n_kicks must be >= 0");
  const KickCircuits circ = compile_kick_range(kappa, n_kicks);
  const Vec4 psi0 = scs_to_qubits(SpinQuantumNumber(2), point);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_kicks));
  for (const auto& seq : circ.circuits) out.push_back(oscs(run_circuit(seq, psi0)));
  return out;
}

std::vector<double> uniform_theta_grid(int n) {
  if (n < 1) throw std::invalid_argument("uniform_theta_grid: n must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = 0.0;
    return out;
  }
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = kPi * i / (n - 1);
  return out;
}

std::vector<double> uniform_phi_grid(int n) {
  if (n < 1) throw std::invalid_argument("uniform_phi_grid: n must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = kTwoPi * i / n;
  return out;
}

}  // namespace qkt
