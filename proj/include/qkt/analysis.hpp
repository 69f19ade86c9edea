#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qkt/sim.hpp"
#include "qkt/spin.hpp"

namespace qkt {

struct SymmetryViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Wootters concurrence of a two-qubit density matrix:
/// rho~ = (Y(x)Y) rho* (Y(x)Y), lambda_i = eigenvalues of rho rho~ descending,
/// C = max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)).
/// Eigenvalues in (-1e-10, 0) are clipped to 0; anything more negative signals
/// upstream corruption and raises.
double concurrence(const DensityMatrix& rho);

/// Pure-state shortcut |psi^T (Y(x)Y) psi|; agrees with the density route.
double concurrence_pure(const Vec4& psi);

/// Uhlmann fidelity (tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

struct OscsOptions {
  int coarse_theta = 181;
  int coarse_phi = 360;
  double resolution = 1e-6;  // angular resolution of the refinement
};

/// Max overlap with the product-SCS family, by coarse grid scan plus local
/// refinement. The state must live in the symmetric subspace: a singlet
/// component above 1e-6 raises SymmetryViolation.
double oscs(const Vec4& state, const OscsOptions& opts = {});

/// Arithmetic mean; rejects an empty series.
double time_average(const std::vector<double>& series);

enum class EvolveMode { Exact, Shots, Noisy };

const char* mode_name(EvolveMode m);
EvolveMode mode_from_name(const std::string& name);

struct SweepOptions {
  std::uint64_t shots = 8192;
  double noise_p1 = 0.0;
  double noise_p2 = 0.0;
  std::uint64_t master_seed = 0;
  int jobs = 0;  // 0 = hardware concurrency
};

/// Tabular sweep output: axes plus a row-major value matrix plus metadata.
struct SweepResult {
  std::string observable;
  std::vector<std::string> axis_names;
  std::vector<std::vector<double>> axes;
  std::vector<double> values;
  std::map<std::string, std::string> metadata;

  std::size_t expected_size() const;
  std::string to_csv() const;
  std::string to_json() const;
};

/// Concurrence after each kick 1..n_kicks, evolving through the compiled
/// fixed-size circuit for every kick count (the hybrid scheme: one circuit per
/// N, depth independent of N).
std::vector<double> concurrence_trace(const PhasePoint& point, double kappa, int n_kicks,
                                      EvolveMode mode, const SweepOptions& opts,
                                      std::uint64_t cell_index = 0);

/// Time-averaged concurrence per kappa (kicks 1..n_kicks).
SweepResult kappa_sweep(const PhasePoint& point, const std::vector<double>& kappas,
                        int n_kicks, EvolveMode mode, const SweepOptions& opts = {});

/// Time-averaged concurrence on a (theta, phi) grid at fixed kappa.
/// Values are row-major, theta outer, phi inner.
SweepResult phase_grid_sweep(double kappa, const std::vector<double>& thetas,
                             const std::vector<double>& phis, int n_kicks, EvolveMode mode,
                             const SweepOptions& opts = {});

/// O_SCS after each kick 1..n_kicks along the exact circuit evolution.
std::vector<double> oscs_trace(const PhasePoint& point, double kappa, int n_kicks);

/// Uniform grids used by sweeps: thetas over [0, pi] inclusive, phis over
/// [0, 2pi) half-open.
std::vector<double> uniform_theta_grid(int n);
std::vector<double> uniform_phi_grid(int n);

/// Chunked deterministic parallel map: calls fn(i) for i in [0, n) on up to
/// `jobs` threads; results land by index, so output order never depends on
/// scheduling.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace qkt
