#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkt/synth.hpp"
#include "qkt/types.hpp"

namespace qkt {

struct MissingBasis : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// 4x4 density operator; Hermitian within 1e-10, unit trace within 1e-10,
/// eigenvalues >= -1e-9. Violations are rejected at construction.
class DensityMatrix {
 public:
  static DensityMatrix from_pure(const Vec4& psi);
  static DensityMatrix from_matrix(const Mat4& rho);

  const Mat4& matrix() const { return rho_; }

 private:
  explicit DensityMatrix(Mat4 rho) : rho_(std::move(rho)) {}
  Mat4 rho_;
};

struct NoiseConfig {
  double p1 = 0.0;       // depolarizing probability per single-qubit gate
  double p2 = 0.0;       // per CNOT (full two-qubit depolarization to I/4)
  std::uint64_t seed = 0;

  NoiseConfig() = default;
  NoiseConfig(double p1_, double p2_, std::uint64_t seed_ = 0);
};

/// Apply the gate sequence to a pure state by direct amplitude updates.
/// The whole sequence is validated before any gate is applied.
Vec4 run_circuit(const GateSequence& seq, const Vec4& input);

/// Density-matrix evolution with a depolarizing channel after each gate:
/// single-qubit depolarization (probability p1) on the qubit a 1q gate acted
/// on, full two-qubit depolarization to I/4 (probability p2) after each CNOT.
DensityMatrix run_noisy(const GateSequence& seq, const DensityMatrix& input,
                        const NoiseConfig& noise);

enum class PauliBasis { X, Y, Z };

char basis_char(PauliBasis b);
PauliBasis basis_from_char(char c);

struct ShotRecord {
  PauliBasis b0 = PauliBasis::Z;  // qubit 0 measurement basis
  PauliBasis b1 = PauliBasis::Z;  // qubit 1
  std::array<std::uint64_t, 4> counts{};  // outcomes 00, 01, 10, 11
  std::uint64_t shots = 0;

  std::string basis_label() const;
};

/// Measure in a Pauli product basis: rotate each qubit (Z: identity,
/// X: Hadamard, Y: S-dagger then Hadamard), then sample the Born distribution
/// with the seeded generator.
ShotRecord measure_basis(const Vec4& state, PauliBasis b0, PauliBasis b1,
                         std::uint64_t shots, std::uint64_t seed);
ShotRecord measure_basis(const DensityMatrix& state, PauliBasis b0, PauliBasis b1,
                         std::uint64_t shots, std::uint64_t seed);

/// Linear-inversion tomography from records covering all 9 Pauli-pair bases,
/// identity components taken from marginals (averaged over matching records),
/// followed by projection to the physical set (clip negative eigenvalues,
/// renormalize the trace).
DensityMatrix tomography(const std::vector<ShotRecord>& records);

std::string shot_record_to_json(const ShotRecord& rec);
ShotRecord shot_record_from_json(const std::string& text);

}  // namespace qkt
