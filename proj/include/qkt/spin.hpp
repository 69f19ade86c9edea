#pragma once

#include <stdexcept>

#include "qkt/types.hpp"

namespace qkt {

/// Spin quantum number stored as 2j so that half-integers are exact.
struct SpinQuantumNumber {
  int twoj = 2;

  SpinQuantumNumber() = default;
  explicit SpinQuantumNumber(int two_j) : twoj(two_j) {
    if (twoj < 1) throw std::invalid_argument("SpinQuantumNumber: 2j must be a positive integer");
  }
  static SpinQuantumNumber from_twoj(int two_j) { return SpinQuantumNumber(two_j); }

  double j() const { return 0.5 * twoj; }
  int dim() const { return twoj + 1; }
  bool operator==(const SpinQuantumNumber&) const = default;
};

/// Point (theta, phi) on the sphere, theta in [0, pi], phi normalized to [0, 2pi).
struct PhasePoint {
  double theta = 0.0;
  double phi = 0.0;

  PhasePoint() = default;
  PhasePoint(double theta_, double phi_);
};

/// Jx, Jy, Jz in the |j, m> basis, m = j, j-1, ..., -j (index 0 <-> m = j).
struct AngularMomentumOps {
  Mat jx, jy, jz;
};

AngularMomentumOps build_ops(SpinQuantumNumber j);

/// Spin coherent state exp[i theta (Jx sin phi - Jy cos phi)] |j, j>.
/// Computed by eigendecomposition of the Hermitian generator.
Vec scs(SpinQuantumNumber j, const PhasePoint& point);

/// Single-qubit SCS: (cos(theta/2), e^{i phi} sin(theta/2)), convention |j,j> = |0>.
Vec2 scs_qubit(const PhasePoint& point);

/// Two-qubit product SCS |theta,phi> (x) |theta,phi>. Only j = 1 is in scope.
Vec4 scs_to_qubits(SpinQuantumNumber j, const PhasePoint& point);

/// Isometry from the spin-1 Dicke basis {|1,1>, |1,0>, |1,-1>} into the
/// two-qubit symmetric subspace {|00>, (|01>+|10>)/sqrt2, |11>}.
const Isometry43& dicke_isometry();

/// Embed a spin-1 state into the two-qubit symmetric subspace.
Vec4 symmetric_embed(const Vec& spin_state);

/// Project a two-qubit state back onto the spin-1 Dicke basis (adjoint of
/// symmetric_embed; exact inverse on symmetric states).
Vec symmetric_restrict(const Vec4& qubit_state);

}  // namespace qkt
