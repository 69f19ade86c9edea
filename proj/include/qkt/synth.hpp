#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkt/classical.hpp"
#include "qkt/types.hpp"

namespace qkt {

struct DecompositionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// ZYZ Euler angles: w = e^{i delta} Rz(alpha) Ry(theta) Rz(beta),
/// theta in [0, pi], delta in (-pi, pi]. beta = 0 in the degenerate branch.
struct EulerZYZ {
  double alpha = 0.0;
  double beta = 0.0;
  double theta = 0.0;
  double delta = 0.0;
};

EulerZYZ zyz_decompose(const Mat2& w);

enum class GateKind { CNOT, X, RZ, RY, U1, U3 };

struct Gate {
  GateKind kind;
  int q0 = 0;   // target qubit; control for CNOT
  int q1 = 0;   // CNOT target
  double p0 = 0.0, p1 = 0.0, p2 = 0.0;

  static Gate cnot(int control, int target);
  static Gate x(int qubit);
  static Gate rz(int qubit, double angle);
  static Gate ry(int qubit, double angle);
  static Gate u1(int qubit, double lambda);
  static Gate u3(int qubit, double theta, double phi, double lambda);
};

enum class GateLevel { Template, Rotation, Ibmq };

struct GateSequence {
  std::vector<Gate> gates;
  GateLevel level = GateLevel::Rotation;

  int cnot_count() const;
  int single_qubit_count() const;
};

/// Rotation angles are 4pi-periodic as SU(2) elements; canonicalize into
/// (-2pi, 2pi] so emitted netlists are stable.
double canonical_angle(double a);

/// The six-block two-qubit template. Circuit order (first applied to last):
/// controlled-V6 (control q0), controlled-V5 (control q1), controlled-V4
/// (control q0), V3 on q0, controlled-V2 (control q0), V1 on q1. As a matrix
/// product U = (I(x)V1) C0(V2) (V3(x)I) C0(V4) C1(V5) C0(V6).
struct TemplateBlocks {
  Mat2 v1, v2, v3, v4, v5, v6;
};

Mat4 controlled_gate(const Mat2& v, int control, int target);
Mat4 template_matrix(const TemplateBlocks& b);

/// Factor an arbitrary 4x4 unitary into the six-block template. Throws
/// DecompositionFailure if the reconstruction error exceeds 1e-8.
TemplateBlocks template_decompose(const Mat4& u);

/// Eq.-16-style lowering of a controlled 2x2 unitary to 2 CNOTs, 5 rotations
/// on the target and one Rz(delta) on the control (8 gates). The sequence
/// matrix equals |0><0| (x) I + |1><1| (x) v up to global phase.
GateSequence lower_controlled(const Mat2& v, int control, int target);

/// Single-qubit pattern with the CNOTs replaced by X gates (7 gates on the
/// target); realizes v up to global phase.
GateSequence lower_uncontrolled(const Mat2& v, int target);

/// Full compile. Rotation level: exactly 46 gates (8 CNOT + 38 single-qubit).
/// Ibmq level: exactly 8 CNOTs with single-qubit gates from {U1, U3} only.
/// The sequence matrix equals u up to global phase within 1e-9.
GateSequence compile_2q(const Mat4& u, GateLevel level);

/// compile_2q of the N-kick effective unitary floquet_2q(params)^N.
GateSequence compile_qkt(const KickedTopParams& params, long long n_kicks, GateLevel level);

/// Drop gates that canonicalize to the identity (angle 0 rotations). Not used
/// by the fixed-count contract paths.
GateSequence prune_identity_gates(const GateSequence& seq, double eps = 1e-12);

Mat4 gate_matrix(const Gate& g);
Mat4 sequence_matrix(const GateSequence& seq);

/// Netlist text, one gate per line; angles with 17 significant digits.
/// The header records the source parameters as '#' comments.
std::string to_netlist(const GateSequence& seq,
                       const std::map<std::string, std::string>& header = {});
GateSequence parse_netlist(std::istream& in);
GateSequence parse_netlist(const std::string& text);

}  // namespace qkt
