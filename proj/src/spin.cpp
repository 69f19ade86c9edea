#include "qkt/spin.hpp"

#include <cmath>

namespace qkt {

PhasePoint::PhasePoint(double theta_, double phi_) : theta(theta_), phi(phi_) {
  if (theta < 0.0 && theta > -1e-9) theta = 0.0;
  if (theta > kPi && theta < kPi + 1e-9) theta = kPi;
  if (theta < 0.0 || theta > kPi)
    throw std::invalid_argument("PhasePoint: theta must lie in [0, pi]");
  phi = std::fmod(phi, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
  if (phi >= kTwoPi) phi = 0.0;
}

AngularMomentumOps build_ops(SpinQuantumNumber jq) {
  const int d = jq.dim();
  const double j = jq.j();
  AngularMomentumOps ops;
  ops.jx = Mat::Zero(d, d);
  ops.jy = Mat::Zero(d, d);
  ops.jz = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) ops.jz(k, k) = j - k;
  // J+ |j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>; index k holds m = j - k.
  for (int k = 1; k < d; ++k) {
    const double m = j - k;
    const double c = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    ops.jx(k - 1, k) += 0.5 * c;
    ops.jx(k, k - 1) += 0.5 * c;
    ops.jy(k - 1, k) += complexd(0.0, -0.5) * c;
    ops.jy(k, k - 1) += complexd(0.0, 0.5) * c;
  }
  return ops;
}

Vec scs(SpinQuantumNumber jq, const PhasePoint& point) {
  const AngularMomentumOps ops = build_ops(jq);
  // Hermitian generator G = theta (Jx sin phi - Jy cos phi); state = exp(iG)|j,j>.
  Mat gen = point.theta * (std::sin(point.phi) * ops.jx - std::cos(point.phi) * ops.jy);
  Eigen::SelfAdjointEigenSolver<Mat> es(gen);
  Vec phases(jq.dim());
  for (int k = 0; k < jq.dim(); ++k)
    phases(k) = std::exp(kI * es.eigenvalues()(k));
  Vec e0 = Vec::Zero(jq.dim());
  e0(0) = 1.0;
  Vec out = es.eigenvectors() * phases.asDiagonal() * (es.eigenvectors().adjoint() * e0);
  out /= out.norm();
  return out;
}

Vec2 scs_qubit(const PhasePoint& point) {
  Vec2 v;
  v(0) = std::cos(0.5 * point.theta);
  v(1) = std::exp(kI * point.phi) * std::sin(0.5 * point.theta);
  return v;
}

Vec4 scs_to_qubits(SpinQuantumNumber j, const PhasePoint& point) {
  if (j.twoj != 2)
    throw std::invalid_argument("scs_to_qubits: only j = 1 (two qubits) is supported");
  const Vec2 q = scs_qubit(point);
  Vec4 out;
  out << q(0) * q(0), q(0) * q(1), q(1) * q(0), q(1) * q(1);
  return out;
}

const Isometry43& dicke_isometry() {
  static const Isometry43 e = [] {
    Isometry43 m = Isometry43::Zero();
    const double s = 1.0 / std::sqrt(2.0);
    m(0, 0) = 1.0;
    m(1, 1) = s;
    m(2, 1) = s;
    m(3, 2) = 1.0;
    return m;
  }();
  return e;
}

Vec4 symmetric_embed(const Vec& spin_state) {
  if (spin_state.size() != 3)
    throw std::invalid_argument("symmetric_embed: expected a spin-1 state (dimension 3)");
  return dicke_isometry() * spin_state;
}

Vec symmetric_restrict(const Vec4& qubit_state) {
  return dicke_isometry().adjoint() * qubit_state;
}

}  // namespace qkt
