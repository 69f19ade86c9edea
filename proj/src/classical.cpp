#include "qkt/classical.hpp"

#include <algorithm>
#include <cmath>

namespace qkt {

double ClassicalState::norm() const { return std::sqrt(x * x + y * y + z * z); }

void ClassicalState::renormalize() {
  const double n = norm();
  if (n <= 0.0) throw std::invalid_argument("ClassicalState: zero vector");
  x /= n;
  y /= n;
  z /= n;
}

ClassicalState classical_step(const ClassicalState& s, double kappa) {
  const double c = std::cos(kappa * s.x);
  const double sn = std::sin(kappa * s.x);
  ClassicalState out;
  out.x = s.z * c + s.y * sn;
  out.y = s.y * c - s.z * sn;
  out.z = -s.x;
  out.renormalize();
  return out;
}

std::vector<ClassicalState> classical_trajectory(const ClassicalState& s0, double kappa,
                                                 int n_kicks) {
  if (n_kicks < 0) throw std::invalid_argument("classical_trajectory: n_kicks must be >= 0");
  std::vector<ClassicalState> traj;
  traj.reserve(static_cast<std::size_t>(n_kicks) + 1);
  traj.push_back(s0);
  for (int k = 0; k < n_kicks; ++k) traj.push_back(classical_step(traj.back(), kappa));
  return traj;
}

PhasePoint sphere_to_angles(const ClassicalState& s) {
  const double z = std::clamp(s.z, -1.0, 1.0);
  const double theta = std::acos(z);
  double phi = 0.0;
  if (s.x != 0.0 || s.y != 0.0) {
    phi = std::atan2(s.y, s.x);
    if (phi < 0.0) phi += kTwoPi;
  }
  return PhasePoint(theta, phi);
}

ClassicalState angles_to_sphere(const PhasePoint& p) {
  ClassicalState s;
  s.x = std::sin(p.theta) * std::cos(p.phi);
  s.y = std::sin(p.theta) * std::sin(p.phi);
  s.z = std::cos(p.theta);
  s.renormalize();
  return s;
}

namespace {

// Residual F(s) - s in R^3 for the polish step.
Eigen::Vector3d residual(const Eigen::Vector3d& v, double kappa) {
  ClassicalState s{v(0), v(1), v(2)};
  const ClassicalState f = classical_step(s, kappa);
  return Eigen::Vector3d(f.x - s.x, f.y - s.y, f.z - s.z);
}

bool polish(Eigen::Vector3d& v, double kappa) {
  for (int it = 0; it < 80; ++it) {
    const Eigen::Vector3d r = residual(v, kappa);
    if (r.norm() < 1e-14) return true;
    Eigen::Matrix3d jac;
    const double h = 1e-7;
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector3d d = v;
      d(i) += h;
      d.normalize();
      jac.col(i) = (residual(d, kappa) - r) / h;
    }
    // the Jacobian is rank-deficient along the radial direction (killed by
    // the renormalization); take the truncated-SVD minimum-norm step
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector3d sv = svd.singularValues();
    const Eigen::Vector3d y = svd.matrixU().transpose() * (-r);
    Eigen::Vector3d step = Eigen::Vector3d::Zero();
    for (int i = 0; i < 3; ++i)
      if (sv(i) > 1e-4 * sv(0)) step += svd.matrixV().col(i) * y(i) / sv(i);
    if (!step.allFinite() || step.norm() > 0.5) return false;
    v += step;
    v.normalize();
  }
  return residual(v, kappa).norm() < 1e-12;
}

}  // namespace

std::vector<ClassicalState> find_fixed_points(double kappa, int theta_samples,
                                              int phi_samples) {
  std::vector<Eigen::Vector3d> found;
  for (int i = 0; i <= theta_samples; ++i) {
    const double th = kPi * i / theta_samples;
    for (int k = 0; k < phi_samples; ++k) {
      const double ph = kTwoPi * k / phi_samples;
      Eigen::Vector3d v(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                        std::cos(th));
      if (residual(v, kappa).norm() > 0.2) continue;
      if (!polish(v, kappa)) continue;
      // snap components that vanished to machine zero so that unstable fixed
      // points (exact in float arithmetic, e.g. (0, +-1, 0)) stay put under
      // iteration instead of amplifying polish dirt
      for (int c = 0; c < 3; ++c)
        if (std::abs(v(c)) < 1e-12) v(c) = 0.0;
      v.normalize();
      if (residual(v, kappa).norm() > 1e-12) continue;
      bool dup = false;
      for (const auto& f : found)
        if ((f - v).norm() < 1e-6) dup = true;
      if (!dup) found.push_back(v);
    }
  }
  std::vector<ClassicalState> out;
  out.reserve(found.size());
  for (const auto& f : found) out.emplace_back(f(0), f(1), f(2));
  return out;
}

}  // namespace qkt
