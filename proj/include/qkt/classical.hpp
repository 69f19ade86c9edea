#pragma once

#include <vector>

#include "qkt/spin.hpp"
#include "qkt/types.hpp"

namespace qkt {

/// Unit vector (X, Y, Z) = (Jx, Jy, Jz)/j on the classical sphere.
struct ClassicalState {
  double x = 0.0, y = 0.0, z = 1.0;

  ClassicalState() = default;
  ClassicalState(double x_, double y_, double z_) : x(x_), y(y_), z(z_) { renormalize(); }

  double norm() const;
  void renormalize();
};

struct KickedTopParams {
  double kappa = 0.0;
  double p = kPi / 2.0;
  SpinQuantumNumber j{2};
  double tau = 1.0;  // kick period; bookkeeping only
};

/// One application of the classical kicked-top map at p = pi/2:
///   X' = Z cos(kX) + Y sin(kX),  Y' = Y cos(kX) - Z sin(kX),  Z' = -X,
/// renormalized to the sphere after the step.
ClassicalState classical_step(const ClassicalState& s, double kappa);

/// Stroboscopic trajectory of length n_kicks + 1 including the initial point.
std::vector<ClassicalState> classical_trajectory(const ClassicalState& s0, double kappa,
                                                 int n_kicks);

/// (X,Y,Z) = (sin t cos p, sin t sin p, cos t). At the poles phi = 0 by convention.
PhasePoint sphere_to_angles(const ClassicalState& s);
ClassicalState angles_to_sphere(const PhasePoint& p);

/// All fixed points of the map found by a deterministic sphere scan followed by
/// Gauss-Newton polishing; used to locate the regular islands of the mixed
/// phase space. Residual |F(s) - s| < 1e-12 on every returned point.
std::vector<ClassicalState> find_fixed_points(double kappa, int theta_samples = 181,
                                              int phi_samples = 360);

}  // namespace qkt
