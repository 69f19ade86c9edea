#include "qkt/floquet.hpp"

#include <cmath>

#include "qkt/spin.hpp"

namespace qkt {

Mat floquet_spin(const KickedTopParams& params) {
  const int d = params.j.dim();
  const double j = params.j.j();
  const AngularMomentumOps ops = build_ops(params.j);

  Vec torsion(d);
  for (int k = 0; k < d; ++k) {
    const double m = j - k;
    torsion(k) = std::exp(-kI * params.kappa * m * m / (2.0 * j));
  }

  Eigen::SelfAdjointEigenSolver<Mat> es(ops.jy);
  Vec rot(d);
  for (int k = 0; k < d; ++k) rot(k) = std::exp(-kI * params.p * es.eigenvalues()(k));
  Mat rotation = es.eigenvectors() * rot.asDiagonal() * es.eigenvectors().adjoint();

  return torsion.asDiagonal() * rotation;
}

Mat4 floquet_2q(const KickedTopParams& params) {
  if (params.j.twoj != 2)
    throw std::invalid_argument("floquet_2q: requires j = 1");
  // (I + Z(x)Z) is diagonal with entries (2, 0, 0, 2).
  Vec4 torsion;
  torsion << std::exp(-kI * params.kappa / 2.0), 1.0, 1.0, std::exp(-kI * params.kappa / 2.0);
  // exp(-i (p/2)(Y(x)I + I(x)Y)) = Ry(p) (x) Ry(p); the generators commute.
  const double c = std::cos(0.5 * params.p);
  const double s = std::sin(0.5 * params.p);
  Mat2 ry;
  ry << c, -s, s, c;
  Mat4 rot;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      rot.block<2, 2>(2 * a, 2 * b) = ry(a, b) * ry;
  return torsion.asDiagonal() * rot;
}

Mat unitary_power(const Mat& u, long long n) {
  if (n < 0) throw std::invalid_argument("unitary_power: n must be >= 0");
  const auto d = u.rows();
  if (n == 0) return Mat::Identity(d, d);
  if (n == 1) return u;

  // For a unitary (normal) matrix the Schur form is diagonal and the Schur
  // vectors are orthonormal, so Q D^n Q^† stays unitary for any n.
  Eigen::ComplexSchur<Mat> schur(u);
  const Mat& q = schur.matrixU();
  Vec powered(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    complexd lam = schur.matrixT()(k, k);
    lam /= std::abs(lam);  // eigenvalues of a unitary lie on the unit circle
    const double ang = std::arg(lam);
    powered(k) = std::exp(kI * std::fmod(static_cast<double>(n) * ang, kTwoPi));
  }
  return q * powered.asDiagonal() * q.adjoint();
}

}  // namespace qkt
