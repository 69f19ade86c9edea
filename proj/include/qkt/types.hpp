#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qkt {

using complexd = std::complex<double>;

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using Vec2 = Eigen::Vector2cd;
using Vec4 = Eigen::Vector4cd;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Isometry43 = Eigen::Matrix<complexd, 4, 3>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr complexd kI{0.0, 1.0};

/// Largest absolute entry of A - B.
template <typename DerivedA, typename DerivedB>
double max_abs_diff(const Eigen::MatrixBase<DerivedA>& a,
                    const Eigen::MatrixBase<DerivedB>& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Deviation of U from unitarity, max |(U^† U - I)_ij|.
template <typename Derived>
double unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
  Mat g = u.adjoint() * u;
  g -= Mat::Identity(g.rows(), g.cols());
  return g.cwiseAbs().maxCoeff();
}

/// max |c * a - b| over entries, with c the unit-modulus scalar aligning the
/// largest entry of a to b. Both matrices must have the same shape.
template <typename DerivedA, typename DerivedB>
double phase_aligned_diff(const Eigen::MatrixBase<DerivedA>& a,
                          const Eigen::MatrixBase<DerivedB>& b) {
  Eigen::Index r = 0, c = 0;
  a.cwiseAbs().maxCoeff(&r, &c);
  complexd pivot = a(r, c);
  if (std::abs(pivot) < 1e-300) return (a - b).cwiseAbs().maxCoeff();
  complexd phase = b(r, c) / pivot;
  double m = std::abs(phase);
  phase = (m < 1e-300) ? complexd(1.0, 0.0) : phase / m;
  return (a * phase - b).cwiseAbs().maxCoeff();
}

}  // namespace qkt
