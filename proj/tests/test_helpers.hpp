#pragma once

#include <random>

#include "qkt/types.hpp"

namespace qkt::testing {

/// Haar-like random unitary via QR of a complex Gaussian matrix, with the
/// R-diagonal phase fix. Seeded and self-contained so tests do not depend on
/// library internals.
inline Mat random_unitary(int n, std::mt19937_64& eng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat z(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) z(i, k) = complexd(gauss(eng), gauss(eng));
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    complexd d = r(k, k);
    q.col(k) *= (std::abs(d) > 1e-300) ? d / std::abs(d) : complexd(1.0, 0.0);
  }
  return q;
}

/// Random normalized complex vector.
inline Vec random_state(int n, std::mt19937_64& eng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = complexd(gauss(eng), gauss(eng));
  v /= v.norm();
  return v;
}

/// Matrix exponential by scaling and squaring of the Taylor series; test-only
/// oracle independent of the eigendecomposition path used by the library.
inline Mat expm_taylor(const Mat& a) {
  const double nrm = a.cwiseAbs().maxCoeff() * static_cast<double>(a.rows());
  int squarings = 0;
  double scale = 1.0;
  while (nrm * scale > 0.25) {
    scale *= 0.5;
    ++squarings;
  }
  const Mat as = a * scale;
  Mat term = Mat::Identity(a.rows(), a.cols());
  Mat sum = term;
  for (int k = 1; k <= 24; ++k) {
    term = term * as / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

}  // namespace qkt::testing
