#pragma once

#include "qkt/classical.hpp"
#include "qkt/types.hpp"

namespace qkt {

/// Floquet operator exp(-i (kappa/2j) Jz^2) exp(-i p Jy) in the (2j+1)-dim
/// spin space. The torsion factor is diagonal, the rotation factor comes from
/// the eigendecomposition of Jy.
Mat floquet_spin(const KickedTopParams& params);

/// Two-qubit Floquet operator
///   exp(-i (kappa/4)(I + Z(x)Z)) exp(-i (p/2)(Y(x)I + I(x)Y)).
/// Requires j = 1.
Mat4 floquet_2q(const KickedTopParams& params);

/// U^n by Schur/eigendecomposition (U = V D V^†, U^n = V D^n V^†); O(1) in n
/// and unitary to ~1e-10 even for n up to 1e6. n must be >= 0.
Mat unitary_power(const Mat& u, long long n);

}  // namespace qkt
