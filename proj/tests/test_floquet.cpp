#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qkt/floquet.hpp"
#include "qkt/spin.hpp"
#include "test_helpers.hpp"

using namespace qkt;
using qkt::testing::expm_taylor;
using qkt::testing::random_unitary;

namespace {

KickedTopParams params_for(double kappa, double p, int twoj = 2) {
  KickedTopParams prm;
  prm.kappa = kappa;
  prm.p = p;
  prm.j = SpinQuantumNumber(twoj);
  return prm;
}

}  // namespace

TEST_CASE("floquet_spin: kappa=0, p=0 gives the identity") {
  Mat u = floquet_spin(params_for(0.0, 0.0));
  CHECK(max_abs_diff(u, Mat(Mat::Identity(3, 3))) < 1e-14);
}

TEST_CASE("floquet_spin: pure rotation to the fourth power is identity for j=1") {
  Mat u = floquet_spin(params_for(0.0, kPi / 2));
  Mat u4 = u * u * u * u;
  CHECK(phase_aligned_diff(u4, Mat(Mat::Identity(3, 3))) < 1e-12);
}

TEST_CASE("floquet_spin matches Taylor exponential oracle") {
  for (int twoj : {1, 2, 5}) {
    auto ops = build_ops(SpinQuantumNumber(twoj));
    const double kappa = 2.5, p = kPi / 2, j = 0.5 * twoj;
    Mat expect = expm_taylor(Mat(-kI * kappa / (2.0 * j) * ops.jz * ops.jz)) *
                 expm_taylor(Mat(-kI * p * ops.jy));
    Mat got = floquet_spin(params_for(kappa, p, twoj));
    CAPTURE(twoj);
    CHECK(max_abs_diff(got, expect) < 1e-12);
  }
}

TEST_CASE("floquet_2q: kappa=0 is a product rotation preserving product states") {
  Mat4 u = floquet_2q(params_for(0.0, kPi / 2));
  // Ry(pi/2) (x) Ry(pi/2) acting on |00>
  Vec4 out = u * Vec4::Unit(0);
  const double h = 0.5;
  CHECK(std::abs(out(0) - complexd(h, 0)) < 1e-14);
  CHECK(std::abs(out(1) - complexd(h, 0)) < 1e-14);
  CHECK(std::abs(out(2) - complexd(h, 0)) < 1e-14);
  CHECK(std::abs(out(3) - complexd(h, 0)) < 1e-14);
}

TEST_CASE("floquet_2q is unitary and requires j=1") {
  CHECK(unitarity_defect(floquet_2q(params_for(2.5, kPi / 2))) < 1e-12);
  CHECK_THROWS_AS(floquet_2q(params_for(2.5, kPi / 2, 4)), std::invalid_argument);
}

TEST_CASE("floquet_2q restricted to the symmetric subspace equals floquet_spin") {
  const auto& e = dicke_isometry();
  for (double kappa : {0.5, 2.5, 4.5, 6.5}) {
    for (double p : {kPi / 2, 0.9}) {
      Mat4 u2 = floquet_2q(params_for(kappa, p));
      Mat us = floquet_spin(params_for(kappa, p));
      CAPTURE(kappa);
      CHECK(phase_aligned_diff(Mat(u2 * e), Mat(e * us)) < 1e-10);
    }
  }
}

TEST_CASE("floquet_2q: singlet is an eigenvector") {
  Vec4 singlet;
  singlet << 0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0;
  for (double kappa : {0.0, 2.5, 6.5}) {
    Vec4 out = floquet_2q(params_for(kappa, kPi / 2)) * singlet;
    CHECK(std::abs(complexd(singlet.adjoint() * out)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("operator-level kappa period is 4pi") {
  Mat4 a = floquet_2q(params_for(1.3, kPi / 2));
  Mat4 b = floquet_2q(params_for(1.3 + 4.0 * kPi, kPi / 2));
  CHECK(phase_aligned_diff(b, a) < 1e-10);
}

TEST_CASE("unitary_power: n = 0 and n = 1") {
  std::mt19937_64 eng(3);
  Mat u = random_unitary(4, eng);
  CHECK(max_abs_diff(unitary_power(u, 0), Mat(Mat::Identity(4, 4))) < 1e-14);
  CHECK(max_abs_diff(unitary_power(u, 1), u) < 1e-14);
  CHECK_THROWS_AS(unitary_power(u, -2), std::invalid_argument);
}

TEST_CASE("unitary_power vs 200 sequential multiplications") {
  Mat u = floquet_2q(params_for(2.5, kPi / 2));
  Mat seq = Mat::Identity(4, 4);
  for (int k = 0; k < 200; ++k) seq = seq * u;
  CHECK(max_abs_diff(unitary_power(u, 200), seq) < 1e-9);
}

TEST_CASE("unitary_power stays unitary for huge n") {
  Mat u = floquet_2q(params_for(2.5, kPi / 2));
  CHECK(unitarity_defect(unitary_power(u, 1000000)) < 1e-10);
  Mat us = floquet_spin(params_for(3.3, kPi / 2));
  CHECK(unitarity_defect(unitary_power(us, 1000000)) < 1e-10);
}

TEST_CASE("unitary_power: power additivity") {
  std::mt19937_64 eng(17);
  Mat u = random_unitary(4, eng);
  Mat lhs = unitary_power(u, 37);
  Mat rhs = unitary_power(u, 21) * unitary_power(u, 16);
  CHECK(max_abs_diff(lhs, rhs) < 1e-9);
}
