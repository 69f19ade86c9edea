#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "qkt/floquet.hpp"
#include "qkt/synth.hpp"
#include "test_helpers.hpp"

using namespace qkt;
using qkt::testing::random_unitary;

namespace {

Mat2 rz(double a) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = std::exp(-kI * a / 2.0);
  m(1, 1) = std::exp(kI * a / 2.0);
  return m;
}

Mat2 ry(double a) {
  Mat2 m;
  m << std::cos(a / 2), -std::sin(a / 2), std::sin(a / 2), std::cos(a / 2);
  return m;
}

Mat4 kron22(const Mat2& a, const Mat2& b) {
  Mat4 m;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) m.block<2, 2>(2 * i, 2 * k) = a(i, k) * b;
  return m;
}

// independent assembly oracle for controlled/uncontrolled block matrices
Mat4 controlled_oracle(const Mat2& v, int control) {
  Mat4 m = Mat4::Zero();
  if (control == 0) {
    m.block<2, 2>(0, 0) = Mat2::Identity();
    m.block<2, 2>(2, 2) = v;
  } else {
    m(0, 0) = 1;
    m(2, 2) = 1;
    m(1, 1) = v(0, 0);
    m(1, 3) = v(0, 1);
    m(3, 1) = v(1, 0);
    m(3, 3) = v(1, 1);
  }
  return m;
}

KickedTopParams qkt_params(double kappa) {
  KickedTopParams p;
  p.kappa = kappa;
  return p;
}

}  // namespace

TEST_CASE("zyz_decompose: identity and plain Ry") {
  EulerZYZ e = zyz_decompose(Mat2::Identity());
  CHECK(e.alpha == doctest::Approx(0.0));
  CHECK(e.beta == doctest::Approx(0.0));
  CHECK(e.theta == doctest::Approx(0.0));
  CHECK(e.delta == doctest::Approx(0.0));

  EulerZYZ r = zyz_decompose(ry(0.7));
  CHECK(r.theta == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(r.alpha == doctest::Approx(0.0));
  CHECK(r.beta == doctest::Approx(0.0));
  CHECK(r.delta == doctest::Approx(0.0));
}

TEST_CASE("zyz_decompose rejects non-unitary input") {
  Mat2 bad;
  bad << 1.0, 0.0, 0.0, 1.5;
  CHECK_THROWS_AS(zyz_decompose(bad), std::invalid_argument);
}

TEST_CASE("zyz_decompose: 1000 random unitaries reconstruct within 1e-10") {
  std::mt19937_64 eng(2024);
  for (int k = 0; k < 1000; ++k) {
    Mat2 w = random_unitary(2, eng);
    EulerZYZ e = zyz_decompose(w);
    CHECK(e.theta >= 0.0);
    CHECK(e.theta <= kPi + 1e-12);
    CHECK(e.delta > -kPi);
    CHECK(e.delta <= kPi);
    Mat2 rec = std::exp(kI * e.delta) * rz(e.alpha) * ry(e.theta) * rz(e.beta);
    CHECK(max_abs_diff(rec, w) < 1e-10);
  }
}

TEST_CASE("zyz_decompose: degenerate diagonal and antidiagonal set beta = 0") {
  Mat2 d = rz(1.1);
  EulerZYZ e = zyz_decompose(d);
  CHECK(e.beta == doctest::Approx(0.0));
  Mat2 rec = std::exp(kI * e.delta) * rz(e.alpha) * ry(e.theta) * rz(e.beta);
  CHECK(max_abs_diff(rec, d) < 1e-12);

  Mat2 anti = ry(kPi) * rz(0.4);
  EulerZYZ e2 = zyz_decompose(anti);
  CHECK(e2.beta == doctest::Approx(0.0));
  Mat2 rec2 = std::exp(kI * e2.delta) * rz(e2.alpha) * ry(e2.theta) * rz(e2.beta);
  CHECK(max_abs_diff(rec2, anti) < 1e-12);
}

TEST_CASE("lower_controlled: controlled-X reconstructs CNOT") {
  Mat2 x;
  x << 0, 1, 1, 0;
  GateSequence seq = lower_controlled(x, 0, 1);
  CHECK(seq.gates.size() == 8);
  CHECK(seq.cnot_count() == 2);
  Mat4 cnot = Mat4::Zero();
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  CHECK(phase_aligned_diff(sequence_matrix(seq), cnot) < 1e-10);
}

TEST_CASE("lower_controlled: identity block and phased Ry block") {
  GateSequence idseq = lower_controlled(Mat2::Identity(), 0, 1);
  CHECK(phase_aligned_diff(sequence_matrix(idseq), Mat4(Mat4::Identity())) < 1e-10);

  const Mat2 v = std::exp(kI * 0.4) * ry(1.1);
  for (int control : {0, 1}) {
    GateSequence seq = lower_controlled(v, control, 1 - control);
    CHECK(seq.gates.size() == 8);
    CHECK(phase_aligned_diff(sequence_matrix(seq), controlled_oracle(v, control)) < 1e-10);
  }
}

TEST_CASE("lower_controlled: random blocks, both orientations") {
  std::mt19937_64 eng(55);
  for (int k = 0; k < 200; ++k) {
    Mat2 v = random_unitary(2, eng);
    const int control = k % 2;
    GateSequence seq = lower_controlled(v, control, 1 - control);
    CHECK(phase_aligned_diff(sequence_matrix(seq), controlled_oracle(v, control)) < 1e-10);
  }
  CHECK_THROWS_AS(lower_controlled(Mat2::Identity(), 1, 1), std::invalid_argument);
}

TEST_CASE("lower_uncontrolled: identity, Rz, and random blocks") {
  GateSequence idseq = lower_uncontrolled(Mat2::Identity(), 0);
  CHECK(idseq.gates.size() == 7);
  CHECK(phase_aligned_diff(sequence_matrix(idseq), Mat4(Mat4::Identity())) < 1e-10);

  GateSequence zseq = lower_uncontrolled(rz(0.3), 1);
  CHECK(phase_aligned_diff(sequence_matrix(zseq), kron22(Mat2::Identity(), rz(0.3))) < 1e-10);

  std::mt19937_64 eng(77);
  for (int k = 0; k < 100; ++k) {
    Mat2 v = random_unitary(2, eng);
    const int target = k % 2;
    GateSequence seq = lower_uncontrolled(v, target);
    int n_x = 0, n_rot = 0;
    for (const auto& g : seq.gates) {
      if (g.kind == GateKind::X) ++n_x;
      if (g.kind == GateKind::RZ || g.kind == GateKind::RY) ++n_rot;
    }
    CHECK(n_x == 2);
    CHECK(n_rot == 5);
    Mat4 expect = target == 0 ? kron22(v, Mat2::Identity()) : kron22(Mat2::Identity(), v);
    CHECK(phase_aligned_diff(sequence_matrix(seq), expect) < 1e-10);
  }
}

TEST_CASE("template_decompose: structured inputs") {
  Mat4 cnot = Mat4::Zero();
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  Mat4 swap = Mat4::Zero();
  swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
  for (const Mat4& u : {Mat4(Mat4::Identity()), cnot, swap,
                        floquet_2q(qkt_params(2.5))}) {
    TemplateBlocks b = template_decompose(u);
    CHECK(phase_aligned_diff(template_matrix(b), u) < 1e-9);
    for (const Mat2& v : {b.v1, b.v2, b.v3, b.v4, b.v5, b.v6})
      CHECK(unitarity_defect(v) < 1e-12);
  }
}

TEST_CASE("template_decompose: 500 random unitaries within 1e-9") {
  std::mt19937_64 eng(99);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    Mat4 u = random_unitary(4, eng);
    TemplateBlocks b = template_decompose(u);
    worst = std::max(worst, phase_aligned_diff(template_matrix(b), u));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("template_decompose rejects non-unitary input") {
  Mat4 bad = 2.0 * Mat4::Identity();
  CHECK_THROWS_AS(template_decompose(bad), std::invalid_argument);
}

TEST_CASE("lowered blocks composed in template order match the template matrix") {
  std::mt19937_64 eng(123);
  Mat4 u = random_unitary(4, eng);
  TemplateBlocks b = template_decompose(u);
  GateSequence all;
  for (const GateSequence& part :
       {lower_controlled(b.v6, 0, 1), lower_controlled(b.v5, 1, 0),
        lower_controlled(b.v4, 0, 1), lower_uncontrolled(b.v3, 0),
        lower_controlled(b.v2, 0, 1), lower_uncontrolled(b.v1, 1)})
    all.gates.insert(all.gates.end(), part.gates.begin(), part.gates.end());
  CHECK(phase_aligned_diff(sequence_matrix(all), template_matrix(b)) < 1e-9);
}

TEST_CASE("compile_2q rotation level: 46 gates, 8 CNOTs, reconstruction") {
  for (double kappa : {0.5, 2.5, 4.5, 6.5}) {
    Mat4 u = floquet_2q(qkt_params(kappa));
    GateSequence seq = compile_2q(u, GateLevel::Rotation);
    CHECK(seq.gates.size() == 46);
    CHECK(seq.cnot_count() == 8);
    CHECK(seq.single_qubit_count() == 38);
    CHECK(phase_aligned_diff(sequence_matrix(seq), u) < 1e-9);
  }
}

TEST_CASE("compile_2q ibmq level: 8 CNOTs, only U1/U3 singles, fixed count") {
  std::size_t count = 0;
  for (double kappa : {0.5, 2.5, 4.5, 6.5}) {
    Mat4 u = floquet_2q(qkt_params(kappa));
    GateSequence seq = compile_2q(u, GateLevel::Ibmq);
    CHECK(seq.cnot_count() == 8);
    for (const auto& g : seq.gates)
      CHECK((g.kind == GateKind::CNOT || g.kind == GateKind::U1 || g.kind == GateKind::U3));
    if (count == 0) count = seq.gates.size();
    CHECK(seq.gates.size() == count);
    CHECK(phase_aligned_diff(sequence_matrix(seq), u) < 1e-9);
  }
}

TEST_CASE("gate count does not grow with the number of kicks") {
  Mat4 u1 = floquet_2q(qkt_params(2.5));
  GateSequence base = compile_2q(u1, GateLevel::Rotation);
  Mat4 u50 = Mat4(unitary_power(u1, 50));
  GateSequence fifty = compile_2q(u50, GateLevel::Rotation);
  CHECK(base.gates.size() == fifty.gates.size());
  CHECK(fifty.gates.size() == 46);
  CHECK(phase_aligned_diff(sequence_matrix(fifty), u50) < 1e-9);
}

TEST_CASE("compile_2q identity input stays valid") {
  GateSequence seq = compile_2q(Mat4::Identity(), GateLevel::Rotation);
  CHECK(seq.gates.size() == 46);
  CHECK(phase_aligned_diff(sequence_matrix(seq), Mat4(Mat4::Identity())) < 1e-9);
}

TEST_CASE("compile_qkt composes power and compile") {
  GateSequence seq = compile_qkt(qkt_params(2.5), 7, GateLevel::Rotation);
  Mat4 expect = Mat4(unitary_power(floquet_2q(qkt_params(2.5)), 7));
  CHECK(phase_aligned_diff(sequence_matrix(seq), expect) < 1e-9);
  CHECK_THROWS_AS(compile_qkt(qkt_params(2.5), -1, GateLevel::Rotation),
                  std::invalid_argument);
}

TEST_CASE("synthesis determinism: identical inputs give identical parameter bits") {
  Mat4 u = floquet_2q(qkt_params(3.7));
  GateSequence a = compile_2q(u, GateLevel::Rotation);
  GateSequence b = compile_2q(u, GateLevel::Rotation);
  REQUIRE(a.gates.size() == b.gates.size());
  for (std::size_t k = 0; k < a.gates.size(); ++k) {
    CHECK(a.gates[k].kind == b.gates[k].kind);
    CHECK(a.gates[k].p0 == b.gates[k].p0);
    CHECK(a.gates[k].p1 == b.gates[k].p1);
    CHECK(a.gates[k].p2 == b.gates[k].p2);
  }
}

TEST_CASE("emitted angles are canonicalized into (-2pi, 2pi]") {
  CHECK(canonical_angle(5.0 * kPi) == doctest::Approx(kPi));
  CHECK(canonical_angle(-5.0 * kPi) == doctest::Approx(-kPi));
  CHECK(canonical_angle(kTwoPi) == doctest::Approx(kTwoPi));
  CHECK(canonical_angle(-kTwoPi) <= kTwoPi);
  std::mt19937_64 eng(31);
  for (int k = 0; k < 200; ++k) {
    Mat4 u = random_unitary(4, eng);
    for (const auto& g : compile_2q(u, GateLevel::Rotation).gates) {
      CHECK(g.p0 <= kTwoPi);
      CHECK(g.p0 > -kTwoPi);
    }
  }
}

TEST_CASE("prune_identity_gates removes only angle-zero rotations") {
  GateSequence seq;
  seq.gates = {Gate::rz(0, 0.0), Gate::cnot(0, 1), Gate::ry(1, 0.5), Gate::u1(0, 0.0)};
  GateSequence pruned = prune_identity_gates(seq);
  CHECK(pruned.gates.size() == 2);
  CHECK(pruned.gates[0].kind == GateKind::CNOT);
  CHECK(pruned.gates[1].kind == GateKind::RY);
}

TEST_CASE("netlist round trip preserves parameter bits") {
  Mat4 u = floquet_2q(qkt_params(2.5));
  for (GateLevel level : {GateLevel::Rotation, GateLevel::Ibmq}) {
    GateSequence seq = compile_2q(u, level);
    const std::string text = to_netlist(seq, {{"kappa", "2.5"}});
    GateSequence back = parse_netlist(text);
    REQUIRE(back.gates.size() == seq.gates.size());
    CHECK(back.level == seq.level);
    for (std::size_t k = 0; k < seq.gates.size(); ++k) {
      CHECK(back.gates[k].kind == seq.gates[k].kind);
      CHECK(back.gates[k].q0 == seq.gates[k].q0);
      CHECK(back.gates[k].q1 == seq.gates[k].q1);
      CHECK(back.gates[k].p0 == seq.gates[k].p0);
      CHECK(back.gates[k].p1 == seq.gates[k].p1);
      CHECK(back.gates[k].p2 == seq.gates[k].p2);
    }
  }
}

TEST_CASE("netlist parser rejects malformed input") {
  CHECK_THROWS(parse_netlist("CNOT 0 0\n"));
  CHECK_THROWS(parse_netlist("CNOT 0 2\n"));
  CHECK_THROWS(parse_netlist("RZ 0\n"));
  CHECK_THROWS(parse_netlist("FOO 0 1.0\n"));
  CHECK_THROWS(parse_netlist("RZ 0 nanx\n"));
  CHECK_THROWS(parse_netlist("X 0 1\n"));
  GateSequence ok = parse_netlist("# comment\n\nX 0\n");
  CHECK(ok.gates.size() == 1);
}
