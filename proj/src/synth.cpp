#include "qkt/synth.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <istream>
#include <sstream>

#include "qkt/floquet.hpp"

namespace qkt {

namespace {

constexpr double kUnitaryTol = 1e-8;

void require_unitary(const Mat2& w, const char* who) {
  if (unitarity_defect(w) > kUnitaryTol)
    throw std::invalid_argument(std::string(who) + ": input is not unitary");
}

Mat2 rz_matrix(double a) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = std::exp(-kI * a / 2.0);
  m(1, 1) = std::exp(kI * a / 2.0);
  return m;
}

Mat2 ry_matrix(double a) {
  Mat2 m;
  m << std::cos(a / 2.0), -std::sin(a / 2.0), std::sin(a / 2.0), std::cos(a / 2.0);
  return m;
}

Mat2 u3_matrix(double t, double p, double l) {
  Mat2 m;
  m << std::cos(t / 2.0), -std::exp(kI * l) * std::sin(t / 2.0),
      std::exp(kI * p) * std::sin(t / 2.0), std::exp(kI * (p + l)) * std::cos(t / 2.0);
  return m;
}

// --- small dense helpers for the template factorization -------------------

// Eigen-pairs of a 2x2 Hermitian matrix, closed form, ascending order.
struct Eig2 {
  double lo = 0.0, hi = 0.0;
  Vec2 vlo, vhi;
};

Eig2 eig2_hermitian(const Mat2& h) {
  Eig2 r;
  const double a = h(0, 0).real();
  const double d = h(1, 1).real();
  const complexd b = h(0, 1);
  const double half_tr = 0.5 * (a + d);
  const double disc = std::hypot(0.5 * (a - d), std::abs(b));
  r.lo = half_tr - disc;
  r.hi = half_tr + disc;
  if (std::abs(b) < 1e-300) {
    if (a <= d) {
      r.vlo << 1.0, 0.0;
      r.vhi << 0.0, 1.0;
    } else {
      r.vlo << 0.0, 1.0;
      r.vhi << 1.0, 0.0;
    }
    return r;
  }
  // eigenvector for lambda from (h - lambda I) x = 0; pick the better row.
  auto vec_for = [&](double lam) {
    Vec2 c1, c2;
    c1 << b, complexd(lam - a, 0.0);
    c2 << complexd(lam - d, 0.0), std::conj(b);
    Vec2 v = (c1.norm() >= c2.norm()) ? c1 : c2;
    return Vec2(v / v.norm());
  };
  r.vhi = vec_for(r.hi);
  // enforce orthogonality exactly; avoids drift when the gap is small
  r.vlo << -std::conj(r.vhi(1)), std::conj(r.vhi(0));
  return r;
}

// Unit vector x with x^† H x = c (clamped to the numerical range). When the
// target sits within ~1e-12 of a boundary the pure eigenvector is returned;
// interpolating there would mix in sqrt(eps) of the wrong eigenvector.
Vec2 unit_vector_attaining(const Mat2& h, double c) {
  const Eig2 e = eig2_hermitian(h);
  const double span = e.hi - e.lo;
  const double edge =
      1e-12 * std::max({span, std::abs(e.hi), std::abs(e.lo), 1e-300});
  if (c >= e.hi - edge) return e.vhi;
  if (c <= e.lo + edge) return e.vlo;
  const double t = (c - e.lo) / span;
  Vec2 v = std::sqrt(1.0 - t) * e.vlo + std::sqrt(t) * e.vhi;
  return v / v.norm();
}

Vec2 orth_unit(const Vec2& v) {
  Vec2 o;
  o << -std::conj(v(1)), std::conj(v(0));
  return o;
}

Mat2 polar_unitary(const Mat2& m) {
  Eigen::JacobiSVD<Mat2> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Mat4 c0_gate(const Mat2& v) {
  Mat4 m = Mat4::Identity();
  m.block<2, 2>(2, 2) = v;
  return m;
}

Mat4 c1_gate(const Mat2& v) {
  Mat4 m = Mat4::Identity();
  m(1, 1) = v(0, 0);
  m(1, 3) = v(0, 1);
  m(3, 1) = v(1, 0);
  m(3, 3) = v(1, 1);
  return m;
}

Mat4 kron22(const Mat2& a, const Mat2& b) {
  Mat4 m;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) m.block<2, 2>(2 * i, 2 * k) = a(i, k) * b;
  return m;
}

// Stage A output: V6 is fixed by the unit vector e (its row 1 is e^†) and V5
// by the unit vector w (its row 0 is w^†). They are chosen so that
// Y = U C0(V6)^† C1(V5)^† has a (0,0) block with orthogonal equal-norm
// columns, which is what the remaining template factors can represent.
struct StageA {
  Vec2 e, w;
};

// Generic branch: alpha = <u, a> != 0. Solves e^† H e = c, then w ∝ (-beta, alpha).
bool stage_a_general(const Mat2& u01, const Vec2& u, const Vec2& a, const Vec2& g,
                     complexd alpha, double mu0, StageA& out) {
  const Vec2 u01a = u01.adjoint() * a;
  const Eigen::RowVector2cd a_u01 = a.adjoint() * u01;
  Mat2 h = std::norm(alpha) * (u01.adjoint() * u01);
  h -= std::conj(alpha) * (u01a * g.adjoint());
  h -= alpha * (g * a_u01);
  h += (a.squaredNorm() - mu0 * mu0) * (g * g.adjoint());
  const double c = mu0 * mu0 * std::norm(alpha);
  out.e = unit_vector_attaining(h, c);
  const complexd beta = g.adjoint() * out.e;
  const double nu = std::sqrt(std::norm(alpha) + std::norm(beta));
  if (nu < 1e-150) return false;
  out.w << -beta / nu, alpha / nu;
  return true;
}

// Orthogonal branch: alpha ~ 0. Forces beta = 0 through the choice of e, then
// solves the 2x2 Gram problem for w.
StageA stage_a_orthogonal(const Mat2& u01, const Vec2& u, const Vec2& a, const Vec2& g,
                          double mu0) {
  StageA out;
  const double ng = g.norm();
  if (ng > 1e-12) {
    out.e = orth_unit(Vec2(g / ng));
  } else if (mu0 > 0.5) {
    // mu0 ~ 1: any direction with maximal ||U01 e|| (top right-singular vector)
    out.e = eig2_hermitian(u01.adjoint() * u01).vhi;
  } else {
    // mu0 ~ 0: the second column must vanish, so U01 e must cancel a
    const double na = a.norm();
    const Eig2 sv = eig2_hermitian(u01.adjoint() * u01);
    if (na < 1e-12) {
      out.e << 0.0, 1.0;
    } else if (sv.lo > 1e-24) {
      Vec2 sol = u01.partialPivLu().solve(a);
      out.e = -sol / sol.norm();
    } else {
      out.e = sv.vlo;  // kernel direction of U01
    }
  }
  const Vec2 b = u01 * out.e;
  Mat2 gram;
  gram << complexd(a.squaredNorm(), 0.0), a.adjoint() * b, b.adjoint() * a,
      complexd(b.squaredNorm(), 0.0);
  out.w = unit_vector_attaining(gram, mu0 * mu0);
  return out;
}

TemplateBlocks blocks_from_stage_a(const Mat4& u, const StageA& sa) {
  TemplateBlocks tb;
  tb.v6.row(0) = orth_unit(sa.e.conjugate()).transpose();
  tb.v6.row(1) = sa.e.adjoint();
  tb.v5.row(0) = sa.w.adjoint();
  tb.v5(1, 0) = -sa.w(1);
  tb.v5(1, 1) = sa.w(0);

  const Mat4 y = u * c0_gate(tb.v6).adjoint() * c1_gate(tb.v5).adjoint();
  const Mat2 y00 = y.block<2, 2>(0, 0);
  const Mat2 y01 = y.block<2, 2>(0, 2);
  const Mat2 y10 = y.block<2, 2>(2, 0);
  const Mat2 y11 = y.block<2, 2>(2, 2);

  double p = y00.norm() / std::sqrt(2.0);
  double eta = y01.norm() / std::sqrt(2.0);
  const double nrm = std::hypot(p, eta);
  p /= nrm;
  eta /= nrm;

  if (p < 1e-12) {
    tb.v3 << 0.0, 1.0, -1.0, 0.0;
    tb.v4 = Mat2::Identity();
    tb.v1 = polar_unitary(y01);
    tb.v2 = tb.v1.adjoint() * polar_unitary(-y10);
  } else if (eta < 1e-12) {
    tb.v3 = Mat2::Identity();
    tb.v4 = Mat2::Identity();
    tb.v1 = polar_unitary(y00);
    tb.v2 = tb.v1.adjoint() * polar_unitary(y11);
  } else {
    tb.v3 << p, eta, -eta, p;
    tb.v1 = polar_unitary(y00 / p);
    tb.v4 = polar_unitary(tb.v1.adjoint() * y01 / eta);
    tb.v2 = tb.v1.adjoint() * polar_unitary(-y10 / eta);
  }
  return tb;
}

}  // namespace

EulerZYZ zyz_decompose(const Mat2& w) {
  require_unitary(w, "zyz_decompose");
  EulerZYZ r;
  r.delta = 0.5 * std::arg(w.determinant());
  const Mat2 su = std::exp(-kI * r.delta) * w;
  const double lower = std::abs(su(1, 0));
  const double upper = std::abs(su(0, 0));
  r.theta = 2.0 * std::atan2(lower, upper);
  if (lower < 1e-13 || upper < 1e-13) {
    // theta at 0 or pi: the alpha/beta split is gauge; fix beta = 0
    r.beta = 0.0;
    r.alpha = (upper >= lower) ? 2.0 * std::arg(su(1, 1)) : 2.0 * std::arg(su(1, 0));
  } else {
    r.alpha = std::arg(su(1, 1)) + std::arg(su(1, 0));
    r.beta = std::arg(su(1, 1)) - std::arg(su(1, 0));
  }
  return r;
}

Gate Gate::cnot(int control, int target) {
  if (control == target) throw std::invalid_argument("Gate::cnot: control == target");
  Gate g{GateKind::CNOT};
  g.q0 = control;
  g.q1 = target;
  return g;
}
Gate Gate::x(int qubit) {
  Gate g{GateKind::X};
  g.q0 = qubit;
  return g;
}
Gate Gate::rz(int qubit, double angle) {
  Gate g{GateKind::RZ};
  g.q0 = qubit;
  g.p0 = canonical_angle(angle);
  return g;
}
Gate Gate::ry(int qubit, double angle) {
  Gate g{GateKind::RY};
  g.q0 = qubit;
  g.p0 = canonical_angle(angle);
  return g;
}
Gate Gate::u1(int qubit, double lambda) {
  Gate g{GateKind::U1};
  g.q0 = qubit;
  g.p0 = canonical_angle(lambda);
  return g;
}
Gate Gate::u3(int qubit, double theta, double phi, double lambda) {
  Gate g{GateKind::U3};
  g.q0 = qubit;
  g.p0 = canonical_angle(theta);
  g.p1 = canonical_angle(phi);
  g.p2 = canonical_angle(lambda);
  return g;
}

int GateSequence::cnot_count() const {
  int n = 0;
  for (const auto& g : gates) n += (g.kind == GateKind::CNOT);
  return n;
}
int GateSequence::single_qubit_count() const {
  return static_cast<int>(gates.size()) - cnot_count();
}

double canonical_angle(double a) {
  double r = std::fmod(a, 2.0 * kTwoPi);
  if (r <= -kTwoPi) r += 2.0 * kTwoPi;
  if (r > kTwoPi) r -= 2.0 * kTwoPi;
  return r;
}

Mat4 controlled_gate(const Mat2& v, int control, int target) {
  if (control == target || control < 0 || control > 1 || target < 0 || target > 1)
    throw std::invalid_argument("controlled_gate: bad qubit assignment");
  return control == 0 ? c0_gate(v) : c1_gate(v);
}

Mat4 template_matrix(const TemplateBlocks& b) {
  return kron22(Mat2::Identity(), b.v1) * c0_gate(b.v2) * kron22(b.v3, Mat2::Identity()) *
         c0_gate(b.v4) * c1_gate(b.v5) * c0_gate(b.v6);
}

TemplateBlocks template_decompose(const Mat4& u) {
  if (unitarity_defect(u) > kUnitaryTol)
    throw std::invalid_argument("template_decompose: input is not unitary");

  const Mat2 u00 = u.block<2, 2>(0, 0);
  const Mat2 u01 = u.block<2, 2>(0, 2);
  const Vec2 uvec = u00.col(0);
  const double mu0 = uvec.norm();
  const Vec2 a = u00.col(1);
  const Vec2 g = u01.adjoint() * uvec;
  const complexd alpha = uvec.adjoint() * a;

  TemplateBlocks best;
  double best_err = std::numeric_limits<double>::infinity();
  auto consider = [&](const StageA& sa) {
    TemplateBlocks tb = blocks_from_stage_a(u, sa);
    const double err = phase_aligned_diff(template_matrix(tb), u);
    if (err < best_err) {
      best_err = err;
      best = tb;
    }
  };

  if (std::abs(alpha) > 1e-14) {
    StageA sa;
    if (stage_a_general(u01, uvec, a, g, alpha, mu0, sa)) consider(sa);
  }
  consider(stage_a_orthogonal(u01, uvec, a, g, mu0));

  if (best_err > 1e-8)
    throw DecompositionFailure("template_decompose: reconstruction error " +
                               std::to_string(best_err));
  return best;
}

GateSequence lower_controlled(const Mat2& v, int control, int target) {
  require_unitary(v, "lower_controlled");
  if (control == target || control < 0 || control > 1 || target < 0 || target > 1)
    throw std::invalid_argument("lower_controlled: bad qubit assignment");
  const EulerZYZ e = zyz_decompose(v);
  GateSequence seq;
  seq.level = GateLevel::Rotation;
  seq.gates = {
      Gate::rz(target, (e.beta - e.alpha) / 2.0),
      Gate::cnot(control, target),
      Gate::rz(target, -(e.alpha + e.beta) / 2.0),
      Gate::ry(target, -e.theta / 2.0),
      Gate::cnot(control, target),
      Gate::ry(target, e.theta / 2.0),
      Gate::rz(target, e.alpha),
      Gate::rz(control, e.delta),
  };
  return seq;
}

GateSequence lower_uncontrolled(const Mat2& v, int target) {
  require_unitary(v, "lower_uncontrolled");
  if (target < 0 || target > 1)
    throw std::invalid_argument("lower_uncontrolled: bad qubit index");
  const EulerZYZ e = zyz_decompose(v);
  GateSequence seq;
  seq.level = GateLevel::Rotation;
  seq.gates = {
      Gate::rz(target, (e.beta - e.alpha) / 2.0),
      Gate::x(target),
      Gate::rz(target, -(e.alpha + e.beta) / 2.0),
      Gate::ry(target, -e.theta / 2.0),
      Gate::x(target),
      Gate::ry(target, e.theta / 2.0),
      Gate::rz(target, e.alpha),
  };
  return seq;
}

namespace {

void append(GateSequence& dst, const GateSequence& src) {
  dst.gates.insert(dst.gates.end(), src.gates.begin(), src.gates.end());
}

// Controlled block at the IBMQ level: the two inter-CNOT rotation runs merge
// into single U3 gates, the leading Rz becomes a U1, and the block phase
// rides on the control as U1(delta).
void append_controlled_ibmq(GateSequence& dst, const Mat2& v, int control, int target) {
  const EulerZYZ e = zyz_decompose(v);
  dst.gates.push_back(Gate::u1(target, (e.beta - e.alpha) / 2.0));
  dst.gates.push_back(Gate::cnot(control, target));
  dst.gates.push_back(Gate::u3(target, -e.theta / 2.0, 0.0, -(e.alpha + e.beta) / 2.0));
  dst.gates.push_back(Gate::cnot(control, target));
  dst.gates.push_back(Gate::u3(target, e.theta / 2.0, e.alpha, 0.0));
  dst.gates.push_back(Gate::u1(control, e.delta));
}

}  // namespace

GateSequence compile_2q(const Mat4& u, GateLevel level) {
  if (level == GateLevel::Template)
    throw std::invalid_argument("compile_2q: compile to Rotation or Ibmq level");
  const TemplateBlocks b = template_decompose(u);
  GateSequence seq;
  seq.level = level;
  if (level == GateLevel::Rotation) {
    append(seq, lower_controlled(b.v6, 0, 1));
    append(seq, lower_controlled(b.v5, 1, 0));
    append(seq, lower_controlled(b.v4, 0, 1));
    append(seq, lower_uncontrolled(b.v3, 0));
    append(seq, lower_controlled(b.v2, 0, 1));
    append(seq, lower_uncontrolled(b.v1, 1));
  } else {
    append_controlled_ibmq(seq, b.v6, 0, 1);
    append_controlled_ibmq(seq, b.v5, 1, 0);
    append_controlled_ibmq(seq, b.v4, 0, 1);
    const EulerZYZ e3 = zyz_decompose(b.v3);
    seq.gates.push_back(Gate::u3(0, e3.theta, e3.alpha, e3.beta));
    append_controlled_ibmq(seq, b.v2, 0, 1);
    const EulerZYZ e1 = zyz_decompose(b.v1);
    seq.gates.push_back(Gate::u3(1, e1.theta, e1.alpha, e1.beta));
  }
  const double err = phase_aligned_diff(sequence_matrix(seq), u);
  if (err > 1e-8)
    throw DecompositionFailure("compile_2q: lowered circuit error " + std::to_string(err));
  return seq;
}

GateSequence compile_qkt(const KickedTopParams& params, long long n_kicks, GateLevel level) {
  if (n_kicks < 0) throw std::invalid_argument("compile_qkt: n_kicks must be >= 0");
  const Mat u = unitary_power(floquet_2q(params), n_kicks);
  return compile_2q(Mat4(u), level);
}

GateSequence prune_identity_gates(const GateSequence& seq, double eps) {
  GateSequence out;
  out.level = seq.level;
  for (const auto& g : seq.gates) {
    const bool identity =
        ((g.kind == GateKind::RZ || g.kind == GateKind::RY || g.kind == GateKind::U1) &&
         std::abs(g.p0) < eps) ||
        (g.kind == GateKind::U3 && std::abs(g.p0) < eps && std::abs(g.p1) < eps &&
         std::abs(g.p2) < eps);
    if (!identity) out.gates.push_back(g);
  }
  return out;
}

Mat4 gate_matrix(const Gate& g) {
  switch (g.kind) {
    case GateKind::CNOT: {
      if (g.q0 == g.q1 || g.q0 < 0 || g.q0 > 1 || g.q1 < 0 || g.q1 > 1)
        throw std::invalid_argument("gate_matrix: bad CNOT qubits");
      Mat4 m = Mat4::Zero();
      if (g.q0 == 0) {
        m(0, 0) = m(1, 1) = 1.0;
        m(3, 2) = m(2, 3) = 1.0;
      } else {
        m(0, 0) = m(2, 2) = 1.0;
        m(3, 1) = m(1, 3) = 1.0;
      }
      return m;
    }
    case GateKind::X:
      return g.q0 == 0 ? kron22((Mat2() << 0, 1, 1, 0).finished(), Mat2::Identity())
                       : kron22(Mat2::Identity(), (Mat2() << 0, 1, 1, 0).finished());
    case GateKind::RZ:
      return g.q0 == 0 ? kron22(rz_matrix(g.p0), Mat2::Identity())
                       : kron22(Mat2::Identity(), rz_matrix(g.p0));
    case GateKind::RY:
      return g.q0 == 0 ? kron22(ry_matrix(g.p0), Mat2::Identity())
                       : kron22(Mat2::Identity(), ry_matrix(g.p0));
    case GateKind::U1: {
      Mat2 m = Mat2::Identity();
      m(1, 1) = std::exp(kI * g.p0);
      return g.q0 == 0 ? kron22(m, Mat2::Identity()) : kron22(Mat2::Identity(), m);
    }
    case GateKind::U3: {
      const Mat2 m = u3_matrix(g.p0, g.p1, g.p2);
      return g.q0 == 0 ? kron22(m, Mat2::Identity()) : kron22(Mat2::Identity(), m);
    }
  }
  throw std::logic_error("gate_matrix: unknown gate kind");
}

Mat4 sequence_matrix(const GateSequence& seq) {
  Mat4 m = Mat4::Identity();
  for (const auto& g : seq.gates) m = gate_matrix(g) * m;
  return m;
}

namespace {

std::string fmt_angle(double a) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", a);
  return buf;
}

}  // namespace

std::string to_netlist(const GateSequence& seq,
                       const std::map<std::string, std::string>& header) {
  std::ostringstream out;
  for (const auto& [k, v] : header) out << "# " << k << "=" << v << "\n";
  const char* level = seq.level == GateLevel::Rotation ? "ROTATION"
                      : seq.level == GateLevel::Ibmq   ? "IBMQ"
                                                       : "TEMPLATE";
  out << "# level=" << level << " gates=" << seq.gates.size()
      << " cnots=" << seq.cnot_count() << "\n";
  for (const auto& g : seq.gates) {
    switch (g.kind) {
      case GateKind::CNOT:
        out << "CNOT " << g.q0 << " " << g.q1 << "\n";
        break;
      case GateKind::X:
        out << "X " << g.q0 << "\n";
        break;
      case GateKind::RZ:
        out << "RZ " << g.q0 << " " << fmt_angle(g.p0) << "\n";
        break;
      case GateKind::RY:
        out << "RY " << g.q0 << " " << fmt_angle(g.p0) << "\n";
        break;
      case GateKind::U1:
        out << "U1 " << g.q0 << " " << fmt_angle(g.p0) << "\n";
        break;
      case GateKind::U3:
        out << "U3 " << g.q0 << " " << fmt_angle(g.p0) << " " << fmt_angle(g.p1) << " "
            << fmt_angle(g.p2) << "\n";
        break;
    }
  }
  return out.str();
}

GateSequence parse_netlist(std::istream& in) {
  GateSequence seq;
  bool saw_ibmq = false, saw_rot = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#') continue;
    std::istringstream ls(line);
    std::string op;
    ls >> op;
    auto bad = [&](const char* why) {
      throw std::runtime_error("netlist line " + std::to_string(lineno) + ": " + why);
    };
    auto read_qubit = [&]() {
      int q;
      if (!(ls >> q) || q < 0 || q > 1) bad("expected qubit index in {0,1}");
      return q;
    };
    auto read_angle = [&]() {
      double a;
      if (!(ls >> a) || !std::isfinite(a)) bad("expected finite angle");
      return a;
    };
    if (op == "CNOT") {
      const int c = read_qubit();
      const int t = read_qubit();
      if (c == t) bad("CNOT control equals target");
      seq.gates.push_back(Gate::cnot(c, t));
    } else if (op == "X") {
      seq.gates.push_back(Gate::x(read_qubit()));
      saw_rot = true;
    } else if (op == "RZ") {
      const int q = read_qubit();
      seq.gates.push_back(Gate::rz(q, read_angle()));
      saw_rot = true;
    } else if (op == "RY") {
      const int q = read_qubit();
      seq.gates.push_back(Gate::ry(q, read_angle()));
      saw_rot = true;
    } else if (op == "U1") {
      const int q = read_qubit();
      seq.gates.push_back(Gate::u1(q, read_angle()));
      saw_ibmq = true;
    } else if (op == "U3") {
      const int q = read_qubit();
      const double t = read_angle();
      const double p = read_angle();
      const double l = read_angle();
      seq.gates.push_back(Gate::u3(q, t, p, l));
      saw_ibmq = true;
    } else {
      bad("unknown gate");
    }
    std::string rest;
    if (ls >> rest) bad("trailing tokens");
  }
  seq.level = saw_ibmq && !saw_rot ? GateLevel::Ibmq : GateLevel::Rotation;
  return seq;
}

GateSequence parse_netlist(const std::string& text) {
  std::istringstream in(text);
  return parse_netlist(in);
}

}  // namespace qkt
