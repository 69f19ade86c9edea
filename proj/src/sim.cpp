#include "qkt/sim.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "qkt/rng.hpp"

namespace qkt {

namespace {

constexpr double kHermTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kPsdTol = 1e-9;

void validate_density(const Mat4& rho) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kHermTol)
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  if (std::abs(rho.trace() - complexd(1.0, 0.0)) > kTraceTol)
    throw std::invalid_argument("DensityMatrix: trace != 1");
  Eigen::SelfAdjointEigenSolver<Mat4> es(rho);
  if (es.eigenvalues().minCoeff() < -kPsdTol)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue");
}

void validate_gate(const Gate& g) {
  auto ok_q = [](int q) { return q == 0 || q == 1; };
  if (!ok_q(g.q0)) throw std::invalid_argument("run_circuit: bad qubit index");
  if (g.kind == GateKind::CNOT && (!ok_q(g.q1) || g.q0 == g.q1))
    throw std::invalid_argument("run_circuit: bad CNOT qubits");
  if (!std::isfinite(g.p0) || !std::isfinite(g.p1) || !std::isfinite(g.p2))
    throw std::invalid_argument("run_circuit: non-finite gate angle");
}

Mat2 one_qubit_matrix(const Gate& g) {
  switch (g.kind) {
    case GateKind::X:
      return (Mat2() << 0, 1, 1, 0).finished();
    case GateKind::RZ: {
      Mat2 m = Mat2::Zero();
      m(0, 0) = std::exp(-kI * g.p0 / 2.0);
      m(1, 1) = std::exp(kI * g.p0 / 2.0);
      return m;
    }
    case GateKind::RY: {
      Mat2 m;
      m << std::cos(g.p0 / 2.0), -std::sin(g.p0 / 2.0), std::sin(g.p0 / 2.0),
          std::cos(g.p0 / 2.0);
      return m;
    }
    case GateKind::U1: {
      Mat2 m = Mat2::Identity();
      m(1, 1) = std::exp(kI * g.p0);
      return m;
    }
    case GateKind::U3: {
      Mat2 m;
      m << std::cos(g.p0 / 2.0), -std::exp(kI * g.p2) * std::sin(g.p0 / 2.0),
          std::exp(kI * g.p1) * std::sin(g.p0 / 2.0),
          std::exp(kI * (g.p1 + g.p2)) * std::cos(g.p0 / 2.0);
      return m;
    }
    default:
      throw std::logic_error("one_qubit_matrix: not a single-qubit gate");
  }
}

void apply_1q(Vec4& psi, const Mat2& m, int qubit) {
  // basis index = 2*q0 + q1
  const int stride = qubit == 0 ? 2 : 1;
  const int other = qubit == 0 ? 1 : 2;
  for (int base : {0, other}) {
    const complexd lo = psi(base);
    const complexd hi = psi(base + stride);
    psi(base) = m(0, 0) * lo + m(0, 1) * hi;
    psi(base + stride) = m(1, 0) * lo + m(1, 1) * hi;
  }
}

void apply_cnot(Vec4& psi, int control, int /*target*/) {
  if (control == 0)
    std::swap(psi(2), psi(3));
  else
    std::swap(psi(1), psi(3));
}

// Partial trace over one qubit.
Mat2 ptrace(const Mat4& rho, int qubit) {
  Mat2 out = Mat2::Zero();
  if (qubit == 0) {
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) out(j, k) = rho(j, k) + rho(2 + j, 2 + k);
  } else {
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) out(i, k) = rho(2 * i, 2 * k) + rho(2 * i + 1, 2 * k + 1);
  }
  return out;
}

Mat4 embed_mixed(const Mat2& other, int mixed_qubit) {
  Mat4 out = Mat4::Zero();
  if (mixed_qubit == 0) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) out(2 * i + j, 2 * i + k) = 0.5 * other(j, k);
  } else {
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) out(2 * i + j, 2 * k + j) = 0.5 * other(i, k);
  }
  return out;
}

Mat2 basis_rotation(PauliBasis b) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (b) {
    case PauliBasis::Z:
      return Mat2::Identity();
    case PauliBasis::X:
      return (Mat2() << s, s, s, -s).finished();
    case PauliBasis::Y:
      // H * S^†
      return (Mat2() << s, complexd(0, -s), s, complexd(0, s)).finished();
  }
  throw std::logic_error("basis_rotation");
}

ShotRecord sample_probs(const Eigen::Vector4d& probs_in, PauliBasis b0, PauliBasis b1,
                        std::uint64_t shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("measure_basis: shots must be >= 1");
  Eigen::Vector4d probs = probs_in.cwiseMax(0.0);
  probs /= probs.sum();
  ShotRecord rec;
  rec.b0 = b0;
  rec.b1 = b1;
  rec.shots = shots;
  Rng rng(seed);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform();
    double acc = 0.0;
    int outcome = 3;
    for (int k = 0; k < 4; ++k) {
      acc += probs(k);
      if (u < acc) {
        outcome = k;
        break;
      }
    }
    ++rec.counts[static_cast<std::size_t>(outcome)];
  }
  return rec;
}

Mat2 pauli_matrix(PauliBasis b) {
  switch (b) {
    case PauliBasis::X:
      return (Mat2() << 0, 1, 1, 0).finished();
    case PauliBasis::Y:
      return (Mat2() << 0, complexd(0, -1), complexd(0, 1), 0).finished();
    case PauliBasis::Z:
      return (Mat2() << 1, 0, 0, -1).finished();
  }
  throw std::logic_error("pauli_matrix");
}

Mat4 kron22(const Mat2& a, const Mat2& b) {
  Mat4 m;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) m.block<2, 2>(2 * i, 2 * k) = a(i, k) * b;
  return m;
}

}  // namespace

DensityMatrix DensityMatrix::from_pure(const Vec4& psi) {
  const double n = psi.norm();
  if (std::abs(n - 1.0) > 1e-10)
    throw std::invalid_argument("DensityMatrix::from_pure: state is not normalized");
  return DensityMatrix(psi * psi.adjoint() / (n * n));
}

DensityMatrix DensityMatrix::from_matrix(const Mat4& rho) {
  validate_density(rho);
  return DensityMatrix(rho);
}

NoiseConfig::NoiseConfig(double p1_, double p2_, std::uint64_t seed_)
    : p1(p1_), p2(p2_), seed(seed_) {
  if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0))
    throw std::invalid_argument("NoiseConfig: probabilities must lie in [0, 1]");
}

Vec4 run_circuit(const GateSequence& seq, const Vec4& input) {
  for (const auto& g : seq.gates) validate_gate(g);
  Vec4 psi = input;
  for (const auto& g : seq.gates) {
    if (g.kind == GateKind::CNOT)
      apply_cnot(psi, g.q0, g.q1);
    else
      apply_1q(psi, one_qubit_matrix(g), g.q0);
  }
  return psi;
}

DensityMatrix run_noisy(const GateSequence& seq, const DensityMatrix& input,
                        const NoiseConfig& noise) {
  for (const auto& g : seq.gates) validate_gate(g);
  Mat4 rho = input.matrix();
  for (const auto& g : seq.gates) {
    const Mat4 u = gate_matrix(g);
    rho = u * rho * u.adjoint();
    if (g.kind == GateKind::CNOT) {
      if (noise.p2 > 0.0)
        rho = (1.0 - noise.p2) * rho + noise.p2 * 0.25 * Mat4::Identity();
    } else if (noise.p1 > 0.0) {
      rho = (1.0 - noise.p1) * rho + noise.p1 * embed_mixed(ptrace(rho, g.q0), g.q0);
    }
  }
  rho = 0.5 * (rho + Mat4(rho.adjoint()));  // scrub roundoff asymmetry
  rho /= rho.trace().real();
  return DensityMatrix::from_matrix(rho);
}

char basis_char(PauliBasis b) {
  switch (b) {
    case PauliBasis::X: return 'X';
    case PauliBasis::Y: return 'Y';
    case PauliBasis::Z: return 'Z';
  }
  throw std::logic_error("basis_char");
}

PauliBasis basis_from_char(char c) {
  switch (c) {
    case 'X': return PauliBasis::X;
    case 'Y': return PauliBasis::Y;
    case 'Z': return PauliBasis::Z;
    default:
      throw std::invalid_argument("basis_from_char: expected X, Y or Z");
  }
}

std::string ShotRecord::basis_label() const {
  return std::string{basis_char(b0), basis_char(b1)};
}

ShotRecord measure_basis(const Vec4& state, PauliBasis b0, PauliBasis b1,
                         std::uint64_t shots, std::uint64_t seed) {
  Vec4 psi = state;
  apply_1q(psi, basis_rotation(b0), 0);
  apply_1q(psi, basis_rotation(b1), 1);
  Eigen::Vector4d probs = psi.cwiseAbs2();
  return sample_probs(probs, b0, b1, shots, seed);
}

ShotRecord measure_basis(const DensityMatrix& state, PauliBasis b0, PauliBasis b1,
                         std::uint64_t shots, std::uint64_t seed) {
  const Mat4 r = kron22(basis_rotation(b0), basis_rotation(b1));
  const Mat4 rotated = r * state.matrix() * r.adjoint();
  Eigen::Vector4d probs = rotated.diagonal().real();
  return sample_probs(probs, b0, b1, shots, seed);
}

DensityMatrix tomography(const std::vector<ShotRecord>& records) {
  constexpr std::array<PauliBasis, 3> kBases{PauliBasis::X, PauliBasis::Y, PauliBasis::Z};

  // expectation of sigma(x)sigma, sigma(x)I, I(x)sigma per record
  double pair_exp[3][3];
  bool have[3][3] = {};
  double marg0[3] = {}, marg1[3] = {};
  int marg0_n[3] = {}, marg1_n[3] = {};

  auto idx = [](PauliBasis b) { return static_cast<int>(b); };
  for (const auto& rec : records) {
    if (rec.shots == 0) throw std::invalid_argument("tomography: record with zero shots");
    std::uint64_t total = 0;
    for (auto c : rec.counts) total += c;
    if (total != rec.shots)
      throw std::invalid_argument("tomography: counts do not sum to shots");
    double ezz = 0.0, e0 = 0.0, e1 = 0.0;
    for (int oc = 0; oc < 4; ++oc) {
      const double f = static_cast<double>(rec.counts[static_cast<std::size_t>(oc)]) /
                       static_cast<double>(rec.shots);
      const double s0 = (oc & 2) ? -1.0 : 1.0;
      const double s1 = (oc & 1) ? -1.0 : 1.0;
      ezz += s0 * s1 * f;
      e0 += s0 * f;
      e1 += s1 * f;
    }
    pair_exp[idx(rec.b0)][idx(rec.b1)] = ezz;
    have[idx(rec.b0)][idx(rec.b1)] = true;
    marg0[idx(rec.b0)] += e0;
    ++marg0_n[idx(rec.b0)];
    marg1[idx(rec.b1)] += e1;
    ++marg1_n[idx(rec.b1)];
  }
  for (auto pb0 : kBases)
    for (auto pb1 : kBases)
      if (!have[idx(pb0)][idx(pb1)])
        throw MissingBasis(std::string("tomography: missing basis ") +
                           basis_char(pb0) + basis_char(pb1));

  Mat4 rho = 0.25 * Mat4::Identity();  // <I (x) I> = 1 term
  for (auto pb0 : kBases) {
    rho += 0.25 * (marg0[idx(pb0)] / marg0_n[idx(pb0)]) *
           kron22(pauli_matrix(pb0), Mat2::Identity());
    rho += 0.25 * (marg1[idx(pb0)] / marg1_n[idx(pb0)]) *
           kron22(Mat2::Identity(), pauli_matrix(pb0));
  }
  for (auto pb0 : kBases)
    for (auto pb1 : kBases)
      rho += 0.25 * pair_exp[idx(pb0)][idx(pb1)] *
             kron22(pauli_matrix(pb0), pauli_matrix(pb1));

  // physical projection: clip negative eigenvalues, renormalize trace
  rho = 0.5 * (rho + Mat4(rho.adjoint()));
  Eigen::SelfAdjointEigenSolver<Mat4> es(rho);
  Eigen::Vector4d lam = es.eigenvalues().cwiseMax(0.0);
  if (lam.sum() <= 0.0)
    throw std::runtime_error("tomography: projection produced the zero matrix");
  lam /= lam.sum();
  Mat4 proj = es.eigenvectors() * lam.asDiagonal().toDenseMatrix().cast<complexd>() *
              es.eigenvectors().adjoint();
  return DensityMatrix::from_matrix(proj);
}

std::string shot_record_to_json(const ShotRecord& rec) {
  nlohmann::json j;
  j["basis"] = rec.basis_label();
  j["shots"] = rec.shots;
  j["counts"] = {{"00", rec.counts[0]},
                 {"01", rec.counts[1]},
                 {"10", rec.counts[2]},
                 {"11", rec.counts[3]}};
  return j.dump(2);
}

ShotRecord shot_record_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ShotRecord rec;
  const std::string basis = j.at("basis").get<std::string>();
  if (basis.size() != 2) throw std::invalid_argument("shot record: bad basis label");
  rec.b0 = basis_from_char(basis[0]);
  rec.b1 = basis_from_char(basis[1]);
  rec.shots = j.at("shots").get<std::uint64_t>();
  const auto& counts = j.at("counts");
  rec.counts[0] = counts.value("00", 0ULL);
  rec.counts[1] = counts.value("01", 0ULL);
  rec.counts[2] = counts.value("10", 0ULL);
  rec.counts[3] = counts.value("11", 0ULL);
  std::uint64_t total = 0;
  for (auto c : rec.counts) total += c;
  if (total != rec.shots)
    throw std::invalid_argument("shot record: counts do not sum to shots");
  return rec;
}

}  // namespace qkt
