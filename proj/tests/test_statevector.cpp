#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qmb/statevector.hpp"

using namespace qmb;

namespace {

double maxdiff(const CMat& a, const CMat& b) { return (a - b).cwiseAbs().maxCoeff(); }

CMat rot_oracle(char axis, double th) { return oracle::expm_hermitian(oracle::pauli(axis), th / 2); }

PauliString random_string(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> pick(0, 3);
  PauliString p;
  while (p.is_identity())
    for (int q = 1; q <= n; ++q) p.set(q, static_cast<Pauli>(pick(rng)));
  return p;
}

std::string pattern_of(const PauliString& p, int n) {
  std::string s;
  for (int q = 1; q <= n; ++q) s += "IXYZ"[static_cast<int>(p.at(q))];
  return s;
}

}  // namespace

TEST_CASE("register construction") {
  const StateVector s = new_register(2, 0);
  CHECK(s.dim() == 4);
  CHECK(s[0] == cplx(1.0));
  const StateVector one = new_register(1, 1);
  CHECK(one[1] == cplx(1.0));
  CHECK(new_register(17, 0).dim() == (std::size_t{1} << 17));
  CHECK_THROWS(new_register(2, 4));
  CHECK_THROWS(new_register(27, 0));
}

TEST_CASE("single-qubit rotations") {
  StateVector s = new_register(1, 0);
  apply_rotation(s, Axis::X, 1, kPi);
  CHECK(std::abs(s[1] - cplx(0, -1)) < 1e-15);
  CHECK(std::abs(s[0]) < 1e-15);

  s = new_register(1, 0);
  apply_rotation(s, Axis::Z, 1, 0.7);
  CHECK(std::abs(s[0] - std::exp(cplx(0, -0.35))) < 1e-15);

  s = new_register(1, 0);
  apply_rotation(s, Axis::Y, 1, kPi / 2);
  const CVec expect = rot_oracle('Y', kPi / 2).col(0);
  CHECK(std::abs(s[0] - expect[0]) < 1e-15);
  CHECK(std::abs(s[1] - expect[1]) < 1e-15);
  CHECK(std::abs(s[0] - 1 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(s[1] - 1 / std::sqrt(2.0)) < 1e-15);
  CHECK_THROWS(apply_rotation(s, Axis::X, 2, 0.1));
}

TEST_CASE("rotations embed at the right tensor position") {
  std::mt19937_64 rng(5);
  const int n = 3;
  for (int q = 1; q <= n; ++q)
    for (char ax : std::string("XYZ")) {
      const Axis a = ax == 'X' ? Axis::X : ax == 'Y' ? Axis::Y : Axis::Z;
      CHECK(maxdiff(dense_matrix(Gate::rot(a, q, 0.37), n), oracle::embed(rot_oracle(ax, 0.37), q, n)) < 1e-14);
    }
}

TEST_CASE("ising gate") {
  StateVector s = random_state(2, 1);
  const StateVector before = s;
  apply_ising(s, 1, 2, 0.0);
  CHECK((s.amplitudes() - before.amplitudes()).norm() < 1e-15);

  s = new_register(2, 0);
  apply_ising(s, 1, 2, 0.8);
  CHECK(std::abs(s[0] - std::exp(cplx(0, -0.4))) < 1e-15);
  CHECK_THROWS(apply_ising(s, 1, 1, 0.3));
  CHECK(maxdiff(dense_matrix(Gate::ising(1, 3, 0.9), 3), oracle::expm_hermitian(oracle::pauli_kron("ZIZ"), 0.45)) <
        1e-14);
}

TEST_CASE("CNOT from rotations and one Ising gate equals CNOT up to phase") {
  const std::vector<Gate> seq{Gate::rot(Axis::Y, 2, kPi / 2), Gate::ising(1, 2, kPi / 2),
                              Gate::rot(Axis::Y, 2, -kPi / 2), Gate::rot(Axis::X, 2, kPi / 2),
                              Gate::rot(Axis::Z, 1, kPi / 2)};
  const CMat u = dense_matrix(seq, 2);
  // control qubit 1 in |1>, target qubit 2
  CMat cnot = CMat::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  cplx phase;
  CHECK(equal_up_to_phase(cnot, u, 1e-12, &phase));
  CHECK(std::abs(phase - std::exp(cplx(0, -kPi / 4))) < 1e-12);
  CHECK_FALSE(equal_up_to_phase(CMat(CMat::Identity(4, 4)), u, 1e-6));
}

TEST_CASE("Pauli-string exponentials: both paths agree with the dense oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 4;
    const PauliString p = random_string(rng, n);
    const double theta = std::uniform_real_distribution<double>(-3, 3)(rng);
    const double c = std::uniform_real_distribution<double>(-2, 2)(rng);
    const CVec v = oracle::random_vector(1 << n, rng);
    StateVector a(n, v), b(n, v);
    apply_pauli_string_exp(a, PauliTerm(c, p), theta, ExpPath::Direct);
    apply_pauli_string_exp(b, PauliTerm(c, p), theta, ExpPath::Ladder);
    const CVec ref = oracle::expm_hermitian(oracle::pauli_kron(pattern_of(p, n)), c * theta / 2) * v;
    CHECK((a.amplitudes() - ref).norm() < 1e-12);
    CHECK((b.amplitudes() - ref).norm() < 1e-12);
  }
}

TEST_CASE("X1 Z2 X3 on a random 3-qubit state") {
  std::mt19937_64 rng(2);
  const CVec v = oracle::random_vector(8, rng);
  StateVector s(3, v);
  apply_pauli_string_exp(s, PauliTerm(1.0, PauliString::parse("X1 Z2 X3")), 0.9);
  const CVec ref = oracle::expm_hermitian(oracle::pauli_kron("XZX"), 0.45) * v;
  CHECK((s.amplitudes() - ref).norm() < 1e-12);
}

TEST_CASE("single Z string reduces to the Z rotation") {
  StateVector a = random_state(2, 9), b = a;
  apply_pauli_string_exp(a, PauliTerm(1.0, PauliString::single(1, Pauli::Z)), 1.3);
  apply_rotation(b, Axis::Z, 1, 1.3);
  CHECK((a.amplitudes() - b.amplitudes()).norm() < 1e-15);
  CHECK_THROWS(apply_pauli_string_exp(a, PauliTerm(1.0, PauliString{}), 1.0));
}

TEST_CASE("conjugation by exp(i pi/4 Y) takes Z to X") {
  // e^{i pi/4 Y} = e^{-i theta/2 Y} with theta = -pi/2; U^dag Z U = X
  const CMat u = dense_matrix(Gate::pauli_exp(PauliString::single(1, Pauli::Y), -kPi / 2), 1);
  CHECK(maxdiff(u.adjoint() * oracle::pauli('Z') * u, oracle::pauli('X')) < 1e-15);
}

TEST_CASE("expectation values") {
  CVec bell = CVec::Zero(4);
  bell[0] = bell[3] = 1 / std::sqrt(2.0);
  const StateVector s(2, bell);
  CHECK(std::abs(expectation(s, PauliSum::single(1, Pauli::Z))) < 1e-15);
  CHECK(std::abs(expectation(s, PauliSum(PauliTerm(1.0, PauliString::parse("X1 X2")))) - 1.0) < 1e-15);
  const StateVector r = random_state(4, 3);
  CHECK(std::abs(expectation(r, PauliSum::identity()) - 1.0) < 1e-12);

  std::mt19937_64 rng(4);
  PauliSum h;
  for (int k = 0; k < 10; ++k) h.add_term(random_string(rng, 4), std::normal_distribution<double>()(rng));
  const cplx e = expectation(r, h);
  CHECK(std::abs(e.imag()) < 1e-12);
  const cplx dense = r.amplitudes().dot(dense_matrix(h, 4) * r.amplitudes());
  CHECK(std::abs(e - dense) < 1e-12);
  CHECK((apply_sum(r, h) - dense_matrix(h, 4) * r.amplitudes()).norm() < 1e-12);
}

TEST_CASE("dense matrices of Pauli operators") {
  CHECK(maxdiff(dense_matrix(PauliSum::single(1, Pauli::X), 1), oracle::pauli('X')) == 0.0);
  CHECK(maxdiff(dense_matrix(PauliSum::single(1, Pauli::Y), 1), oracle::pauli('Y')) == 0.0);
  CMat z2 = CMat::Zero(4, 4);
  z2.diagonal() << 1, -1, 1, -1;
  CHECK(maxdiff(dense_matrix(PauliSum::single(2, Pauli::Z), 2), z2) == 0.0);
  CHECK_THROWS(dense_matrix(PauliSum::single(1, Pauli::Z), 13));

  // [s_mu, s_nu] = 2i eps s_lambda exactly
  const CMat x = dense_matrix(PauliSum::single(1, Pauli::X), 2), y = dense_matrix(PauliSum::single(1, Pauli::Y), 2);
  const CMat z = dense_matrix(PauliSum::single(1, Pauli::Z), 2), x2 = dense_matrix(PauliSum::single(2, Pauli::X), 2);
  CHECK(maxdiff(x * y - y * x, cplx(0, 2) * z) == 0.0);
  CHECK(maxdiff(y * z - z * y, cplx(0, 2) * x) == 0.0);
  CHECK(maxdiff(x * x2 - x2 * x, CMat::Zero(4, 4)) == 0.0);
}

TEST_CASE("gates are unitary and norm is preserved") {
  std::mt19937_64 rng(8);
  StateVector s = random_state(4, 5);
  std::vector<Gate> gates;
  for (int k = 0; k < 200; ++k) {
    const int kind = k % 4;
    const double th = std::uniform_real_distribution<double>(-4, 4)(rng);
    const int q = 1 + k % 4;
    if (kind == 0) gates.push_back(Gate::rot(Axis::X, q, th));
    if (kind == 1) gates.push_back(Gate::rot(Axis::Y, q, th));
    if (kind == 2) gates.push_back(Gate::ising(q, 1 + (q % 4), th));
    if (kind == 3) gates.push_back(Gate::pauli_exp(random_string(rng, 4), th));
  }
  for (const auto& g : gates) {
    apply_gate(s, g);
  }
  CHECK(std::abs(s.norm() - 1.0) < 1e-10 * 200);
  for (int k = 0; k < 8; ++k) {
    const CMat u = dense_matrix(gates[k], 4);
    CHECK(maxdiff(u * u.adjoint(), CMat::Identity(16, 16)) < 1e-12);
  }
  const CMat prod = dense_matrix(std::vector<Gate>(gates.begin(), gates.begin() + 12), 4);
  CMat ref = CMat::Identity(16, 16);
  for (int k = 0; k < 12; ++k) ref = dense_matrix(gates[k], 4) * ref;
  CHECK(maxdiff(prod, ref) < 1e-12);
}

TEST_CASE("controlled gates act only on the selected branch") {
  std::mt19937_64 rng(10);
  const PauliString p = PauliString::parse("X1 Y2");
  const Gate g = Gate::pauli_exp(p, 0.7).controlled(3, Polarity::OnOne);
  const CMat u = dense_matrix(g, 3);
  const CMat inner = oracle::expm_hermitian(oracle::pauli_kron("XY"), 0.35);
  CMat p1 = CMat::Zero(2, 2), p0 = CMat::Zero(2, 2);
  p1(1, 1) = 1.0;
  p0(0, 0) = 1.0;
  const CMat ref = oracle::kron(inner, p1) + oracle::kron(CMat::Identity(4, 4), p0);
  CHECK(maxdiff(u, ref) < 1e-14);
  const CMat uph = dense_matrix(Gate::phase(0.3).controlled(1, Polarity::OnZero), 1);
  CHECK(std::abs(uph(0, 0) - std::exp(cplx(0, 0.3))) < 1e-15);
  CHECK(std::abs(uph(1, 1) - 1.0) < 1e-15);
  CHECK_THROWS(Gate::rot(Axis::X, 2, 0.1).controlled(2, Polarity::OnOne));
}

TEST_CASE("gate text format round-trips") {
  const std::vector<Gate> gates{Gate::rot(Axis::X, 1, 0.1), Gate::ising(2, 5, -1.0 / 3.0),
                                Gate::pauli_exp(PauliString::parse("X1 Y3 Z4"), kPi),
                                Gate::phase(0.25).controlled(6, Polarity::OnOne),
                                Gate::rot(Axis::Z, 2, 2.5).controlled(1, Polarity::OnZero)};
  for (const auto& g : gates) {
    const Gate back = Gate::from_text(g.to_text());
    CHECK(back.to_text() == g.to_text());
    CHECK(back.angle == g.angle);
  }
  CHECK_THROWS(Gate::from_text("rq 1 0.3"));
  CHECK_THROWS(Gate::from_text("rx 1"));
}

TEST_CASE("shot sampling is seeded and converges to the exact expectation") {
  StateVector s = new_register(2, 0);
  apply_rotation(s, Axis::Y, 1, 1.1);
  apply_rotation(s, Axis::X, 2, 0.4);
  const auto a = sample_shots(s, 1000, 42), b = sample_shots(s, 1000, 42);
  CHECK(a == b);
  const PauliString zz = PauliString::parse("Z1 Z2");
  const double est = sampled_expectation(s, zz, 200000, 7);
  CHECK(std::abs(est - expectation(s, zz).real()) < 0.01);
  const PauliString xy = PauliString::parse("X1 Y2");
  CHECK(std::abs(sampled_expectation(s, xy, 200000, 8) - expectation(s, xy).real()) < 0.01);
}
