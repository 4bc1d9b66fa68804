#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qmb/fermion.hpp"
#include "qmb/qprotocol.hpp"

using namespace qmb;

namespace {

StateVector from_vec(const CVec& v) {
  int n = 0;
  while ((Eigen::Index{1} << n) < v.size()) ++n;
  return StateVector(n, v);
}

Circuit dense_circuit(const CMat& u, int n) {
  Circuit c(n);
  std::vector<int> t;
  for (int q = 1; q <= n; ++q) t.push_back(q);
  c.add(Gate::dense(t, u));
  return c;
}

// Random real-coefficient Pauli sum and its Kronecker matrix.
struct RandomPauli {
  PauliSum sum;
  CMat dense;
};

RandomPauli random_pauli(int n, int terms, std::mt19937_64& rng) {
  const char* letters = "IXYZ";
  std::uniform_int_distribution<int> pick(0, 3);
  std::normal_distribution<double> g;
  RandomPauli r;
  r.dense = CMat::Zero(1 << n, 1 << n);
  for (int k = 0; k < terms; ++k) {
    std::string pat, label;
    for (int q = 1; q <= n; ++q) {
      const char c = letters[pick(rng)];
      pat += c;
      if (c != 'I') label += std::string(label.empty() ? "" : " ") + c + std::to_string(q);
    }
    const double c = g(rng);
    r.sum.add_term(PauliString::parse(label.empty() ? "I" : label), c);
    r.dense += c * oracle::pauli_kron(pat);
  }
  return r;
}

CMat fock_quadratic(const CMat& m, int n) {
  CMat h = CMat::Zero(1 << n, 1 << n);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j) != cplx(0, 0)) h += m(i, j) * oracle::fock_creation(i + 1, n) * oracle::fock_annihilation(j + 1, n);
  return h;
}

CVec vacuum(int n) {
  CVec v = CVec::Zero(1 << n);
  v[(1 << n) - 1] = 1.0;
  return v;
}

}  // namespace

TEST_CASE("one-ancilla correlation trivial cases") {
  const StateVector phi = new_register(1, 0);
  CHECK(std::abs(one_ancilla_correlation(phi, Circuit(1), Circuit(1)) - cplx(1, 0)) < 1e-12);
  const Circuit x = pauli_unitary(PauliString::parse("X1"), 1);
  CHECK(std::abs(one_ancilla_correlation(phi, Circuit(1), x)) < 1e-12);
  // <0|X^dag X|0> = 1
  CHECK(std::abs(one_ancilla_correlation(phi, x, x) - cplx(1, 0)) < 1e-12);
}

TEST_CASE("one-ancilla correlation equals phi U^dag V phi") {
  std::mt19937_64 rng(21);
  for (int n = 1; n <= 3; ++n)
    for (int rep = 0; rep < 5; ++rep) {
      const CMat u = oracle::random_unitary(1 << n, rng);
      const CMat v = oracle::random_unitary(1 << n, rng);
      const CVec phi = oracle::random_vector(1 << n, rng);
      const cplx expect = phi.dot(u.adjoint() * v * phi);
      const cplx got = one_ancilla_correlation(from_vec(phi), dense_circuit(u, n), dense_circuit(v, n));
      CHECK(std::abs(got - expect) < 1e-10);
    }
}

TEST_CASE("one-ancilla correlation from Pauli generators") {
  std::mt19937_64 rng(3);
  const RandomPauli a = random_pauli(3, 5, rng);
  const RandomPauli b = random_pauli(3, 4, rng);
  const CVec phi = oracle::random_vector(8, rng);
  const cplx expect = phi.dot(oracle::expm_hermitian(a.dense, 1.0).adjoint() * oracle::expm_hermitian(b.dense, 1.0) * phi);
  CHECK(std::abs(one_ancilla_correlation(from_vec(phi), a.sum, b.sum) - expect) < 1e-10);
  PauliSum bad = a.sum;
  bad.add_term(PauliString::parse("X1"), cplx(0, 0.5));
  CHECK_THROWS_AS(one_ancilla_correlation(from_vec(phi), bad, b.sum), std::invalid_argument);
}

TEST_CASE("time correlation against dense evaluation") {
  std::mt19937_64 rng(8);
  const RandomPauli h = random_pauli(3, 7, rng);
  const HamiltonianSpec spec = HamiltonianSpec::from_sum(h.sum, 3);
  const Circuit a = pauli_unitary(PauliString::parse("X1"), 3);
  const Circuit b = pauli_unitary(PauliString::parse("Y2"), 3);
  const CMat ad = oracle::pauli_kron("XII"), bd = oracle::pauli_kron("IYI");
  const CVec phi = oracle::random_vector(8, rng);
  for (double t : {0.0, 0.3, 1.7, 4.0}) {
    const CMat tt = oracle::expm_hermitian(h.dense, t);
    const cplx expect = phi.dot(tt.adjoint() * ad.adjoint() * tt * bd * phi);
    CHECK(std::abs(time_correlation(from_vec(phi), a, b, spec, t) - expect) < 1e-10);
  }
  // t = 0, A = B
  CHECK(std::abs(time_correlation(from_vec(phi), a, a, spec, 0.0) - cplx(1, 0)) < 1e-12);
}

TEST_CASE("time correlation rejects non-Hermitian H") {
  HamiltonianSpec spec;
  spec.n_qubits = 1;
  HamiltonianLayer l;
  l.terms.add_term(PauliString::parse("Z1"), cplx(1, 1));
  spec.layers.push_back(l);
  CHECK_THROWS_AS(time_correlation(new_register(1, 0), Circuit(1), Circuit(1), spec, 1.0), std::invalid_argument);
}

TEST_CASE("two-qubit impurity correlation matches the 2x2 closed form") {
  const double ek0 = -2, eps = -8, v = 4;
  PauliSum h;
  h.add_term(PauliString::parse("Z1"), eps / 2);
  h.add_term(PauliString::parse("Z2"), ek0 / 2);
  h.add_term(PauliString::parse("X1 X2"), v / 2);
  h.add_term(PauliString::parse("Y1 Y2"), v / 2);
  const HamiltonianSpec spec = HamiltonianSpec::from_sum(h, 2);
  // |1_1 0_2>: label 0b10
  const StateVector phi = new_register(2, 2);
  const Circuit x1 = pauli_unitary(PauliString::parse("X1"), 2);
  const double delta = (ek0 - eps) / 2, omega = std::hypot(delta, v), e = (eps + ek0) / 2;
  double worst = 0;
  for (int k = 0; k <= 100; ++k) {
    const double t = 0.1 * k;
    const cplx closed = std::exp(cplx(0, -e * t)) * cplx(std::cos(omega * t), std::sin(omega * t) * delta / omega);
    worst = std::max(worst, std::abs(time_correlation(phi, x1, x1, spec, t) - closed));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("spectrum series on an eigenstate and both circuit forms agree") {
  PauliSum q = PauliSum::single(1, Pauli::Z, 0.7);
  const TimeSeries s = spectrum_series(q, new_register(1, 0), 0.1, 20);
  CHECK(s.values.size() == 20);
  for (int j = 0; j < 20; ++j) CHECK(std::abs(s.values[j] - std::exp(cplx(0, -0.7 * 0.1 * (j + 1)))) < 1e-12);

  std::mt19937_64 rng(14);
  const RandomPauli r = random_pauli(3, 6, rng);
  const CVec phi = oracle::random_vector(8, rng);
  const TimeSeries a = spectrum_series(r.sum, from_vec(phi), 0.05, 40, SpectrumForm::Controlled);
  const TimeSeries b = spectrum_series(r.sum, from_vec(phi), 0.05, 40, SpectrumForm::Symmetric);
  for (int j = 0; j < 40; ++j) {
    const cplx expect = phi.dot(oracle::expm_hermitian(r.dense, 0.05 * (j + 1)) * phi);
    CHECK(std::abs(a.values[j] - expect) < 1e-10);
    CHECK(std::abs(b.values[j] - expect) < 1e-10);
  }
}

TEST_CASE("spectrum series grid validation") {
  PauliSum q = PauliSum::single(1, Pauli::Z);
  CHECK_NOTHROW(spectrum_series(q, new_register(1, 0), std::vector<double>{0.1, 0.2, 0.3}));
  CHECK_THROWS_AS(spectrum_series(q, new_register(1, 0), std::vector<double>{0.1, 0.25, 0.3}), std::invalid_argument);
  CHECK_THROWS_AS(spectrum_series(q, new_register(1, 0), 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(spectrum_series(q, new_register(1, 0), 0.1, 1), std::invalid_argument);
}

TEST_CASE("spectrum peaks sit on eigenvalues with nonzero overlap") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 3; ++rep) {
    const RandomPauli r = random_pauli(3, 4, rng);
    const CVec phi = oracle::random_vector(8, rng);
    Eigen::SelfAdjointEigenSolver<CMat> es(r.dense);
    const TimeSeries s = spectrum_series(r.sum, from_vec(phi), 0.1, 1024);
    const Spectrum sp = analyze(s);
    REQUIRE(!sp.peaks.empty());
    for (const auto& p : sp.peaks) {
      double best = 1e9;
      for (int k = 0; k < 8; ++k) {
        const double w = std::norm(es.eigenvectors().col(k).dot(phi));
        if (w > 1e-4) best = std::min(best, std::abs(es.eigenvalues()[k] - p.lambda));
      }
      CHECK(best < sp.bin_width());
    }
  }
}

TEST_CASE("trotter with commuting layers is exact") {
  HamiltonianSpec spec;
  spec.n_qubits = 2;
  HamiltonianLayer a, b;
  a.terms.add_term(PauliString::parse("Z1 Z2"), 0.8);
  a.terms.add_term(PauliString::parse("I"), 1.1);
  b.terms.add_term(PauliString::parse("X1 X2"), 0.5);
  b.terms.add_term(PauliString::parse("Y1 Y2"), 0.2);
  spec.layers = {a, b};
  const CMat hd = 0.8 * oracle::pauli_kron("ZZ") + 0.5 * oracle::pauli_kron("XX") + 0.2 * oracle::pauli_kron("YY") +
                  1.1 * oracle::pauli_kron("II");
  const Circuit c = trotter_evolve(spec, 1.3, 0.65);
  CHECK((dense_matrix(c) - oracle::expm_hermitian(hd, 1.3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(trotter_evolve(spec, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(trotter_evolve(spec, 1.0, 0.3), std::invalid_argument);
}

TEST_CASE("first-order trotter error scales linearly in dt") {
  PauliSum h;
  h.add_term(PauliString::parse("X1"), 1.0);
  h.add_term(PauliString::parse("Z1"), 1.0);
  const HamiltonianSpec spec = HamiltonianSpec::from_sum(h, 1);
  REQUIRE(spec.layers.size() == 2);
  const CMat exact = oracle::expm_hermitian(oracle::pauli('X') + oracle::pauli('Z'), 1.0);
  auto err = [&](double dt) { return (dense_matrix(trotter_evolve(spec, 1.0, dt)) - exact).norm(); };
  const double ratio = err(0.1) / err(0.05);
  CHECK(ratio > 1.9);
  CHECK(ratio < 2.1);

  // slope over a decade on a two-qubit non-commuting pair of layers
  PauliSum h2;
  h2.add_term(PauliString::parse("X1 X2"), 0.9);
  h2.add_term(PauliString::parse("Z1"), 0.6);
  h2.add_term(PauliString::parse("Z2"), -0.4);
  const HamiltonianSpec s2 = HamiltonianSpec::from_sum(h2, 2);
  const CMat ex2 = oracle::expm_hermitian(0.9 * oracle::pauli_kron("XX") + 0.6 * oracle::pauli_kron("ZI") - 0.4 * oracle::pauli_kron("IZ"), 2.0);
  std::vector<double> lx, ly;
  for (double dt : {0.2, 0.1, 0.05, 0.04, 0.02}) {
    lx.push_back(std::log(dt));
    ly.push_back(std::log((dense_matrix(trotter_evolve(s2, 2.0, dt)) - ex2).norm()));
  }
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) mx += lx[k] / lx.size(), my += ly[k] / ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) sxy += (lx[k] - mx) * (ly[k] - my), sxx += (lx[k] - mx) * (lx[k] - mx);
  CHECK(std::abs(sxy / sxx - 1.0) < 0.15);
}

TEST_CASE("hopping exponential splits into two commuting strings") {
  CMat m = CMat::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  const HamiltonianLayer l = HamiltonianSpec::one_body_layer("hop", m, 1, 2);
  CHECK(l.terms.size() == 2);
  CHECK(mutually_commuting(l.terms));
  CHECK(std::abs(l.terms.coefficient(PauliString::parse("X1 X2")) - cplx(0.5, 0)) < 1e-14);
  CHECK(std::abs(l.terms.coefficient(PauliString::parse("Y1 Y2")) - cplx(0.5, 0)) < 1e-14);
  const double dt = 0.37;
  const CMat hop = fock_quadratic(m, 2);
  // e^{i (c+_1 c_2 + h.c.) dt}
  const Circuit c = pauli_sum_exponential(l.terms, -dt, 2);
  CHECK(c.size() == 2);
  CHECK((dense_matrix(c) - oracle::expm_hermitian(hop, -dt)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("slater preparation") {
  const Circuit none = prepare_slater({}, 3);
  StateVector s = new_register(3, fermion_vacuum_label(3));
  run(s, none);
  CHECK(std::abs(s[7] - cplx(1, 0)) < 1e-14);

  StateVector f = new_register(2, fermion_vacuum_label(2));
  run(f, prepare_slater({2}, 2));
  CHECK(std::abs(std::abs(f[2]) - 1.0) < 1e-14);

  const int n = 4;
  StateVector p = new_register(n, fermion_vacuum_label(n));
  run(p, prepare_slater({1, 3}, n));
  for (int m = 1; m <= n; ++m) {
    const double occ = p.amplitudes().dot(oracle::fock_number(m, n) * p.amplitudes()).real();
    CHECK(std::abs(occ - ((m == 1 || m == 3) ? 1.0 : 0.0)) < 1e-12);
  }
  const CVec ref = oracle::fock_creation(3, n) * oracle::fock_creation(1, n) * vacuum(n);
  CHECK(equal_up_to_phase(ref, p.amplitudes(), 1e-12));
  CHECK_THROWS_AS(prepare_slater({1, 1}, 3), std::invalid_argument);
  CHECK_THROWS_AS(prepare_slater({4}, 3), std::invalid_argument);
}

TEST_CASE("thouless rotation") {
  CHECK(thouless_rotate(CMat::Zero(3, 3), 1, 3).size() == 0);

  CMat d = CMat::Zero(3, 3);
  d(0, 0) = 0.4;
  d(2, 2) = -1.1;
  const Circuit dc = thouless_rotate(d, 1, 3);
  for (const auto& g : dc.gates) CHECK(g.kind == GateKind::RotZ);
  CHECK((dense_matrix(dc) - oracle::expm_hermitian(fock_quadratic(d, 3), 1.0)).cwiseAbs().maxCoeff() < 1e-12);

  // exact many-body image for random complex Mbar
  std::mt19937_64 rng(17);
  for (int n : {2, 3, 4}) {
    const CMat mb = oracle::random_hermitian(n, rng);
    const CMat ref = oracle::expm_hermitian(fock_quadratic(mb, n), 1.0);
    CHECK((dense_matrix(thouless_rotate(mb, 1, n)) - ref).cwiseAbs().maxCoeff() < 1e-10);
    const Circuit tr = thouless_rotate(mb, 1, n, ThoulessMethod::Trotter, 400);
    CHECK((dense_matrix(tr) - ref).cwiseAbs().maxCoeff() < 2e-2);
  }

  // offset block inside a wider register
  const CMat mb = oracle::random_hermitian(2, rng);
  CMat wide = CMat::Zero(4, 4);
  wide.block(1, 1, 2, 2) = mb;
  CHECK((dense_matrix(thouless_rotate(mb, 2, 4)) - oracle::expm_hermitian(fock_quadratic(wide, 4), 1.0)).cwiseAbs().maxCoeff() < 1e-10);

  CMat bad = CMat::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(thouless_rotate(bad, 1, 2), std::invalid_argument);
}

TEST_CASE("thouless rotation one-body density matrix") {
  // real symmetric two-mode rotation from |occupied, empty>
  CMat mb(2, 2);
  mb << 0.3, 0.8, 0.8, -0.2;
  StateVector s = new_register(2, 0b01);
  run(s, thouless_rotate(mb, 1, 2));
  CMat dmat = CMat::Zero(2, 2);
  dmat(0, 0) = 1.0;
  const CMat lit = oracle::expm_hermitian(mb, -1.0) * dmat * oracle::expm_hermitian(mb, 1.0);
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) {
      const cplx rho = s.amplitudes().dot(oracle::fock_creation(i, 2) * oracle::fock_annihilation(j, 2) * s.amplitudes());
      CHECK(std::abs(rho - lit(i - 1, j - 1)) < 1e-12);
    }

  // complex Mbar: <c+_i c_j> = (e^{-iM} D e^{iM})_{ji}
  std::mt19937_64 rng(2);
  const CMat mc = oracle::random_hermitian(3, rng);
  StateVector s3 = new_register(3, 0b010);
  run(s3, thouless_rotate(mc, 1, 3));
  CMat d3 = CMat::Zero(3, 3);
  d3(0, 0) = d3(2, 2) = 1.0;
  const CMat tr = oracle::expm_hermitian(mc, 1.0) * d3 * oracle::expm_hermitian(mc, -1.0);
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      const cplx rho = s3.amplitudes().dot(oracle::fock_creation(i, 3) * oracle::fock_annihilation(j, 3) * s3.amplitudes());
      CHECK(std::abs(rho - tr(j - 1, i - 1)) < 1e-12);
    }
}

TEST_CASE("controlled exponential") {
  std::mt19937_64 rng(41);
  const RandomPauli q = random_pauli(2, 5, rng);
  PauliSum qc;
  qc.add_term(PauliString::parse("Z1 Z2"), 0.7);
  qc.add_term(PauliString::parse("Z1"), -0.4);
  qc.add_term(PauliString::parse("I"), 0.3);
  const CMat qcd = 0.7 * oracle::pauli_kron("ZZ") - 0.4 * oracle::pauli_kron("ZI") + 0.3 * oracle::pauli_kron("II");
  const CVec phi = oracle::random_vector(4, rng);
  for (ControlForm form : {ControlForm::Conditioned, ControlForm::Symmetric})
    for (const auto& [op, od] : std::vector<std::pair<PauliSum, CMat>>{{q.sum, q.dense}, {qc, qcd}}) {
      const double t = 0.83;
      const CMat ut = oracle::expm_hermitian(od, t);
      for (Polarity pol : {Polarity::OnOne, Polarity::OnZero}) {
        const Circuit c = controlled_exponential(op, t, 3, pol, 3, form);
        for (int a = 0; a <= 1; ++a) {
          const CVec in = oracle::kron(phi, a ? CVec::Unit(2, 1) : CVec::Unit(2, 0));
          StateVector s(3, in);
          run(s, c);
          const bool active = (a == 1) == (pol == Polarity::OnOne);
          const CVec sys = active ? CVec(ut * phi) : phi;
          CHECK((s.amplitudes() - oracle::kron(sys, a ? CVec::Unit(2, 1) : CVec::Unit(2, 0))).norm() < 1e-10);
        }
      }
      const Circuit zero = controlled_exponential(op, 0.0, 3, Polarity::OnOne, 3, form);
      CHECK((dense_matrix(zero) - CMat::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
    }
  // compile-to-elementary path for a commuting generator
  const Circuit sym = controlled_exponential(qc, 0.6, 3, Polarity::OnOne, 3, ControlForm::Symmetric);
  const Circuit el = compile_elementary(sym);
  for (const auto& g : el.gates) CHECK(g.kind != GateKind::PauliStringExp);
  CHECK((dense_matrix(el) - dense_matrix(sym)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(compile_elementary(controlled_exponential(qc, 0.6, 3, Polarity::OnOne, 3)), std::invalid_argument);
}

TEST_CASE("circuit text round trip, inverse and validation") {
  std::mt19937_64 rng(4);
  Circuit c = thouless_rotate(oracle::random_hermitian(3, rng), 1, 3);
  c.add(Gate::dense({2, 3}, oracle::random_unitary(4, rng)).controlled(1, Polarity::OnZero));
  const Circuit r = Circuit::from_text(c.to_text());
  CHECK(r.size() == c.size());
  CHECK((dense_matrix(r) - dense_matrix(c)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((dense_matrix(c.inverse()) * dense_matrix(c) - CMat::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
  Circuit bad(2);
  bad.add(Gate::rot(Axis::X, 3, 0.1));
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(Circuit::from_text("circuit 2 0 0\nrx 5 0.1\n"), std::invalid_argument);
}

TEST_CASE("hamiltonian spec layering") {
  std::mt19937_64 rng(9);
  const RandomPauli r = random_pauli(3, 10, rng);
  const HamiltonianSpec spec = HamiltonianSpec::from_sum(r.sum, 3);
  CHECK_NOTHROW(spec.validate());
  CHECK(distance(spec.total(), r.sum) < 1e-14);
  for (const auto& l : spec.layers) CHECK(mutually_commuting(l.terms));
  HamiltonianSpec bad;
  bad.n_qubits = 1;
  HamiltonianLayer l;
  l.terms = PauliSum::single(1, Pauli::X) + PauliSum::single(1, Pauli::Z);
  bad.layers.push_back(l);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("two-branch superposition succeeds with probability 1/L") {
  // orthogonal branches: two different Slater determinants on 4 modes
  const int n = 4;
  const StateVector vac = new_register(n, fermion_vacuum_label(n));
  const std::vector<Circuit> br = {prepare_slater({1, 2}, n), prepare_slater({3, 4}, n)};
  const std::vector<cplx> alpha = {cplx(0.6, 0), cplx(0, 0.8)};
  const PostSelected ps = prepare_linear_combination(vac, br, alpha);
  CHECK(ps.n_ancillas == 1);
  CHECK(std::abs(ps.success_probability - 0.5) < 1e-12);
  CVec b0 = vac.amplitudes(), b1 = vac.amplitudes();
  {
    StateVector s0 = vac, s1 = vac;
    run(s0, br[0]);
    run(s1, br[1]);
    b0 = s0.amplitudes();
    b1 = s1.amplitudes();
  }
  const CVec ref = (alpha[0] * b0 + alpha[1] * b1).normalized();
  CHECK(std::abs(std::abs(ref.dot(ps.state.amplitudes())) - 1.0) < 1e-12);

  // L = 3 uses two ancillas; orthogonal branches still give 1/3
  const std::vector<Circuit> br3 = {prepare_slater({1}, n), prepare_slater({2}, n), prepare_slater({4}, n)};
  const PostSelected p3 = prepare_linear_combination(vac, br3, {1.0, 1.0, 1.0});
  CHECK(p3.n_ancillas == 2);
  CHECK(std::abs(p3.success_probability - 1.0 / 3.0) < 1e-12);
  CHECK_THROWS_AS(prepare_linear_combination(vac, std::vector<Circuit>(65, Circuit(n)), std::vector<cplx>(65, 1.0)),
                  std::invalid_argument);
}
