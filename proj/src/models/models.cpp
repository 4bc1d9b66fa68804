#include "qmb/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qmb/fermion.hpp"

namespace qmb {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

// ------------------------------------------------------------ Fano-Anderson

FanoAnderson FanoAnderson::single_mode(double ek0, double eps, double v) {
  FanoAnderson m;
  m.n = 1;
  m.tau = -ek0 / 2;
  m.eps = eps;
  m.v = v;
  return m;
}

double FanoAnderson::ek(int l) const {
  if (l < 0 || l >= n) throw std::out_of_range("fano: mode index outside 0..n-1");
  return -2 * tau * std::cos(2 * kPi * l / n);
}

void FanoAnderson::validate() const {
  if (n < 1) throw std::invalid_argument("fano: n must be positive");
  if (n + 2 > kMaxRegisterQubits) throw std::invalid_argument("fano: too many sites");
  require_finite(tau, "fano: tau");
  require_finite(v, "fano: V");
  require_finite(eps, "fano: eps");
}

PauliSum fano_hamiltonian(const FanoAnderson& m) {
  m.validate();
  FermionExpr h = m.eps * FermionExpr::number(1);
  for (int l = 0; l < m.n; ++l) h += m.ek(l) * FermionExpr::number(l + 2);
  h += m.v * FermionExpr::product({cdag(2), cann(1)});
  h += m.v * FermionExpr::product({cdag(1), cann(2)});
  PauliSum out = jordan_wigner(h, m.n_qubits());
  out.prune();
  return out;
}

HamiltonianSpec fano_spec(const FanoAnderson& m) { return HamiltonianSpec::from_sum(fano_hamiltonian(m), m.n_qubits()); }

std::uint64_t fano_initial_label(const FanoAnderson& m) {
  m.validate();
  const int n = m.n_qubits();
  return fermion_vacuum_label(n) & ~label_bit(n, 2);
}

std::array<double, 2> fano_one_particle_levels(const FanoAnderson& m) {
  m.validate();
  if (m.n != 1) throw std::invalid_argument("fano: closed form needs n = 1");
  const double ek0 = m.ek(0), mean = (m.eps + ek0) / 2, omega = std::hypot((ek0 - m.eps) / 2, m.v);
  return {mean - omega, mean + omega};
}

cplx fano_correlation_closed(const FanoAnderson& m, double t) {
  m.validate();
  if (m.n != 1) throw std::invalid_argument("fano: closed form needs n = 1");
  const double ek0 = m.ek(0), d = (ek0 - m.eps) / 2, omega = std::hypot(d, m.v);
  // the doubly occupied state only picks up a phase
  const cplx pair = std::exp(cplx(0, -(m.eps + ek0) * t / 2));
  const double s = omega > 0 ? std::sin(omega * t) / omega : t;
  return pair * cplx(std::cos(omega * t), d * s);
}

cplx fano_correlation_circuit(const FanoAnderson& m, double t, const EvolutionOptions& opt) {
  const int n = m.n_qubits();
  const StateVector phi = new_register(n, fano_initial_label(m));
  const Circuit x1 = pauli_unitary(PauliString::single(1, Pauli::X), n);
  return time_correlation(phi, x1, x1, fano_spec(m), t, opt);
}

TimeSeries fano_spectrum_series(const FanoAnderson& m, double dt, int M) {
  return spectrum_series(fano_hamiltonian(m), new_register(m.n_qubits(), fano_initial_label(m)), dt, M);
}

// ------------------------------------------------------------------ Hubbard

void Hubbard2D::validate() const {
  if (nx < 1 || ny < 1) throw std::invalid_argument("hubbard: lattice dimensions must be positive");
  if (sites() > kMaxHubbardSites)
    throw std::invalid_argument("hubbard: at most " + std::to_string(kMaxHubbardSites) + " sites (17 qubits with ancilla)");
  require_finite(tx, "hubbard: t_x");
  require_finite(ty, "hubbard: t_y");
  require_finite(u, "hubbard: U");
}

int hubbard_mode(const Hubbard2D& m, int i, int j, int spin) {
  if (spin != 0 && spin != 1) throw std::invalid_argument("hubbard: spin index must be 0 (up) or 1 (down)");
  return mode_reindex_2d(j, i, m.nx, m.ny) + spin * m.sites();
}

RMat hubbard_hopping_matrix(const Hubbard2D& m) {
  m.validate();
  const int L = m.sites();
  RMat t = RMat::Zero(L, L);
  auto bond = [&](int a, int b, double hop) {
    t(a - 1, b - 1) -= hop;
    t(b - 1, a - 1) -= hop;
  };
  for (int j = 1; j <= m.ny; ++j)
    for (int i = 1; i <= m.nx; ++i) {
      const int a = hubbard_mode(m, i, j, 0);
      if (m.nx > 1) bond(a, hubbard_mode(m, i % m.nx + 1, j, 0), m.tx);
      if (m.ny > 1) bond(a, hubbard_mode(m, i, j % m.ny + 1, 0), m.ty);
    }
  return t;
}

HubbardHamiltonian hubbard_hamiltonian(const Hubbard2D& m) {
  const RMat t = hubbard_hopping_matrix(m);
  const int L = m.sites(), n = m.modes();
  CMat both = CMat::Zero(n, n);
  both.topLeftCorner(L, L) = t.cast<cplx>();
  both.bottomRightCorner(L, L) = t.cast<cplx>();
  FermionExpr v;
  for (int a = 1; a <= L; ++a) v += m.u * FermionExpr::product({cdag(a), cann(a), cdag(a + L), cann(a + L)});

  HubbardHamiltonian out;
  out.h = jordan_wigner(FermionExpr::quadratic(both) + v, n);
  out.h.prune();
  out.spec.n_qubits = n;
  out.spec.layers.push_back(HamiltonianSpec::one_body_layer("K_up", t.cast<cplx>(), 1, n));
  out.spec.layers.push_back(HamiltonianSpec::one_body_layer("K_down", t.cast<cplx>(), L + 1, n));
  HamiltonianLayer lv;
  lv.name = "V";
  lv.terms = jordan_wigner(v, n);
  lv.terms.prune();
  out.spec.layers.push_back(lv);
  out.spec.validate();
  return out;
}

CMat hubbard_orbitals(const Hubbard2D& m, double tie_break) {
  const RMat t = hubbard_hopping_matrix(m);
  RMat shifted = t;
  for (int a = 0; a < m.sites(); ++a) shifted(a, a) += tie_break * (a + 1);
  Eigen::SelfAdjointEigenSolver<RMat> es(shifted);
  return es.eigenvectors().cast<cplx>();
}

Circuit hubbard_mf_circuit(const Hubbard2D& m, int n_up, int n_down, double tie_break) {
  m.validate();
  const int L = m.sites(), n = m.modes();
  if (n_up < 0 || n_up > L || n_down < 0 || n_down > L) throw std::invalid_argument("hubbard: filling outside 0..sites");
  std::vector<int> modes;
  for (int a = 1; a <= n_up; ++a) modes.push_back(a);
  for (int a = 1; a <= n_down; ++a) modes.push_back(L + a);
  const CMat u = hubbard_orbitals(m, tie_break);
  Circuit c = prepare_slater(modes, n);
  c.append(givens_circuit(u, 1, n));
  c.append(givens_circuit(u, L + 1, n));
  return c;
}

StateVector hubbard_mf_state(const Hubbard2D& m, int n_up, int n_down, double tie_break) {
  const Circuit c = hubbard_mf_circuit(m, n_up, n_down, tie_break);
  StateVector s = new_register(m.modes(), fermion_vacuum_label(m.modes()));
  run(s, c);
  return s;
}

TimeSeries hubbard_spectrum_series(const Hubbard2D& m, const StateVector& phi, double dt, int M, int steps_per_sample) {
  if (phi.n_qubits() != m.modes()) throw std::invalid_argument("hubbard: state must live on the 2 N_x N_y mode qubits");
  return spectrum_series_trotter(hubbard_hamiltonian(m).spec, phi, dt, M, steps_per_sample);
}

// ----------------------------------------------------------------- XY chain

void XYChain::validate() const {
  if (n < 2 || n % 2) throw std::invalid_argument("xy: N must be even and at least 2");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("xy: gamma must lie in (0, 1]");
}

XYSolution xy_exact(const XYChain& m, double g) {
  m.validate();
  if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("xy: g must be finite and non-negative");
  XYSolution s;
  double sum = 0.0;
  s.gap = INFINITY;
  for (int q = -(m.n - 1); q <= m.n - 1; q += 2) {
    const double k = kPi * q / m.n;
    const double a = -1 + 2 * g * std::cos(k), b = 2 * g * m.gamma * std::sin(k);
    // tan phi = b/a with phi -> 0 as g -> 0 (no quasiparticles = no fermions)
    const double phi = std::atan2(-b, -a);
    const double v2 = std::pow(std::sin(phi / 2), 2);
    const double xi = 2 * std::hypot(a, b);
    s.k.push_back(k);
    s.phi.push_back(phi);
    s.xi.push_back(xi);
    s.v2.push_back(v2);
    s.gap = std::min(s.gap, xi);
    sum += (v2 - 0.5) * (v2 - 0.5);
  }
  s.purity = 4.0 * sum / m.n;
  s.shifted = s.purity - 1.0 / (1.0 + m.gamma);
  return s;
}

double xy_purity_thermodynamic(double gamma, double g) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("xy: gamma must lie in (0, 1]");
  if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("xy: g must be finite and non-negative");
  if (g > 0.5) return 1.0 / (1.0 + gamma);
  // [1 - gamma^2/s]/(1 - gamma^2) rewritten to stay finite at gamma = 1
  const double s = std::sqrt(1 - 4 * g * g * (1 - gamma * gamma));
  return (1 - 4 * g * g / (1 + s)) / s;
}

double xy_number_fluctuation(const XYChain& m, double g) {
  const XYSolution s = xy_exact(m, g);
  double var = 0.0;
  for (std::size_t i = 0; i < s.k.size(); ++i)
    if (s.k[i] > 0) var += 4 * s.v2[i] * (1 - s.v2[i]);
  return 2.0 * var / m.n;
}

// ---------------------------------------------------------------------- LMG

void LMG::validate() const {
  if (n < 1 || n > kMaxLmgParticles)
    throw std::invalid_argument("lmg: N must lie in 1.." + std::to_string(kMaxLmgParticles));
  require_finite(v, "lmg: V");
  require_finite(w, "lmg: W");
}

namespace {

struct Tridiagonal {
  std::vector<double> m;
  RVec diag, sub;
};

Tridiagonal lmg_tridiagonal(const LMG& mod, int parity) {
  mod.validate();
  if (parity != 0 && parity != 1) throw std::invalid_argument("lmg: parity must be 0 or 1");
  const double J = mod.n / 2.0, jj = J * (J + 1), N = mod.n;
  Tridiagonal t;
  for (int a = parity; a <= mod.n; a += 2) t.m.push_back(a - J);
  const int d = static_cast<int>(t.m.size());
  t.diag.resize(d);
  t.sub = RVec::Zero(std::max(0, d - 1));
  for (int i = 0; i < d; ++i) {
    const double mz = t.m[i];
    t.diag[i] = mz + mod.w / N * (jj - mz * mz);
    if (i + 1 < d) t.sub[i] = mod.v / (2 * N) * std::sqrt((jj - mz * (mz + 1)) * (jj - (mz + 1) * (mz + 2)));
  }
  return t;
}

// (T - sigma) x = b for T - sigma positive definite
RVec solve_shifted(const Tridiagonal& t, double sigma, const RVec& b) {
  const int d = static_cast<int>(t.diag.size());
  RVec c(d), x(d), y(d);
  double piv = t.diag[0] - sigma;
  y[0] = b[0] / piv;
  for (int i = 1; i < d; ++i) {
    c[i - 1] = t.sub[i - 1] / piv;
    piv = t.diag[i] - sigma - t.sub[i - 1] * c[i - 1];
    y[i] = (b[i] - t.sub[i - 1] * y[i - 1]) / piv;
  }
  x[d - 1] = y[d - 1];
  for (int i = d - 2; i >= 0; --i) x[i] = y[i] - c[i] * x[i + 1];
  return x;
}

}  // namespace

RMat lmg_matrix(const LMG& m) {
  m.validate();
  if (m.n > 400) throw std::invalid_argument("lmg: dense matrix limited to N <= 400");
  RMat h = RMat::Zero(m.n + 1, m.n + 1);
  for (int p = 0; p < 2 && p <= m.n; ++p) {
    const Tridiagonal t = lmg_tridiagonal(m, p);
    for (int i = 0; i < t.diag.size(); ++i) {
      const int a = p + 2 * i;
      h(a, a) = t.diag[i];
      if (i + 1 < t.diag.size()) h(a, a + 2) = h(a + 2, a) = t.sub[i];
    }
  }
  return h;
}

LMGSector lmg_sector(const LMG& mod, int parity) {
  const Tridiagonal t = lmg_tridiagonal(mod, parity);
  const int d = static_cast<int>(t.diag.size());
  LMGSector s;
  s.parity = parity;
  s.m = t.m;
  if (d == 1 || t.sub.cwiseAbs().maxCoeff() == 0.0) {
    Eigen::Index i0;
    t.diag.minCoeff(&i0);
    s.vector = RVec::Unit(d, i0);
  } else {
    Eigen::SelfAdjointEigenSolver<RMat> es;
    es.computeFromTridiagonal(t.diag, t.sub, Eigen::EigenvaluesOnly);
    const double lam = es.eigenvalues()[0];
    const double scale = std::max({1.0, t.diag.cwiseAbs().maxCoeff(), t.sub.cwiseAbs().maxCoeff()});
    const double sigma = lam - 1e-9 * scale;
    RVec x = RVec::Ones(d).normalized();
    for (int it = 0; it < 8; ++it) x = solve_shifted(t, sigma, x).normalized();
    s.vector = x;
  }
  const RVec& x = s.vector;
  double e = 0.0, jz = 0.0;
  for (int i = 0; i < d; ++i) {
    e += t.diag[i] * x[i] * x[i];
    if (i + 1 < d) e += 2 * t.sub[i] * x[i] * x[i + 1];
    jz += t.m[i] * x[i] * x[i];
  }
  s.energy = e;
  s.jz = jz;
  return s;
}

LMGClassical lmg_classical(const LMG& m) {
  m.validate();
  const double j = 0.5, delta = m.delta();
  LMGClassical c;
  const double ct = delta > 1 ? -1 / delta : -1.0;
  c.theta = std::acos(ct);
  // cos 2phi = -sign(V) makes the V term as negative as possible
  c.phi = m.v > 0 ? kPi / 2 : 0.0;
  const double s2 = 1 - ct * ct;
  c.energy = j * ct + m.v * j * j * s2 * std::cos(2 * c.phi) + m.w * j * j * s2;
  c.purity = ct * ct;
  return c;
}

LMGSolution lmg_exact(const LMG& m) {
  LMGSector best = lmg_sector(m, 0);
  if (m.n >= 1) {
    const LMGSector odd = lmg_sector(m, 1);
    const double scale = std::max(1.0, std::abs(best.energy));
    if (odd.energy < best.energy - 1e-12 * scale) best = odd;
  }
  LMGSolution s;
  s.energy_per_particle = best.energy / m.n;
  s.jz = best.jz;
  s.n_up = 0.5 + best.jz / m.n;
  s.purity = std::pow(2 * best.jz / m.n, 2);
  s.parity = best.parity;
  s.classical = lmg_classical(m);
  return s;
}

}  // namespace qmb
