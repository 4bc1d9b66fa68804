#include "qmb/qprotocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qmb/fermion.hpp"

namespace qmb {

namespace {

void require_hermitian(const PauliSum& h, const char* what) {
  if (!h.is_hermitian()) throw std::invalid_argument(std::string(what) + ": operator is not Hermitian");
}

void require_hermitian(const CMat& m, const char* what) {
  if (m.rows() != m.cols() || (m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
}

std::vector<int> range_targets(int first, int last) {
  std::vector<int> t;
  for (int q = first; q <= last; ++q) t.push_back(q);
  return t;
}

// Unitary whose first column is v (|v| = 1).
CMat complete_unitary(const CVec& v) {
  const CMat col = v;
  Eigen::HouseholderQR<CMat> qr(col);
  CMat q = qr.householderQ() * CMat::Identity(v.size(), v.size());
  const cplx ph = q.col(0).dot(v);
  q.col(0) *= ph / std::abs(ph);
  return q;
}

// exp(-i c+ h c) on adjacent modes realizing the 2x2 unitary w = e^{-ih}.
// Uses w = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta).
void append_two_mode(Circuit& c, const Eigen::Matrix2cd& w, int qp, int qq) {
  const cplx det = w.determinant();
  const double alpha = std::arg(det) / 2.0;
  const Eigen::Matrix2cd v = w * std::exp(cplx(0, -alpha));
  const cplx a = v(0, 0), b = v(1, 0);
  const double gamma = 2.0 * std::atan2(std::abs(b), std::abs(a));
  const double sum = std::abs(a) > 1e-14 ? -2.0 * std::arg(a) : 0.0;
  const double diff = std::abs(b) > 1e-14 ? 2.0 * std::arg(b) : 0.0;
  const double beta = (sum + diff) / 2.0;
  const double delta = (sum - diff) / 2.0;
  auto rz_pair = [&](double ang) {
    if (ang == 0.0) return;
    c.add(Gate::rot(Axis::Z, qp, ang / 2.0));
    c.add(Gate::rot(Axis::Z, qq, -ang / 2.0));
  };
  rz_pair(delta);
  if (gamma != 0.0) {
    PauliString xy, yx;
    xy.set(qp, Pauli::X);
    xy.set(qq, Pauli::Y);
    yx.set(qp, Pauli::Y);
    yx.set(qq, Pauli::X);
    c.add(Gate::pauli_exp(xy, -gamma / 2.0));
    c.add(Gate::pauli_exp(yx, gamma / 2.0));
  }
  rz_pair(beta);
  if (alpha != 0.0) {
    c.add(Gate::rot(Axis::Z, qp, -alpha));
    c.add(Gate::rot(Axis::Z, qq, -alpha));
    c.global_phase += alpha;
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

StateVector with_plus_ancilla(const StateVector& phi) {
  const int n = phi.n_qubits();
  if (n + 1 > kMaxRegisterQubits) throw std::invalid_argument("register too large for an extra ancilla");
  CVec amps = CVec::Zero(static_cast<Eigen::Index>(phi.dim() * 2));
  for (std::size_t i = 0; i < phi.dim(); ++i) amps[static_cast<Eigen::Index>(2 * i)] = phi[i];
  StateVector s(n + 1, std::move(amps));
  apply_rotation(s, Axis::Y, n + 1, kPi / 2.0);
  return s;
}

struct DenseExp {
  Eigen::SelfAdjointEigenSolver<CMat> es;
  explicit DenseExp(const CMat& h) : es(h) {}
  CMat at(double t) const {
    const CVec ph = (es.eigenvalues().cast<cplx>() * cplx(0, -t)).array().exp();
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  }
};

// Block matrix with the ancilla as least significant local index.
CMat ancilla_blocks(const CMat& on0, const CMat& on1) {
  const Eigen::Index d = on0.rows();
  CMat m = CMat::Zero(2 * d, 2 * d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) {
      m(2 * r, 2 * c) = on0(r, c);
      m(2 * r + 1, 2 * c + 1) = on1(r, c);
    }
  return m;
}

void check_grid(double dt, int M) {
  if (!(dt > 0.0)) throw std::invalid_argument("time grid: dt must be positive");
  if (M < 2) throw std::invalid_argument("time grid: need M >= 2 samples");
}

}  // namespace

// ---------------------------------------------------------------- Circuit

void Circuit::append(const Circuit& other) {
  gates.insert(gates.end(), other.gates.begin(), other.gates.end());
  global_phase += other.global_phase;
  n_qubits = std::max(n_qubits, other.n_qubits);
}

Circuit Circuit::inverse() const {
  Circuit c(n_qubits, ancilla);
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) c.gates.push_back(it->inverse());
  c.global_phase = -global_phase;
  return c;
}

Circuit Circuit::controlled(int ctrl, Polarity pol) const {
  Circuit c(n_qubits, ancilla);
  c.gates.reserve(gates.size() + 1);
  for (const auto& g : gates) c.gates.push_back(g.controlled(ctrl, pol));
  if (global_phase != 0.0) c.gates.push_back(Gate::phase(global_phase).controlled(ctrl, pol));
  if (pol == Polarity::None) c.global_phase = global_phase;
  return c;
}

void Circuit::validate() const {
  if (n_qubits < 1 || n_qubits > kMaxRegisterQubits) throw std::invalid_argument("circuit: bad qubit count");
  if (ancilla < 0 || ancilla > n_qubits) throw std::invalid_argument("circuit: ancilla outside register");
  for (const auto& g : gates) {
    if (g.max_qubit() > n_qubits) throw std::invalid_argument("circuit: gate acts outside register");
    for (int t : g.targets)
      if (t < 1) throw std::invalid_argument("circuit: qubit indices are 1-based");
  }
}

std::string Circuit::to_text() const {
  std::string out = "circuit " + std::to_string(n_qubits) + " " + std::to_string(ancilla) + " " + fmt(global_phase) + "\n";
  for (const auto& g : gates) out += g.to_text() + "\n";
  return out;
}

Circuit Circuit::from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line, tok;
  if (!std::getline(in, line)) throw std::invalid_argument("circuit text: empty");
  std::istringstream head(line);
  Circuit c;
  if (!(head >> tok >> c.n_qubits >> c.ancilla >> c.global_phase) || tok != "circuit")
    throw std::invalid_argument("circuit text: bad header");
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    c.gates.push_back(Gate::from_text(line));
  }
  c.validate();
  return c;
}

void run(StateVector& s, const Circuit& c) {
  if (c.n_qubits > s.n_qubits()) throw std::invalid_argument("circuit wider than register");
  apply_gates(s, c.gates);
  if (c.global_phase != 0.0) s.amplitudes() *= std::polar(1.0, c.global_phase);
}

CMat dense_matrix(const Circuit& c) { return dense_matrix(c.gates, c.n_qubits) * std::polar(1.0, c.global_phase); }

// -------------------------------------------------------- HamiltonianSpec

PauliSum HamiltonianSpec::total() const {
  PauliSum h;
  for (const auto& l : layers) h += l.terms;
  h.prune();
  return h;
}

void HamiltonianSpec::validate() const {
  if (n_qubits < 1 || n_qubits > kMaxRegisterQubits) throw std::invalid_argument("hamiltonian: bad qubit count");
  for (const auto& l : layers) {
    require_hermitian(l.terms, "hamiltonian layer");
    if (l.terms.max_qubit() > n_qubits) throw std::invalid_argument("hamiltonian layer acts outside register");
    if (l.one_body) {
      require_hermitian(*l.one_body, "one-body layer");
      const HamiltonianLayer ref = one_body_layer(l.name, *l.one_body, l.first_mode, n_qubits);
      if (distance(ref.terms, l.terms) > 1e-12) throw std::invalid_argument("one-body layer terms do not match its matrix");
    } else if (!mutually_commuting(l.terms)) {
      throw std::invalid_argument("hamiltonian layer '" + l.name + "' has non-commuting terms");
    }
  }
}

HamiltonianSpec HamiltonianSpec::from_sum(const PauliSum& h, int n_qubits) {
  require_hermitian(h, "hamiltonian");
  HamiltonianSpec spec;
  spec.n_qubits = n_qubits;
  for (const auto& [s, c] : h.terms()) {
    bool placed = false;
    for (auto& l : spec.layers) {
      bool ok = true;
      for (const auto& [s2, c2] : l.terms.terms())
        if (!commutes(s, s2)) {
          ok = false;
          break;
        }
      if (ok) {
        l.terms.add_term(s, c);
        placed = true;
        break;
      }
    }
    if (!placed) {
      HamiltonianLayer l;
      l.name = "layer" + std::to_string(spec.layers.size() + 1);
      l.terms.add_term(s, c);
      spec.layers.push_back(l);
    }
  }
  return spec;
}

HamiltonianLayer HamiltonianSpec::one_body_layer(const std::string& name, const CMat& m, int first_mode, int n_qubits) {
  require_hermitian(m, "one-body layer");
  const int last = first_mode + static_cast<int>(m.rows()) - 1;
  if (first_mode < 1 || last > n_qubits) throw std::invalid_argument("one-body layer modes outside register");
  CMat padded = CMat::Zero(last, last);
  padded.bottomRightCorner(m.rows(), m.cols()) = m;
  HamiltonianLayer l;
  l.name = name;
  l.terms = jordan_wigner(FermionExpr::quadratic(padded), n_qubits);
  l.terms.prune();
  l.one_body = m;
  l.first_mode = first_mode;
  return l;
}

// ----------------------------------------------------------- exponentials

CMat expm_hermitian(const CMat& h, double t) { return DenseExp(h).at(t); }

Circuit pauli_sum_exponential(const PauliSum& layer, double t, int n_qubits) {
  require_hermitian(layer, "exponential");
  if (!mutually_commuting(layer)) throw std::invalid_argument("exponential: terms do not commute");
  if (layer.max_qubit() > n_qubits) throw std::invalid_argument("exponential: operator wider than register");
  Circuit c(n_qubits);
  for (const auto& [s, coef] : layer.terms()) {
    const double a = coef.real();
    if (s.is_identity())
      c.global_phase -= a * t;
    else
      c.add(Gate::pauli_exp(s, 2.0 * a * t));
  }
  return c;
}

Circuit layer_exponential(const HamiltonianLayer& layer, double t, int n_qubits) {
  if (layer.one_body) return thouless_rotate(t * *layer.one_body, layer.first_mode, n_qubits);
  return pauli_sum_exponential(layer.terms, t, n_qubits);
}

Circuit exact_evolution(const PauliSum& h, double t, int n_qubits) {
  require_hermitian(h, "evolution");
  if (n_qubits > kMaxDenseQubits) throw std::invalid_argument("exact evolution limited to 12 qubits");
  if (h.max_qubit() > n_qubits) throw std::invalid_argument("evolution: operator wider than register");
  Circuit c(n_qubits);
  c.add(Gate::dense(range_targets(1, n_qubits), expm_hermitian(dense_matrix(h, n_qubits), t)));
  return c;
}

Circuit trotter_steps(const HamiltonianSpec& h, double dt, int steps) {
  h.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("trotter: dt must be positive");
  if (steps < 0) throw std::invalid_argument("trotter: negative step count");
  Circuit step(h.n_qubits);
  for (const auto& l : h.layers) step.append(layer_exponential(l, dt, h.n_qubits));
  Circuit c(h.n_qubits);
  for (int k = 0; k < steps; ++k) c.append(step);
  return c;
}

Circuit trotter_evolve(const HamiltonianSpec& h, double t, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("trotter: dt must be positive");
  if (t < 0.0) throw std::invalid_argument("trotter: negative time");
  const long long steps = std::llround(t / dt);
  if (std::abs(static_cast<double>(steps) * dt - t) > 1e-9 * std::max(1.0, std::abs(t)))
    throw std::invalid_argument("trotter: dt does not divide t");
  return trotter_steps(h, dt, static_cast<int>(steps));
}

Circuit compile_elementary(const Circuit& c) {
  Circuit out(c.n_qubits, c.ancilla);
  out.global_phase = c.global_phase;
  for (const auto& g : c.gates) {
    if (g.polarity != Polarity::None) throw std::invalid_argument("compile: controlled gates are not compiled");
    switch (g.kind) {
      case GateKind::PauliStringExp:
        for (const auto& e : ladder_decomposition(g.pauli, g.angle)) out.add(e);
        break;
      case GateKind::GlobalPhase: out.global_phase += g.angle; break;
      case GateKind::Dense: throw std::invalid_argument("compile: dense gates have no elementary form");
      default: out.add(g);
    }
  }
  return out;
}

Circuit pauli_unitary(const PauliString& p, int n_qubits) {
  Circuit c(n_qubits);
  if (p.is_identity()) return c;
  c.add(Gate::pauli_exp(p, kPi));
  c.global_phase = kPi / 2.0;
  return c;
}

// ------------------------------------------------------ state preparation

std::uint64_t fermion_vacuum_label(int n_modes) {
  if (n_modes < 1 || n_modes > 63) throw std::invalid_argument("bad mode count");
  return (std::uint64_t{1} << n_modes) - 1;
}

Circuit prepare_slater(const std::vector<int>& modes, int n_modes) {
  std::set<int> seen;
  Circuit c(n_modes);
  for (int m : modes) {
    if (m < 1 || m > n_modes) throw std::invalid_argument("prepare_slater: mode out of range");
    if (!seen.insert(m).second) throw std::invalid_argument("prepare_slater: duplicate mode violates exclusion");
    PauliString p;
    for (int j = 1; j < m; ++j) p.set(j, Pauli::Z);
    p.set(m, Pauli::X);
    const double sign = (m - 1) % 2 ? -1.0 : 1.0;
    // exp(i pi/2 sign P)
    c.add(Gate::pauli_exp(p, -kPi * sign));
  }
  return c;
}

Circuit givens_circuit(const CMat& u_in, int first_mode, int n_qubits) {
  const int N = static_cast<int>(u_in.rows());
  if (u_in.cols() != N || N < 1) throw std::invalid_argument("givens: matrix must be square");
  if ((u_in.adjoint() * u_in - CMat::Identity(N, N)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("givens: matrix is not unitary");
  if (first_mode < 1 || first_mode + N - 1 > n_qubits) throw std::invalid_argument("givens: modes outside register");
  CMat u = u_in;
  struct Rot {
    int p;
    Eigen::Matrix2cd g;
  };
  std::vector<Rot> rots;
  for (int col = 0; col < N - 1; ++col)
    for (int r = N - 1; r > col; --r) {
      const cplx a = u(r - 1, col), b = u(r, col);
      if (std::abs(b) < 1e-15) continue;
      const double rho = std::hypot(std::abs(a), std::abs(b));
      Eigen::Matrix2cd g;
      g << std::conj(a) / rho, std::conj(b) / rho, -b / rho, a / rho;
      const CMat rows = u.middleRows(r - 1, 2);
      u.middleRows(r - 1, 2) = g * rows;
      rots.push_back({r - 1, g});
    }
  // u_in = G_1^dag ... G_K^dag D; the rightmost factor acts first.
  Circuit c(n_qubits);
  for (int k = 0; k < N; ++k) {
    const double phi = std::arg(u(k, k));
    if (phi == 0.0) continue;
    c.add(Gate::rot(Axis::Z, first_mode + k, -phi));
    c.global_phase += phi / 2.0;
  }
  for (auto it = rots.rbegin(); it != rots.rend(); ++it)
    append_two_mode(c, it->g.adjoint(), first_mode + it->p, first_mode + it->p + 1);
  return c;
}

Circuit thouless_rotate(const CMat& mbar, int first_mode, int n_qubits, ThoulessMethod method, int trotter_steps_n) {
  require_hermitian(mbar, "thouless_rotate");
  if (method == ThoulessMethod::Givens) return givens_circuit(expm_hermitian(mbar, 1.0), first_mode, n_qubits);
  if (trotter_steps_n < 1) throw std::invalid_argument("thouless_rotate: need at least one step");
  const HamiltonianLayer l = HamiltonianSpec::one_body_layer("mbar", mbar, first_mode, n_qubits);
  const HamiltonianSpec spec = HamiltonianSpec::from_sum(l.terms, n_qubits);
  return trotter_steps(spec, 1.0 / trotter_steps_n, trotter_steps_n);
}

// ------------------------------------------------------- ancilla protocols

Circuit controlled_exponential(const PauliSum& q, double t, int ancilla, Polarity pol, int n_qubits, ControlForm form) {
  require_hermitian(q, "controlled exponential");
  if (pol == Polarity::None) throw std::invalid_argument("controlled exponential: polarity required");
  if (ancilla < 1 || ancilla > n_qubits) throw std::invalid_argument("controlled exponential: ancilla outside register");
  for (const auto& [s, c] : q.terms())
    if (s.at(ancilla) != Pauli::I) throw std::invalid_argument("controlled exponential: Q acts on the ancilla");
  const bool commuting = mutually_commuting(q);
  const int m = std::max(1, q.max_qubit());
  if (!commuting && ancilla <= m) throw std::invalid_argument("controlled exponential: ancilla must follow system qubits");
  if (!commuting && m > kMaxDenseQubits) throw std::invalid_argument("controlled exponential: dense path limited to 12 qubits");

  if (form == ControlForm::Conditioned) {
    if (commuting) return pauli_sum_exponential(q, t, n_qubits).controlled(ancilla, pol);
    Circuit c(n_qubits, ancilla);
    c.add(Gate::dense(range_targets(1, m), expm_hermitian(dense_matrix(q, m), t)).controlled(ancilla, pol));
    return c;
  }

  // e^{-iQt/2} e^{i s Q Z_a t/2}, s = +1 selects |1>, s = -1 selects |0>
  const double s = pol == Polarity::OnOne ? 1.0 : -1.0;
  Circuit c(n_qubits, ancilla);
  if (commuting) {
    c.append(pauli_sum_exponential(q, t / 2.0, n_qubits));
    for (const auto& [p, coef] : q.terms()) {
      const double a = coef.real();
      if (p.is_identity()) {
        c.add(Gate::rot(Axis::Z, ancilla, -s * a * t));
      } else {
        PauliString pz = p;
        pz.set(ancilla, Pauli::Z);
        c.add(Gate::pauli_exp(pz, -s * a * t));
      }
    }
  } else {
    const DenseExp e(dense_matrix(q, m));
    c.add(Gate::dense(range_targets(1, m), e.at(t / 2.0)));
    std::vector<int> tg = range_targets(1, m);
    tg.push_back(ancilla);
    c.add(Gate::dense(tg, ancilla_blocks(e.at(-s * t / 2.0), e.at(s * t / 2.0))));
  }
  c.n_qubits = n_qubits;
  return c;
}

cplx ancilla_readout(const StateVector& s, int ancilla) {
  const double x = expectation(s, PauliString::single(ancilla, Pauli::X)).real();
  const double y = expectation(s, PauliString::single(ancilla, Pauli::Y)).real();
  return {x, y};
}

cplx one_ancilla_correlation(const StateVector& phi, const Circuit& u, const Circuit& v) {
  const int anc = phi.n_qubits() + 1;
  StateVector s = with_plus_ancilla(phi);
  run(s, u.controlled(anc, Polarity::OnZero));
  run(s, v.controlled(anc, Polarity::OnOne));
  return ancilla_readout(s, anc);
}

cplx one_ancilla_correlation(const StateVector& phi, const PauliSum& a, const PauliSum& b) {
  if (!a.is_hermitian() || !b.is_hermitian())
    throw std::invalid_argument("correlation: generator is not Hermitian, exponential is not unitary");
  const int n = phi.n_qubits();
  return one_ancilla_correlation(phi, exact_evolution(a, 1.0, n), exact_evolution(b, 1.0, n));
}

cplx time_correlation(const StateVector& phi, const Circuit& a, const Circuit& b, const Circuit& t_evolution) {
  const int anc = phi.n_qubits() + 1;
  StateVector s = with_plus_ancilla(phi);
  run(s, b.controlled(anc, Polarity::OnOne));
  run(s, t_evolution);
  run(s, a.controlled(anc, Polarity::OnZero));
  return ancilla_readout(s, anc);
}

Circuit evolution_circuit(const HamiltonianSpec& h, double t, const EvolutionOptions& opt) {
  h.validate();
  if (opt.exact) return exact_evolution(h.total(), t, h.n_qubits);
  if (!(opt.dt > 0.0)) throw std::invalid_argument("trotter: dt must be positive");
  if (t < 0.0) throw std::invalid_argument("trotter: negative time");
  if (t == 0.0) return Circuit(h.n_qubits);
  const int steps = std::max(1, static_cast<int>(std::ceil(t / opt.dt - 1e-9)));
  return trotter_steps(h, t / steps, steps);
}

cplx time_correlation(const StateVector& phi, const Circuit& a, const Circuit& b, const HamiltonianSpec& h, double t,
                      const EvolutionOptions& opt) {
  require_hermitian(h.total(), "time correlation");
  return time_correlation(phi, a, b, evolution_circuit(h, t, opt));
}

TimeSeries spectrum_series(const PauliSum& q, const StateVector& phi, double dt, int M, SpectrumForm form) {
  check_grid(dt, M);
  require_hermitian(q, "spectrum");
  const int n = phi.n_qubits();
  if (q.max_qubit() > n) throw std::invalid_argument("spectrum: Q wider than the state");
  if (n > kMaxDenseQubits) throw std::invalid_argument("spectrum: dense path limited to 12 qubits");
  const DenseExp e(dense_matrix(q, n));
  const int anc = n + 1;
  TimeSeries out;
  out.dt = dt;
  out.values.reserve(M);
  for (int j = 1; j <= M; ++j) {
    const double t = j * dt;
    StateVector s = with_plus_ancilla(phi);
    if (form == SpectrumForm::Controlled) {
      apply_gate(s, Gate::dense(range_targets(1, n), e.at(t)).controlled(anc, Polarity::OnOne));
    } else {
      std::vector<int> tg = range_targets(1, n);
      tg.push_back(anc);
      // e^{iQ sigma_z^a t/2}: e^{iQt/2} on |0>, e^{-iQt/2} on |1>
      apply_gate(s, Gate::dense(tg, ancilla_blocks(e.at(-t / 2.0), e.at(t / 2.0))));
    }
    out.values.push_back(ancilla_readout(s, anc));
  }
  return out;
}

TimeSeries spectrum_series(const PauliSum& q, const StateVector& phi, const std::vector<double>& t_grid, SpectrumForm form) {
  if (t_grid.size() < 2) throw std::invalid_argument("time grid: need M >= 2 samples");
  const double dt = t_grid[0];
  for (std::size_t j = 0; j < t_grid.size(); ++j)
    if (std::abs(t_grid[j] - dt * static_cast<double>(j + 1)) > 1e-9 * std::max(1.0, std::abs(t_grid[j])))
      throw std::invalid_argument("time grid: not uniform with t_j = j dt");
  return spectrum_series(q, phi, dt, static_cast<int>(t_grid.size()), form);
}

TimeSeries spectrum_series_trotter(const HamiltonianSpec& q, const StateVector& phi, double dt, int M, int steps_per_sample) {
  check_grid(dt, M);
  if (steps_per_sample < 1) throw std::invalid_argument("spectrum: need at least one step per sample");
  if (q.n_qubits > phi.n_qubits()) throw std::invalid_argument("spectrum: Q wider than the state");
  const int anc = phi.n_qubits() + 1;
  Circuit step = trotter_steps(q, dt / steps_per_sample, steps_per_sample);
  step.n_qubits = anc;
  const Circuit cstep = step.controlled(anc, Polarity::OnOne);
  StateVector s = with_plus_ancilla(phi);
  TimeSeries out;
  out.dt = dt;
  out.values.reserve(M);
  for (int j = 1; j <= M; ++j) {
    run(s, cstep);
    out.values.push_back(ancilla_readout(s, anc));
  }
  return out;
}

PostSelected prepare_linear_combination(const StateVector& phi, const std::vector<Circuit>& branches,
                                        const std::vector<cplx>& alpha) {
  const int L = static_cast<int>(branches.size());
  if (L < 1 || L > kMaxBranches) throw std::invalid_argument("linear combination: 1 <= L <= 64 branches");
  if (static_cast<int>(alpha.size()) != L) throw std::invalid_argument("linear combination: one coefficient per branch");
  const int n = phi.n_qubits();
  int m = 0;
  while ((1 << m) < L) ++m;
  if (n + m > kMaxRegisterQubits) throw std::invalid_argument("linear combination: register too large");
  const int dim = 1 << m;
  CVec a = CVec::Zero(dim), u = CVec::Zero(dim);
  for (int l = 0; l < L; ++l) {
    a[l] = alpha[l];
    u[l] = 1.0 / std::sqrt(static_cast<double>(L));
  }
  if (a.norm() == 0.0) throw std::invalid_argument("linear combination: zero coefficients");
  a.normalize();

  CVec amps = CVec::Zero(static_cast<Eigen::Index>(phi.dim()) * dim);
  for (std::size_t i = 0; i < phi.dim(); ++i) amps[static_cast<Eigen::Index>(i) * dim] = phi[i];
  StateVector s(n + m, std::move(amps));
  const std::vector<int> anc = range_targets(n + 1, n + m);
  if (m > 0) apply_gate(s, Gate::dense(anc, complete_unitary(a)));
  const std::size_t mask = static_cast<std::size_t>(dim - 1);
  for (int l = 0; l < L; ++l) {
    const Circuit& c = branches[l];
    if (c.n_qubits > n) throw std::invalid_argument("linear combination: branch wider than the system");
    for (const auto& g : c.gates) apply_gate_on_branch(s, g, mask, static_cast<std::size_t>(l));
    if (c.global_phase != 0.0) apply_gate_on_branch(s, Gate::phase(c.global_phase), mask, static_cast<std::size_t>(l));
  }
  if (m > 0) apply_gate(s, Gate::dense(anc, complete_unitary(u).adjoint()));

  CVec sys(static_cast<Eigen::Index>(phi.dim()));
  for (std::size_t i = 0; i < phi.dim(); ++i) sys[static_cast<Eigen::Index>(i)] = s[i * dim];
  const double p = sys.squaredNorm();
  if (p < 1e-300) throw std::runtime_error("linear combination: post-selection has zero probability");
  sys /= std::sqrt(p);
  return {StateVector(n, std::move(sys)), p, m};
}

}  // namespace qmb
