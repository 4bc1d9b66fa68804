#include "qmb/statevector.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace qmb {

namespace {

void check_qubit(const StateVector& s, int q) {
  if (q < 1 || q > s.n_qubits())
    throw std::out_of_range("qubit " + std::to_string(q) + " outside register of " + std::to_string(s.n_qubits()));
}

std::size_t qubit_mask(int n, int q) { return std::size_t{1} << (n - q); }

// PauliString masks (bit q-1) mapped to basis-label masks (bit n-q).
struct LabelMasks {
  std::size_t x = 0, z = 0;
  int ny = 0;
};

LabelMasks label_masks(const PauliString& p, int n) {
  if (p.max_qubit() > n)
    throw std::out_of_range("Pauli string acts on qubit " + std::to_string(p.max_qubit()) + " beyond register of " +
                            std::to_string(n));
  LabelMasks m;
  std::uint64_t sup = p.support();
  while (sup) {
    const int q = std::countr_zero(sup) + 1;
    sup &= sup - 1;
    const Pauli f = p.at(q);
    const std::size_t b = qubit_mask(n, q);
    if (f == Pauli::X || f == Pauli::Y) m.x |= b;
    if (f == Pauli::Z || f == Pauli::Y) m.z |= b;
    if (f == Pauli::Y) ++m.ny;
  }
  return m;
}

cplx ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

// P|i> = phase(i) |i ^ x>, with P = i^{ny} X^x Z^z
inline cplx pauli_phase(const LabelMasks& m, cplx yphase, std::size_t i) {
  return (std::popcount(i & m.z) & 1) ? -yphase : yphase;
}

struct Branch {
  std::size_t mask = 0;
  std::size_t value = 0;
  bool active(std::size_t i) const { return (i & mask) == value; }
};

Branch branch_of(const StateVector& s, int control, Polarity pol) {
  if (pol == Polarity::None) return {};
  check_qubit(s, control);
  const std::size_t b = qubit_mask(s.n_qubits(), control);
  return {b, pol == Polarity::OnOne ? b : 0};
}

void apply_2x2(StateVector& s, int q, const cplx u[2][2], const Branch& br) {
  check_qubit(s, q);
  if (br.mask & qubit_mask(s.n_qubits(), q)) throw std::invalid_argument("control qubit equals target");
  CVec& a = s.amplitudes();
  const std::size_t b = qubit_mask(s.n_qubits(), q);
  const std::size_t dim = s.dim();
  for (std::size_t base = 0; base < dim; base += 2 * b)
    for (std::size_t off = 0; off < b; ++off) {
      const std::size_t i0 = base + off, i1 = i0 | b;
      if (!br.active(i0)) continue;
      const cplx a0 = a[i0], a1 = a[i1];
      a[i0] = u[0][0] * a0 + u[0][1] * a1;
      a[i1] = u[1][0] * a0 + u[1][1] * a1;
    }
}

void apply_rotation_branch(StateVector& s, Axis axis, int qubit, double theta, const Branch& br) {
  const double c = std::cos(theta / 2), sn = std::sin(theta / 2);
  cplx u[2][2];
  switch (axis) {
    case Axis::X:
      u[0][0] = c, u[0][1] = cplx{0, -sn}, u[1][0] = cplx{0, -sn}, u[1][1] = c;
      break;
    case Axis::Y:
      u[0][0] = c, u[0][1] = -sn, u[1][0] = sn, u[1][1] = c;
      break;
    case Axis::Z:
      u[0][0] = std::polar(1.0, -theta / 2), u[0][1] = 0, u[1][0] = 0, u[1][1] = std::polar(1.0, theta / 2);
      break;
  }
  apply_2x2(s, qubit, u, br);
}

void apply_ising_branch(StateVector& s, int j, int k, double omega, const Branch& br) {
  check_qubit(s, j);
  check_qubit(s, k);
  if (j == k) throw std::invalid_argument("ising gate needs distinct qubits");
  const std::size_t m = qubit_mask(s.n_qubits(), j) | qubit_mask(s.n_qubits(), k);
  if (br.mask & m) throw std::invalid_argument("control qubit equals target");
  const cplx even = std::polar(1.0, -omega / 2), odd = std::polar(1.0, omega / 2);
  CVec& a = s.amplitudes();
  for (std::size_t i = 0; i < s.dim(); ++i) {
    if (!br.active(i)) continue;
    a[i] *= (std::popcount(i & m) & 1) ? odd : even;
  }
}

// e^{-i phi P}
void apply_string_exp_direct(StateVector& s, const PauliString& p, double phi, const Branch& br) {
  if (p.is_identity()) {
    const cplx ph = std::polar(1.0, -phi);
    CVec& a = s.amplitudes();
    for (std::size_t i = 0; i < s.dim(); ++i)
      if (br.active(i)) a[i] *= ph;
    return;
  }
  const LabelMasks m = label_masks(p, s.n_qubits());
  if (br.mask & (m.x | m.z)) throw std::invalid_argument("control qubit inside Pauli support");
  const cplx yph = ipow(m.ny);
  CVec& a = s.amplitudes();
  const double c = std::cos(phi), sn = std::sin(phi);
  if (m.x == 0) {
    // diagonal: eigenvalue of P on |i> is yph * (+-1), and yph = +-1 here
    const cplx plus = std::polar(1.0, -phi), minus = std::polar(1.0, phi);
    for (std::size_t i = 0; i < s.dim(); ++i) {
      if (!br.active(i)) continue;
      const double ev = pauli_phase(m, yph, i).real();
      a[i] *= ev > 0 ? plus : minus;
    }
    return;
  }
  const std::size_t hi = std::size_t{1} << (std::bit_width(m.x) - 1);
  for (std::size_t i = 0; i < s.dim(); ++i) {
    if (i & hi) continue;  // visit each pair once, from the member with bit hi clear
    if (!br.active(i)) continue;
    const std::size_t j = i ^ m.x;
    const cplx ai = a[i], aj = a[j];
    // (P a)_i = phase(j) a_j, (P a)_j = phase(i) a_i
    a[i] = c * ai - cplx{0, sn} * pauli_phase(m, yph, j) * aj;
    a[j] = c * aj - cplx{0, sn} * pauli_phase(m, yph, i) * ai;
  }
}

void apply_dense_branch(StateVector& s, const std::vector<int>& targets, const CMat& u, const Branch& br) {
  const int k = static_cast<int>(targets.size());
  if (k == 0 || u.rows() != (Eigen::Index{1} << k) || u.cols() != u.rows())
    throw std::invalid_argument("dense gate: matrix size does not match targets");
  std::vector<std::size_t> bits(k);
  std::size_t tmask = 0;
  for (int a = 0; a < k; ++a) {
    check_qubit(s, targets[a]);
    bits[a] = qubit_mask(s.n_qubits(), targets[a]);
    if (tmask & bits[a]) throw std::invalid_argument("dense gate: repeated target");
    tmask |= bits[a];
  }
  if (br.mask & tmask) throw std::invalid_argument("control qubit equals target");
  const std::size_t local = std::size_t{1} << k;
  std::vector<std::size_t> offs(local, 0);
  for (std::size_t l = 0; l < local; ++l)
    for (int a = 0; a < k; ++a)
      if ((l >> (k - 1 - a)) & 1U) offs[l] |= bits[a];
  CVec buf(local);
  CVec& amp = s.amplitudes();
  for (std::size_t i = 0; i < s.dim(); ++i) {
    if ((i & tmask) || !br.active(i)) continue;
    for (std::size_t l = 0; l < local; ++l) buf[l] = amp[i | offs[l]];
    const CVec out = u * buf;
    for (std::size_t l = 0; l < local; ++l) amp[i | offs[l]] = out[l];
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

StateVector::StateVector(int n_qubits, CVec amplitudes) : n_(n_qubits), amps_(std::move(amplitudes)) {
  if (n_qubits < 0 || n_qubits > kMaxRegisterQubits)
    throw std::invalid_argument("register size " + std::to_string(n_qubits) + " outside 0.." +
                                std::to_string(kMaxRegisterQubits));
  if (amps_.size() != (Eigen::Index{1} << n_qubits))
    throw std::invalid_argument("amplitude vector length must be 2^n");
}

void StateVector::normalize() {
  const double nrm = amps_.norm();
  if (nrm == 0.0) throw std::domain_error("cannot normalize the zero vector");
  amps_ /= nrm;
}

cplx StateVector::overlap(const StateVector& other) const {
  if (other.n_ != n_) throw std::invalid_argument("overlap of registers with different sizes");
  return amps_.dot(other.amps_);
}

StateVector new_register(int n, std::uint64_t basis_label) {
  if (n < 1 || n > kMaxRegisterQubits)
    throw std::invalid_argument("register size " + std::to_string(n) + " outside 1.." +
                                std::to_string(kMaxRegisterQubits));
  if (basis_label >= (std::uint64_t{1} << n))
    throw std::out_of_range("basis label " + std::to_string(basis_label) + " >= 2^" + std::to_string(n));
  CVec a = CVec::Zero(Eigen::Index{1} << n);
  a[static_cast<Eigen::Index>(basis_label)] = 1.0;
  return StateVector(n, std::move(a));
}

StateVector random_state(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CVec a(Eigen::Index{1} << n);
  for (auto& v : a) v = {g(rng), g(rng)};
  StateVector s(n, std::move(a));
  s.normalize();
  return s;
}

Gate Gate::rot(Axis axis, int qubit, double theta) {
  Gate g;
  g.kind = axis == Axis::X ? GateKind::RotX : axis == Axis::Y ? GateKind::RotY : GateKind::RotZ;
  g.angle = theta;
  g.targets = {qubit};
  return g;
}

Gate Gate::ising(int j, int k, double omega) {
  if (j == k) throw std::invalid_argument("ising gate needs distinct qubits");
  Gate g;
  g.kind = GateKind::IsingZZ;
  g.angle = omega;
  g.targets = {j, k};
  return g;
}

Gate Gate::pauli_exp(const PauliString& p, double theta) {
  Gate g;
  g.kind = GateKind::PauliStringExp;
  g.angle = theta;
  g.pauli = p;
  std::uint64_t sup = p.support();
  while (sup) {
    g.targets.push_back(std::countr_zero(sup) + 1);
    sup &= sup - 1;
  }
  return g;
}

Gate Gate::phase(double phi) {
  Gate g;
  g.kind = GateKind::GlobalPhase;
  g.angle = phi;
  return g;
}

Gate Gate::dense(std::vector<int> targets, CMat u) {
  if (u.rows() != (Eigen::Index{1} << targets.size()) || u.cols() != u.rows())
    throw std::invalid_argument("dense gate: matrix size does not match targets");
  Gate g;
  g.kind = GateKind::Dense;
  g.targets = std::move(targets);
  g.matrix = std::make_shared<const CMat>(std::move(u));
  return g;
}

Gate Gate::controlled(int ctrl, Polarity pol) const {
  if (control != 0 && pol != Polarity::None) throw std::invalid_argument("gate already controlled");
  for (int t : targets)
    if (t == ctrl) throw std::invalid_argument("control qubit equals target");
  Gate g = *this;
  g.control = pol == Polarity::None ? 0 : ctrl;
  g.polarity = pol;
  return g;
}

Gate Gate::inverse() const {
  Gate g = *this;
  g.angle = -angle;
  if (kind == GateKind::Dense) g.matrix = std::make_shared<const CMat>(matrix->adjoint());
  return g;
}

int Gate::max_qubit() const {
  int m = control;
  for (int t : targets) m = std::max(m, t);
  return m;
}

std::string Gate::to_text() const {
  std::string out;
  if (polarity != Polarity::None)
    out += (polarity == Polarity::OnOne ? "c1 " : "c0 ") + std::to_string(control) + " ";
  switch (kind) {
    case GateKind::RotX: return out + "rx " + std::to_string(targets[0]) + " " + fmt(angle);
    case GateKind::RotY: return out + "ry " + std::to_string(targets[0]) + " " + fmt(angle);
    case GateKind::RotZ: return out + "rz " + std::to_string(targets[0]) + " " + fmt(angle);
    case GateKind::IsingZZ:
      return out + "zz " + std::to_string(targets[0]) + " " + std::to_string(targets[1]) + " " + fmt(angle);
    case GateKind::PauliStringExp: return out + "pexp " + fmt(angle) + " " + pauli.label();
    case GateKind::GlobalPhase: return out + "phase " + fmt(angle);
    case GateKind::Dense: {
      out += "dense " + std::to_string(targets.size());
      for (int t : targets) out += " " + std::to_string(t);
      for (Eigen::Index r = 0; r < matrix->rows(); ++r)
        for (Eigen::Index c = 0; c < matrix->cols(); ++c)
          out += " " + fmt((*matrix)(r, c).real()) + " " + fmt((*matrix)(r, c).imag());
      return out;
    }
  }
  return out;
}

Gate Gate::from_text(const std::string& line) {
  std::istringstream in(line);
  std::string tok;
  int ctrl = 0;
  Polarity pol = Polarity::None;
  auto fail = [&]() { return std::invalid_argument("bad gate line '" + line + "'"); };
  if (!(in >> tok)) throw fail();
  if (tok == "c0" || tok == "c1") {
    pol = tok == "c1" ? Polarity::OnOne : Polarity::OnZero;
    if (!(in >> ctrl >> tok)) throw fail();
  }
  Gate g;
  int a = 0, b = 0;
  double th = 0;
  if (tok == "rx" || tok == "ry" || tok == "rz") {
    if (!(in >> a >> th)) throw fail();
    g = rot(tok == "rx" ? Axis::X : tok == "ry" ? Axis::Y : Axis::Z, a, th);
  } else if (tok == "zz") {
    if (!(in >> a >> b >> th)) throw fail();
    g = ising(a, b, th);
  } else if (tok == "pexp") {
    if (!(in >> th)) throw fail();
    std::string rest;
    std::getline(in, rest);
    g = pauli_exp(PauliString::parse(rest), th);
  } else if (tok == "phase") {
    if (!(in >> th)) throw fail();
    g = phase(th);
  } else if (tok == "dense") {
    int k = 0;
    if (!(in >> k) || k < 1 || k > 10) throw fail();
    std::vector<int> ts(k);
    for (auto& t : ts)
      if (!(in >> t)) throw fail();
    const int d = 1 << k;
    CMat u(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        double re = 0, im = 0;
        if (!(in >> re >> im)) throw fail();
        u(r, c) = {re, im};
      }
    g = dense(std::move(ts), std::move(u));
  } else {
    throw fail();
  }
  std::string extra;
  if (tok != "pexp" && (in >> extra)) throw fail();
  return pol == Polarity::None ? g : g.controlled(ctrl, pol);
}

void apply_rotation(StateVector& s, Axis axis, int qubit, double theta) {
  apply_rotation_branch(s, axis, qubit, theta, {});
}

void apply_ising(StateVector& s, int j, int k, double omega) { apply_ising_branch(s, j, k, omega, {}); }

std::vector<Gate> ladder_decomposition(const PauliString& p, double theta) {
  if (p.is_identity()) throw std::invalid_argument("ladder_decomposition: identity string");
  std::vector<int> qs;
  std::uint64_t sup = p.support();
  while (sup) {
    qs.push_back(std::countr_zero(sup) + 1);
    sup &= sup - 1;
  }
  std::vector<Gate> pre, post;
  for (int q : qs) {
    if (p.at(q) == Pauli::X) {
      pre.push_back(Gate::rot(Axis::Y, q, -kPi / 2));
      post.push_back(Gate::rot(Axis::Y, q, kPi / 2));
    } else if (p.at(q) == Pauli::Y) {
      pre.push_back(Gate::rot(Axis::X, q, kPi / 2));
      post.push_back(Gate::rot(Axis::X, q, -kPi / 2));
    }
  }
  // e^{-ia Z_p S Z_k} = W e^{-ia Z_p S} W^dag, W = Rx(pi/2)_p Rzz(pi/2)_pk Ry(pi/2)_p
  const int pivot = qs.front();
  std::vector<Gate> out = pre;
  for (std::size_t i = qs.size(); i-- > 1;) {
    out.push_back(Gate::rot(Axis::X, pivot, -kPi / 2));
    out.push_back(Gate::ising(pivot, qs[i], -kPi / 2));
    out.push_back(Gate::rot(Axis::Y, pivot, -kPi / 2));
  }
  out.push_back(Gate::rot(Axis::Z, pivot, theta));
  for (std::size_t i = 1; i < qs.size(); ++i) {
    out.push_back(Gate::rot(Axis::Y, pivot, kPi / 2));
    out.push_back(Gate::ising(pivot, qs[i], kPi / 2));
    out.push_back(Gate::rot(Axis::X, pivot, kPi / 2));
  }
  out.insert(out.end(), post.begin(), post.end());
  return out;
}

void apply_pauli_string_exp(StateVector& s, const PauliTerm& term, double theta, ExpPath path) {
  if (term.ops.is_identity()) throw std::invalid_argument("apply_pauli_string_exp: empty term");
  if (std::abs(term.coeff.imag()) > 1e-12)
    throw std::invalid_argument("apply_pauli_string_exp: coefficient must be real");
  const double angle = theta * term.coeff.real();
  if (path == ExpPath::Direct) {
    apply_string_exp_direct(s, term.ops, angle / 2, {});
    return;
  }
  if (term.ops.max_qubit() > s.n_qubits()) throw std::out_of_range("Pauli term beyond register");
  apply_gates(s, ladder_decomposition(term.ops, angle));
}

namespace {

void apply_gate_with(StateVector& s, const Gate& g, const Branch& br) {
  switch (g.kind) {
    case GateKind::RotX: apply_rotation_branch(s, Axis::X, g.targets.at(0), g.angle, br); break;
    case GateKind::RotY: apply_rotation_branch(s, Axis::Y, g.targets.at(0), g.angle, br); break;
    case GateKind::RotZ: apply_rotation_branch(s, Axis::Z, g.targets.at(0), g.angle, br); break;
    case GateKind::IsingZZ: apply_ising_branch(s, g.targets.at(0), g.targets.at(1), g.angle, br); break;
    case GateKind::PauliStringExp: apply_string_exp_direct(s, g.pauli, g.angle / 2, br); break;
    case GateKind::GlobalPhase: {
      const cplx ph = std::polar(1.0, g.angle);
      CVec& a = s.amplitudes();
      for (std::size_t i = 0; i < s.dim(); ++i)
        if (br.active(i)) a[i] *= ph;
      break;
    }
    case GateKind::Dense: apply_dense_branch(s, g.targets, *g.matrix, br); break;
  }
}

}  // namespace

void apply_gate(StateVector& s, const Gate& g) { apply_gate_with(s, g, branch_of(s, g.control, g.polarity)); }

void apply_gate_on_branch(StateVector& s, const Gate& g, std::size_t mask, std::size_t value) {
  Branch br = branch_of(s, g.control, g.polarity);
  if (br.mask & mask) throw std::invalid_argument("branch mask overlaps gate control");
  br.mask |= mask;
  br.value |= value & mask;
  apply_gate_with(s, g, br);
}

void apply_gates(StateVector& s, const std::vector<Gate>& gates) {
  for (const auto& g : gates) apply_gate(s, g);
}

cplx expectation(const StateVector& s, const PauliString& p) {
  const LabelMasks m = label_masks(p, s.n_qubits());
  const cplx yph = ipow(m.ny);
  const CVec& a = s.amplitudes();
  cplx acc = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) acc += std::conj(a[i ^ m.x]) * pauli_phase(m, yph, i) * a[i];
  return acc;
}

cplx expectation(const StateVector& s, const PauliSum& op) {
  cplx acc = 0.0;
  for (const auto& [p, c] : op.terms()) acc += c * expectation(s, p);
  return acc;
}

CVec apply_sum(const StateVector& s, const PauliSum& op) {
  CVec out = CVec::Zero(s.amplitudes().size());
  const CVec& a = s.amplitudes();
  for (const auto& [p, c] : op.terms()) {
    const LabelMasks m = label_masks(p, s.n_qubits());
    const cplx yph = ipow(m.ny) * c;
    for (std::size_t i = 0; i < s.dim(); ++i) out[i ^ m.x] += pauli_phase(m, yph, i) * a[i];
  }
  return out;
}

CMat dense_matrix(const PauliSum& op, int n) {
  if (n < 1 || n > kMaxDenseQubits) throw std::invalid_argument("dense_matrix: n must be in 1..12");
  const std::size_t dim = std::size_t{1} << n;
  CMat out = CMat::Zero(dim, dim);
  for (const auto& [p, c] : op.terms()) {
    const LabelMasks m = label_masks(p, n);
    const cplx yph = ipow(m.ny) * c;
    for (std::size_t i = 0; i < dim; ++i) out(i ^ m.x, i) += pauli_phase(m, yph, i);
  }
  return out;
}

CMat dense_matrix(const std::vector<Gate>& gates, int n) {
  if (n < 1 || n > kMaxDenseQubits) throw std::invalid_argument("dense_matrix: n must be in 1..12");
  const std::size_t dim = std::size_t{1} << n;
  CMat out(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    StateVector s = new_register(n, col);
    apply_gates(s, gates);
    out.col(col) = s.amplitudes();
  }
  return out;
}

CMat dense_matrix(const Gate& g, int n) { return dense_matrix(std::vector<Gate>{g}, n); }

bool equal_up_to_phase(const CVec& a, const CVec& b, double tol, cplx* phase) {
  if (a.size() != b.size()) return false;
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return na == nb;
  const cplx ov = a.dot(b);
  const cplx ph = std::abs(ov) > 0 ? ov / std::abs(ov) : cplx{1.0};
  if (phase) *phase = ph;
  return (b - ph * a).norm() <= tol * std::max(1.0, nb);
}

bool equal_up_to_phase(const CMat& a, const CMat& b, double tol, cplx* phase) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const CVec va = Eigen::Map<const CVec>(a.data(), a.size());
  const CVec vb = Eigen::Map<const CVec>(b.data(), b.size());
  cplx ph;
  if (!equal_up_to_phase(va, vb, tol, &ph)) return false;
  if (phase) *phase = ph;
  return (b - ph * a).cwiseAbs().maxCoeff() <= tol;
}

std::map<std::uint64_t, int> sample_shots(const StateVector& s, int shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("sample_shots: shots must be positive");
  std::vector<double> probs(s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i) probs[i] = std::norm(s[i]);
  std::discrete_distribution<std::uint64_t> dist(probs.begin(), probs.end());
  std::mt19937_64 rng(seed);
  std::map<std::uint64_t, int> counts;
  for (int k = 0; k < shots; ++k) ++counts[dist(rng)];
  return counts;
}

double sampled_expectation(const StateVector& s, const PauliString& p, int shots, std::uint64_t seed) {
  StateVector r = s;
  std::uint64_t sup = p.support();
  std::size_t mask = 0;
  while (sup) {
    const int q = std::countr_zero(sup) + 1;
    sup &= sup - 1;
    if (p.at(q) == Pauli::X) apply_rotation(r, Axis::Y, q, -kPi / 2);
    if (p.at(q) == Pauli::Y) apply_rotation(r, Axis::X, q, kPi / 2);
    mask |= qubit_mask(s.n_qubits(), q);
  }
  const auto counts = sample_shots(r, shots, seed);
  long long acc = 0;
  for (const auto& [label, c] : counts) acc += (std::popcount(label & mask) & 1) ? -c : c;
  return static_cast<double>(acc) / shots;
}

}  // namespace qmb
