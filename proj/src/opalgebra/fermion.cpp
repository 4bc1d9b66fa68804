#include "qmb/fermion.hpp"

#include <algorithm>
#include <cmath>

namespace qmb {

namespace {

// creators (ascending mode) sort before annihilators (ascending mode)
std::pair<int, int> rank(const LadderOp& op) { return {op.dagger ? 0 : 1, op.mode}; }

void check_mode(int j, int n_modes) {
  if (j < 1 || j > n_modes)
    throw std::out_of_range("mode " + std::to_string(j) + " outside 1.." + std::to_string(n_modes));
}

PauliSum sigma_minus(int q) {
  PauliSum s = PauliSum::single(q, Pauli::X, 0.5);
  s += PauliSum::single(q, Pauli::Y, cplx{0.0, -0.5});
  return s;
}

PauliSum sigma_plus(int q) {
  PauliSum s = PauliSum::single(q, Pauli::X, 0.5);
  s += PauliSum::single(q, Pauli::Y, cplx{0.0, 0.5});
  return s;
}

}  // namespace

FermionExpr FermionExpr::scalar(cplx c) {
  FermionExpr e;
  e.add_normal_ordered({}, c);
  return e;
}

FermionExpr FermionExpr::create(int j) { return product({cdag(j)}); }

FermionExpr FermionExpr::annihilate(int j) { return product({cann(j)}); }

FermionExpr FermionExpr::number(int j) { return product({cdag(j), cann(j)}); }

FermionExpr FermionExpr::product(const std::vector<LadderOp>& ops, cplx c) {
  for (const auto& op : ops)
    if (op.mode < 1) throw std::out_of_range("mode index must be >= 1");
  FermionExpr e;
  e.add_normal_ordered(ops, c);
  return e;
}

FermionExpr FermionExpr::quadratic(const CMat& m) {
  FermionExpr e;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > 0.0) e.add_normal_ordered({cdag(i + 1), cann(j + 1)}, m(i, j));
  return e;
}

void FermionExpr::add_normal_ordered(Monomial ops, cplx c) {
  if (std::abs(c) < kPruneTol) return;
  for (std::size_t i = 0; i + 1 < ops.size(); ++i) {
    if (ops[i] == ops[i + 1]) return;  // c c = c+ c+ = 0
    if (rank(ops[i]) > rank(ops[i + 1])) {
      if (!ops[i].dagger && ops[i + 1].dagger && ops[i].mode == ops[i + 1].mode) {
        Monomial contracted;
        contracted.reserve(ops.size() - 2);
        contracted.insert(contracted.end(), ops.begin(), ops.begin() + i);
        contracted.insert(contracted.end(), ops.begin() + i + 2, ops.end());
        add_normal_ordered(std::move(contracted), c);
      }
      std::swap(ops[i], ops[i + 1]);
      add_normal_ordered(std::move(ops), -c);
      return;
    }
  }
  auto it = terms_.find(ops);
  if (it == terms_.end()) {
    terms_.emplace(std::move(ops), c);
    return;
  }
  it->second += c;
  if (std::abs(it->second) < kPruneTol) terms_.erase(it);
}

int FermionExpr::max_mode() const {
  int m = 0;
  for (const auto& kv : terms_)
    for (const auto& op : kv.first) m = std::max(m, op.mode);
  return m;
}

FermionExpr FermionExpr::adjoint() const {
  FermionExpr out;
  for (const auto& [mono, c] : terms_) {
    Monomial rev(mono.rbegin(), mono.rend());
    for (auto& op : rev) op.dagger = !op.dagger;
    out.add_normal_ordered(std::move(rev), std::conj(c));
  }
  return out;
}

FermionExpr& FermionExpr::operator+=(const FermionExpr& o) {
  for (const auto& [mono, c] : o.terms_) add_normal_ordered(mono, c);
  return *this;
}

FermionExpr& FermionExpr::operator-=(const FermionExpr& o) {
  for (const auto& [mono, c] : o.terms_) add_normal_ordered(mono, -c);
  return *this;
}

FermionExpr& FermionExpr::operator*=(cplx c) {
  for (auto& kv : terms_) kv.second *= c;
  std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) < kPruneTol; });
  return *this;
}

FermionExpr operator*(const FermionExpr& a, const FermionExpr& b) {
  FermionExpr out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      FermionExpr::Monomial w = ma;
      w.insert(w.end(), mb.begin(), mb.end());
      out.add_normal_ordered(std::move(w), ca * cb);
    }
  return out;
}

FermionExpr anticommutator(const FermionExpr& a, const FermionExpr& b) { return a * b + b * a; }

PauliSum jw_annihilation(int j, int n_modes) {
  check_mode(j, n_modes);
  PauliString tail;
  for (int l = 1; l < j; ++l) tail.set(l, Pauli::Z);
  const cplx sign = (j - 1) % 2 == 0 ? 1.0 : -1.0;
  return PauliSum(PauliTerm(sign, tail)) * sigma_minus(j);
}

PauliSum jw_creation(int j, int n_modes) { return jw_annihilation(j, n_modes).adjoint(); }

PauliSum jw_number(int j, int n_modes) {
  check_mode(j, n_modes);
  return PauliSum::identity(0.5) + PauliSum::single(j, Pauli::Z, 0.5);
}

PauliSum jordan_wigner(const FermionExpr& expr, int n_modes) {
  std::map<LadderOp, PauliSum> cache;
  auto image = [&](const LadderOp& op) -> const PauliSum& {
    auto it = cache.find(op);
    if (it != cache.end()) return it->second;
    PauliSum s = op.dagger ? jw_creation(op.mode, n_modes) : jw_annihilation(op.mode, n_modes);
    return cache.emplace(op, std::move(s)).first->second;
  };
  PauliSum out;
  for (const auto& [mono, c] : expr.terms()) {
    PauliSum t = PauliSum::identity(c);
    for (const auto& op : mono) t = t * image(op);
    out += t;
  }
  return out;
}

CMat anyon_matrix(const LadderOp& op, double theta, int n_modes) {
  check_mode(op.mode, n_modes);
  if (n_modes > 12) throw std::invalid_argument("anyon_matrix: at most 12 modes");
  const std::size_t dim = std::size_t{1} << n_modes;
  // Each occupied mode l < j contributes e^{-i theta} (creator) or e^{+i theta}.
  const cplx occ_phase = std::exp(cplx{0.0, op.dagger ? -theta : theta});
  const int bit = n_modes - op.mode;
  CMat m = CMat::Zero(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    const bool occupied = ((col >> bit) & 1U) == 0;
    if (occupied == op.dagger) continue;
    const std::size_t row = col ^ (std::size_t{1} << bit);
    cplx amp = 1.0;
    for (int l = 1; l < op.mode; ++l)
      if (((col >> (n_modes - l)) & 1U) == 0) amp *= occ_phase;
    m(row, col) = amp;
  }
  return m;
}

CMat anyon_map(const std::vector<LadderWord>& expr, double theta, int n_modes) {
  const std::size_t dim = std::size_t{1} << n_modes;
  CMat out = CMat::Zero(dim, dim);
  for (const auto& w : expr) {
    CMat t = CMat::Identity(dim, dim) * w.coeff;
    for (const auto& op : w.ops) t = t * anyon_matrix(op, theta, n_modes);
    out += t;
  }
  return out;
}

CMat anyon_number(int j, int n_modes) {
  check_mode(j, n_modes);
  const std::size_t dim = std::size_t{1} << n_modes;
  CMat m = CMat::Zero(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    if (((i >> (n_modes - j)) & 1U) == 0) m(i, i) = 1.0;
  return m;
}

BosonEncoding::BosonEncoding(int modes, int max_per_site) : n_modes(modes), n_max(max_per_site) {
  if (modes < 1 || max_per_site < 1) throw std::invalid_argument("BosonEncoding: need modes >= 1 and n_max >= 1");
  if (n_qubits() > PauliString::kMaxQubits) throw std::invalid_argument("BosonEncoding: too many qubits");
}

int BosonEncoding::qubit(int n, int j) const {
  if (n < 0 || n > n_max) throw std::out_of_range("boson level out of range");
  check_mode(j, n_modes);
  return n + (n_max + 1) * (j - 1) + 1;
}

std::uint64_t BosonEncoding::basis_label(const std::vector<int>& occupations) const {
  if (static_cast<int>(occupations.size()) != n_modes)
    throw std::invalid_argument("basis_label: expected " + std::to_string(n_modes) + " occupations");
  const int nq = n_qubits();
  std::uint64_t label = 0;
  for (int j = 1; j <= n_modes; ++j) {
    const int occ = occupations[j - 1];
    if (occ < 0 || occ > n_max)
      throw std::out_of_range("occupancy overflow: mode " + std::to_string(j) + " holds " + std::to_string(occ));
    for (int n = 0; n <= n_max; ++n)
      if (n != occ) label |= std::uint64_t{1} << (nq - qubit(n, j));
  }
  return label;
}

PauliSum boson_creation(int j, const BosonEncoding& enc) {
  PauliSum out;
  for (int n = 0; n < enc.n_max; ++n)
    out += std::sqrt(static_cast<double>(n + 1)) *
           (sigma_minus(enc.qubit(n, j)) * sigma_plus(enc.qubit(n + 1, j)));
  return out;
}

PauliSum boson_annihilation(int j, const BosonEncoding& enc) { return boson_creation(j, enc).adjoint(); }

PauliSum boson_number(int j, const BosonEncoding& enc) {
  PauliSum out;
  for (int n = 1; n <= enc.n_max; ++n) {
    out += PauliSum::identity(0.5 * n);
    out += PauliSum::single(enc.qubit(n, j), Pauli::Z, 0.5 * n);
  }
  return out;
}

PauliSum boson_map(const std::vector<LadderWord>& expr, const BosonEncoding& enc) {
  PauliSum out;
  for (const auto& w : expr) {
    PauliSum t = PauliSum::identity(w.coeff);
    for (const auto& op : w.ops) t = t * (op.dagger ? boson_creation(op.mode, enc) : boson_annihilation(op.mode, enc));
    out += t;
  }
  return out;
}

RMat restricted_boson_creation(int n_max) {
  if (n_max < 1) throw std::invalid_argument("restricted_boson_creation: n_max >= 1");
  RMat b = RMat::Zero(n_max + 1, n_max + 1);
  for (int n = 0; n < n_max; ++n) b(n + 1, n) = std::sqrt(static_cast<double>(n + 1));
  return b;
}

int mode_reindex_2d(int l, int m, int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("lattice dimensions must be positive");
  if (l < 1 || l > ny || m < 1 || m > nx)
    throw std::out_of_range("site (" + std::to_string(l) + "," + std::to_string(m) + ") outside lattice");
  return m + (l - 1) * nx;
}

}  // namespace qmb
