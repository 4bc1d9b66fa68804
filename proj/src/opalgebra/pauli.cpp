#include "qmb/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace qmb {

namespace {

std::uint64_t bit_of(int qubit) {
  if (qubit < 1 || qubit > PauliString::kMaxQubits)
    throw std::out_of_range("qubit index " + std::to_string(qubit) + " out of range");
  return std::uint64_t{1} << (qubit - 1);
}

// i^k for k mod 4
cplx ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

char pauli_char(Pauli p) {
  switch (p) {
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
    default: return 'I';
  }
}

}  // namespace

PauliString PauliString::single(int qubit, Pauli p) {
  PauliString s;
  s.set(qubit, p);
  return s;
}

Pauli PauliString::at(int qubit) const {
  const std::uint64_t b = bit_of(qubit);
  const bool bx = x & b, bz = z & b;
  if (bx && bz) return Pauli::Y;
  if (bx) return Pauli::X;
  if (bz) return Pauli::Z;
  return Pauli::I;
}

void PauliString::set(int qubit, Pauli p) {
  const std::uint64_t b = bit_of(qubit);
  x &= ~b;
  z &= ~b;
  if (p == Pauli::X || p == Pauli::Y) x |= b;
  if (p == Pauli::Z || p == Pauli::Y) z |= b;
}

int PauliString::max_qubit() const {
  const std::uint64_t s = support();
  return s == 0 ? 0 : 64 - std::countl_zero(s);
}

int PauliString::weight() const { return std::popcount(support()); }

std::string PauliString::label() const {
  if (is_identity()) return "I";
  std::string out;
  std::uint64_t s = support();
  while (s) {
    const int q = std::countr_zero(s) + 1;
    s &= s - 1;
    if (!out.empty()) out += ' ';
    out += pauli_char(at(q));
    out += std::to_string(q);
  }
  return out;
}

PauliString PauliString::parse(const std::string& label) {
  PauliString s;
  std::istringstream in(label);
  std::string tok;
  while (in >> tok) {
    if (tok == "I") continue;
    if (tok.size() < 2) throw std::invalid_argument("bad Pauli token '" + tok + "'");
    Pauli p;
    switch (tok[0]) {
      case 'X': p = Pauli::X; break;
      case 'Y': p = Pauli::Y; break;
      case 'Z': p = Pauli::Z; break;
      default: throw std::invalid_argument("bad Pauli token '" + tok + "'");
    }
    std::size_t pos = 0;
    int q = 0;
    try {
      q = std::stoi(tok.substr(1), &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad Pauli token '" + tok + "'");
    }
    if (pos != tok.size() - 1) throw std::invalid_argument("bad Pauli token '" + tok + "'");
    if (s.at(q) != Pauli::I) throw std::invalid_argument("repeated qubit in '" + label + "'");
    s.set(q, p);
  }
  return s;
}

std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b) {
  // Write P = i^{|x&z|} X^x Z^z. Moving Z^{za} past X^{xb} gives (-1)^{|za&xb|}.
  const int ya = std::popcount(a.x & a.z);
  const int yb = std::popcount(b.x & b.z);
  const PauliString r{a.x ^ b.x, a.z ^ b.z};
  const int yr = std::popcount(r.x & r.z);
  const int sign = std::popcount(a.z & b.x);
  const int k = ya + yb - yr + 2 * sign;
  return {ipow(k), r};
}

bool commutes(const PauliString& a, const PauliString& b) {
  return (std::popcount((a.x & b.z) ^ (a.z & b.x)) & 1) == 0;
}

PauliTerm PauliTerm::from_factors(cplx c, const std::map<int, Pauli>& factors) {
  PauliTerm t;
  t.coeff = c;
  for (const auto& [q, p] : factors) t.ops.set(q, p);
  return t;
}

std::map<int, Pauli> PauliTerm::factors() const {
  std::map<int, Pauli> out;
  std::uint64_t s = ops.support();
  while (s) {
    const int q = std::countr_zero(s) + 1;
    s &= s - 1;
    out[q] = ops.at(q);
  }
  return out;
}

PauliSum::PauliSum(const PauliTerm& t) { add_term(t.ops, t.coeff); }

PauliSum PauliSum::identity(cplx c) {
  PauliSum s;
  s.add_term(PauliString{}, c);
  return s;
}

PauliSum PauliSum::single(int qubit, Pauli p, cplx c) {
  PauliSum s;
  s.add_term(PauliString::single(qubit, p), c);
  return s;
}

void PauliSum::add_term(const PauliString& s, cplx c) {
  auto it = terms_.find(s);
  if (it == terms_.end()) {
    if (std::abs(c) >= kPruneTol) terms_.emplace(s, c);
    return;
  }
  it->second += c;
  if (std::abs(it->second) < kPruneTol) terms_.erase(it);
}

void PauliSum::prune(double tol) {
  std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) < tol; });
}

std::vector<PauliTerm> PauliSum::term_list() const {
  std::vector<PauliTerm> out;
  out.reserve(terms_.size());
  for (const auto& [s, c] : terms_) out.emplace_back(c, s);
  return out;
}

int PauliSum::max_qubit() const {
  int m = 0;
  for (const auto& kv : terms_) m = std::max(m, kv.first.max_qubit());
  return m;
}

cplx PauliSum::coefficient(const PauliString& s) const {
  auto it = terms_.find(s);
  return it == terms_.end() ? cplx{0.0} : it->second;
}

PauliSum PauliSum::adjoint() const {
  PauliSum out;
  for (const auto& [s, c] : terms_) out.terms_.emplace(s, std::conj(c));
  return out;
}

bool PauliSum::is_hermitian(double tol) const {
  for (const auto& kv : terms_)
    if (std::abs(kv.second.imag()) > tol) return false;
  return true;
}

double PauliSum::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& kv : terms_) m = std::max(m, std::abs(kv.second));
  return m;
}

std::string PauliSum::to_text() const {
  // Sorted by label so output is stable.
  std::vector<std::pair<std::string, cplx>> rows;
  for (const auto& [s, c] : terms_) rows.emplace_back(s.label(), c);
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out;
  char buf[96];
  for (const auto& [label, c] : rows) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g ", c.real(), c.imag());
    out += buf;
    out += label;
    out += '\n';
  }
  return out;
}

PauliSum PauliSum::from_text(const std::string& text) {
  PauliSum out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double re = 0, im = 0;
    if (!(ls >> re >> im))
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 'coeff_re coeff_im label'");
    std::string rest;
    std::getline(ls, rest);
    if (rest.find_first_not_of(" \t\r") == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(lineno) + ": missing label");
    out.add_term(PauliString::parse(rest), {re, im});
  }
  return out;
}

PauliSum& PauliSum::operator+=(const PauliSum& o) {
  for (const auto& [s, c] : o.terms_) add_term(s, c);
  return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& o) {
  for (const auto& [s, c] : o.terms_) add_term(s, -c);
  return *this;
}

PauliSum& PauliSum::operator*=(cplx c) {
  for (auto& kv : terms_) kv.second *= c;
  prune();
  return *this;
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
  PauliSum out;
  for (const auto& [sa, ca] : a.terms_)
    for (const auto& [sb, cb] : b.terms_) {
      auto [ph, s] = multiply(sa, sb);
      out.add_term(s, ph * ca * cb);
    }
  return out;
}

PauliSum pauli_add(const PauliSum& a, const PauliSum& b) { return a + b; }

PauliSum pauli_mul(const PauliSum& a, const PauliSum& b) { return a * b; }

PauliSum pauli_commutator(const PauliSum& a, const PauliSum& b) {
  PauliSum out;
  for (const auto& [sa, ca] : a.terms())
    for (const auto& [sb, cb] : b.terms()) {
      if (commutes(sa, sb)) continue;
      auto [ph, s] = multiply(sa, sb);
      out.add_term(s, 2.0 * ph * ca * cb);
    }
  return out;
}

bool mutually_commuting(const PauliSum& s) {
  const auto terms = s.term_list();
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = i + 1; j < terms.size(); ++j)
      if (!commutes(terms[i].ops, terms[j].ops)) return false;
  return true;
}

double distance(const PauliSum& a, const PauliSum& b) { return (a - b).max_abs_coeff(); }

}  // namespace qmb
