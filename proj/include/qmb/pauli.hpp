#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qmb/common.hpp"

namespace qmb {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline constexpr double kPruneTol = 1e-14;

// Tensor product of Pauli factors. Bit (q-1) of x/z belongs to qubit q
// (qubits are 1-based). X sets x, Z sets z, Y sets both.
struct PauliString {
  std::uint64_t x = 0;
  std::uint64_t z = 0;

  static constexpr int kMaxQubits = 64;

  static PauliString single(int qubit, Pauli p);
  static PauliString parse(const std::string& label);

  Pauli at(int qubit) const;
  void set(int qubit, Pauli p);
  bool is_identity() const { return (x | z) == 0; }
  std::uint64_t support() const { return x | z; }
  int max_qubit() const;
  int weight() const;
  std::string label() const;

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.x == b.x && a.z == b.z;
  }
  friend bool operator!=(const PauliString& a, const PauliString& b) { return !(a == b); }
  friend bool operator<(const PauliString& a, const PauliString& b) {
    return a.x != b.x ? a.x < b.x : a.z < b.z;
  }
};

// a * b = phase * s
std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b);
bool commutes(const PauliString& a, const PauliString& b);

struct PauliTerm {
  cplx coeff{1.0, 0.0};
  PauliString ops;

  PauliTerm() = default;
  PauliTerm(cplx c, PauliString s) : coeff(c), ops(s) {}

  static PauliTerm from_factors(cplx c, const std::map<int, Pauli>& factors);
  std::map<int, Pauli> factors() const;
};

class PauliSum {
 public:
  PauliSum() = default;
  PauliSum(const PauliTerm& t);  // NOLINT(google-explicit-constructor)

  static PauliSum identity(cplx c = 1.0);
  static PauliSum single(int qubit, Pauli p, cplx c = 1.0);
  static PauliSum from_text(const std::string& text);

  void add_term(const PauliString& s, cplx c);
  void prune(double tol = kPruneTol);

  const std::map<PauliString, cplx>& terms() const { return terms_; }
  std::vector<PauliTerm> term_list() const;
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  int max_qubit() const;
  cplx coefficient(const PauliString& s) const;

  PauliSum adjoint() const;
  bool is_hermitian(double tol = 1e-12) const;
  // Largest |c| over terms; zero for the empty sum.
  double max_abs_coeff() const;

  std::string to_text() const;

  PauliSum& operator+=(const PauliSum& o);
  PauliSum& operator-=(const PauliSum& o);
  PauliSum& operator*=(cplx c);

  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, cplx c) { return a *= c; }
  friend PauliSum operator*(cplx c, PauliSum a) { return a *= c; }
  friend PauliSum operator*(const PauliSum& a, const PauliSum& b);

  friend bool operator==(const PauliSum& a, const PauliSum& b) { return a.terms_ == b.terms_; }

 private:
  std::map<PauliString, cplx> terms_;
};

PauliSum pauli_add(const PauliSum& a, const PauliSum& b);
PauliSum pauli_mul(const PauliSum& a, const PauliSum& b);
PauliSum pauli_commutator(const PauliSum& a, const PauliSum& b);
// True when every pair of strings in the sum commutes.
bool mutually_commuting(const PauliSum& s);
// Max |coefficient| of a - b.
double distance(const PauliSum& a, const PauliSum& b);

}  // namespace qmb
