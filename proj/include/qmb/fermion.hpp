#pragma once

#include <map>
#include <vector>

#include "qmb/common.hpp"
#include "qmb/pauli.hpp"

namespace qmb {

// Creation (dagger) or annihilation operator on a 1-based mode.
struct LadderOp {
  int mode = 1;
  bool dagger = false;

  friend bool operator==(const LadderOp&, const LadderOp&) = default;
  friend auto operator<=>(const LadderOp&, const LadderOp&) = default;
};

inline LadderOp cdag(int j) { return {j, true}; }
inline LadderOp cann(int j) { return {j, false}; }

// An ordered product of ladder operators with a coefficient. No reordering
// is applied; used for anyons and bosons whose exchange rules differ.
struct LadderWord {
  cplx coeff{1.0, 0.0};
  std::vector<LadderOp> ops;
};

// Fermionic polynomial kept in normal order: creators ascending, then
// annihilators ascending.
class FermionExpr {
 public:
  using Monomial = std::vector<LadderOp>;

  FermionExpr() = default;

  static FermionExpr scalar(cplx c);
  static FermionExpr create(int j);
  static FermionExpr annihilate(int j);
  static FermionExpr number(int j);
  // Product c_{ops[0]} c_{ops[1]} ... brought to normal order.
  static FermionExpr product(const std::vector<LadderOp>& ops, cplx c = 1.0);
  // sum_ij m_ij c+_i c_j
  static FermionExpr quadratic(const CMat& m);

  const std::map<Monomial, cplx>& terms() const { return terms_; }
  int max_mode() const;
  bool empty() const { return terms_.empty(); }

  FermionExpr adjoint() const;

  FermionExpr& operator+=(const FermionExpr& o);
  FermionExpr& operator-=(const FermionExpr& o);
  FermionExpr& operator*=(cplx c);
  friend FermionExpr operator+(FermionExpr a, const FermionExpr& b) { return a += b; }
  friend FermionExpr operator-(FermionExpr a, const FermionExpr& b) { return a -= b; }
  friend FermionExpr operator*(FermionExpr a, cplx c) { return a *= c; }
  friend FermionExpr operator*(cplx c, FermionExpr a) { return a *= c; }
  friend FermionExpr operator*(const FermionExpr& a, const FermionExpr& b);
  friend bool operator==(const FermionExpr& a, const FermionExpr& b) { return a.terms_ == b.terms_; }

 private:
  void add_normal_ordered(Monomial ops, cplx c);
  std::map<Monomial, cplx> terms_;
};

FermionExpr anticommutator(const FermionExpr& a, const FermionExpr& b);

// c_j = prod_{l<j} (-Z_l) S-_j with S- = (X - iY)/2. Occupied mode = |0>.
PauliSum jordan_wigner(const FermionExpr& expr, int n_modes);
PauliSum jw_annihilation(int j, int n_modes);
PauliSum jw_creation(int j, int n_modes);
PauliSum jw_number(int j, int n_modes);

// Dense image of hard-core anyon operators with statistical angle theta.
CMat anyon_matrix(const LadderOp& op, double theta, int n_modes);
CMat anyon_map(const std::vector<LadderWord>& expr, double theta, int n_modes);
CMat anyon_number(int j, int n_modes);

// Unary (one-cold) encoding of N bosonic modes, at most n_max per mode.
struct BosonEncoding {
  int n_modes = 1;
  int n_max = 1;

  BosonEncoding(int modes, int max_per_site);
  int qubits_per_mode() const { return n_max + 1; }
  int n_qubits() const { return n_modes * (n_max + 1); }
  // Qubit carrying level n (0..n_max) of mode j (1-based).
  int qubit(int n, int j) const;
  // Basis label of the mapped occupation-number state.
  std::uint64_t basis_label(const std::vector<int>& occupations) const;
};

PauliSum boson_creation(int j, const BosonEncoding& enc);
PauliSum boson_annihilation(int j, const BosonEncoding& enc);
PauliSum boson_number(int j, const BosonEncoding& enc);
// Ordered products of b / b+ mapped term by term.
PauliSum boson_map(const std::vector<LadderWord>& expr, const BosonEncoding& enc);
// (n_max+1)-dimensional truncated creation matrix.
RMat restricted_boson_creation(int n_max);

// Lattice site (l, m) with 1 <= l <= ny, 1 <= m <= nx to linear mode index.
int mode_reindex_2d(int l, int m, int nx, int ny);

}  // namespace qmb
