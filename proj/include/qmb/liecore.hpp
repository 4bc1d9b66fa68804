#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmb/common.hpp"

namespace qmb {

// Cartan-Weyl data. Vectors over the algebra basis are complex coefficient
// vectors c with X = sum_j c_j O_j.
struct CartanWeyl {
  std::vector<int> csa;       // basis indices of h_1..h_r
  std::vector<RVec> roots;    // positive roots, lexicographically descending
  std::vector<CVec> raising;  // E_{alpha_j}; E_{-alpha_j} has conjugate coefficients

  int rank() const { return static_cast<int>(csa.size()); }
  int n_roots() const { return static_cast<int>(roots.size()); }
};

// Finite Lie algebra with Hermitian basis O_1..O_M and [O_j, O_j'] = i sum_k f_jj'^k O_k.
class AlgebraSpec {
 public:
  std::string name;
  std::vector<std::string> labels;
  std::vector<double> f;   // f[(j*M + jp)*M + k]
  std::vector<CMat> rep;   // optional faithful representation, rep_norm = Tr(O_1 O_1)
  double rep_norm = 1.0;
  CartanWeyl cw;
  RVec highest_weight;     // of rep when it acts irreducibly; empty otherwise
  CVec highest_weight_vector;

  int dim() const { return static_cast<int>(labels.size()); }
  double structure(int j, int jp, int k) const { return f[(static_cast<std::size_t>(j) * dim() + jp) * dim() + k]; }

  bool has_rep() const { return !rep.empty(); }
  // rep if present, otherwise the adjoint representation
  const std::vector<CMat>& working_rep() const;
  double working_norm() const;
  // G_jk = Re Tr(O_j O_k) in the working representation.
  const RMat& gram() const;

  // Checks antisymmetry, Jacobi, r + 2l = M, positivity of roots, bracket
  // fidelity of rep, and the Cartan-Weyl commutators. Throws on violation.
  void validate(double tol = 1e-10) const;

  // Matrix of sum_j c_j O_j in the working representation.
  CMat matrix_of(const CVec& c) const;
  // Coefficients of a matrix in the working representation (trace projection
  // with the inverse Gram matrix).
  CVec coefficients_of(const CMat& m) const;
  // Residual of the trace projection; nonzero when m lies outside the span.
  double projection_residual(const CMat& m) const;

 private:
  mutable std::vector<CMat> adjoint_cache_;
  mutable RMat gram_cache_;
};

// Bracket of coefficient vectors.
CVec bracket(const AlgebraSpec& spec, const CVec& a, const CVec& b);

// (ad_j)_{k j'} = i f_jj'^k, the matrix of [O_j, .].
std::vector<CMat> adjoint_rep(const AlgebraSpec& spec);
RMat killing_form(const AlgebraSpec& spec);

// Builds structure constants from Hermitian matrices and computes the
// Cartan-Weyl data. The basis is kept as given; see killing_orthonormalize.
AlgebraSpec from_representation(const std::string& name, const std::vector<std::string>& labels,
                                const std::vector<CMat>& mats, const std::vector<int>& csa);
// Builds an algebra from structure constants alone.
AlgebraSpec from_structure_constants(const std::string& name, const std::vector<std::string>& labels,
                                     const std::vector<double>& f, const std::vector<int>& csa);

// Orthonormal basis (CSA first) in the rep trace form, or in the Killing form
// when there is no rep. Rejects a degenerate Killing form.
AlgebraSpec killing_orthonormalize(const AlgebraSpec& spec);

// Recomputes roots and raising operators from f and the CSA indices.
CartanWeyl compute_cartan_weyl(const std::vector<double>& f, int M, const std::vector<int>& csa);

// [E_a, E_b] = N_ab E_{a+b} for positive roots a, b; returns the index of
// a+b (or -1 when it is not a root) and writes N_ab.
int root_addition(const AlgebraSpec& spec, int a, int b, cplx* n_ab);

// Built-in algebras.
AlgebraSpec su2(double spin);              // S_x, S_y, S_z in the (2S+1)-dim rep
AlgebraSpec su2_pauli();                   // sigma_x, sigma_y, sigma_z
AlgebraSpec su3();                         // Gell-Mann matrices
AlgebraSpec su4_two_qubit();               // 15 two-qubit Pauli products
AlgebraSpec uN(int n);                     // fermionic u(N) basis, defining rep
AlgebraSpec uN_fock(int n);                // same basis on the 2^N Fock space
AlgebraSpec so2N_fock(int n);              // (i/2) gamma_a gamma_b on the Fock space
AlgebraSpec local_su2(int n_qubits);       // sigma^j_mu on n qubits
// u(N) basis built from c+ X c (no shift) restricted to the n-particle
// sector, an irreducible rep for 1 <= n < N. Rows follow fock_sector_basis.
AlgebraSpec uN_fock_sector(int n_modes, int n_particles);
std::vector<std::uint64_t> fock_sector_basis(int n_modes, int n_particles);

std::string algebra_to_json(const AlgebraSpec& spec);
AlgebraSpec algebra_from_json(const std::string& text);

// ------------------------------------------------------------ expm

struct ExpmResult {
  CMat value;
  int q = 6;
  int s = 0;
  double norm = 0.0;            // 1-norm of A
  double backward_bound = 0.0;  // bound on |E|/|A| with R_qq(A/2^s)^{2^s} = e^{A+E}
};

// Backward error bound 8 (|A|/2^s)^{2q} (q!)^2/((2q)!(2q+1)!).
double pade_backward_bound(double norm, int q, int s);
// Smallest s with |A|/2^s <= 1/2.
int pade_scaling(double norm);

// Diagonal Pade approximant with scaling and squaring; generic in the scalar type.
template <class Mat>
Mat expm_pade(const Mat& a, int q, int s) {
  using Scalar = typename Mat::Scalar;
  const Eigen::Index n = a.rows();
  Mat x = a;
  Scalar scale(1);
  for (int k = 0; k < s; ++k) scale = scale * Scalar(2);
  x = a / scale;
  Mat num = Mat::Identity(n, n), den = Mat::Identity(n, n), pw = Mat::Identity(n, n);
  // c_j = (2q-j)! q! / ((2q)! j! (q-j)!)
  Scalar c(1);
  for (int j = 1; j <= q; ++j) {
    c = c * Scalar(q - j + 1) / (Scalar(j) * Scalar(2 * q - j + 1));
    pw = pw * x;
    num += c * pw;
    den += ((j % 2) ? Scalar(-1) : Scalar(1)) * c * pw;
  }
  Mat r = den.partialPivLu().solve(num);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

ExpmResult expm(const CMat& a, int q = 6);

// ------------------------------------------------------ group action

// U = U_1 U_2 ... U_m with U_i = exp(i sum_j zeta^(i)_j O_j).
struct GroupElement {
  std::vector<RVec> factors;
  CMat matrix;  // in the working representation

  static GroupElement identity(const AlgebraSpec& spec);
  static GroupElement from_zeta(const AlgebraSpec& spec, const RVec& zeta);
  GroupElement then(const AlgebraSpec& spec, const RVec& zeta) const;  // appends a factor on the right
  bool is_unitary(double tol = 1e-10) const;
};

// nu_jj' = Tr[(U^dag O_j U) O_j'] / norm, so U^dag O_j U = sum_j' nu_jj' O_j'.
RMat adjoint_action_matrix(const AlgebraSpec& spec, const CMat& u);
RVec adjoint_action(const AlgebraSpec& spec, const GroupElement& u, int j);

// e_k - sum_j n_j alpha_j^k for n_j lowerings by root j.
RVec weight_of(const AlgebraSpec& spec, const RVec& highest_weight, const std::vector<int>& descent_counts);

}  // namespace qmb
