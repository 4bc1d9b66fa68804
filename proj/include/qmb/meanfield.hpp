#pragma once

#include <stdexcept>
#include <vector>

#include "qmb/liecore.hpp"

namespace qmb {

// H = sum_k gamma_k h_k + sum_j (iota_j E_j + conj(iota_j) E_-j).
struct CwProjection {
  RVec gamma;
  CVec iota;
};

// Coordinates of a complex coefficient vector in the basis
// (h_1..h_r, E_1..E_l, E_-1..E_-l).
CVec cw_coordinates(const AlgebraSpec& spec, const CVec& coeffs);

// Projection of a real coefficient vector (a Hermitian algebra element).
CwProjection cw_project(const AlgebraSpec& spec, const RVec& coeffs);
// Projection of a matrix in the working rep; throws when it lies outside the span.
CwProjection cw_project(const AlgebraSpec& spec, const CMat& m);
RVec cw_reconstruct(const AlgebraSpec& spec, const CwProjection& p);

// d_C: trace norm squared of the part outside the CSA.
double off_csa_norm(const AlgebraSpec& spec, const RVec& coeffs);

struct JacobiStep {
  RVec h;      // coefficients of U_t^dag H U_t
  RVec zeta;   // U_t = exp(i sum_j zeta_j O_j); empty for a no-op
  int root = -1;
  double dc_before = 0.0;
  double dc_after = 0.0;
};

// One su(2) rotation removing the ladder pair with the largest |iota_j| |E_j|.
JacobiStep jacobi_step(const AlgebraSpec& spec, const RVec& h);

struct DiagonalizeOptions {
  double tol = 1e-10;      // stop when d_C <= tol
  bool weyl_order = true;  // make epsilon anti-dominant so |HW> is the ground state
  int max_iterations = 0;  // 0: jacobi_iteration_cap
};

struct DiagonalizationResult {
  RVec epsilon;                 // H_D = sum_k epsilon_k h_k = U^dag H U
  GroupElement u;               // U = U_1 U_2 ... U_P
  double residual = 0.0;        // d_C of the final element
  int iterations = 0;           // Jacobi rotations
  int weyl_reflections = 0;
  int iteration_cap = 0;
  std::vector<double> history;  // d_C before each rotation, then the final value
};

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 10 ceil(l (ln M - ln(tol / (dc0 / M)))), at least 10.
int jacobi_iteration_cap(int n_roots, int dim, double tol, double dc0);

DiagonalizationResult diagonalize(const AlgebraSpec& spec, const RVec& h, const DiagonalizeOptions& opt = {});

// Single-particle energies of sum_ij lambda_ij c+_i c_j, ascending.
RVec bogolubov_quadratic(const CMat& lambda);
// Coefficients of sum_ij lambda_ij c+_i c_j in the uN / uN_fock basis. The
// Fock version differs by the constant Tr(lambda)/2.
RVec quadratic_to_uN(const CMat& lambda);

}  // namespace qmb
