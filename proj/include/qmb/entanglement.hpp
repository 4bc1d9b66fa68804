#pragma once

#include <vector>

#include "qmb/common.hpp"

namespace qmb {

// Throws unless rho is Hermitian, has unit trace and no eigenvalue below -1e-10.
void validate_density_matrix(const CMat& rho);
CMat density_matrix(const CVec& psi);
// Reduced density matrix of subsystem `keep` (0-based) of a pure state on
// subsystems of dimensions dims; the first subsystem is the most significant.
CMat reduced_density_matrix(const CVec& psi, const std::vector<int>& dims, int keep);

// Entropy in bits of either side of the cut d_a x d_b.
double schmidt_entropy(const CVec& psi, int d_a, int d_b);
// Wootters concurrence of a two-qubit density matrix.
double concurrence(const CMat& rho);
// K' sum_j (Tr rho_j^2 - 1/d_j) with K' = 1 / sum_j (1 - 1/d_j).
double local_purity(const CVec& psi, const std::vector<int>& dims);
// (2/N) sum over the Hermitian u(N) basis of <O_j>^2 for a state on 2^N Fock states.
double uN_purity(const CVec& psi, int n_modes);
// <(r1.sigma) x (r2.sigma)> for a two-qubit pure state.
double bell_correlation(const CVec& psi, const RVec& r1, const RVec& r2);

}  // namespace qmb
