#pragma once

#include <vector>

#include "qmb/liecore.hpp"
#include "qmb/meanfield.hpp"

namespace qmb {

// |phi> = U |HW> with U a product of exp(i sum_j zeta_j O_j).
struct GcsState {
  RVec e;          // highest weight
  GroupElement u;  // in the working representation
};

// Requires an irreducible rep (a highest weight is known).
GcsState make_gcs(const AlgebraSpec& spec, const std::vector<RVec>& factors = {});

// <phi| W |phi> for W = sum_j w_j O_j.
cplx gcs_expectation_linear(const AlgebraSpec& spec, const GcsState& s, const CVec& w);
// All <O_j>.
RVec gcs_expectations(const AlgebraSpec& spec, const GcsState& s);
// <phi| W1 W2 |phi>.
cplx gcs_expectation_quadratic(const AlgebraSpec& spec, const GcsState& s, const CVec& w1, const CVec& w2);

inline constexpr int kMaxCorrelationOrder = 6;
// <phi| W^p ... W^1 |phi> with ops = {W^1, ..., W^p}.
cplx gcs_expectation_higher(const AlgebraSpec& spec, const GcsState& s, const std::vector<CVec>& ops);

// State reproducing the given <O_j> as the ground state of H_F = -sum <O_j> O_j
// (with the inverse Gram matrix for non-orthonormal bases). Rejects data whose
// invariant length is below that of a coherent state.
GcsState gcs_prepare_from_expectations(const AlgebraSpec& spec, const RVec& expectations, double tol = 1e-8);

// K sum_j <O_j>^2
double h_purity(const RVec& expectations, double k);

namespace purity_norm {
inline double two_qubit_local() { return 0.5; }
inline double local_qubits(int n) { return 1.0 / n; }
inline double uN(int n) { return 2.0 / n; }
inline double spin1_local() { return 0.75; }
inline double lmg(int n) { return 4.0 / (static_cast<double>(n) * n); }
}  // namespace purity_norm

}  // namespace qmb
