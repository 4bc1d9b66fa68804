#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qmb/common.hpp"
#include "qmb/pauli.hpp"
#include "qmb/qprotocol.hpp"
#include "qmb/spectral.hpp"
#include "qmb/statevector.hpp"

namespace qmb {

// ------------------------------------------------------------ Fano-Anderson

// Impurity b coupled to mode k_0 of an n-site ring:
// H = sum_l eps_{k_l} n_{k_l} + eps n_b + V (c+_{k_0} b + b+ c_{k_0}).
// Qubit 1 is the impurity, qubit l+2 is mode k_l.
struct FanoAnderson {
  int n = 1;
  double tau = 1.0;
  double v = 0.0;
  double eps = 0.0;

  // n = 1 with eps_{k_0} given directly.
  static FanoAnderson single_mode(double ek0, double eps, double v);
  double ek(int l) const;  // -2 tau cos(2 pi l/n)
  int n_qubits() const { return n + 1; }
  void validate() const;
};

// Includes the constant (identity) term.
PauliSum fano_hamiltonian(const FanoAnderson& m);
HamiltonianSpec fano_spec(const FanoAnderson& m);
// One fermion in k_0, impurity empty.
std::uint64_t fano_initial_label(const FanoAnderson& m);
// n = 1: eigenvalues of the one-particle block, ascending.
std::array<double, 2> fano_one_particle_levels(const FanoAnderson& m);
// n = 1: G(t) = <phi| T^dag b T b+ |phi> in closed form.
cplx fano_correlation_closed(const FanoAnderson& m, double t);
// G(t) by the one-ancilla circuit. The impurity of phi is empty, so b+ may be
// replaced by sigma_x^1 on the right and b by sigma_x^1 on the left.
cplx fano_correlation_circuit(const FanoAnderson& m, double t, const EvolutionOptions& opt = {});
// S(t_j) = <phi| e^{-iHt_j} |phi> by ancilla readout.
TimeSeries fano_spectrum_series(const FanoAnderson& m, double dt, int M);

// ------------------------------------------------------------------ Hubbard

// N_x x N_y lattice with PBC. A direction of length 1 has no bonds; one of
// length 2 has its bond counted from both ends.
struct Hubbard2D {
  int nx = 4;
  int ny = 2;
  double tx = 1.0;
  double ty = 1.0;
  double u = 4.0;

  int sites() const { return nx * ny; }
  int modes() const { return 2 * sites(); }
  void validate() const;
};

inline constexpr int kMaxHubbardSites = 8;

// Site (i, j), 1 <= i <= N_x, 1 <= j <= N_y. Spin up modes come first.
int hubbard_mode(const Hubbard2D& m, int i, int j, int spin);
// T_ab with K_sigma = sum_ab T_ab c+_a c_b.
RMat hubbard_hopping_matrix(const Hubbard2D& m);

struct HubbardHamiltonian {
  PauliSum h;            // full JW image
  HamiltonianSpec spec;  // layers K_up, K_down, V
};

HubbardHamiltonian hubbard_hamiltonian(const Hubbard2D& m);

// Orbitals of T + tie_break diag(1..L), ascending; columns are orbitals.
CMat hubbard_orbitals(const Hubbard2D& m, double tie_break = 1e-3);
// Slater determinant filling the lowest n_up / n_down orbitals.
Circuit hubbard_mf_circuit(const Hubbard2D& m, int n_up, int n_down, double tie_break = 1e-3);
StateVector hubbard_mf_state(const Hubbard2D& m, int n_up, int n_down, double tie_break = 1e-3);
// Trotterized S(t) with the three-layer split, steps_per_sample steps per dt.
TimeSeries hubbard_spectrum_series(const Hubbard2D& m, const StateVector& phi, double dt, int M,
                                   int steps_per_sample = 1);

// ----------------------------------------------------------------- XY chain

// H = -g sum_i [(1+gamma) sx_i sx_{i+1} + (1-gamma) sy_i sy_{i+1}] + sum_i sz_i
// with PBC, in its K = +1 sector, solved by a Bogolubov transformation.
struct XYChain {
  int n = 400;
  double gamma = 1.0;
  void validate() const;
};

struct XYSolution {
  std::vector<double> k;    // antiperiodic set +-pi/N, ..., +-(N-1)pi/N
  std::vector<double> phi;  // Bogolubov angle, 0 at g = 0
  std::vector<double> xi;   // quasiparticle energies
  std::vector<double> v2;   // <c+_k c_k> in the ground state
  double purity = 0.0;      // (4/N) sum (v_k^2 - 1/2)^2
  double shifted = 0.0;     // purity - 1/(1+gamma)
  double gap = 0.0;         // min_k xi_k
};

XYSolution xy_exact(const XYChain& m, double g);
// N -> infinity closed form.
double xy_purity_thermodynamic(double gamma, double g);
// (2/N)(<N^2> - <N>^2) from the (k, -k) pair occupations.
double xy_number_fluctuation(const XYChain& m, double g);

// ---------------------------------------------------------------------- LMG

// H = J_z + (V/2N)(J_+^2 + J_-^2) + (W/2N)(J_+J_- + J_-J_+) on J = N/2.
struct LMG {
  int n = 100;
  double v = 0.0;
  double w = 0.0;

  double delta() const { return std::abs(v) - w; }
  void validate() const;
};

inline constexpr int kMaxLmgParticles = 4000;

// Ground state of one parity sector: m = -J + 2i + parity.
struct LMGSector {
  int parity = 0;
  double energy = 0.0;
  double jz = 0.0;
  std::vector<double> m;  // J_z eigenvalues of the sector basis
  RVec vector;
};

struct LMGClassical {
  double theta = 0.0;
  double phi = 0.0;
  double energy = 0.0;  // per particle
  double purity = 0.0;  // cos^2 theta
};

struct LMGSolution {
  double energy_per_particle = 0.0;
  double n_up = 0.0;  // 1/2 + <J_z>/N
  double purity = 0.0;
  double jz = 0.0;
  int parity = 0;
  LMGClassical classical;
};

// Dense (N+1)-dim matrix in the basis m = -J..J (small N only).
RMat lmg_matrix(const LMG& m);
LMGSector lmg_sector(const LMG& m, int parity);
LMGClassical lmg_classical(const LMG& m);
LMGSolution lmg_exact(const LMG& m);

}  // namespace qmb
