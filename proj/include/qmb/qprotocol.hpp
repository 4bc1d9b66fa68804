#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmb/common.hpp"
#include "qmb/pauli.hpp"
#include "qmb/spectral.hpp"
#include "qmb/statevector.hpp"

namespace qmb {

struct Circuit {
  int n_qubits = 0;
  int ancilla = 0;  // 0 when the circuit has no ancilla
  std::vector<Gate> gates;
  double global_phase = 0.0;

  Circuit() = default;
  explicit Circuit(int n, int anc = 0) : n_qubits(n), ancilla(anc) {}

  void add(const Gate& g) { gates.push_back(g); }
  void append(const Circuit& other);
  Circuit inverse() const;
  // Every gate conditioned on ctrl; the global phase becomes a controlled phase.
  Circuit controlled(int ctrl, Polarity pol) const;
  void validate() const;
  std::size_t size() const { return gates.size(); }

  std::string to_text() const;
  static Circuit from_text(const std::string& text);
};

void run(StateVector& s, const Circuit& c);
CMat dense_matrix(const Circuit& c);

// One Trotter layer. A layer is either a set of commuting Pauli terms or a
// one-body fermion operator sum_ij m_ij c+_{f+i} c_{f+j}, whose exponential
// is applied exactly by Givens rotations.
struct HamiltonianLayer {
  std::string name;
  PauliSum terms;
  std::optional<CMat> one_body;
  int first_mode = 1;
};

struct HamiltonianSpec {
  int n_qubits = 0;
  std::vector<HamiltonianLayer> layers;

  PauliSum total() const;
  void validate() const;
  // Greedy grouping of the terms of h into commuting layers.
  static HamiltonianSpec from_sum(const PauliSum& h, int n_qubits);
  static HamiltonianLayer one_body_layer(const std::string& name, const CMat& m, int first_mode, int n_qubits);
};

// exp(-i t L) for a commuting Hermitian Pauli sum; identity terms become a phase.
Circuit pauli_sum_exponential(const PauliSum& layer, double t, int n_qubits);
Circuit layer_exponential(const HamiltonianLayer& layer, double t, int n_qubits);
// exp(-i t H) as one dense gate on qubits 1..n_qubits (n_qubits <= 12).
Circuit exact_evolution(const PauliSum& h, double t, int n_qubits);
// exp(-i t H) by eigendecomposition.
CMat expm_hermitian(const CMat& h, double t);

// First-order product of layer exponentials, round(t/dt) steps.
Circuit trotter_evolve(const HamiltonianSpec& h, double t, double dt);
Circuit trotter_steps(const HamiltonianSpec& h, double dt, int steps);

// Elementary gates only (RotX/RotY/RotZ/IsingZZ plus an uncontrolled global
// phase). String exponentials are expanded into ladders.
Circuit compile_elementary(const Circuit& c);

// The Pauli operator P itself as a unitary: e^{i pi/2} e^{-i pi/2 P}.
Circuit pauli_unitary(const PauliString& p, int n_qubits);

// Basis label of the fermionic vacuum |1...1> on N modes.
std::uint64_t fermion_vacuum_label(int n_modes);
// Applied to the vacuum, creates one fermion per listed mode (in order).
Circuit prepare_slater(const std::vector<int>& modes, int n_modes);

enum class ThoulessMethod { Givens, Trotter };

// exp(-i c+ Mbar c) on modes first_mode..first_mode+N-1 of an n_qubits register.
Circuit thouless_rotate(const CMat& mbar, int first_mode, int n_qubits, ThoulessMethod method = ThoulessMethod::Givens,
                        int trotter_steps = 64);
// Fermionic image of a single-particle unitary u: c+_j -> sum_k c+_k u_kj.
Circuit givens_circuit(const CMat& u, int first_mode, int n_qubits);

enum class ControlForm {
  Conditioned,  // every gate conditioned on the ancilla
  Symmetric,    // e^{-iQt/2} e^{+-iQ Z_a t/2}
};

// Acts as e^{-iQt} on the system iff the ancilla is in the selected state.
Circuit controlled_exponential(const PauliSum& q, double t, int ancilla, Polarity pol, int n_qubits,
                               ControlForm form = ControlForm::Conditioned);

// <phi| U^dag V |phi> read out as <sigma_x^a + i sigma_y^a> on an extra
// ancilla (last qubit) prepared in |+>. U, V act on the phi register.
cplx one_ancilla_correlation(const StateVector& phi, const Circuit& u, const Circuit& v);
// Same with U = e^{-i a}, V = e^{-i b}.
cplx one_ancilla_correlation(const StateVector& phi, const PauliSum& a, const PauliSum& b);
// Ancilla readout of a full register where the ancilla is qubit `ancilla`.
cplx ancilla_readout(const StateVector& s, int ancilla);

// <phi| T^dag A^dag T B |phi>: controlled-B, free T, controlled-A.
cplx time_correlation(const StateVector& phi, const Circuit& a, const Circuit& b, const Circuit& t_evolution);

struct EvolutionOptions {
  bool exact = true;
  double dt = 0.05;  // Trotter step when !exact
};

Circuit evolution_circuit(const HamiltonianSpec& h, double t, const EvolutionOptions& opt);
cplx time_correlation(const StateVector& phi, const Circuit& a, const Circuit& b, const HamiltonianSpec& h, double t,
                      const EvolutionOptions& opt = {});

enum class SpectrumForm {
  Controlled,  // e^{-iQt} on the ancilla |1> branch
  Symmetric,   // e^{iQ sigma_z^a t/2}
};

// S(t_j) = <phi|e^{-iQ t_j}|phi>, t_j = j dt, j = 1..M, by ancilla readout.
TimeSeries spectrum_series(const PauliSum& q, const StateVector& phi, double dt, int M,
                           SpectrumForm form = SpectrumForm::Controlled);
// Grid overload; rejects grids other than t_j = j dt.
TimeSeries spectrum_series(const PauliSum& q, const StateVector& phi, const std::vector<double>& t_grid,
                           SpectrumForm form = SpectrumForm::Controlled);
// Trotterized series: one controlled step of size dt/steps_per_sample
// repeated between samples.
TimeSeries spectrum_series_trotter(const HamiltonianSpec& q, const StateVector& phi, double dt, int M,
                                   int steps_per_sample = 1);

struct PostSelected {
  StateVector state;            // normalized system state after success
  double success_probability;  // exact projector expectation
  int n_ancillas;
};

inline constexpr int kMaxBranches = 64;

// sum_l alpha_l U_l |phi> through ceil(log2 L) ancillas: ancillas prepared in
// sum_l alpha_l |l>, controlled U_l, then projection onto the uniform state.
PostSelected prepare_linear_combination(const StateVector& phi, const std::vector<Circuit>& branches,
                                        const std::vector<cplx>& alpha);

}  // namespace qmb
