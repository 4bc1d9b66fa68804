#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qmb/common.hpp"
#include "qmb/pauli.hpp"

namespace qmb {

inline constexpr int kMaxRegisterQubits = 26;
inline constexpr int kMaxDenseQubits = 12;

// Dense amplitude vector. Qubit 1 is the most significant bit of the basis
// label, so label b has qubit q in bit (n - q).
class StateVector {
 public:
  StateVector() = default;
  StateVector(int n_qubits, CVec amplitudes);

  int n_qubits() const { return n_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const CVec& amplitudes() const { return amps_; }
  CVec& amplitudes() { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }

  double norm() const { return amps_.norm(); }
  void normalize();
  // <this|other>
  cplx overlap(const StateVector& other) const;

 private:
  int n_ = 0;
  CVec amps_;
};

StateVector new_register(int n, std::uint64_t basis_label);
StateVector random_state(int n, std::uint64_t seed);

enum class Axis { X, Y, Z };

enum class GateKind { RotX, RotY, RotZ, IsingZZ, PauliStringExp, GlobalPhase, Dense };

// Control restricts a gate to the branch where the control qubit is |0>
// (OnZero) or |1> (OnOne).
enum class Polarity { None, OnZero, OnOne };

struct Gate {
  GateKind kind = GateKind::RotZ;
  double angle = 0.0;        // radians; GlobalPhase multiplies by e^{i angle}
  std::vector<int> targets;  // 1-based qubits
  PauliString pauli;         // PauliStringExp only: e^{-i angle/2 P}
  std::shared_ptr<const CMat> matrix;  // Dense only; targets[0] is the leading factor
  int control = 0;
  Polarity polarity = Polarity::None;

  static Gate rot(Axis axis, int qubit, double theta);
  static Gate ising(int j, int k, double omega);
  static Gate pauli_exp(const PauliString& p, double theta);
  static Gate phase(double phi);
  static Gate dense(std::vector<int> targets, CMat u);

  Gate controlled(int ctrl, Polarity pol) const;
  Gate inverse() const;
  int max_qubit() const;
  std::string to_text() const;
  static Gate from_text(const std::string& line);
};

enum class ExpPath { Direct, Ladder };

void apply_rotation(StateVector& s, Axis axis, int qubit, double theta);
void apply_ising(StateVector& s, int j, int k, double omega);
// e^{-i theta/2 c P} for a term c P with real c.
void apply_pauli_string_exp(StateVector& s, const PauliTerm& term, double theta, ExpPath path = ExpPath::Direct);
void apply_gate(StateVector& s, const Gate& g);
void apply_gates(StateVector& s, const std::vector<Gate>& gates);
// Apply g only where (label & mask) == value; mask/value are basis-label bits.
void apply_gate_on_branch(StateVector& s, const Gate& g, std::size_t mask, std::size_t value);
// Basis-label bit of qubit q in an n-qubit register.
inline std::size_t label_bit(int n, int q) { return std::size_t{1} << (n - q); }

// Elementary gate sequence (RotX/RotY/RotZ/IsingZZ) realizing e^{-i theta/2 P}.
std::vector<Gate> ladder_decomposition(const PauliString& p, double theta);

cplx expectation(const StateVector& s, const PauliSum& op);
cplx expectation(const StateVector& s, const PauliString& p);
// op |psi>, not normalized.
CVec apply_sum(const StateVector& s, const PauliSum& op);

CMat dense_matrix(const PauliSum& op, int n);
CMat dense_matrix(const Gate& g, int n);
CMat dense_matrix(const std::vector<Gate>& gates, int n);

// Largest |<a|b>| / (|a||b|) equals 1 within tol. phase receives <a|b>/|<a|b>|.
bool equal_up_to_phase(const CVec& a, const CVec& b, double tol, cplx* phase = nullptr);
bool equal_up_to_phase(const CMat& a, const CMat& b, double tol, cplx* phase = nullptr);

// Measurement of all qubits in the logical basis; returns label -> count.
std::map<std::uint64_t, int> sample_shots(const StateVector& s, int shots, std::uint64_t seed);
// Estimate <P> from shots after rotating into the eigenbasis of P.
double sampled_expectation(const StateVector& s, const PauliString& p, int shots, std::uint64_t seed);

}  // namespace qmb
