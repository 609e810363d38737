#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nlqc/linalg.hpp"
#include "nlqc/rng.hpp"

namespace nlqc {

// Normalized pure state over a list of subsystems. Subsystem 0 is the most
// significant index of the flat amplitude vector.
struct PureState {
  Vec amps;
  std::vector<int> dims;

  PureState() = default;
  PureState(Vec a, std::vector<int> d);
  int dim() const { return static_cast<int>(amps.size()); }
  int subsystems() const { return static_cast<int>(dims.size()); }
  void check_normalized(const ToleranceConfig& tol = default_tol()) const;
};

struct DensityOperator {
  ComplexMatrix matrix;

  DensityOperator() = default;
  explicit DensityOperator(ComplexMatrix m) : matrix(std::move(m)) {}
  int dim() const { return static_cast<int>(matrix.rows()); }
  void validate(const ToleranceConfig& tol = default_tol()) const;
};

struct Povm {
  std::vector<ComplexMatrix> elements;
  std::vector<std::string> labels;

  int dim() const { return elements.empty() ? 0 : static_cast<int>(elements[0].rows()); }
  int size() const { return static_cast<int>(elements.size()); }
  // Element-PSD and sum-to-identity checks; throws ValidationError.
  void validate(const ToleranceConfig& tol = default_tol()) const;
};

// CPTP map stored as its Choi matrix J = (E (x) I)(|Phi><Phi|) on the
// out (x) in space, with |Phi> normalized so tr J = 1.
struct QuantumChannel {
  ComplexMatrix choi;
  int dim_in = 0;
  int dim_out = 0;

  void validate(const ToleranceConfig& tol = default_tol()) const;
};

struct MeasurementRecord {
  std::vector<int> outcome;
  std::string label;
  double probability = 0.0;
  std::variant<std::monostate, PureState, DensityOperator> post;
};

namespace qcore {

PureState max_entangled(int d);
Vec max_entangled_vec(int d);

ComplexMatrix pauli(int k);
ComplexMatrix pauli_string(const std::vector<int>& k);

// --- statevector utilities --------------------------------------------------

// this <- this (x) other, appending other's subsystems at the end.
PureState tensor(const PureState& a, const PureState& b);
void apply_unitary(PureState& s, const Mat& u, const std::vector<int>& subs);
Mat reduced_density(const PureState& s, const std::vector<int>& keep);
// Samples the computational outcome on `subs`, collapses and removes them.
MeasurementRecord measure_computational(PureState& s, const std::vector<int>& subs,
                                        RngStream& rng,
                                        const ToleranceConfig& tol = default_tol());

// Bell-basis measurement between each data qubit and its EPR half; the
// measured subsystems are removed from the state. Outcome digits are Pauli
// indices k with post-state sigma_k|psi> held by the remote halves.
MeasurementRecord teleport_measure(PureState& state, const std::vector<int>& qubit_indices,
                                   const std::vector<int>& epr_indices, RngStream& rng,
                                   const ToleranceConfig& tol = default_tol());

// --- channels ----------------------------------------------------------------

QuantumChannel choi_of(const std::function<Mat(const Mat&)>& map, int dim_in,
                       const ToleranceConfig& tol = default_tol());
QuantumChannel identity_channel(int d);
QuantumChannel depolarizing_channel(int d);
QuantumChannel unitary_channel(const Mat& u);
double ent_fidelity(const QuantumChannel& ch);
Mat apply_channel(const QuantumChannel& ch, const Mat& rho);
DensityOperator apply_channel(const QuantumChannel& ch, const DensityOperator& rho);
// Heisenberg picture: tr[X E(rho)] = tr[adjoint(X) rho].
Mat channel_adjoint(const QuantumChannel& ch, const Mat& x);
QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first);
// POVM regarded as a CPTP map with classical (diagonal) output.
QuantumChannel povm_as_channel(const Povm& p);
// Diagnostic Kraus decomposition recovered from the Choi spectrum.
std::vector<Mat> kraus_of(const QuantumChannel& ch,
                          const ToleranceConfig& tol = default_tol());

struct ChoiDistance {
  double half_trace_dist = 0.0;  // (1/2)||J(a) - J(b)||_1
  double diamond_upper = 0.0;    // 2 * dim_in * ||J(a) - J(b)||_1
};
ChoiDistance choi_trace_distance(const QuantumChannel& a, const QuantumChannel& b);

// --- measurement -------------------------------------------------------------

MeasurementRecord sample_povm(const Povm& p, const DensityOperator& rho, RngStream& rng,
                              const ToleranceConfig& tol = default_tol());

// Born probabilities tr(E_i rho) for all outcomes.
std::vector<double> povm_probabilities(const Povm& p, const Mat& rho);

}  // namespace qcore
}  // namespace nlqc
