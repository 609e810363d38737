#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "nlqc/portbased.hpp"
#include "nlqc/qcore.hpp"

namespace nlqc {

// Instantaneous-protocol configuration: n qubits per side, N ports, and the
// non-local target (a POVM for the measurement protocol, a unitary for the
// computation protocol).
struct InstConfig {
  int n = 1;
  int N = 1;
  std::variant<Povm, ComplexMatrix> target;
  std::uint64_t seed = 0;
};

struct RunTranscript {
  std::vector<int> bob_teleport_outcome;        // t, one Pauli index per qubit
  int alice_port_index = 0;                     // i in {1..N}
  std::vector<std::vector<int>> port_outcomes;  // gamma_j (measure) or v_j (unitary)
  int charlie_output = -1;                      // measure mode
  std::string charlie_label;
  std::optional<DensityOperator> final_state;   // unitary mode
  double fidelity = 0;                          // vs U|psi>, unitary mode
  long long ebits_consumed = 0;
};

// Which party acts first in the simulator; the outcome distribution must
// not depend on this (the local operations commute).
enum class StepOrder { BobFirst, AliceFirst };

namespace instprotocols {

// Port-based teleportation resources on the doubled space (d = 4^n),
// shareable between runs and input states.
struct PbtResources {
  int d = 0;  // 4^n
  int N = 0;
  Povm alice_povm;         // PGM in the (A, A''_1..A''_N) ordering
  QuantumChannel channel;  // induced teleportation channel
};

std::shared_ptr<const PbtResources> make_pbt_resources(int d, int N,
                                                       const ToleranceConfig& tol = default_tol());

// Instantaneous measurement: teleportation branch + port measurement +
// per-port target
// measurements, sampled from exactly computed conditional distributions.
class MeasurementProtocol {
 public:
  MeasurementProtocol(const InstConfig& cfg, const PureState& psi,
                      std::shared_ptr<const PbtResources> shared = nullptr,
                      const ToleranceConfig& tol = default_tol());

  RunTranscript run(RngStream& rng, StepOrder order = StepOrder::BobFirst) const;
  int outcome_count() const { return static_cast<int>(target_.size()); }
  const Povm& target() const { return target_; }

 private:
  int n_, N_, d_;  // d_ = 4^n
  Povm target_;
  std::shared_ptr<const PbtResources> pbt_;
  std::vector<std::vector<double>> p_joint_;       // [t][i]
  std::vector<double> p_port_;                     // marginal over t
  std::vector<std::vector<Mat>> rho_;              // [t][i], Bob's ports given (t,i)
  std::vector<std::vector<Mat>> target_conj_;      // [t][gamma]
};

// Instantaneous computation: same port layer; Bob applies U with the exact
// Pauli correction,
// ordinary teleportation returns the A half to Alice.
class UnitaryProtocol {
 public:
  UnitaryProtocol(const InstConfig& cfg, const PureState& psi,
                  std::shared_ptr<const PbtResources> shared = nullptr,
                  const ToleranceConfig& tol = default_tol());

  RunTranscript run(RngStream& rng, StepOrder order = StepOrder::BobFirst) const;

 private:
  int n_, N_, d_;
  std::vector<std::vector<double>> p_joint_;
  std::vector<std::vector<Mat>> final_state_;  // [t][i] on the doubled space
  std::vector<std::vector<double>> fidelity_;  // [t][i] vs U|psi>
};

// The exact POVM the measurement protocol realizes: the Pauli-twirled
// pullback of the
// target through the port-based channel.
Povm effective_povm(const InstConfig& cfg, const ToleranceConfig& tol = default_tol());

// The exact CPTP map the computation protocol realizes.
QuantumChannel effective_channel(const InstConfig& cfg,
                                 const ToleranceConfig& tol = default_tol());

RunTranscript simulate_measurement_run(const InstConfig& cfg, const PureState& psi,
                                       RngStream& rng, StepOrder order = StepOrder::BobFirst,
                                       const ToleranceConfig& tol = default_tol());
RunTranscript simulate_unitary_run(const InstConfig& cfg, const PureState& psi, RngStream& rng,
                                   StepOrder order = StepOrder::BobFirst,
                                   const ToleranceConfig& tol = default_tol());

struct ResourceReport {
  double port_count = 0;         // N = 2^(8n+4)/eps^2
  double povm_ebits = 0;         // n(1 + 2N)
  double unitary_ebits = 0;      // n(1 + 3N)
  double vaidman_rounds = 0;     // ~ log(1/eps) 2^(4n)
  double vaidman_log2_ebits = 0; // ~ log2(4n) + 4n(R-1)
};

ResourceReport resource_report(int n, double eps);

// named targets
Povm bell_basis_povm();
Povm computational_povm(int qubits);
Mat cnot_gate();
Mat swap_gate();

}  // namespace instprotocols
}  // namespace nlqc
