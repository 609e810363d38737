#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlqc/instprotocols.hpp"
#include "nlqc/mub.hpp"

namespace nlqc {

// One-dimensional spacetime with unit signal speed. Verifiers sit at
// r_v0 < r_0 < r_v1; colluding adversaries must keep |adv - r_0| > delta.
struct SpacetimeConfig {
  double r_v0 = 0.0;
  double r_0 = 1.0;
  double r_v1 = 2.0;
  double delta = 0.1;
  double adv0 = 0.8;  // defaults to r_0 - 2 delta
  double adv1 = 1.2;  // defaults to r_0 + 2 delta
  double prover_pos = 1.0;
  double timing_slack = 0.0;

  void validate() const;
};

enum class PayloadKind { Classical, Quantum };

struct Event {
  int from = 0;
  int to = 0;
  double emit_time = 0;
  double arrive_time = 0;
  PayloadKind kind = PayloadKind::Classical;
  std::string payload;
  std::vector<int> deps;  // indices of events whose payloads this one uses
};

struct Transcript {
  std::vector<std::string> actors;
  std::vector<double> positions;
  std::vector<Event> events;
  bool accepted = false;
  std::vector<int> x, a, x_hat;  // bit vectors
  bool classical_only_mode = false;
  double challenge_emit_time = 0;  // earliest challenge emission
};

struct SoundnessReport {
  std::string protocol;
  std::string assumptions;
  double bound = 0;
  bool vacuous = false;
  std::optional<double> estimate;
  std::optional<double> stderr_est;
};

namespace posverify {

// Structural no-signaling check: every arrival is emit + distance, every
// dependency has arrived at its user's location, and (in classical-only
// mode) no quantum payload travels between adversaries after the
// challenges are emitted.
bool causality_check(const Transcript& t, double slack = 1e-12);

Transcript run_honest(int n, const SpacetimeConfig& cfg, const MubFamily& fam, RngStream& rng);

struct AttackOutcome {
  Transcript last_transcript;
  double acceptance = 0;
  double stderr_est = 0;
  long long trials = 0;
  long long ebits_per_trial = 0;
};

// Both adversaries run the instantaneous measurement protocol on the
// intercepted challenge pair with one
// simultaneous round of classical communication.
AttackOutcome run_entangled_attack(int n, int N, const SpacetimeConfig& cfg, long long trials,
                                   RngStream& rng, const ToleranceConfig& tol = default_tol());

// No-entanglement intercept-resend: the Breidbart basis for n = 1, the
// computational basis plus maximum-likelihood guessing otherwise.
AttackOutcome intercept_resend_attack(int n, const SpacetimeConfig& cfg, long long trials,
                                      RngStream& rng);

// Soundness-bound calculators.
double soundness_limited(int n, int m);                          // 2 * 2^(m - n/2)
double reduction_bound(double eps0, int dimAprime, int dimBprime);
double single_round_bound();                                     // 1 - h^{-1}(1/2)
bool is_vacuous(double bound);

struct CompositionPlan {
  double h_inv_half = 0;
  double delta = 0;       // 1 - h^{-1}(1/2)
  double l_real = 0;      // (2k + log2(1/eps)) / log2(1/delta)
  long long rounds = 0;   // minimal integer L >= l_real
  double seq_bound = 0;   // delta^L
  double chain_bound = 0; // 4^k * delta^L, must be <= eps
};

CompositionPlan composition_plan(int k, double eps);

}  // namespace posverify
}  // namespace nlqc
