#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlqc/posverify.hpp"

using namespace nlqc;
using namespace nlqc::posverify;

namespace {

double entangled_attack_prediction(int n, int N) {
  const int d = 1 << n;
  MubFamily fam = mub::mub_for_dim(d);
  auto [u_ab, target] = mub::povm_from_mub(fam, d);
  InstConfig cfg;
  cfg.n = n;
  cfg.N = N;
  cfg.target = target;
  Povm eff = instprotocols::effective_povm(cfg);
  double p = 0;
  for (int a = 0; a < d; ++a)
    for (int x = 0; x < d; ++x) {
      Vec amps = Vec::Zero(static_cast<long long>(d) * d);
      amps.segment(static_cast<long long>(a) * d, d) = fam.bases[a].mat.col(x);
      p += (amps.adjoint() * eff.elements[x].mat * amps)(0).real();
    }
  return p / (static_cast<double>(d) * d);
}

}  // namespace

TEST_CASE("honest prover always accepts") {
  SpacetimeConfig cfg;
  for (int n : {1, 2, 4}) {
    MubFamily fam = mub::mub_for_dim(1 << n);
    RngStream rng(100 + n);
    for (int s = 0; s < 100; ++s) {
      RngStream r = rng.split(s);
      Transcript t = run_honest(n, cfg, fam, r);
      CHECK(t.accepted);
      CHECK(t.x_hat == t.x);
      CHECK(causality_check(t));
    }
  }
}

TEST_CASE("displaced prover is rejected on timing") {
  SpacetimeConfig cfg;
  cfg.prover_pos = cfg.r_0 + 2 * cfg.delta;
  MubFamily fam = mub::mub_for_dim(2);
  RngStream rng(7);
  for (int s = 0; s < 20; ++s) {
    RngStream r = rng.split(s);
    Transcript t = run_honest(1, cfg, fam, r);
    CHECK_FALSE(t.accepted);
    CHECK(causality_check(t));  // physically consistent, just late
  }
}

TEST_CASE("causality ledger rejects inconsistent transcripts") {
  Transcript t;
  t.actors = {"V0", "V1", "P0~", "P1~"};
  t.positions = {0.0, 2.0, 0.8, 1.2};
  Event e;
  e.from = 2;
  e.to = 3;
  e.emit_time = 0;
  e.arrive_time = 0.1;  // distance is 0.4
  t.events.push_back(e);
  CHECK_FALSE(causality_check(t));

  t.events[0].arrive_time = 0.4;
  CHECK(causality_check(t));

  // payload used before it arrived
  Event l;
  l.from = 3;
  l.to = 1;
  l.emit_time = 0.2;  // the dependency arrives at 0.4
  l.arrive_time = 0.2 + 0.8;
  l.deps = {0};
  t.events.push_back(l);
  CHECK_FALSE(causality_check(t));
  t.events[1].emit_time = 0.4;
  t.events[1].arrive_time = 0.4 + 0.8;
  CHECK(causality_check(t));

  // quantum traffic between adversaries after the challenge in classical mode
  t.classical_only_mode = true;
  t.challenge_emit_time = -1.0;
  t.events[0].kind = PayloadKind::Quantum;
  CHECK_FALSE(causality_check(t));
  t.events[0].kind = PayloadKind::Classical;
  CHECK(causality_check(t));
}

TEST_CASE("entangled attack matches the analytic prediction") {
  SpacetimeConfig cfg;
  RngStream rng(2026);
  for (int N : {1, 2}) {
    const double pred = entangled_attack_prediction(1, N);
    AttackOutcome out = run_entangled_attack(1, N, cfg, 4000, rng);
    CHECK(std::abs(out.acceptance - pred) < 3 * out.stderr_est + 1e-9);
    CHECK(out.ebits_per_trial == 1 * (1 + 2 * N));
    CHECK(causality_check(out.last_transcript));
    CHECK(out.last_transcript.classical_only_mode);
  }
  // at N = 1 the port channel is fully depolarizing: the attack is a coin flip
  CHECK(entangled_attack_prediction(1, 1) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("intercept-resend at n=1 sits at the Breidbart value") {
  SpacetimeConfig cfg;
  RngStream rng(5);
  AttackOutcome out = intercept_resend_attack(1, cfg, 20000, rng);
  const double breidbart = std::cos(3.14159265358979323846 / 8);
  const double pred = breidbart * breidbart;
  CHECK(std::abs(out.acceptance - pred) < 3 * out.stderr_est + 1e-9);
  // stays below the no-entanglement single-round ceiling
  CHECK(out.acceptance <= single_round_bound() + 3 * out.stderr_est);
  CHECK(causality_check(out.last_transcript));
}

TEST_CASE("intercept-resend at n=4 and n=6 stays under the limited-entanglement ceiling") {
  SpacetimeConfig cfg;
  RngStream rng(6);
  AttackOutcome out4 = intercept_resend_attack(4, cfg, 20000, rng);
  // computational-basis attack: (2d-1)/d^2
  const double pred4 = (2.0 * 16 - 1) / 256.0;
  CHECK(std::abs(out4.acceptance - pred4) < 3 * out4.stderr_est + 1e-9);
  CHECK(out4.acceptance <= soundness_limited(4, 0) + 3 * out4.stderr_est);

  RngStream rng6(7);
  AttackOutcome out6 = intercept_resend_attack(6, cfg, 20000, rng6);
  const double pred6 = (2.0 * 64 - 1) / 4096.0;
  CHECK(std::abs(out6.acceptance - pred6) < 3 * out6.stderr_est + 1e-9);
  CHECK(out6.acceptance <= soundness_limited(6, 0) + 3 * out6.stderr_est);
}

TEST_CASE("soundness_limited worked values") {
  CHECK(soundness_limited(4, 0) == doctest::Approx(0.5));
  CHECK(soundness_limited(20, 5) == doctest::Approx(1.0 / 16));
  CHECK(soundness_limited(2, 0) == doctest::Approx(1.0));
  CHECK(is_vacuous(soundness_limited(2, 0)));
  CHECK_FALSE(is_vacuous(soundness_limited(4, 0)));
  CHECK_THROWS_AS(soundness_limited(1, 0), DomainError);
}

TEST_CASE("reduction_bound worked values") {
  CHECK(reduction_bound(0.01, 2, 2) == doctest::Approx(0.04));
  CHECK(reduction_bound(0.3, 1, 1) == doctest::Approx(0.3));
  // k ebits per side give 4^k amplification
  const int k = 3;
  CHECK(reduction_bound(1e-6, 1 << k, 1 << k) == doctest::Approx(std::pow(4.0, k) * 1e-6));
  CHECK_THROWS_AS(reduction_bound(-0.1, 1, 1), DomainError);
}

TEST_CASE("composition plan and the binary entropy inverse") {
  CompositionPlan plan = composition_plan(100, std::pow(2.0, -20));
  CHECK(plan.h_inv_half > 0.10);
  CHECK(plan.h_inv_half < 0.12);
  // independent check of the bisection: h(h^{-1}(1/2)) = 1/2
  const double p = plan.h_inv_half;
  const double h = -p * std::log2(p) - (1 - p) * std::log2(1 - p);
  CHECK(h == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(plan.delta == doctest::Approx(single_round_bound()).epsilon(1e-12));

  CHECK(plan.rounds == static_cast<long long>(std::ceil(220.0 / std::log2(1.0 / plan.delta))));
  CHECK(plan.chain_bound <= std::pow(2.0, -20) * (1 + 1e-12));
  CHECK(plan.seq_bound == doctest::Approx(std::pow(plan.delta, plan.rounds)));

  // boundary: k = 0 and eps = delta needs exactly one round
  CompositionPlan one = composition_plan(0, plan.delta);
  CHECK(one.rounds == 1);
  CHECK(one.chain_bound <= plan.delta * (1 + 1e-12));

  CHECK(single_round_bound() < 1.0);
  CHECK_THROWS_AS(composition_plan(-1, 0.5), DomainError);
  CHECK_THROWS_AS(composition_plan(0, 1.5), DomainError);
}
