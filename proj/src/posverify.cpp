#include "nlqc/posverify.hpp"

#include <cmath>
#include <memory>

namespace nlqc {

void SpacetimeConfig::validate() const {
  if (!(r_v0 < r_0 && r_0 < r_v1)) throw DomainError("spacetime: need r_v0 < r_0 < r_v1");
  if (!(delta > 0)) throw DomainError("spacetime: delta must be positive");
  if (std::abs(adv0 - r_0) <= delta || std::abs(adv1 - r_0) <= delta)
    throw DomainError("spacetime: adversaries must be farther than delta from r_0");
  if (!(r_v0 < adv0 && adv0 < r_0 && r_0 < adv1 && adv1 < r_v1))
    throw DomainError("spacetime: adversaries must sit strictly between the verifiers");
}

namespace posverify {

namespace {

double dist(const Transcript& t, int from, int to) {
  return std::abs(t.positions[to] - t.positions[from]);
}

int push_event(Transcript& t, int from, int to, double emit, PayloadKind kind,
               std::string payload, std::vector<int> deps) {
  Event e;
  e.from = from;
  e.to = to;
  e.emit_time = emit;
  e.arrive_time = emit + dist(t, from, to);
  e.kind = kind;
  e.payload = std::move(payload);
  e.deps = std::move(deps);
  t.events.push_back(std::move(e));
  return static_cast<int>(t.events.size()) - 1;
}

std::vector<int> bits_of(long long v, int n) {
  std::vector<int> b(n);
  for (int k = n - 1; k >= 0; --k) {
    b[k] = static_cast<int>(v & 1);
    v >>= 1;
  }
  return b;
}

double hinv_half() {
  // binary entropy is monotone on [0, 1/2]; bisect h(p) = 1/2
  auto h = [](double p) {
    return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
  };
  double lo = 1e-15, hi = 0.5;
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo + hi) / 2;
    (h(mid) < 0.5 ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

}  // namespace

bool causality_check(const Transcript& t, double slack) {
  for (std::size_t idx = 0; idx < t.events.size(); ++idx) {
    const Event& e = t.events[idx];
    if (std::abs(e.arrive_time - (e.emit_time + dist(t, e.from, e.to))) > slack) return false;
    for (int d : e.deps) {
      if (d < 0 || d >= static_cast<int>(idx)) return false;
      const Event& dep = t.events[d];
      if (dep.to != e.from) return false;
      if (dep.arrive_time > e.emit_time + slack) return false;
    }
    if (t.classical_only_mode && e.kind == PayloadKind::Quantum &&
        e.emit_time >= t.challenge_emit_time - slack) {
      // adversaries are the actors beyond the two verifiers and the prover slot
      const bool between_adversaries = e.from >= 2 && e.to >= 2 && e.from != e.to;
      if (between_adversaries) return false;
    }
  }
  return true;
}

Transcript run_honest(int n, const SpacetimeConfig& cfg, const MubFamily& fam, RngStream& rng) {
  cfg.validate();
  const int d = 1 << n;
  if (static_cast<int>(fam.bases.size()) < d)
    throw ShapeError("run_honest: family does not provide 2^n bases");

  Transcript t;
  t.actors = {"V0", "V1", "P"};
  t.positions = {cfg.r_v0, cfg.r_v1, cfg.prover_pos};

  const long long a = rng.uniform_int(d);
  const long long x = rng.uniform_int(d);
  t.a = bits_of(a, n);
  t.x = bits_of(x, n);

  // challenges are timed to reach the claimed position r_0 at time 0
  const double d0 = std::abs(cfg.r_0 - cfg.r_v0);
  const double d1 = std::abs(cfg.r_v1 - cfg.r_0);
  t.challenge_emit_time = std::min(-d0, -d1);
  const int ev_a = push_event(t, 0, 2, -d0, PayloadKind::Classical, "a", {});
  const int ev_q = push_event(t, 1, 2, -d1, PayloadKind::Quantum, "U_a|x>", {});

  // prover measures in basis a as soon as both challenges are present
  const double ready = std::max(t.events[ev_a].arrive_time, t.events[ev_q].arrive_time);
  Vec psi = fam.bases[a].mat.col(x);
  std::vector<double> probs(d);
  for (int j = 0; j < d; ++j) probs[j] = std::norm((fam.bases[a].mat.col(j).adjoint() * psi)(0));
  const long long xh = rng.sample_discrete(probs);
  t.x_hat = bits_of(xh, n);

  const int ev_r0 = push_event(t, 2, 0, ready, PayloadKind::Classical, "x_hat", {ev_a, ev_q});
  const int ev_r1 = push_event(t, 2, 1, ready, PayloadKind::Classical, "x_hat", {ev_a, ev_q});

  const bool timing_ok = std::abs(t.events[ev_r0].arrive_time - d0) <= cfg.timing_slack &&
                         std::abs(t.events[ev_r1].arrive_time - d1) <= cfg.timing_slack;
  t.accepted = timing_ok && xh == x && causality_check(t);
  return t;
}

AttackOutcome run_entangled_attack(int n, int N, const SpacetimeConfig& cfg, long long trials,
                                   RngStream& rng, const ToleranceConfig& tol) {
  cfg.validate();
  const int d = 1 << n;
  MubFamily fam = mub::mub_for_dim(d, tol);
  auto [u_ab, target] = mub::povm_from_mub(fam, d);

  InstConfig icfg;
  icfg.n = n;
  icfg.N = N;
  icfg.target = target;

  auto pbt = instprotocols::make_pbt_resources(1 << (2 * n), N, tol);

  // one protocol instance per challenge pair (a, x)
  std::vector<std::unique_ptr<instprotocols::MeasurementProtocol>> protocols(
      static_cast<std::size_t>(d) * d);
  std::vector<int> qubit_dims(2 * n, 2);
  for (int a = 0; a < d; ++a)
    for (int x = 0; x < d; ++x) {
      Vec amps = Vec::Zero(static_cast<long long>(d) * d);
      amps.segment(static_cast<long long>(a) * d, d) = fam.bases[a].mat.col(x);
      protocols[static_cast<std::size_t>(a) * d + x] =
          std::make_unique<instprotocols::MeasurementProtocol>(
              icfg, PureState(std::move(amps), qubit_dims), pbt, tol);
    }

  const double d0 = std::abs(cfg.r_0 - cfg.r_v0);
  const double d1 = std::abs(cfg.r_v1 - cfg.r_0);
  const double g0 = std::abs(cfg.r_0 - cfg.adv0);  // adversary head start
  const double g1 = std::abs(cfg.adv1 - cfg.r_0);

  AttackOutcome out;
  out.trials = trials;
  long long accepted = 0;
  for (long long trial = 0; trial < trials; ++trial) {
    RngStream r = rng.split(trial);
    const int a = r.uniform_int(d);
    const int x = r.uniform_int(d);
    auto tr = protocols[static_cast<std::size_t>(a) * d + x]->run(r);
    const int xh = tr.charlie_output;
    out.ebits_per_trial = tr.ebits_consumed;

    Transcript ev;
    ev.actors = {"V0", "V1", "P0~", "P1~"};
    ev.positions = {cfg.r_v0, cfg.r_v1, cfg.adv0, cfg.adv1};
    ev.classical_only_mode = true;
    ev.a = bits_of(a, n);
    ev.x = bits_of(x, n);
    ev.x_hat = bits_of(xh, n);
    ev.challenge_emit_time = std::min(-d0, -d1);

    // pre-shared ports distributed before the challenges exist
    const int ev_setup = push_event(ev, 2, 3, ev.challenge_emit_time - (g0 + g1) - 1.0,
                                    PayloadKind::Quantum, "ports", {});
    const int ev_a = push_event(ev, 0, 2, -d0, PayloadKind::Classical, "a", {});
    const int ev_q = push_event(ev, 1, 3, -d1, PayloadKind::Quantum, "U_a|x>", {});
    // both adversaries measure on receipt and cross their classical results
    const int ev_i = push_event(ev, 2, 3, ev.events[ev_a].arrive_time, PayloadKind::Classical,
                                "port index i", {ev_a});
    const int ev_g = push_event(ev, 3, 2, ev.events[ev_q].arrive_time, PayloadKind::Classical,
                                "outcome list {gamma_j}", {ev_setup, ev_q});
    const int ev_r0 = push_event(ev, 2, 0, ev.events[ev_g].arrive_time, PayloadKind::Classical,
                                 "x_hat", {ev_a, ev_g});
    const int ev_r1 = push_event(ev, 3, 1, ev.events[ev_i].arrive_time, PayloadKind::Classical,
                                 "x_hat", {ev_q, ev_i, ev_setup});

    const bool timing_ok =
        std::abs(ev.events[ev_r0].arrive_time - d0) <= cfg.timing_slack + 1e-12 &&
        std::abs(ev.events[ev_r1].arrive_time - d1) <= cfg.timing_slack + 1e-12;
    if (!causality_check(ev))
      throw ValidationError("run_entangled_attack: transcript failed the causality ledger");
    ev.accepted = timing_ok && xh == x;
    if (ev.accepted) ++accepted;
    if (trial + 1 == trials) out.last_transcript = std::move(ev);
  }
  out.acceptance = static_cast<double>(accepted) / trials;
  out.stderr_est = std::sqrt(std::max(out.acceptance * (1 - out.acceptance), 1e-12) /
                             static_cast<double>(trials));
  return out;
}

AttackOutcome intercept_resend_attack(int n, const SpacetimeConfig& cfg, long long trials,
                                      RngStream& rng) {
  cfg.validate();
  const int d = 1 << n;
  MubFamily fam = mub::mub_for_dim(d);

  // fixed measurement basis: Breidbart for a single qubit, computational
  // otherwise; Charlie guesses the maximum-likelihood x given (a, beta)
  Mat basis;
  if (n == 1) {
    basis = Mat(2, 2);
    const double c = std::cos(3.14159265358979323846 / 8);
    const double s = std::sin(3.14159265358979323846 / 8);
    basis << c, -s, s, c;
  } else {
    basis = Mat::Identity(d, d);
  }
  // guess[a][beta] = argmax_x |<b_beta|e^a_x>|^2
  std::vector<std::vector<int>> guess(d, std::vector<int>(d, 0));
  for (int a = 0; a < d; ++a)
    for (int be = 0; be < d; ++be) {
      int best = 0;
      double best_v = -1;
      for (int x = 0; x < d; ++x) {
        const double v = std::norm((basis.col(be).adjoint() * fam.bases[a].mat.col(x))(0));
        if (v > best_v) {
          best_v = v;
          best = x;
        }
      }
      guess[a][be] = best;
    }

  const double d0 = std::abs(cfg.r_0 - cfg.r_v0);
  const double d1 = std::abs(cfg.r_v1 - cfg.r_0);

  AttackOutcome out;
  out.trials = trials;
  out.ebits_per_trial = 0;
  long long accepted = 0;
  for (long long trial = 0; trial < trials; ++trial) {
    RngStream r = rng.split(trial);
    const int a = r.uniform_int(d);
    const int x = r.uniform_int(d);
    Vec psi = fam.bases[a].mat.col(x);
    std::vector<double> probs(d);
    for (int be = 0; be < d; ++be) probs[be] = std::norm((basis.col(be).adjoint() * psi)(0));
    const int beta = r.sample_discrete(probs);
    const int xh = guess[a][beta];

    Transcript ev;
    ev.actors = {"V0", "V1", "P0~", "P1~"};
    ev.positions = {cfg.r_v0, cfg.r_v1, cfg.adv0, cfg.adv1};
    ev.classical_only_mode = true;
    ev.a = bits_of(a, n);
    ev.x = bits_of(x, n);
    ev.x_hat = bits_of(xh, n);
    ev.challenge_emit_time = std::min(-d0, -d1);
    const int ev_a = push_event(ev, 0, 2, -d0, PayloadKind::Classical, "a", {});
    const int ev_q = push_event(ev, 1, 3, -d1, PayloadKind::Quantum, "U_a|x>", {});
    const int ev_fw_a = push_event(ev, 2, 3, ev.events[ev_a].arrive_time,
                                   PayloadKind::Classical, "a copy", {ev_a});
    const int ev_fw_b = push_event(ev, 3, 2, ev.events[ev_q].arrive_time,
                                   PayloadKind::Classical, "beta", {ev_q});
    const int ev_r0 = push_event(ev, 2, 0, ev.events[ev_fw_b].arrive_time,
                                 PayloadKind::Classical, "x_hat", {ev_a, ev_fw_b});
    const int ev_r1 = push_event(ev, 3, 1, ev.events[ev_fw_a].arrive_time,
                                 PayloadKind::Classical, "x_hat", {ev_q, ev_fw_a});

    const bool timing_ok =
        std::abs(ev.events[ev_r0].arrive_time - d0) <= cfg.timing_slack + 1e-12 &&
        std::abs(ev.events[ev_r1].arrive_time - d1) <= cfg.timing_slack + 1e-12;
    if (!causality_check(ev))
      throw ValidationError("intercept_resend_attack: transcript failed the causality ledger");
    ev.accepted = timing_ok && xh == x;
    if (ev.accepted) ++accepted;
    if (trial + 1 == trials) out.last_transcript = std::move(ev);
  }
  out.acceptance = static_cast<double>(accepted) / trials;
  out.stderr_est = std::sqrt(std::max(out.acceptance * (1 - out.acceptance), 1e-12) /
                             static_cast<double>(trials));
  return out;
}

double soundness_limited(int n, int m) {
  if (n <= 1) throw DomainError("soundness_limited: requires n > 1");
  if (m < 0) throw DomainError("soundness_limited: m must be nonnegative");
  return 2.0 * std::pow(2.0, m - n / 2.0);
}

double reduction_bound(double eps0, int dimAprime, int dimBprime) {
  if (!(eps0 >= 0 && eps0 <= 1)) throw DomainError("reduction_bound: eps0 must be in [0,1]");
  if (dimAprime < 1 || dimBprime < 1)
    throw DomainError("reduction_bound: dimensions must be positive");
  return static_cast<double>(dimAprime) * dimBprime * eps0;
}

double single_round_bound() { return 1.0 - hinv_half(); }

bool is_vacuous(double bound) { return bound >= 1.0; }

CompositionPlan composition_plan(int k, double eps) {
  if (k < 0) throw DomainError("composition_plan: k must be nonnegative");
  if (!(eps > 0 && eps < 1)) throw DomainError("composition_plan: eps must be in (0,1)");
  CompositionPlan plan;
  plan.h_inv_half = hinv_half();
  plan.delta = 1.0 - plan.h_inv_half;
  plan.l_real = (2.0 * k + std::log2(1.0 / eps)) / std::log2(1.0 / plan.delta);
  plan.rounds = std::max<long long>(1, static_cast<long long>(std::ceil(plan.l_real)));
  plan.seq_bound = std::pow(plan.delta, static_cast<double>(plan.rounds));
  plan.chain_bound = std::pow(4.0, k) * plan.seq_bound;
  return plan;
}

}  // namespace posverify
}  // namespace nlqc
