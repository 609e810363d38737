#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "nlqc/instprotocols.hpp"
#include "nlqc/lowerbound.hpp"
#include "nlqc/mub.hpp"
#include "nlqc/parallel.hpp"
#include "nlqc/portbased.hpp"
#include "nlqc/posverify.hpp"
#include "nlqc/serialize.hpp"

using namespace nlqc;
using nlqc::serialize::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// exit-code contract: 0 pass, 2 usage, 3 resource, 4 bound violation
enum ExitCode { kOk = 0, kError = 1, kUsage = 2, kResource = 3, kBoundViolation = 4 };

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string out;
  int threads = 0;
  std::vector<std::string> tol_overrides;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--seed", c.seed, "RNG seed");
  cmd->add_option("--out", c.out, "write the JSON report to this path (atomic)");
  cmd->add_option("--threads", c.threads, "worker threads (default: all cores, NLQC_THREADS)");
  cmd->add_option("--tol", c.tol_overrides, "tolerance override NAME=VALUE (repeatable)");
}

ToleranceConfig resolve_tol(const std::vector<std::string>& overrides) {
  ToleranceConfig tol;
  std::map<std::string, double*> slots = {
      {"hermitian", &tol.hermitian},   {"psd", &tol.psd},
      {"trace_one", &tol.trace_one},   {"povm_sum", &tol.povm_sum},
      {"eig_residual", &tol.eig_residual}, {"rank_cutoff", &tol.rank_cutoff},
      {"channel_tp", &tol.channel_tp}, {"choi_tp_build", &tol.choi_tp_build},
      {"prob_floor", &tol.prob_floor}};
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--tol", "expected NAME=VALUE, got '" + ov + "'");
    const std::string name = ov.substr(0, eq);
    const std::string value = ov.substr(eq + 1);
    if (name == "max_dim") {
      tol.max_dim = std::stoi(value);
      continue;
    }
    auto it = slots.find(name);
    if (it == slots.end())
      throw CLI::ValidationError("--tol", "unknown tolerance '" + name + "'");
    *it->second = std::stod(value);
  }
  return tol;
}

struct Check {
  std::string name;
  double value = 0;
  double bound = 0;
  std::string relation;
  bool pass = false;
};

json check_json(const Check& c) {
  return json{{"name", c.name},
              {"value", c.value},
              {"bound", c.bound},
              {"relation", c.relation},
              {"pass", c.pass}};
}

struct Report {
  json config = json::object();
  json rows = json::array();
  std::vector<Check> checks;

  void check_le(const std::string& name, double value, double bound) {
    checks.push_back({name, value, bound, "<=", value <= bound});
  }
  void check_ge(const std::string& name, double value, double bound) {
    checks.push_back({name, value, bound, ">=", value >= bound});
  }
  void check_true(const std::string& name, bool ok) {
    checks.push_back({name, ok ? 1.0 : 0.0, 1.0, "==", ok});
  }
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

int finalize(const std::string& command, const CommonOpts& common, Report& rep,
             std::chrono::steady_clock::time_point start) {
  json out;
  out["command"] = command;
  out["version"] = kVersion;
  out["seed"] = common.seed;
  out["threads"] = resolve_threads(common.threads);
  out["config"] = rep.config;
  out["rows"] = rep.rows;
  json checks = json::array();
  for (const auto& c : rep.checks) checks.push_back(check_json(c));
  out["checks"] = checks;
  out["all_pass"] = rep.all_pass();
  out["wall_clock_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  if (!common.out.empty())
    serialize::write_json_atomic(common.out, out);
  else
    std::cout << out.dump(2) << "\n";
  return rep.all_pass() ? kOk : kBoundViolation;
}

// ---------------------------------------------------------------------------

struct GridCell {
  int d, n_lo, n_hi;
};

GridCell parse_grid(const std::string& spec) {
  // format: d=2:N=1..10
  GridCell cell{};
  if (std::sscanf(spec.c_str(), "d=%d:N=%d..%d", &cell.d, &cell.n_lo, &cell.n_hi) == 3)
    return cell;
  if (std::sscanf(spec.c_str(), "d=%d:N=%d", &cell.d, &cell.n_lo) == 2) {
    cell.n_hi = cell.n_lo;
    return cell;
  }
  throw CLI::ValidationError("--grid", "expected d=<int>:N=<a>..<b>, got '" + spec + "'");
}

void pbt_row_checks(Report& rep, const PbtReport& r) {
  json row{{"d", r.d},
           {"N", r.N},
           {"p_succ", r.p_succ},
           {"fidelity", r.fidelity},
           {"thm1_bound", r.thm1_bound},
           {"appendix_bound", r.appendix_bound},
           {"choi_halfdist", r.choi_halfdist},
           {"choi_fid_bound", r.choi_fid_bound},
           {"diamond_upper", r.diamond_upper},
           {"corollary1_bound", r.corollary1_bound}};
  rep.rows.push_back(row);
  const std::string tag = "d" + std::to_string(r.d) + "N" + std::to_string(r.N);
  rep.check_ge("fidelity_floor/" + tag, r.fidelity, r.thm1_bound - 1e-9);
  rep.check_le("fid_identity/" + tag,
               std::abs(r.fidelity - static_cast<double>(r.N) / (r.d * r.d) * r.p_succ), 1e-9);
  rep.check_ge("psucc_floor/" + tag, r.p_succ, r.appendix_bound - 1e-9);
  rep.check_le("choi_fid_chain/" + tag, r.choi_halfdist, r.choi_fid_bound + 1e-9);
  if (r.corollary1_bound <= 2.0)
    rep.check_le("diamond_chain/" + tag, r.diamond_upper, r.corollary1_bound + 1e-9);
}

int run_pbt(const CommonOpts& common, int d, int big_n, const std::vector<std::string>& grids) {
  const auto start = std::chrono::steady_clock::now();
  const ToleranceConfig tol = resolve_tol(common.tol_overrides);
  Report rep;
  rep.config = json{{"d", d}, {"N", big_n}, {"grid", grids}};

  std::vector<std::pair<int, int>> cells;
  if (grids.empty()) {
    cells.emplace_back(d, big_n);
  } else {
    for (const auto& g : grids) {
      GridCell cell = parse_grid(g);
      for (int nn = cell.n_lo; nn <= cell.n_hi; ++nn) cells.emplace_back(cell.d, nn);
    }
  }
  for (auto [dd, nn] : cells) pbt_row_checks(rep, portbased::pbt_report(dd, nn, tol));
  return finalize("pbt", common, rep, start);
}

int run_pgm(const CommonOpts& common, int d, int big_n, int random_count, int states, int dim) {
  const auto start = std::chrono::steady_clock::now();
  const ToleranceConfig tol = resolve_tol(common.tol_overrides);
  Report rep;
  rep.config = json{{"d", d}, {"N", big_n}, {"random", random_count},
                    {"states", states}, {"dim", dim}};

  if (random_count == 0) {
    PortFamily fam = portbased::eta_family(d, big_n, tol);
    Povm pgm = portbased::pgm_build_from_family(fam, tol);
    const double p = portbased::pgm_success(fam.eta, pgm);
    const double bound = portbased::pgm_generic_bound(fam.eta, tol);
    rep.rows.push_back(json{{"kind", "eta_family"}, {"d", d}, {"N", big_n},
                            {"p_succ", p}, {"generic_bound", bound}});
    rep.check_ge("pgm_floor", p, bound - 1e-9);
    const double self = 1.0 / std::pow(d, big_n - 1);
    const double cross = 1.0 / std::pow(d, big_n + 1);
    for (int i = 0; i < big_n; ++i) {
      const double tii =
          (fam.eta[i].matrix.mat.transpose().cwiseProduct(fam.eta[i].matrix.mat)).sum().real();
      rep.check_le("overlap_self/" + std::to_string(i + 1), std::abs(tii - self), 1e-9);
      for (int jj = i + 1; jj < big_n; ++jj) {
        const double tij =
            (fam.eta[i].matrix.mat.transpose().cwiseProduct(fam.eta[jj].matrix.mat))
                .sum()
                .real();
        rep.check_le(
            "overlap_cross/" + std::to_string(i + 1) + "," + std::to_string(jj + 1),
            std::abs(tij - cross), 1e-9);
      }
    }
  } else {
    RngStream rng(common.seed);
    for (int e = 0; e < random_count; ++e) {
      RngStream r = rng.split(e);
      std::vector<DensityOperator> ens;
      for (int s = 0; s < states; ++s) {
        Mat a(dim, dim);
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) a(i, j) = Complex(r.normal(), r.normal());
        Mat g = a.adjoint() * a;
        g /= g.trace();
        ens.push_back(DensityOperator(ComplexMatrix((g + g.adjoint()) / 2.0, {dim})));
      }
      Povm pgm = portbased::pgm_build(ens, tol);
      const double p = portbased::pgm_success(ens, pgm);
      const double bound = portbased::pgm_generic_bound(ens, tol);
      rep.rows.push_back(json{{"kind", "random"}, {"index", e}, {"p_succ", p},
                              {"generic_bound", bound}});
      rep.check_ge("pgm_floor/" + std::to_string(e), p, bound - 1e-9);
    }
  }
  return finalize("pgm", common, rep, start);
}

PureState inst_input(const std::string& name, int n) {
  const int qubits = 2 * n;
  std::vector<int> dims(qubits, 2);
  if (name == "phi") {
    // maximally entangled across the A:B cut
    return PureState(qcore::max_entangled_vec(1 << n), dims);
  }
  if (name == "zero") {
    Vec v = Vec::Zero(1LL << qubits);
    v(0) = 1;
    return PureState(std::move(v), dims);
  }
  throw CLI::ValidationError("--input", "expected phi or zero, got '" + name + "'");
}

int run_inst(const CommonOpts& common, const std::string& mode, int n, int big_n,
             long long trials, const std::string& target_name, const std::string& input_name,
             const std::string& order_name) {
  const auto start = std::chrono::steady_clock::now();
  const ToleranceConfig tol = resolve_tol(common.tol_overrides);
  Report rep;
  rep.config = json{{"mode", mode},   {"n", n},         {"N", big_n},
                    {"trials", trials}, {"target", target_name}, {"input", input_name},
                    {"order", order_name}};

  const StepOrder order =
      order_name == "alice" ? StepOrder::AliceFirst : StepOrder::BobFirst;
  InstConfig cfg;
  cfg.n = n;
  cfg.N = big_n;
  cfg.seed = common.seed;

  if (mode == "measure") {
    if (target_name == "bell")
      cfg.target = instprotocols::bell_basis_povm();
    else if (target_name == "comp")
      cfg.target = instprotocols::computational_povm(2 * n);
    else if (target_name.rfind("file:", 0) == 0)
      cfg.target = serialize::povm_from_json(serialize::load_json_file(target_name.substr(5)));
    else
      throw CLI::ValidationError("--target", "measure mode expects bell, comp or file:PATH");

    PureState psi = inst_input(input_name, n);
    Povm eff = instprotocols::effective_povm(cfg, tol);
    Mat rho = psi.amps * psi.amps.adjoint();
    std::vector<double> probs = qcore::povm_probabilities(eff, rho);

    instprotocols::MeasurementProtocol proto(cfg, psi, nullptr, tol);
    std::vector<int> outcome(trials);
    std::vector<long long> ebits(trials);
    RngStream base(common.seed);
    parallel_for(
        trials,
        [&](long long t) {
          RngStream r = base.split(t);
          auto tr = proto.run(r, order);
          outcome[t] = tr.charlie_output;
          ebits[t] = tr.ebits_consumed;
        },
        common.threads);

    std::vector<long long> counts(probs.size(), 0);
    bool ledger_ok = true;
    for (long long t = 0; t < trials; ++t) {
      counts[outcome[t]]++;
      ledger_ok = ledger_ok && ebits[t] == static_cast<long long>(n) * (1 + 2LL * big_n);
    }
    for (std::size_t g = 0; g < probs.size(); ++g) {
      const double freq = static_cast<double>(counts[g]) / trials;
      const double sigma = std::sqrt(std::max(probs[g] * (1 - probs[g]), 1e-12) / trials);
      rep.rows.push_back(json{{"outcome", eff.labels[g]},
                              {"analytic", probs[g]},
                              {"empirical", freq},
                              {"sigma", sigma}});
      rep.check_le("freq3sigma/" + eff.labels[g], std::abs(freq - probs[g]),
                   3 * sigma + 1e-9);
    }
    rep.check_true("ebits_ledger", ledger_ok);
  } else if (mode == "unitary") {
    if (target_name == "cnot")
      cfg.target = ComplexMatrix(instprotocols::cnot_gate(), {4});
    else if (target_name == "swap")
      cfg.target = ComplexMatrix(instprotocols::swap_gate(), {4});
    else if (target_name.rfind("file:", 0) == 0)
      cfg.target = serialize::matrix_from_json(serialize::load_json_file(target_name.substr(5)));
    else
      throw CLI::ValidationError("--target", "unitary mode expects cnot, swap or file:PATH");

    PureState psi = inst_input(input_name, n);
    QuantumChannel eff = instprotocols::effective_channel(cfg, tol);
    const Mat u = std::get<ComplexMatrix>(cfg.target).mat;
    Vec target_vec = u * psi.amps;
    Mat rho = psi.amps * psi.amps.adjoint();
    const double analytic =
        (target_vec.adjoint() * qcore::apply_channel(eff, rho) * target_vec)(0).real();

    instprotocols::UnitaryProtocol proto(cfg, psi, nullptr, tol);
    std::vector<double> fid(trials);
    std::vector<long long> ebits(trials);
    RngStream base(common.seed);
    parallel_for(
        trials,
        [&](long long t) {
          RngStream r = base.split(t);
          auto tr = proto.run(r, order);
          fid[t] = tr.fidelity;
          ebits[t] = tr.ebits_consumed;
        },
        common.threads);
    double sum = 0, sumsq = 0;
    bool ledger_ok = true;
    for (long long t = 0; t < trials; ++t) {
      sum += fid[t];
      sumsq += fid[t] * fid[t];
      ledger_ok = ledger_ok && ebits[t] == static_cast<long long>(n) * (1 + 3LL * big_n);
    }
    const double mean = sum / trials;
    const double sd = std::sqrt(std::max(sumsq / trials - mean * mean, 0.0) /
                                static_cast<double>(trials));
    rep.rows.push_back(json{{"analytic_fidelity", analytic},
                            {"empirical_fidelity", mean},
                            {"sigma", sd}});
    rep.check_le("fidelity3sigma", std::abs(mean - analytic), 3 * sd + 1e-9);
    rep.check_true("ebits_ledger", ledger_ok);
  } else {
    throw CLI::ValidationError("--mode", "expected measure or unitary");
  }
  return finalize("inst", common, rep, start);
}

int run_mub(const CommonOpts& common, int d, bool emit_bases) {
  const auto start = std::chrono::steady_clock::now();
  const ToleranceConfig tol = resolve_tol(common.tol_overrides);
  Report rep;
  rep.config = json{{"d", d}, {"emit_bases", emit_bases}};

  MubFamily fam = mub::mub_for_dim(d, tol);
  const double overlap_dev = mub::max_overlap_deviation(fam);
  const double unitary_dev = mub::max_unitarity_deviation(fam);
  json row{{"d", d},
           {"bases", fam.bases.size()},
           {"max_overlap_deviation", overlap_dev},
           {"max_unitarity_deviation", unitary_dev}};
  if (emit_bases) {
    json bases = json::array();
    for (const auto& b : fam.bases) bases.push_back(serialize::matrix_to_json(b));
    row["bases_matrices"] = std::move(bases);
  }
  rep.rows.push_back(std::move(row));
  rep.check_le("overlap", overlap_dev, 1e-10);
  rep.check_le("unitarity", unitary_dev, 1e-10);
  return finalize("mub", common, rep, start);
}

int run_bound(const CommonOpts& common, int d, int dimb, int dima, int bases, int restarts,
              int sweeps) {
  const auto start = std::chrono::steady_clock::now();
  const ToleranceConfig tol = resolve_tol(common.tol_overrides);
  if (dima <= 0) dima = dimb;
  Report rep;
  rep.config = json{{"d", d},       {"dimb", dimb},       {"dima", dima},
                    {"bases", bases}, {"restarts", restarts}, {"sweeps", sweeps}};

  MubFamily fam = mub::mub_for_dim(d, tol);
  const int bases_used = bases > 0 ? bases : static_cast<int>(fam.bases.size());
  GuessingInstance inst = lowerbound::build_ensemble(fam, bases_used);
  auto [u_ab, target] = mub::povm_from_mub(fam, bases_used);

  const double bound = lowerbound::theoretical_bound(d, dimb);
  RngStream rng(common.seed);
  std::vector<SeesawOutcome> outcomes(restarts);
  parallel_for(
      restarts,
      [&](long long rs) {
        RngStream r = rng.split(rs);
        outcomes[rs] = lowerbound::seesaw_optimize(inst, dima, dimb, sweeps, r);
      },
      common.threads);

  double best = 0;
  int best_idx = 0;
  for (int rs = 0; rs < restarts; ++rs) {
    rep.rows.push_back(json{{"restart", rs},
                            {"p_succ", outcomes[rs].best_p},
                            {"sweeps", outcomes[rs].sweeps}});
    bool monotone = true;
    for (std::size_t i = 1; i < outcomes[rs].history.size(); ++i)
      monotone = monotone && outcomes[rs].history[i] >= outcomes[rs].history[i - 1] - 1e-10;
    rep.check_true("monotone/" + std::to_string(rs), monotone);
    if (outcomes[rs].best_p > best) {
      best = outcomes[rs].best_p;
      best_idx = rs;
    }
  }
  AttackResult res = lowerbound::attack_success(inst, outcomes[best_idx].strategy);
  DiamondGapReport gap = lowerbound::diamond_gap(inst, outcomes[best_idx].strategy, target);
  rep.rows.push_back(json{{"best_p", res.p_succ},
                          {"bound", res.bound},
                          {"margin", res.margin},
                          {"vacuous", lowerbound::bound_vacuous(res.bound)},
                          {"diamond_gap", gap.gap},
                          {"gap_eps", gap.eps},
                          {"gap_corollary_form", gap.corollary_form}});
  if (!lowerbound::bound_vacuous(bound)) rep.check_le("ceiling", best, bound + 1e-9);
  rep.check_le("gap_identity", std::abs(gap.gap - 2 * (1 - res.p_succ)), 1e-12);
  return finalize("bound", common, rep, start);
}

json events_json(const Transcript& tr) {
  json events = json::array();
  for (const auto& e : tr.events)
    events.push_back(json{{"from", tr.actors[e.from]},
                          {"to", tr.actors[e.to]},
                          {"t_emit", e.emit_time},
                          {"t_arrive", e.arrive_time},
                          {"kind", e.kind == PayloadKind::Quantum ? "quantum" : "classical"},
                          {"payload_digest", e.payload}});
  return events;
}

int run_posverify(const CommonOpts& common, const std::string& mode, int n, int big_n,
                  long long trials, double delta, const std::string& positions,
                  const std::string& adv, double prover, int m, int k, double eps,
                  double eps0, int dima, int dimb) {
  const auto start = std::chrono::steady_clock::now();
  const ToleranceConfig tol = resolve_tol(common.tol_overrides);
  Report rep;
  rep.config = json{{"mode", mode},   {"n", n},     {"N", big_n}, {"trials", trials},
                    {"delta", delta}, {"positions", positions}, {"adv", adv},
                    {"prover", prover}, {"m", m},   {"k", k},     {"eps", eps},
                    {"eps0", eps0},   {"dima", dima}, {"dimb", dimb}};

  SpacetimeConfig cfg;
  cfg.delta = delta;
  if (!positions.empty()) {
    if (std::sscanf(positions.c_str(), "%lf,%lf,%lf", &cfg.r_v0, &cfg.r_0, &cfg.r_v1) != 3)
      throw CLI::ValidationError("--positions", "expected rV0,r0,rV1");
    cfg.adv0 = cfg.r_0 - 2 * cfg.delta;
    cfg.adv1 = cfg.r_0 + 2 * cfg.delta;
    cfg.prover_pos = cfg.r_0;
  }
  if (!adv.empty()) {
    if (std::sscanf(adv.c_str(), "%lf,%lf", &cfg.adv0, &cfg.adv1) != 2)
      throw CLI::ValidationError("--adv", "expected a0,a1");
  }
  if (prover != 0.0) cfg.prover_pos = prover;

  if (mode == "honest") {
    MubFamily fam = mub::mub_for_dim(1 << n, tol);
    RngStream rng(common.seed);
    long long accepted = 0;
    bool causal = true;
    Transcript last;
    for (long long t = 0; t < trials; ++t) {
      RngStream r = rng.split(t);
      Transcript tr = posverify::run_honest(n, cfg, fam, r);
      if (tr.accepted) ++accepted;
      causal = causal && posverify::causality_check(tr);
      if (t + 1 == trials) last = std::move(tr);
    }
    rep.rows.push_back(
        json{{"accepted", accepted}, {"trials", trials}, {"events", events_json(last)}});
    rep.check_true("complete", accepted == trials);
    rep.check_true("causality", causal);
  } else if (mode == "attack") {
    RngStream rng(common.seed);
    auto out = posverify::run_entangled_attack(n, big_n, cfg, trials, rng, tol);
    rep.rows.push_back(json{{"acceptance", out.acceptance},
                            {"stderr", out.stderr_est},
                            {"ebits_per_trial", out.ebits_per_trial},
                            {"events", events_json(out.last_transcript)}});
    rep.check_true("causality", posverify::causality_check(out.last_transcript));
    rep.check_true("ebits_ledger",
                   out.ebits_per_trial == static_cast<long long>(n) * (1 + 2LL * big_n));
  } else if (mode == "intercept") {
    RngStream rng(common.seed);
    auto out = posverify::intercept_resend_attack(n, cfg, trials, rng);
    const double ceiling =
        n == 1 ? posverify::single_round_bound() : posverify::soundness_limited(n, 0);
    rep.rows.push_back(json{{"acceptance", out.acceptance},
                            {"stderr", out.stderr_est},
                            {"ceiling", ceiling}});
    rep.check_le("ceiling3sigma", out.acceptance, ceiling + 3 * out.stderr_est);
    rep.check_true("causality", posverify::causality_check(out.last_transcript));
  } else if (mode == "bounds") {
    if (n > 1) {
      const double sl = posverify::soundness_limited(n, m);
      rep.rows.push_back(json{{"kind", "limited_entanglement"},
                              {"n", n},
                              {"m", m},
                              {"bound", sl},
                              {"vacuous", posverify::is_vacuous(sl)},
                              {"assumptions", "classical communication only"}});
    }
    const double rb = posverify::reduction_bound(eps0, dima, dimb);
    rep.rows.push_back(json{{"kind", "entanglement_reduction"},
                            {"eps0", eps0},
                            {"dimA", dima},
                            {"dimB", dimb},
                            {"bound", rb},
                            {"vacuous", posverify::is_vacuous(rb)}});
    auto plan = posverify::composition_plan(k, eps);
    rep.rows.push_back(json{{"kind", "sequential_composition"},
                            {"k", k},
                            {"eps", eps},
                            {"h_inv_half", plan.h_inv_half},
                            {"delta", plan.delta},
                            {"rounds", plan.rounds},
                            {"seq_bound", plan.seq_bound},
                            {"chain_bound", plan.chain_bound}});
    rep.rows.push_back(json{{"kind", "single_round"}, {"bound", posverify::single_round_bound()}});
    const double p = plan.h_inv_half;
    rep.check_le("h_consistency",
                 std::abs(-p * std::log2(p) - (1 - p) * std::log2(1 - p) - 0.5), 1e-12);
    rep.check_le("chain", plan.chain_bound, eps * (1 + 1e-12));
    rep.check_le("single_round_lt_1", posverify::single_round_bound(), 1.0 - 1e-12);
  } else {
    throw CLI::ValidationError("--mode", "expected honest, attack, intercept or bounds");
  }
  return finalize("posverify", common, rep, start);
}

int run_cost(const CommonOpts& common, int n, double eps) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.config = json{{"n", n}, {"eps", eps}};
  auto r = instprotocols::resource_report(n, eps);
  rep.rows.push_back(json{{"port_count", r.port_count},
                          {"povm_ebits", r.povm_ebits},
                          {"unitary_ebits", r.unitary_ebits},
                          {"vaidman_rounds", r.vaidman_rounds},
                          {"vaidman_log2_ebits", r.vaidman_log2_ebits}});
  return finalize("cost", common, rep, start);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlqc: numerical toolkit for instantaneous non-local measurement, "
               "port-based teleportation and position verification"};
  app.require_subcommand(1);

  // pbt
  auto* pbt = app.add_subcommand("pbt", "port-based teleportation study");
  CommonOpts pbt_common;
  int pbt_d = 2, pbt_n = 2;
  std::vector<std::string> pbt_grids;
  pbt->add_option("--d", pbt_d, "port dimension")->check(CLI::PositiveNumber);
  pbt->add_option("--N", pbt_n, "port count")->check(CLI::PositiveNumber);
  pbt->add_option("--grid", pbt_grids, "grid spec d=<d>:N=<a>..<b> (repeatable)");
  add_common(pbt, pbt_common);

  // pgm
  auto* pgm = app.add_subcommand("pgm", "pretty-good-measurement diagnostics");
  CommonOpts pgm_common;
  int pgm_d = 2, pgm_n = 2, pgm_random = 0, pgm_states = 3, pgm_dim = 4;
  pgm->add_option("--d", pgm_d, "eta family dimension")->check(CLI::PositiveNumber);
  pgm->add_option("--N", pgm_n, "eta family ports")->check(CLI::PositiveNumber);
  pgm->add_option("--random", pgm_random, "number of random ensembles instead");
  pgm->add_option("--states", pgm_states, "states per random ensemble");
  pgm->add_option("--dim", pgm_dim, "dimension of random ensembles");
  add_common(pgm, pgm_common);

  // inst
  auto* inst = app.add_subcommand("inst", "instantaneous protocol simulators");
  CommonOpts inst_common;
  std::string inst_mode = "measure", inst_target = "bell", inst_input_name = "phi",
              inst_order = "bob";
  int inst_n = 1, inst_big_n = 1;
  long long inst_trials = 10000;
  inst->add_option("--mode", inst_mode, "measure or unitary");
  inst->add_option("--n", inst_n, "qubits per side")->check(CLI::PositiveNumber);
  inst->add_option("--N", inst_big_n, "port count")->check(CLI::PositiveNumber);
  inst->add_option("--trials", inst_trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
  inst->add_option("--target", inst_target, "bell|comp|cnot|swap|file:PATH");
  inst->add_option("--input", inst_input_name, "input state: phi or zero");
  inst->add_option("--order", inst_order, "step order: bob or alice");
  add_common(inst, inst_common);

  // mub
  auto* mubcmd = app.add_subcommand("mub", "mutually unbiased basis families");
  CommonOpts mub_common;
  int mub_d = 2;
  bool mub_check = false, mub_emit = false;
  mubcmd->add_option("--d", mub_d, "dimension (prime or power of two)")
      ->check(CLI::PositiveNumber);
  mubcmd->add_flag("--check", mub_check, "run the exhaustive overlap check (always on)");
  mubcmd->add_flag("--emit-bases", mub_emit, "embed the basis matrices in the report");
  add_common(mubcmd, mub_common);

  // bound
  auto* bound = app.add_subcommand("bound", "MUB guessing game and see-saw attacks");
  CommonOpts bound_common;
  int bound_d = 4, bound_dimb = 1, bound_dima = 0, bound_bases = 0, bound_restarts = 5,
      bound_sweeps = 30;
  bound->add_option("--d", bound_d, "game dimension")->check(CLI::PositiveNumber);
  bound->add_option("--dimb", bound_dimb, "Bob's entanglement register dimension")
      ->check(CLI::PositiveNumber);
  bound->add_option("--dima", bound_dima, "Alice's register dimension (default dimb)");
  bound->add_option("--bases", bound_bases, "bases used (default all d+1)");
  bound->add_option("--restarts", bound_restarts, "see-saw restarts")
      ->check(CLI::PositiveNumber);
  bound->add_option("--sweeps", bound_sweeps, "sweeps per restart")->check(CLI::PositiveNumber);
  add_common(bound, bound_common);

  // posverify
  auto* pv = app.add_subcommand("posverify", "position-verification simulator and bounds");
  CommonOpts pv_common;
  std::string pv_mode = "honest", pv_positions, pv_adv;
  int pv_n = 1, pv_big_n = 1, pv_m = 0, pv_k = 0, pv_dima = 1, pv_dimb = 1;
  long long pv_trials = 1000;
  double pv_delta = 0.1, pv_prover = 0.0, pv_eps = 0.5, pv_eps0 = 0.01;
  pv->add_option("--mode", pv_mode, "honest|attack|intercept|bounds");
  pv->add_option("--n", pv_n, "qubits per challenge")->check(CLI::PositiveNumber);
  pv->add_option("--N", pv_big_n, "ports used by the entangled attack")
      ->check(CLI::PositiveNumber);
  pv->add_option("--trials", pv_trials, "simulation trials")->check(CLI::PositiveNumber);
  pv->add_option("--delta", pv_delta, "spatial resolution")->check(CLI::PositiveNumber);
  pv->add_option("--positions", pv_positions, "rV0,r0,rV1");
  pv->add_option("--adv", pv_adv, "adversary positions a0,a1");
  pv->add_option("--prover", pv_prover, "override the honest prover position");
  pv->add_option("--m", pv_m, "adversary ebits (limited-entanglement bound)");
  pv->add_option("--k", pv_k, "ebits per side (sequential composition)");
  pv->add_option("--eps", pv_eps, "target soundness (sequential composition)");
  pv->add_option("--eps0", pv_eps0, "no-entanglement soundness (entanglement reduction)");
  pv->add_option("--dima", pv_dima, "dim A' (entanglement reduction)");
  pv->add_option("--dimb", pv_dimb, "dim B' (entanglement reduction)");
  add_common(pv, pv_common);

  // cost
  auto* cost = app.add_subcommand("cost", "entanglement cost accounting");
  CommonOpts cost_common;
  int cost_n = 1;
  double cost_eps = 1.0;
  cost->add_option("--n", cost_n, "qubits per side")->check(CLI::PositiveNumber);
  cost->add_option("--eps", cost_eps, "target diamond accuracy");
  add_common(cost, cost_common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    app.exit(e);
    return kUsage;
  }

  try {
    if (pbt->parsed()) {
      set_global_threads(resolve_threads(pbt_common.threads));
      return run_pbt(pbt_common, pbt_d, pbt_n, pbt_grids);
    }
    if (pgm->parsed()) {
      set_global_threads(resolve_threads(pgm_common.threads));
      return run_pgm(pgm_common, pgm_d, pgm_n, pgm_random, pgm_states, pgm_dim);
    }
    if (inst->parsed()) {
      set_global_threads(resolve_threads(inst_common.threads));
      return run_inst(inst_common, inst_mode, inst_n, inst_big_n, inst_trials, inst_target,
                      inst_input_name, inst_order);
    }
    if (mubcmd->parsed()) {
      set_global_threads(resolve_threads(mub_common.threads));
      return run_mub(mub_common, mub_d, mub_emit);
    }
    if (bound->parsed()) {
      set_global_threads(resolve_threads(bound_common.threads));
      return run_bound(bound_common, bound_d, bound_dimb, bound_dima, bound_bases,
                       bound_restarts, bound_sweeps);
    }
    if (pv->parsed()) {
      set_global_threads(resolve_threads(pv_common.threads));
      return run_posverify(pv_common, pv_mode, pv_n, pv_big_n, pv_trials, pv_delta,
                           pv_positions, pv_adv, pv_prover, pv_m, pv_k, pv_eps, pv_eps0,
                           pv_dima, pv_dimb);
    }
    if (cost->parsed()) {
      set_global_threads(resolve_threads(cost_common.threads));
      return run_cost(cost_common, cost_n, cost_eps);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SizeLimitError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kUsage;
}
