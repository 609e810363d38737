#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "nlqc/instprotocols.hpp"

using namespace nlqc;
using namespace nlqc::instprotocols;

namespace {

PureState two_qubit_state(std::initializer_list<Complex> amps) {
  Vec v(4);
  int k = 0;
  for (Complex a : amps) v(k++) = a;
  v.normalize();
  return PureState(v, {2, 2});
}

PureState phi_plus() {
  return PureState(qcore::max_entangled_vec(2), {2, 2});
}

std::vector<double> mc_distribution(const MeasurementProtocol& proto, int outcomes, int trials,
                                    RngStream& rng, StepOrder order = StepOrder::BobFirst) {
  std::vector<double> freq(outcomes, 0.0);
  for (int t = 0; t < trials; ++t) {
    RngStream r = rng.split(t);
    freq[proto.run(r, order).charlie_output] += 1.0;
  }
  for (auto& f : freq) f /= trials;
  return freq;
}

void check_within_3sigma(const std::vector<double>& freq, const std::vector<double>& probs,
                         int trials) {
  REQUIRE(freq.size() == probs.size());
  for (std::size_t g = 0; g < freq.size(); ++g) {
    const double sigma = std::sqrt(std::max(probs[g] * (1 - probs[g]), 1e-12) / trials);
    CHECK(std::abs(freq[g] - probs[g]) < 3 * sigma + 1e-9);
  }
}

}  // namespace

TEST_CASE("trivial single-outcome target always fires") {
  InstConfig cfg;
  cfg.n = 1;
  cfg.N = 2;
  Povm trivial;
  trivial.elements.push_back(ComplexMatrix(Mat(Mat::Identity(4, 4)), {4}));
  trivial.labels = {"only"};
  cfg.target = trivial;

  Povm eff = effective_povm(cfg);
  CHECK((eff.elements[0].mat - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);

  RngStream rng(1);
  MeasurementProtocol proto(cfg, phi_plus());
  for (int t = 0; t < 50; ++t) {
    auto tr = proto.run(rng);
    CHECK(tr.charlie_output == 0);
    CHECK(tr.charlie_label == "only");
    CHECK(tr.alice_port_index >= 1);
    CHECK(tr.alice_port_index <= 2);
    CHECK(tr.ebits_consumed == 1 * (1 + 2 * 2));
  }
}

TEST_CASE("Bell-target run matches the effective POVM (n=1, N=1)") {
  InstConfig cfg;
  cfg.n = 1;
  cfg.N = 1;
  cfg.target = bell_basis_povm();

  Povm eff = effective_povm(cfg);
  PureState psi = phi_plus();
  Mat rho = psi.amps * psi.amps.adjoint();
  auto probs = qcore::povm_probabilities(eff, rho);

  const int trials = 10000;
  RngStream rng(7);
  MeasurementProtocol proto(cfg, psi);
  auto freq = mc_distribution(proto, 4, trials, rng);
  check_within_3sigma(freq, probs, trials);
}

TEST_CASE("computational target at N=4: dominant outcome 00") {
  InstConfig cfg;
  cfg.n = 1;
  cfg.N = 4;
  cfg.target = computational_povm(2);
  PureState psi = two_qubit_state({1, 0, 0, 0});

  Povm eff = effective_povm(cfg);
  Mat rho = psi.amps * psi.amps.adjoint();
  auto probs = qcore::povm_probabilities(eff, rho);
  CHECK(probs[0] > probs[1]);
  CHECK(probs[0] > probs[2]);
  CHECK(probs[0] > probs[3]);
  CHECK(probs[0] > 0.25);  // strictly better than uniform

  const int trials = 10000;
  RngStream rng(11);
  MeasurementProtocol proto(cfg, psi);
  auto freq = mc_distribution(proto, 4, trials, rng);
  check_within_3sigma(freq, probs, trials);
  CHECK(proto.target().labels[0] == "00");
}

TEST_CASE("effective POVM distance to target is non-increasing in N") {
  InstConfig cfg;
  cfg.n = 1;
  cfg.target = bell_basis_povm();
  QuantumChannel target_ch = qcore::povm_as_channel(std::get<Povm>(cfg.target));
  double prev = 1e9;
  for (int N : {1, 2, 3, 4}) {
    cfg.N = N;
    Povm eff = effective_povm(cfg);
    QuantumChannel eff_ch = qcore::povm_as_channel(eff);
    const double dist = qcore::choi_trace_distance(eff_ch, target_ch).half_trace_dist;
    CHECK(dist <= prev + 1e-9);
    prev = dist;
  }
}

TEST_CASE("step order does not change the outcome distribution") {
  InstConfig cfg;
  cfg.n = 1;
  cfg.N = 2;
  cfg.target = bell_basis_povm();
  PureState psi = two_qubit_state({0.5, Complex(0, 0.7), -0.3, 0.2});
  MeasurementProtocol proto(cfg, psi);

  const int trials = 100000;
  // joint statistics over (t, i, charlie)
  auto joint_hist = [&](StepOrder order, std::uint64_t seed) {
    std::map<std::tuple<int, int, int>, int> h;
    RngStream rng(seed);
    for (int t = 0; t < trials; ++t) {
      RngStream r = rng.split(t);
      auto tr = proto.run(r, order);
      h[{tr.bob_teleport_outcome[0], tr.alice_port_index, tr.charlie_output}]++;
    }
    return h;
  };
  auto hb = joint_hist(StepOrder::BobFirst, 3);
  auto ha = joint_hist(StepOrder::AliceFirst, 4);
  std::map<std::tuple<int, int, int>, int> keys = hb;
  keys.insert(ha.begin(), ha.end());
  for (const auto& [key, unused] : keys) {
    const double fb = hb.count(key) ? hb[key] / double(trials) : 0.0;
    const double fa = ha.count(key) ? ha[key] / double(trials) : 0.0;
    const double p = (fb + fa) / 2;
    const double sigma = std::sqrt(std::max(p * (1 - p), 1e-12) * 2.0 / trials);
    CHECK(std::abs(fb - fa) < 3 * sigma + 1e-9);
  }
}

TEST_CASE("effective channel: identity target reduces to the port channel") {
  InstConfig cfg;
  cfg.n = 1;
  cfg.N = 1;
  cfg.target = ComplexMatrix(Mat(Mat::Identity(4, 4)), {4});
  QuantumChannel eff = effective_channel(cfg);
  eff.validate();
  // N=1 port channel is completely depolarizing on C^4, so the protocol is too
  CHECK(qcore::ent_fidelity(eff) == doctest::Approx(1.0 / 16).epsilon(1e-9));
  auto pbt = make_pbt_resources(4, 1);
  CHECK(qcore::ent_fidelity(pbt->channel) == doctest::Approx(1.0 / 16).epsilon(1e-9));
}

TEST_CASE("Pauli covariance of the unitary protocol") {
  InstConfig cfg;
  cfg.n = 1;
  cfg.N = 2;

  cfg.target = ComplexMatrix(Mat(Mat::Identity(4, 4)), {4});
  QuantumChannel e_id = effective_channel(cfg);
  const double f_id =
      qcore::ent_fidelity(e_id);  // target is the identity conjugation itself

  Mat xx = qcore::pauli_string({1, 1}).mat;
  cfg.target = ComplexMatrix(xx, {4});
  QuantumChannel e_xx = effective_channel(cfg);
  QuantumChannel undo = qcore::unitary_channel(Mat(xx.adjoint()));
  const double f_xx = qcore::ent_fidelity(qcore::compose(undo, e_xx));
  CHECK(f_xx == doctest::Approx(f_id).epsilon(1e-9));
}

TEST_CASE("CNOT fidelity improves with N") {
  InstConfig cfg;
  cfg.n = 1;
  cfg.target = ComplexMatrix(cnot_gate(), {4});
  QuantumChannel undo = qcore::unitary_channel(Mat(cnot_gate().adjoint()));
  double first = 0, prev = 0;
  for (int N : {1, 2, 3, 4}) {
    cfg.N = N;
    const double f = qcore::ent_fidelity(qcore::compose(undo, effective_channel(cfg)));
    CHECK(f >= prev - 1e-9);
    if (N == 1) first = f;
    prev = f;
  }
  // N=1 is the depolarizing floor 1/16; N=4 approaches the N/d^2 = 1/4 cap
  CHECK(first == doctest::Approx(1.0 / 16).epsilon(1e-8));
  CHECK(prev > 0.2);
}

TEST_CASE("unitary runs: identity target at N=1 predicts fidelity 1/4") {
  InstConfig cfg;
  cfg.n = 1;
  cfg.N = 1;
  cfg.target = ComplexMatrix(Mat(Mat::Identity(4, 4)), {4});
  PureState psi = two_qubit_state({1, 0, 0, 0});

  QuantumChannel eff = effective_channel(cfg);
  Mat rho = psi.amps * psi.amps.adjoint();
  const double predicted = (psi.amps.adjoint() * qcore::apply_channel(eff, rho) * psi.amps)(0).real();
  CHECK(predicted == doctest::Approx(0.25).epsilon(1e-9));

  RngStream rng(5);
  UnitaryProtocol proto(cfg, psi);
  for (int t = 0; t < 20; ++t) {
    auto tr = proto.run(rng);
    CHECK(tr.fidelity == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(tr.ebits_consumed == 1 * (1 + 3 * 1));
    REQUIRE(tr.final_state.has_value());
    tr.final_state->validate();
  }
}

TEST_CASE("unitary runs: SWAP matches the effective-channel prediction") {
  InstConfig cfg;
  cfg.n = 1;
  cfg.N = 2;
  cfg.target = ComplexMatrix(swap_gate(), {4});
  PureState psi = two_qubit_state({0.8, 0, Complex(0, 0.6), 0});

  QuantumChannel eff = effective_channel(cfg);
  Vec target_vec = swap_gate() * psi.amps;
  Mat rho = psi.amps * psi.amps.adjoint();
  const double predicted =
      (target_vec.adjoint() * qcore::apply_channel(eff, rho) * target_vec)(0).real();

  const int trials = 4000;
  RngStream rng(9);
  UnitaryProtocol proto(cfg, psi);
  double sum = 0, sumsq = 0;
  for (int t = 0; t < trials; ++t) {
    RngStream r = rng.split(t);
    auto tr = proto.run(r);
    CHECK(tr.alice_port_index >= 1);
    CHECK(tr.alice_port_index <= 2);
    CHECK(static_cast<int>(tr.port_outcomes.size()) == 2);
    sum += tr.fidelity;
    sumsq += tr.fidelity * tr.fidelity;
  }
  const double mean = sum / trials;
  const double sd = std::sqrt(std::max(sumsq / trials - mean * mean, 0.0) / trials);
  CHECK(std::abs(mean - predicted) < 3 * sd + 1e-9);
}

TEST_CASE("resource report worked values") {
  ResourceReport r = resource_report(1, 1.0);
  CHECK(r.port_count == doctest::Approx(4096.0));
  CHECK(r.povm_ebits == doctest::Approx(8193.0));
  CHECK(r.unitary_ebits == doctest::Approx(12289.0));

  ResourceReport rv = resource_report(1, 1.0 / std::exp(1.0));
  CHECK(rv.vaidman_rounds == doctest::Approx(16.0).epsilon(1e-12));

  CHECK_THROWS_AS(resource_report(0, 1.0), DomainError);
  CHECK_THROWS_AS(resource_report(1, 0.0), DomainError);
}

TEST_CASE("size budgets are enforced") {
  InstConfig cfg;
  cfg.n = 1;
  cfg.N = 6;  // 4^7 = 16384 exceeds the dense limit
  cfg.target = bell_basis_povm();
  CHECK_THROWS_AS(effective_povm(cfg), SizeLimitError);

  InstConfig big;
  big.n = 2;
  big.N = 3;  // statevector 2^(8+24) amplitudes
  big.target = computational_povm(4);
  RngStream rng(1);
  PureState psi(Vec(Vec::Unit(16, 0)), {2, 2, 2, 2});
  CHECK_THROWS_AS(simulate_measurement_run(big, psi, rng), SizeLimitError);
}
