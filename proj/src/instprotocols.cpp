#include "nlqc/instprotocols.hpp"

#include <cmath>
#include <string>

namespace nlqc {
namespace instprotocols {

namespace {

long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

std::vector<int> pauli_digits(long long t, int n) {
  std::vector<int> digits(n, 0);
  for (int k = n - 1; k >= 0; --k) {
    digits[k] = static_cast<int>(t % 4);
    t /= 4;
  }
  return digits;
}

// I_{2^n} (x) sigma_t acting on the doubled (2n-qubit) space
Mat side_correction(long long t, int n) {
  const std::vector<int> digits = pauli_digits(t, n);
  Mat sigma = qcore::pauli_string(digits).mat;
  Mat out = Mat::Zero(sigma.rows() * (1 << n), sigma.rows() * (1 << n));
  const long long half = 1 << n;
  for (long long i = 0; i < half; ++i)
    out.block(i * sigma.rows(), i * sigma.rows(), sigma.rows(), sigma.rows()) = sigma;
  return out;
}

void check_budgets(int n, int N, const ToleranceConfig& tol) {
  if (n < 1 || N < 1) throw DomainError("inst: need n >= 1, N >= 1");
  const int statevector_log2 = 4 * n + 4 * n * N;  // 4^n * 4^n * 16^(nN) amplitudes
  if (statevector_log2 > 24)
    throw SizeLimitError("inst: statevector budget 2^" + std::to_string(statevector_log2) +
                         " amplitudes exceeds 2^24");
  const long long d = ipow(4, n);
  if (ipow(d, N + 1) > tol.max_dim)
    throw SizeLimitError("inst: 4^(n(N+1)) exceeds the dense size limit");
}

const Povm& expect_povm(const InstConfig& cfg) {
  if (!std::holds_alternative<Povm>(cfg.target))
    throw DomainError("inst: configuration does not carry a POVM target");
  return std::get<Povm>(cfg.target);
}

const ComplexMatrix& expect_unitary(const InstConfig& cfg) {
  if (!std::holds_alternative<ComplexMatrix>(cfg.target))
    throw DomainError("inst: configuration does not carry a unitary target");
  return std::get<ComplexMatrix>(cfg.target);
}

Vec input_vector(const PureState& psi, int n) {
  if (psi.dim() != (1 << (2 * n)))
    throw ShapeError("inst: input state must live on 2n qubits");
  for (int d : psi.dims)
    if (d != 2) throw ShapeError("inst: input subsystems must be qubits");
  psi.check_normalized();
  return psi.amps;
}

// Joint distribution p(t, i) and Bob's conditional port states rho_{t,i}
// for input chi_t = (I (x) sigma_t)|psi>, from the Alice-ordered PGM.
struct BranchTables {
  std::vector<std::vector<double>> p_joint;
  std::vector<std::vector<Mat>> rho;
};

BranchTables branch_tables(const Vec& psi, int n, const PbtResources& pbt) {
  const int d = pbt.d, N = pbt.N;
  const long long ports_dim = ipow(d, N);
  const long long branches = ipow(4, n);

  BranchTables t;
  t.p_joint.assign(branches, std::vector<double>(N, 0.0));
  t.rho.assign(branches, std::vector<Mat>(N));
  for (long long tt = 0; tt < branches; ++tt) {
    Vec chi = side_correction(tt, n) * psi;
    for (int i = 0; i < N; ++i) {
      const Mat& e = pbt.alice_povm.elements[i].mat;
      // R[b',b] = <chi (x) b'| E^i |chi (x) b>
      Mat r = Mat::Zero(ports_dim, ports_dim);
      for (int x1 = 0; x1 < d; ++x1) {
        if (chi(x1) == Complex(0, 0)) continue;
        for (int x2 = 0; x2 < d; ++x2) {
          if (chi(x2) == Complex(0, 0)) continue;
          r += std::conj(chi(x1)) * chi(x2) *
               e.block(static_cast<long long>(x1) * ports_dim,
                       static_cast<long long>(x2) * ports_dim, ports_dim, ports_dim);
        }
      }
      const double p_cond = r.trace().real() / static_cast<double>(ports_dim);
      t.p_joint[tt][i] = p_cond / static_cast<double>(branches);
      if (p_cond > 1e-300) {
        Mat rho = r.transpose() / (static_cast<double>(ports_dim) * p_cond);
        t.rho[tt][i] = (rho + rho.adjoint()) / 2.0;
      } else {
        t.rho[tt][i] = Mat::Identity(ports_dim, ports_dim) / static_cast<double>(ports_dim);
      }
    }
  }
  return t;
}

// sample (t, i) from the joint, in either conditioning order
std::pair<long long, int> sample_branch(const std::vector<std::vector<double>>& p_joint,
                                        RngStream& rng, StepOrder order) {
  const long long branches = static_cast<long long>(p_joint.size());
  const int N = static_cast<int>(p_joint[0].size());
  if (order == StepOrder::BobFirst) {
    // t is uniform by construction; i from p(i|t)
    long long tt = 0;
    for (long long scale = 1; scale < branches; scale *= 4)
      tt = tt * 4 + rng.uniform_int(4);
    std::vector<double> w(N);
    for (int i = 0; i < N; ++i) w[i] = p_joint[tt][i];
    return {tt, rng.sample_discrete(w)};
  }
  // Alice first: i from the marginal, then t | i
  std::vector<double> pi(N, 0.0);
  for (const auto& row : p_joint)
    for (int i = 0; i < N; ++i) pi[i] += row[i];
  const int i = rng.sample_discrete(pi);
  std::vector<double> pt(branches);
  for (long long tt = 0; tt < branches; ++tt) pt[tt] = p_joint[tt][i];
  return {rng.sample_discrete(pt), i};
}

}  // namespace

std::shared_ptr<const PbtResources> make_pbt_resources(int d, int N,
                                                       const ToleranceConfig& tol) {
  auto res = std::make_shared<PbtResources>();
  res->d = d;
  res->N = N;
  PortFamily fam = portbased::eta_family(d, N, tol);
  res->alice_povm = portbased::to_alice_ordering(portbased::pgm_build_from_family(fam, tol), d, N);
  res->channel = portbased::pbt_channel(fam, res->alice_povm, tol);
  return res;
}

MeasurementProtocol::MeasurementProtocol(const InstConfig& cfg, const PureState& psi,
                                         std::shared_ptr<const PbtResources> shared,
                                         const ToleranceConfig& tol)
    : n_(cfg.n), N_(cfg.N), d_(static_cast<int>(ipow(4, cfg.n))) {
  check_budgets(n_, N_, tol);
  target_ = expect_povm(cfg);
  if (target_.dim() != d_) throw ShapeError("inst: target POVM must act on 2n qubits");
  target_.validate(tol);

  Vec in = input_vector(psi, n_);
  pbt_ = shared && shared->d == d_ && shared->N == N_ ? std::move(shared)
                                                      : make_pbt_resources(d_, N_, tol);
  BranchTables tabs = branch_tables(in, n_, *pbt_);
  p_joint_ = std::move(tabs.p_joint);
  rho_ = std::move(tabs.rho);
  p_port_.assign(N_, 0.0);
  for (const auto& row : p_joint_)
    for (int i = 0; i < N_; ++i) p_port_[i] += row[i];

  const long long branches = ipow(4, n_);
  target_conj_.assign(branches, std::vector<Mat>(target_.size()));
  for (long long tt = 0; tt < branches; ++tt) {
    Mat corr = side_correction(tt, n_);
    for (int g = 0; g < target_.size(); ++g)
      target_conj_[tt][g] = corr * target_.elements[g].mat * corr.adjoint();
  }
}

RunTranscript MeasurementProtocol::run(RngStream& rng, StepOrder order) const {
  auto [tt, i] = sample_branch(p_joint_, rng, order);

  RunTranscript out;
  out.bob_teleport_outcome = pauli_digits(tt, n_);
  out.alice_port_index = i + 1;
  out.ebits_consumed = static_cast<long long>(n_) * (1 + 2LL * N_);

  // Bob measures the corrected target on every port; ports are measured in
  // order and traced out as they are consumed.
  Mat rho = rho_[tt][i];
  const int k = target_.size();
  for (int j = 0; j < N_; ++j) {
    const long long rest = rho.rows() / d_;
    std::vector<Mat> branch(k);
    std::vector<double> w(k);
    for (int g = 0; g < k; ++g) {
      const Mat& og = target_conj_[tt][g];
      Mat m = Mat::Zero(rest, rest);
      for (int s = 0; s < d_; ++s)
        for (int s2 = 0; s2 < d_; ++s2) {
          if (og(s, s2) == Complex(0, 0)) continue;
          m += og(s, s2) * rho.block(static_cast<long long>(s2) * rest,
                                     static_cast<long long>(s) * rest, rest, rest);
        }
      branch[g] = std::move(m);
      w[g] = std::max(0.0, branch[g].trace().real());
    }
    const int g = rng.sample_discrete(w);
    out.port_outcomes.push_back({g});
    rho = branch[g] / std::max(w[g], 1e-300);
  }
  out.charlie_output = out.port_outcomes[i][0];
  out.charlie_label = out.charlie_output < static_cast<int>(target_.labels.size())
                          ? target_.labels[out.charlie_output]
                          : std::to_string(out.charlie_output);
  return out;
}

UnitaryProtocol::UnitaryProtocol(const InstConfig& cfg, const PureState& psi,
                                 std::shared_ptr<const PbtResources> shared,
                                 const ToleranceConfig& tol)
    : n_(cfg.n), N_(cfg.N), d_(static_cast<int>(ipow(4, cfg.n))) {
  check_budgets(n_, N_, tol);
  const Mat u = expect_unitary(cfg).mat;
  if (u.rows() != d_ || u.cols() != d_)
    throw ShapeError("inst: target unitary must act on 2n qubits");
  if ((u.adjoint() * u - Mat::Identity(d_, d_)).cwiseAbs().maxCoeff() > 1e-10)
    throw DomainError("inst: target is not unitary");

  Vec in = input_vector(psi, n_);
  auto pbt = shared && shared->d == d_ && shared->N == N_ ? std::move(shared)
                                                          : make_pbt_resources(d_, N_, tol);
  BranchTables tabs = branch_tables(in, n_, *pbt);
  p_joint_ = std::move(tabs.p_joint);

  const Vec psi_target = u * in;
  const long long branches = ipow(4, n_);
  std::vector<int> port_dims(N_, d_);
  final_state_.assign(branches, std::vector<Mat>(N_));
  fidelity_.assign(branches, std::vector<double>(N_, 0.0));
  for (long long tt = 0; tt < branches; ++tt) {
    Mat corr = u * side_correction(tt, n_);
    for (int i = 0; i < N_; ++i) {
      Mat marg = N_ == 1 ? tabs.rho[tt][i]
                         : linalg::partial_trace(tabs.rho[tt][i], port_dims, {i});
      Mat fin = corr * marg * corr.adjoint();
      final_state_[tt][i] = (fin + fin.adjoint()) / 2.0;
      fidelity_[tt][i] =
          (psi_target.adjoint() * final_state_[tt][i] * psi_target)(0).real();
    }
  }
}

RunTranscript UnitaryProtocol::run(RngStream& rng, StepOrder order) const {
  auto [tt, i] = sample_branch(p_joint_, rng, order);

  RunTranscript out;
  out.bob_teleport_outcome = pauli_digits(tt, n_);
  out.alice_port_index = i + 1;
  out.ebits_consumed = static_cast<long long>(n_) * (1 + 3LL * N_);
  // the per-port teleportation outcomes v_j are uniform and independent
  for (int j = 0; j < N_; ++j) {
    std::vector<int> v(n_);
    for (auto& digit : v) digit = rng.uniform_int(4);
    out.port_outcomes.push_back(std::move(v));
  }
  out.final_state = DensityOperator(ComplexMatrix(final_state_[tt][i], {d_}));
  out.fidelity = fidelity_[tt][i];
  return out;
}

Povm effective_povm(const InstConfig& cfg, const ToleranceConfig& tol) {
  check_budgets(cfg.n, cfg.N, tol);
  const Povm& target = expect_povm(cfg);
  const int d = static_cast<int>(ipow(4, cfg.n));
  if (target.dim() != d) throw ShapeError("effective_povm: target dimension mismatch");
  auto pbt = make_pbt_resources(d, cfg.N, tol);

  const long long branches = ipow(4, cfg.n);
  Povm out;
  out.labels = target.labels;
  for (int g = 0; g < target.size(); ++g) {
    Mat acc = Mat::Zero(d, d);
    for (long long tt = 0; tt < branches; ++tt) {
      Mat corr = side_correction(tt, cfg.n);
      Mat pulled = qcore::channel_adjoint(pbt->channel, Mat(corr * target.elements[g].mat * corr));
      acc += corr * pulled * corr / static_cast<double>(branches);
    }
    out.elements.push_back(ComplexMatrix((acc + acc.adjoint()) / 2.0, {d}));
  }
  out.validate(tol);
  return out;
}

QuantumChannel effective_channel(const InstConfig& cfg, const ToleranceConfig& tol) {
  check_budgets(cfg.n, cfg.N, tol);
  const Mat u = expect_unitary(cfg).mat;
  const int d = static_cast<int>(ipow(4, cfg.n));
  if (u.rows() != d) throw ShapeError("effective_channel: target dimension mismatch");
  auto pbt = make_pbt_resources(d, cfg.N, tol);

  const long long branches = ipow(4, cfg.n);
  std::vector<Mat> corrections;
  for (long long tt = 0; tt < branches; ++tt) corrections.push_back(side_correction(tt, cfg.n));
  auto map = [&](const Mat& rho) {
    Mat acc = Mat::Zero(d, d);
    for (const Mat& corr : corrections) {
      Mat inner = qcore::apply_channel(pbt->channel, Mat(corr * rho * corr));
      acc += u * corr * inner * corr * u.adjoint() / static_cast<double>(branches);
    }
    return acc;
  };
  return qcore::choi_of(map, d, tol);
}

RunTranscript simulate_measurement_run(const InstConfig& cfg, const PureState& psi,
                                       RngStream& rng, StepOrder order,
                                       const ToleranceConfig& tol) {
  return MeasurementProtocol(cfg, psi, nullptr, tol).run(rng, order);
}

RunTranscript simulate_unitary_run(const InstConfig& cfg, const PureState& psi, RngStream& rng,
                                   StepOrder order, const ToleranceConfig& tol) {
  return UnitaryProtocol(cfg, psi, nullptr, tol).run(rng, order);
}

ResourceReport resource_report(int n, double eps) {
  if (n < 1) throw DomainError("resource_report: n must be >= 1");
  if (!(eps > 0) || eps > 2) throw DomainError("resource_report: eps must be in (0, 2]");
  ResourceReport r;
  r.port_count = std::pow(2.0, 8.0 * n + 4) / (eps * eps);
  r.povm_ebits = n * (1.0 + 2.0 * r.port_count);
  r.unitary_ebits = n * (1.0 + 3.0 * r.port_count);
  r.vaidman_rounds = std::log(1.0 / eps) * std::pow(2.0, 4.0 * n);
  r.vaidman_log2_ebits = std::log2(4.0 * n) + 4.0 * n * (r.vaidman_rounds - 1);
  return r;
}

Povm bell_basis_povm() {
  Povm p;
  Vec phi = qcore::max_entangled_vec(2);
  for (int k = 0; k < 4; ++k) {
    Vec beta = linalg::kron(qcore::pauli(k).mat, Mat::Identity(2, 2), 16) * phi;
    p.elements.push_back(ComplexMatrix(Mat(beta * beta.adjoint()), {4}));
    p.labels.push_back(std::to_string(k));
  }
  return p;
}

Povm computational_povm(int qubits) {
  const long long d = 1LL << qubits;
  Povm p;
  for (long long b = 0; b < d; ++b) {
    Mat e = Mat::Zero(d, d);
    e(b, b) = 1;
    p.elements.push_back(ComplexMatrix(std::move(e), {static_cast<int>(d)}));
    std::string label;
    for (int k = qubits - 1; k >= 0; --k) label += ((b >> k) & 1) ? '1' : '0';
    p.labels.push_back(label);
  }
  return p;
}

Mat cnot_gate() {
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
  return m;
}

Mat swap_gate() {
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
  return m;
}

}  // namespace instprotocols
}  // namespace nlqc
