#include "nlqc/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nlqc {

namespace {

using linalg::herm_eig;
using linalg::is_hermitian;
using linalg::max_abs;

std::vector<long long> strides_of(const std::vector<int>& dims) {
  std::vector<long long> s(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k)
    s[k] = s[k + 1] * dims[k + 1];
  return s;
}

long long dim_product(const std::vector<int>& dims) {
  long long p = 1;
  for (int d : dims) p *= d;
  return p;
}

Complex trace_product(const Mat& a, const Mat& b) {
  // tr(a b) without forming the product
  return (a.transpose().cwiseProduct(b)).sum();
}

}  // namespace

PureState::PureState(Vec a, std::vector<int> d) : amps(std::move(a)), dims(std::move(d)) {
  if (dims.empty()) dims = {static_cast<int>(amps.size())};
  if (dim_product(dims) != amps.size())
    throw ShapeError("PureState: dims do not match amplitude count");
}

void PureState::check_normalized(const ToleranceConfig& tol) const {
  if (std::abs(amps.squaredNorm() - 1.0) > tol.trace_one)
    throw ValidationError("PureState: not normalized");
}

void DensityOperator::validate(const ToleranceConfig& tol) const {
  if (matrix.rows() != matrix.cols()) throw ValidationError("DensityOperator: not square");
  if (std::abs(matrix.mat.trace().real() - 1.0) > tol.trace_one ||
      std::abs(matrix.mat.trace().imag()) > tol.trace_one)
    throw ValidationError("DensityOperator: trace != 1");
  if (!linalg::is_psd(matrix.mat, tol.psd))
    throw ValidationError("DensityOperator: not PSD");
}

void Povm::validate(const ToleranceConfig& tol) const {
  if (elements.empty()) throw ValidationError("Povm: no elements");
  const Eigen::Index n = elements[0].rows();
  Mat sum = Mat::Zero(n, n);
  for (const auto& e : elements) {
    if (e.rows() != n || e.cols() != n) throw ValidationError("Povm: inconsistent dims");
    sum += e.mat;
  }
  if (n <= 512) {
    for (const auto& e : elements)
      if (!linalg::is_psd(e.mat, tol.psd)) throw ValidationError("Povm: element not PSD");
    Mat dev = sum - Mat::Identity(n, n);
    if (linalg::op_norm(dev) > tol.povm_sum)
      throw ValidationError("Povm: elements do not sum to identity");
  } else {
    for (const auto& e : elements) {
      const double lmax = linalg::power_iteration_norm(e.mat, 40);
      const double shift = tol.psd * std::max(lmax, 1e-300);
      if (!linalg::psd_within_shift(e.mat, shift))
        throw ValidationError("Povm: element not PSD");
    }
    Mat dev = sum - Mat::Identity(n, n);
    if (linalg::power_iteration_norm(dev, 60) > tol.povm_sum)
      throw ValidationError("Povm: elements do not sum to identity");
  }
}

void QuantumChannel::validate(const ToleranceConfig& tol) const {
  if (choi.rows() != static_cast<Eigen::Index>(dim_in) * dim_out)
    throw ValidationError("QuantumChannel: Choi dims mismatch");
  if (!linalg::is_psd(choi.mat, tol.psd))
    throw ValidationError("QuantumChannel: Choi not PSD");
  Mat marg = linalg::partial_trace(choi.mat, {dim_out, dim_in}, {1});
  Mat dev = marg - Mat::Identity(dim_in, dim_in) / static_cast<double>(dim_in);
  if (linalg::op_norm(dev) > tol.channel_tp)
    throw ValidationError("QuantumChannel: not trace preserving");
}

namespace qcore {

Vec max_entangled_vec(int d) {
  if (d < 1) throw DomainError("max_entangled: d must be >= 1");
  Vec v = Vec::Zero(static_cast<long long>(d) * d);
  const double c = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) v(static_cast<long long>(i) * d + i) = c;
  return v;
}

PureState max_entangled(int d) { return PureState(max_entangled_vec(d), {d, d}); }

ComplexMatrix pauli(int k) {
  Mat m(2, 2);
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw DomainError("pauli: index must be in {0,1,2,3}");
  }
  return ComplexMatrix(std::move(m), {2});
}

ComplexMatrix pauli_string(const std::vector<int>& k) {
  ComplexMatrix out(Mat::Identity(1, 1));
  out.dims = {};
  for (int idx : k) out = linalg::kron(out, pauli(idx));
  if (k.empty()) out.dims = {1};
  return out;
}

PureState tensor(const PureState& a, const PureState& b) {
  Vec v(a.amps.size() * b.amps.size());
  for (long long i = 0; i < a.amps.size(); ++i)
    v.segment(i * b.amps.size(), b.amps.size()) = a.amps(i) * b.amps;
  std::vector<int> dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  return PureState(std::move(v), std::move(dims));
}

void apply_unitary(PureState& s, const Mat& u, const std::vector<int>& subs) {
  const auto strides = strides_of(s.dims);
  long long d_sub = 1;
  for (int q : subs) {
    if (q < 0 || q >= s.subsystems()) throw ShapeError("apply_unitary: bad subsystem");
    d_sub *= s.dims[q];
  }
  if (u.rows() != d_sub || u.cols() != d_sub)
    throw ShapeError("apply_unitary: operator size does not match subsystems");

  // offsets of every sub-multi-index, ordered per `subs`
  std::vector<long long> sub_off(d_sub, 0);
  {
    std::vector<int> idx(subs.size(), 0);
    for (long long c = 0; c < d_sub; ++c) {
      long long o = 0;
      for (std::size_t k = 0; k < subs.size(); ++k) o += idx[k] * strides[subs[k]];
      sub_off[c] = o;
      for (int k = static_cast<int>(subs.size()) - 1; k >= 0; --k) {
        if (++idx[k] < s.dims[subs[k]]) break;
        idx[k] = 0;
      }
    }
  }

  // rest offsets
  std::vector<int> rest;
  for (int q = 0; q < s.subsystems(); ++q)
    if (std::find(subs.begin(), subs.end(), q) == subs.end()) rest.push_back(q);
  long long d_rest = 1;
  for (int q : rest) d_rest *= s.dims[q];

  Vec gathered(d_sub), mixed(d_sub);
  std::vector<int> ridx(rest.size(), 0);
  for (long long r = 0; r < d_rest; ++r) {
    long long base = 0;
    for (std::size_t k = 0; k < rest.size(); ++k) base += ridx[k] * strides[rest[k]];
    for (long long c = 0; c < d_sub; ++c) gathered(c) = s.amps(base + sub_off[c]);
    mixed.noalias() = u * gathered;
    for (long long c = 0; c < d_sub; ++c) s.amps(base + sub_off[c]) = mixed(c);
    for (int k = static_cast<int>(rest.size()) - 1; k >= 0; --k) {
      if (++ridx[k] < s.dims[rest[k]]) break;
      ridx[k] = 0;
    }
  }
}

Mat reduced_density(const PureState& s, const std::vector<int>& keep) {
  const auto strides = strides_of(s.dims);
  std::vector<int> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  std::vector<int> rest;
  for (int q = 0; q < s.subsystems(); ++q)
    if (!std::binary_search(keep_sorted.begin(), keep_sorted.end(), q)) rest.push_back(q);

  long long d_keep = 1, d_rest = 1;
  for (int q : keep_sorted) d_keep *= s.dims[q];
  for (int q : rest) d_rest *= s.dims[q];

  auto offsets = [&](const std::vector<int>& qs, long long count) {
    std::vector<long long> off(count, 0);
    std::vector<int> idx(qs.size(), 0);
    for (long long c = 0; c < count; ++c) {
      long long o = 0;
      for (std::size_t k = 0; k < qs.size(); ++k) o += idx[k] * strides[qs[k]];
      off[c] = o;
      for (int k = static_cast<int>(qs.size()) - 1; k >= 0; --k) {
        if (++idx[k] < s.dims[qs[k]]) break;
        idx[k] = 0;
      }
    }
    return off;
  };
  const auto keep_off = offsets(keep_sorted, d_keep);
  const auto rest_off = offsets(rest, d_rest);

  Mat rho = Mat::Zero(d_keep, d_keep);
  for (long long r = 0; r < d_rest; ++r)
    for (long long a = 0; a < d_keep; ++a) {
      const Complex va = s.amps(keep_off[a] + rest_off[r]);
      if (va == Complex(0, 0)) continue;
      for (long long b = 0; b < d_keep; ++b)
        rho(a, b) += va * std::conj(s.amps(keep_off[b] + rest_off[r]));
    }
  return rho;
}

MeasurementRecord measure_computational(PureState& s, const std::vector<int>& subs,
                                        RngStream& rng, const ToleranceConfig& tol) {
  const auto strides = strides_of(s.dims);
  std::vector<int> sub_dims;
  long long d_sub = 1;
  for (int q : subs) {
    if (q < 0 || q >= s.subsystems()) throw ShapeError("measure_computational: bad subsystem");
    sub_dims.push_back(s.dims[q]);
    d_sub *= s.dims[q];
  }

  // accumulate outcome weights
  std::vector<double> w(d_sub, 0.0);
  std::vector<int> full(s.subsystems(), 0);
  std::vector<long long> sub_value(s.amps.size());
  for (long long flat = 0; flat < s.amps.size(); ++flat) {
    long long v = 0;
    for (int q : subs) v = v * s.dims[q] + full[q];
    sub_value[flat] = v;
    w[v] += std::norm(s.amps(flat));
    for (int k = s.subsystems() - 1; k >= 0; --k) {
      if (++full[k] < s.dims[k]) break;
      full[k] = 0;
    }
  }
  for (auto& x : w)
    if (x < tol.prob_floor) x = 0.0;
  const long long outcome = rng.sample_discrete(w);
  const double p = w[outcome];

  // collapse onto the outcome and drop the measured subsystems
  std::vector<int> rest;
  for (int q = 0; q < s.subsystems(); ++q)
    if (std::find(subs.begin(), subs.end(), q) == subs.end()) rest.push_back(q);
  long long d_rest = 1;
  std::vector<int> rest_dims;
  for (int q : rest) {
    d_rest *= s.dims[q];
    rest_dims.push_back(s.dims[q]);
  }
  Vec collapsed = Vec::Zero(std::max<long long>(d_rest, 1));
  std::fill(full.begin(), full.end(), 0);
  const double inv = 1.0 / std::sqrt(p);
  for (long long flat = 0; flat < s.amps.size(); ++flat) {
    if (sub_value[flat] == outcome) {
      long long r = 0;
      for (int q : rest) r = r * s.dims[q] + full[q];
      collapsed(r) = s.amps(flat) * inv;
    }
    for (int k = s.subsystems() - 1; k >= 0; --k) {
      if (++full[k] < s.dims[k]) break;
      full[k] = 0;
    }
  }
  if (rest_dims.empty()) rest_dims = {1};
  s = PureState(std::move(collapsed), std::move(rest_dims));

  MeasurementRecord rec;
  rec.outcome.assign(subs.size(), 0);
  long long rem = outcome;
  for (int k = static_cast<int>(subs.size()) - 1; k >= 0; --k) {
    rec.outcome[k] = static_cast<int>(rem % sub_dims[k]);
    rem /= sub_dims[k];
  }
  rec.probability = p;
  rec.post = s;
  return rec;
}

MeasurementRecord teleport_measure(PureState& state, const std::vector<int>& qubit_indices,
                                   const std::vector<int>& epr_indices, RngStream& rng,
                                   const ToleranceConfig& tol) {
  if (qubit_indices.size() != epr_indices.size())
    throw ShapeError("teleport_measure: index lists differ in length");
  std::vector<int> all;
  for (std::size_t i = 0; i < qubit_indices.size(); ++i) {
    all.push_back(qubit_indices[i]);
    all.push_back(epr_indices[i]);
  }
  std::vector<int> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ShapeError("teleport_measure: overlapping indices");
  for (int q : all) {
    if (q < 0 || q >= state.subsystems() || state.dims[q] != 2)
      throw ShapeError("teleport_measure: addressed subsystem is not a qubit");
  }

  Mat cnot(4, 4);
  cnot << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0;
  Mat h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);

  for (std::size_t i = 0; i < qubit_indices.size(); ++i) {
    apply_unitary(state, cnot, {qubit_indices[i], epr_indices[i]});
    apply_unitary(state, h, {qubit_indices[i]});
  }
  MeasurementRecord bits = measure_computational(state, all, rng, tol);

  static const int bell_to_pauli[4] = {0, 1, 3, 2};  // bits (bq,be) -> sigma_k
  MeasurementRecord rec;
  rec.outcome.resize(qubit_indices.size());
  for (std::size_t i = 0; i < qubit_indices.size(); ++i) {
    const int bq = bits.outcome[2 * i];
    const int be = bits.outcome[2 * i + 1];
    rec.outcome[i] = bell_to_pauli[2 * bq + be];
  }
  rec.probability = bits.probability;
  rec.post = state;
  return rec;
}

QuantumChannel choi_of(const std::function<Mat(const Mat&)>& map, int dim_in,
                       const ToleranceConfig& tol) {
  int dim_out = -1;
  Mat j;
  for (int m = 0; m < dim_in; ++m)
    for (int n = 0; n < dim_in; ++n) {
      Mat e = Mat::Zero(dim_in, dim_in);
      e(m, n) = 1.0;
      Mat out = map(e);
      if (dim_out < 0) {
        dim_out = static_cast<int>(out.rows());
        j = Mat::Zero(static_cast<long long>(dim_out) * dim_in,
                      static_cast<long long>(dim_out) * dim_in);
      }
      if (out.rows() != dim_out || out.cols() != dim_out)
        throw ShapeError("choi_of: map output size varies");
      for (int i = 0; i < dim_out; ++i)
        for (int k = 0; k < dim_out; ++k)
          j(static_cast<long long>(i) * dim_in + m, static_cast<long long>(k) * dim_in + n) +=
              out(i, k) / static_cast<double>(dim_in);
    }
  QuantumChannel ch;
  ch.choi = ComplexMatrix((j + j.adjoint()) / 2.0, {dim_out, dim_in});
  ch.dim_in = dim_in;
  ch.dim_out = dim_out;
  Mat marg = linalg::partial_trace(ch.choi.mat, {dim_out, dim_in}, {1});
  Mat dev = marg - Mat::Identity(dim_in, dim_in) / static_cast<double>(dim_in);
  if (linalg::op_norm(dev) > tol.choi_tp_build)
    throw ValidationError("choi_of: map is not trace preserving");
  return ch;
}

QuantumChannel identity_channel(int d) {
  Vec phi = max_entangled_vec(d);
  QuantumChannel ch;
  ch.choi = ComplexMatrix(phi * phi.adjoint(), {d, d});
  ch.dim_in = ch.dim_out = d;
  return ch;
}

QuantumChannel depolarizing_channel(int d) {
  QuantumChannel ch;
  const long long n = static_cast<long long>(d) * d;
  ch.choi = ComplexMatrix(Mat::Identity(n, n) / static_cast<double>(n), {d, d});
  ch.dim_in = ch.dim_out = d;
  return ch;
}

QuantumChannel unitary_channel(const Mat& u) {
  const int d = static_cast<int>(u.rows());
  Vec v(static_cast<long long>(d) * d);
  const double c = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i)
    for (int m = 0; m < d; ++m) v(static_cast<long long>(i) * d + m) = u(i, m) * c;
  QuantumChannel ch;
  ch.choi = ComplexMatrix(v * v.adjoint(), {d, d});
  ch.dim_in = ch.dim_out = d;
  return ch;
}

double ent_fidelity(const QuantumChannel& ch) {
  if (ch.dim_in != ch.dim_out) throw ShapeError("ent_fidelity: dim_in != dim_out");
  const int d = ch.dim_in;
  Complex acc(0, 0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      acc += ch.choi.mat(static_cast<long long>(i) * d + i, static_cast<long long>(j) * d + j);
  return acc.real() / d;
}

Mat apply_channel(const QuantumChannel& ch, const Mat& rho) {
  if (rho.rows() != ch.dim_in || rho.cols() != ch.dim_in)
    throw ShapeError("apply_channel: state dimension mismatch");
  const int din = ch.dim_in, dout = ch.dim_out;
  Mat out = Mat::Zero(dout, dout);
  for (int p = 0; p < dout; ++p)
    for (int q = 0; q < dout; ++q) {
      Complex acc(0, 0);
      for (int m = 0; m < din; ++m)
        for (int n = 0; n < din; ++n)
          acc += ch.choi.mat(static_cast<long long>(p) * din + m,
                             static_cast<long long>(q) * din + n) *
                 rho(m, n);
      out(p, q) = acc * static_cast<double>(din);
    }
  return out;
}

DensityOperator apply_channel(const QuantumChannel& ch, const DensityOperator& rho) {
  return DensityOperator(
      ComplexMatrix(apply_channel(ch, rho.matrix.mat), {ch.dim_out}));
}

Mat channel_adjoint(const QuantumChannel& ch, const Mat& x) {
  if (x.rows() != ch.dim_out || x.cols() != ch.dim_out)
    throw ShapeError("channel_adjoint: observable dimension mismatch");
  const int din = ch.dim_in, dout = ch.dim_out;
  Mat out = Mat::Zero(din, din);
  for (int n = 0; n < din; ++n)
    for (int m = 0; m < din; ++m) {
      Complex acc(0, 0);
      for (int i = 0; i < dout; ++i)
        for (int j = 0; j < dout; ++j)
          acc += ch.choi.mat(static_cast<long long>(i) * din + m,
                             static_cast<long long>(j) * din + n) *
                 x(j, i);
      out(n, m) = acc * static_cast<double>(din);
    }
  return out;
}

QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first) {
  if (first.dim_out != second.dim_in)
    throw ShapeError("compose: channel dimensions do not chain");
  const int d0 = first.dim_in, d1 = first.dim_out, d2 = second.dim_out;
  auto superop = [](const QuantumChannel& ch) {
    const int din = ch.dim_in, dout = ch.dim_out;
    Mat s(static_cast<long long>(dout) * dout, static_cast<long long>(din) * din);
    for (int i = 0; i < dout; ++i)
      for (int j = 0; j < dout; ++j)
        for (int m = 0; m < din; ++m)
          for (int n = 0; n < din; ++n)
            s(static_cast<long long>(i) * dout + j, static_cast<long long>(m) * din + n) =
                ch.choi.mat(static_cast<long long>(i) * din + m,
                            static_cast<long long>(j) * din + n) *
                static_cast<double>(din);
    return s;
  };
  Mat s12 = superop(second) * superop(first);
  Mat j(static_cast<long long>(d2) * d0, static_cast<long long>(d2) * d0);
  for (int i = 0; i < d2; ++i)
    for (int j2 = 0; j2 < d2; ++j2)
      for (int m = 0; m < d0; ++m)
        for (int n = 0; n < d0; ++n)
          j(static_cast<long long>(i) * d0 + m, static_cast<long long>(j2) * d0 + n) =
              s12(static_cast<long long>(i) * d2 + j2, static_cast<long long>(m) * d0 + n) /
              static_cast<double>(d0);
  QuantumChannel out;
  out.choi = ComplexMatrix((j + j.adjoint()) / 2.0, {d2, d0});
  out.dim_in = d0;
  out.dim_out = d2;
  return out;
}

QuantumChannel povm_as_channel(const Povm& p) {
  const int d = p.dim();
  const int k = p.size();
  Mat j = Mat::Zero(static_cast<long long>(k) * d, static_cast<long long>(k) * d);
  for (int g = 0; g < k; ++g) {
    Mat ot = p.elements[g].mat.transpose();
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n)
        j(static_cast<long long>(g) * d + m, static_cast<long long>(g) * d + n) =
            ot(m, n) / static_cast<double>(d);
  }
  QuantumChannel ch;
  ch.choi = ComplexMatrix((j + j.adjoint()) / 2.0, {k, d});
  ch.dim_in = d;
  ch.dim_out = k;
  return ch;
}

std::vector<Mat> kraus_of(const QuantumChannel& ch, const ToleranceConfig& tol) {
  Spectrum s = herm_eig(ch.choi.mat, tol);
  const double cutoff = tol.rank_cutoff * std::max(0.0, s.eigenvalues(0));
  std::vector<Mat> kraus;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    if (s.eigenvalues(i) <= cutoff) continue;
    const double w = std::sqrt(s.eigenvalues(i) * ch.dim_in);
    Mat k(ch.dim_out, ch.dim_in);
    for (int p = 0; p < ch.dim_out; ++p)
      for (int m = 0; m < ch.dim_in; ++m)
        k(p, m) = w * s.eigenvectors(static_cast<long long>(p) * ch.dim_in + m, i);
    kraus.push_back(std::move(k));
  }
  return kraus;
}

ChoiDistance choi_trace_distance(const QuantumChannel& a, const QuantumChannel& b) {
  if (a.dim_in != b.dim_in || a.dim_out != b.dim_out)
    throw ShapeError("choi_trace_distance: dimension mismatch");
  const double tn = linalg::trace_norm(Mat(a.choi.mat - b.choi.mat));
  return ChoiDistance{tn / 2.0, 2.0 * a.dim_in * tn};
}

std::vector<double> povm_probabilities(const Povm& p, const Mat& rho) {
  std::vector<double> probs(p.size());
  for (int i = 0; i < p.size(); ++i)
    probs[i] = trace_product(p.elements[i].mat, rho).real();
  return probs;
}

MeasurementRecord sample_povm(const Povm& p, const DensityOperator& rho, RngStream& rng,
                              const ToleranceConfig& tol) {
  if (p.dim() != rho.dim()) throw ShapeError("sample_povm: dimension mismatch");
  std::vector<double> probs = povm_probabilities(p, rho.matrix.mat);
  double sum = 0.0;
  for (double& q : probs) {
    if (q < -1e-9) throw NumericalError("sample_povm: negative outcome probability");
    if (q < tol.prob_floor) q = 0.0;
    sum += q;
  }
  if (std::abs(sum - 1.0) > tol.povm_sum)
    throw NumericalError("sample_povm: probabilities do not sum to 1");
  const int outcome = rng.sample_discrete(probs);

  Mat root = linalg::mat_func(p.elements[outcome].mat, SpectralFn::Sqrt, tol);
  Mat post = root * rho.matrix.mat * root / probs[outcome];

  MeasurementRecord rec;
  rec.outcome = {outcome};
  rec.label = outcome < static_cast<int>(p.labels.size()) ? p.labels[outcome] : "";
  rec.probability = probs[outcome];
  rec.post = DensityOperator(ComplexMatrix((post + post.adjoint()) / 2.0, rho.matrix.dims));
  return rec;
}

}  // namespace qcore
}  // namespace nlqc
