#include "nlqc/portbased.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nlqc {
namespace portbased {

namespace {

long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

Complex overlap_sum(const Mat& a, const Mat& b) {
  // tr(a b) for Hermitian a, b
  return (a.transpose().cwiseProduct(b)).sum();
}

}  // namespace

PortFamily eta_family(int d, int N, const ToleranceConfig& tol) {
  if (d < 2 || N < 1) throw DomainError("eta_family: need d >= 2, N >= 1");
  const long long dim = ipow(d, N + 1);
  if (dim > tol.max_dim)
    throw SizeLimitError("eta_family: d^(N+1) = " + std::to_string(dim) + " exceeds limit " +
                         std::to_string(tol.max_dim));

  PortFamily fam;
  fam.d = d;
  fam.N = N;
  std::vector<int> dims(N + 1, d);

  const long long mid_count = ipow(d, N - 1);
  const double val = 1.0 / static_cast<double>(ipow(d, N));
  const long long stride_b = 1;  // B is the last subsystem

  Mat sum = Mat::Zero(dim, dim);
  for (int i = 0; i < N; ++i) {
    Mat m = Mat::Zero(dim, dim);
    // strides of the N-1 middle subsystems (all A'_j, j != i)
    std::vector<long long> mid_strides;
    for (int j = N - 1; j >= 0; --j) {
      if (j == i) continue;
      mid_strides.push_back(ipow(d, N - j));  // subsystem j of N+1 has stride d^(N-j)
    }
    std::reverse(mid_strides.begin(), mid_strides.end());
    const long long stride_i = ipow(d, N - i);

    for (long long mid = 0; mid < mid_count; ++mid) {
      long long base = 0;
      long long rem = mid;
      for (int k = static_cast<int>(mid_strides.size()) - 1; k >= 0; --k) {
        base += (rem % d) * mid_strides[k];
        rem /= d;
      }
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          m(base + k * stride_i + k * stride_b, base + l * stride_i + l * stride_b) = val;
    }
    sum += m;
    fam.eta.push_back(DensityOperator(ComplexMatrix(std::move(m), dims)));
  }

  fam.sum_inv_sqrt =
      ComplexMatrix(linalg::mat_func(sum, SpectralFn::PseudoInvSqrt, tol), dims);
  return fam;
}

namespace {

Povm assemble_povm(std::vector<Mat> elements, const std::vector<int>& dims,
                   const ToleranceConfig& tol) {
  const Eigen::Index n = elements[0].rows();
  Mat total = Mat::Zero(n, n);
  for (auto& e : elements) {
    e = (e + e.adjoint()) / 2.0;
    total += e;
  }
  elements[0] += Mat::Identity(n, n) - total;  // completion outside supp(S)
  Povm povm;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    povm.elements.push_back(ComplexMatrix(std::move(elements[i]), dims));
    povm.labels.push_back(std::to_string(i + 1));
  }
  povm.validate(tol);
  return povm;
}

}  // namespace

Povm pgm_build(const std::vector<DensityOperator>& states, const ToleranceConfig& tol) {
  if (states.empty()) throw DomainError("pgm_build: empty ensemble");
  const Eigen::Index n = states[0].matrix.rows();
  Mat sum = Mat::Zero(n, n);
  for (const auto& s : states) {
    if (s.matrix.rows() != n) throw ShapeError("pgm_build: dimension mismatch");
    if (!linalg::is_psd(s.matrix.mat, tol.psd)) throw DomainError("pgm_build: state not PSD");
    sum += s.matrix.mat;
  }
  Mat sinv = linalg::mat_func(sum, SpectralFn::PseudoInvSqrt, tol);

  std::vector<Mat> elements;
  elements.reserve(states.size());
  for (const auto& s : states) elements.push_back(Mat(sinv * s.matrix.mat * sinv));
  return assemble_povm(std::move(elements), states[0].matrix.dims, tol);
}

Povm pgm_build_from_family(const PortFamily& fam, const ToleranceConfig& tol) {
  const int d = fam.d, N = fam.N;
  const long long dim = ipow(d, N + 1);
  const long long mid_count = ipow(d, N - 1);
  const Mat& sinv = fam.sum_inv_sqrt.mat;

  std::vector<Mat> elements;
  elements.reserve(N);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < N; ++i) {
    // eta^i = (1/d^(N-1)) V V^dag with V an isometry whose columns are the
    // |Phi>-pattern vectors, so S^{-1/2} eta^i S^{-1/2} is a Gram product.
    std::vector<long long> mid_strides;
    for (int j = N - 1; j >= 0; --j) {
      if (j == i) continue;
      mid_strides.push_back(ipow(d, N - j));
    }
    std::reverse(mid_strides.begin(), mid_strides.end());
    const long long stride_i = ipow(d, N - i);

    Mat t(dim, mid_count);
    for (long long mid = 0; mid < mid_count; ++mid) {
      long long base = 0;
      long long rem = mid;
      for (int k = static_cast<int>(mid_strides.size()) - 1; k >= 0; --k) {
        base += (rem % d) * mid_strides[k];
        rem /= d;
      }
      t.col(mid) = sinv.col(base + 0 * stride_i + 0) * inv_sqrt_d;
      for (int k = 1; k < d; ++k)
        t.col(mid) += sinv.col(base + k * stride_i + k) * inv_sqrt_d;
    }
    elements.push_back(Mat(t * t.adjoint() / static_cast<double>(mid_count)));
  }
  return assemble_povm(std::move(elements), fam.eta[0].matrix.dims, tol);
}

double pgm_success(const std::vector<DensityOperator>& states, const Povm& povm) {
  if (states.size() != povm.elements.size())
    throw ShapeError("pgm_success: ensemble and POVM sizes differ");
  double acc = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].matrix.rows() != povm.elements[i].rows())
      throw ShapeError("pgm_success: dimension mismatch");
    acc += overlap_sum(povm.elements[i].mat, states[i].matrix.mat).real();
  }
  return acc / static_cast<double>(states.size());
}

Povm to_alice_ordering(const Povm& povm, int d, int N) {
  std::vector<int> dims(N + 1, d);
  std::vector<int> perm(N + 1);
  perm[0] = N;  // B becomes A
  for (int j = 1; j <= N; ++j) perm[j] = j - 1;
  Povm out;
  out.labels = povm.labels;
  for (const auto& e : povm.elements)
    out.elements.push_back(ComplexMatrix(linalg::permute_subsystems(e.mat, dims, perm), dims));
  return out;
}

QuantumChannel pbt_channel(const PortFamily& fam, const Povm& alice_povm,
                           const ToleranceConfig& tol) {
  const int d = fam.d, N = fam.N;
  const long long dim = ipow(d, N + 1);
  if (static_cast<int>(alice_povm.elements.size()) != N)
    throw ShapeError("pbt_channel: POVM size != N");
  if (alice_povm.elements[0].rows() != dim)
    throw ShapeError("pbt_channel: POVM dimension mismatch");

  std::vector<int> dims(N + 1, d);
  const double mid_scale = 1.0 / static_cast<double>(ipow(d, N - 1));
  Mat j = Mat::Zero(static_cast<long long>(d) * d, static_cast<long long>(d) * d);
  for (int i = 0; i < N; ++i) {
    // contract the uninvolved ports with their maximally mixed marginals
    Mat k = linalg::partial_trace(alice_povm.elements[i].mat, dims, {0, i + 1}) * mid_scale;
    for (int p = 0; p < d; ++p)
      for (int m = 0; m < d; ++m)
        for (int q = 0; q < d; ++q)
          for (int n = 0; n < d; ++n)
            j(static_cast<long long>(p) * d + m, static_cast<long long>(q) * d + n) +=
                k(static_cast<long long>(n) * d + q, static_cast<long long>(m) * d + p) /
                static_cast<double>(d * d);
  }
  QuantumChannel ch;
  ch.choi = ComplexMatrix((j + j.adjoint()) / 2.0, {d, d});
  ch.dim_in = ch.dim_out = d;
  ch.validate(tol);
  return ch;
}

PbtReport pbt_report(int d, int N, const ToleranceConfig& tol) {
  PortFamily fam = eta_family(d, N, tol);
  Povm pgm = pgm_build_from_family(fam, tol);
  const double p = pgm_success(fam.eta, pgm);
  QuantumChannel ch = pbt_channel(fam, to_alice_ordering(pgm, d, N), tol);
  const double f = qcore::ent_fidelity(ch);
  auto dist = qcore::choi_trace_distance(ch, qcore::identity_channel(d));

  PbtReport r;
  r.d = d;
  r.N = N;
  r.p_succ = p;
  r.fidelity = f;
  r.thm1_bound = 1.0 - static_cast<double>(d * d - 1) / N;
  r.appendix_bound = (static_cast<double>(d * d) / N) * r.thm1_bound;
  r.choi_halfdist = dist.half_trace_dist;
  r.choi_fid_bound = std::sqrt(std::max(0.0, 1.0 - f));
  r.diamond_upper = dist.diamond_upper;
  r.corollary1_bound = 4.0 * d * d / std::sqrt(static_cast<double>(N));
  return r;
}

double pgm_generic_bound(const std::vector<DensityOperator>& states,
                         const ToleranceConfig& tol) {
  if (states.empty()) throw DomainError("pgm_generic_bound: empty ensemble");
  const int n = static_cast<int>(states.size());
  const Eigen::Index dim = states[0].matrix.rows();
  Mat avg = Mat::Zero(dim, dim);
  double rank_sum = 0;
  for (const auto& s : states) {
    avg += s.matrix.mat;
    rank_sum += linalg::numerical_rank_psd(s.matrix.mat, tol);
  }
  avg /= static_cast<double>(n);
  const double rbar = rank_sum / n;
  const double tr_avg_sq = avg.squaredNorm();  // tr(etabar^2) for Hermitian etabar
  return 1.0 / (n * rbar * tr_avg_sq);
}

OperatorBoundResult operator_bound_check(const ComplexMatrix& x, const ComplexMatrix& y,
                                         const ToleranceConfig& tol) {
  Spectrum sx = linalg::herm_eig(x, tol);
  Spectrum sy = linalg::herm_eig(y, tol);
  const double xmax = sx.eigenvalues.size() ? std::abs(sx.eigenvalues(0)) : 0.0;
  const double ymax = sy.eigenvalues.size() ? std::abs(sy.eigenvalues(0)) : 0.0;
  if (sx.eigenvalues.minCoeff() < -tol.psd * xmax || sy.eigenvalues.minCoeff() < -tol.psd * ymax)
    throw DomainError("operator_bound_check: inputs must be PSD");

  double tr_x = 0, tr_x2 = 0, tr_y = 0, tr_y2 = 0, tr_sqrt_y = 0;
  for (Eigen::Index i = 0; i < sx.eigenvalues.size(); ++i) {
    const double l = std::max(0.0, sx.eigenvalues(i));
    tr_x += l;
    tr_x2 += l * l;
  }
  for (Eigen::Index i = 0; i < sy.eigenvalues.size(); ++i) {
    const double l = std::max(0.0, sy.eigenvalues(i));
    tr_y += l;
    tr_y2 += l * l;
    tr_sqrt_y += std::sqrt(l);
  }
  if (tr_x <= 0 || tr_sqrt_y <= 0)
    throw DomainError("operator_bound_check: zero operator");

  // rescale y by the unique positive factor making tr X = tr sqrt(Y')
  const double c = (tr_x / tr_sqrt_y) * (tr_x / tr_sqrt_y);
  const double tr_yp = c * tr_y;
  const double tr_yp2 = c * c * tr_y2;
  const int rank_x = linalg::numerical_rank(sx, tol.rank_cutoff);

  OperatorBoundResult r;
  r.lhs = tr_x2;
  r.rhs = tr_yp * tr_yp * tr_yp / (rank_x * tr_yp2);
  r.slack = r.lhs - r.rhs;
  r.holds = r.slack >= -1e-9 * std::max(1.0, std::abs(r.rhs));
  return r;
}

}  // namespace portbased
}  // namespace nlqc
