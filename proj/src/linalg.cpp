#include "nlqc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace nlqc {

ComplexMatrix::ComplexMatrix(Mat m, std::vector<int> d) : mat(std::move(m)), dims(std::move(d)) {
  if (!dims.empty()) {
    long long prod = 1;
    for (int x : dims) prod *= x;
    if (prod != mat.rows())
      throw ShapeError("ComplexMatrix: product of dims does not match rows");
  }
}

namespace linalg {

namespace {

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

// LAPACK zheevd, ascending eigenvalues; input destroyed.
void lapack_heevd(Mat& a, Eigen::VectorXd& w) {
  const int n = static_cast<int>(a.rows());
  w.resize(n);
  int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data());
  if (info != 0) throw NumericalError("zheevd failed, info=" + std::to_string(info));
}

}  // namespace

double max_abs(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Mat& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = max_abs(m);
  if (scale == 0.0) return true;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
  return worst <= rel_tol * scale;
}

Mat kron(const Mat& a, const Mat& b, int max_dim) {
  const long long rows = static_cast<long long>(a.rows()) * b.rows();
  const long long cols = static_cast<long long>(a.cols()) * b.cols();
  if (rows > max_dim || cols > max_dim)
    throw SizeLimitError("kron: result dimension " + std::to_string(std::max(rows, cols)) +
                         " exceeds limit " + std::to_string(max_dim));
  Mat out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, const ToleranceConfig& tol) {
  ComplexMatrix out(kron(a.mat, b.mat, tol.max_dim));
  if (a.rows() == a.cols() && b.rows() == b.cols()) {
    std::vector<int> da = a.dims.empty() ? std::vector<int>{static_cast<int>(a.rows())} : a.dims;
    std::vector<int> db = b.dims.empty() ? std::vector<int>{static_cast<int>(b.rows())} : b.dims;
    da.insert(da.end(), db.begin(), db.end());
    out.dims = std::move(da);
  }
  return out;
}

Mat partial_trace(const Mat& m, const std::vector<int>& dims, const std::vector<int>& keep) {
  if (m.rows() != m.cols()) throw ShapeError("partial_trace: matrix not square");
  if (dim_product(dims) != m.rows())
    throw ShapeError("partial_trace: dims do not match matrix size");
  std::vector<int> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  for (std::size_t i = 0; i < keep_sorted.size(); ++i) {
    if (keep_sorted[i] < 0 || keep_sorted[i] >= static_cast<int>(dims.size()))
      throw ShapeError("partial_trace: keep index out of range");
    if (i > 0 && keep_sorted[i] == keep_sorted[i - 1])
      throw ShapeError("partial_trace: duplicate keep index");
  }

  std::vector<int> traced;
  for (int k = 0; k < static_cast<int>(dims.size()); ++k)
    if (!std::binary_search(keep_sorted.begin(), keep_sorted.end(), k)) traced.push_back(k);

  const auto strides = strides_of(dims);
  long long keep_dim = 1, traced_dim = 1;
  for (int k : keep_sorted) keep_dim *= dims[k];
  for (int k : traced) traced_dim *= dims[k];

  // flat offsets of every keep-multi-index and traced-multi-index
  auto offsets = [&](const std::vector<int>& subs, long long count) {
    std::vector<long long> off(count, 0);
    std::vector<int> idx(subs.size(), 0);
    for (long long c = 0; c < count; ++c) {
      long long o = 0;
      for (std::size_t k = 0; k < subs.size(); ++k) o += idx[k] * strides[subs[k]];
      off[c] = o;
      for (int k = static_cast<int>(subs.size()) - 1; k >= 0; --k) {
        if (++idx[k] < dims[subs[k]]) break;
        idx[k] = 0;
      }
    }
    return off;
  };
  const auto keep_off = offsets(keep_sorted, keep_dim);
  const auto traced_off = offsets(traced, traced_dim);

  Mat out = Mat::Zero(keep_dim, keep_dim);
  for (long long r = 0; r < keep_dim; ++r)
    for (long long c = 0; c < keep_dim; ++c) {
      Complex acc(0, 0);
      for (long long t = 0; t < traced_dim; ++t)
        acc += m(keep_off[r] + traced_off[t], keep_off[c] + traced_off[t]);
      out(r, c) = acc;
    }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& dims,
                            const std::vector<int>& keep) {
  ComplexMatrix out(partial_trace(m.mat, dims, keep));
  std::vector<int> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  out.dims.reserve(keep_sorted.size());
  for (int k : keep_sorted) out.dims.push_back(dims[k]);
  return out;
}

Spectrum herm_eig(const Mat& m, const ToleranceConfig& tol) {
  if (m.rows() != m.cols()) throw ShapeError("herm_eig: matrix not square");
  if (!is_hermitian(m, tol.hermitian))
    throw DomainError("herm_eig: input not Hermitian within tolerance");

  const Eigen::Index n = m.rows();
  Spectrum s;
  if (n <= 64) {
    Eigen::SelfAdjointEigenSolver<Mat> es((m + m.adjoint()) / 2.0);
    if (es.info() != Eigen::Success) throw NumericalError("herm_eig: solver failed");
    s.eigenvalues = es.eigenvalues().reverse();
    s.eigenvectors = es.eigenvectors().rowwise().reverse();
  } else {
    Mat a = (m + m.adjoint()) / 2.0;
    Eigen::VectorXd w;
    lapack_heevd(a, w);
    s.eigenvalues = w.reverse();
    s.eigenvectors = a.rowwise().reverse();
  }
  return s;
}

Spectrum herm_eig(const ComplexMatrix& m, const ToleranceConfig& tol) {
  return herm_eig(m.mat, tol);
}

Mat mat_func(const Mat& m, SpectralFn f, const ToleranceConfig& tol) {
  Spectrum s = herm_eig(m, tol);
  const Eigen::Index n = m.rows();
  const double lmax = s.eigenvalues.size() ? std::max(0.0, s.eigenvalues(0)) : 0.0;
  const double scale = s.eigenvalues.size()
                           ? std::max(std::abs(s.eigenvalues(0)),
                                      std::abs(s.eigenvalues(n - 1)))
                           : 0.0;
  if (s.eigenvalues.size() && s.eigenvalues(n - 1) < -tol.psd * scale)
    throw DomainError("mat_func: input has a negative eigenvalue beyond tolerance");

  const double cutoff = tol.rank_cutoff * lmax;
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lam = std::max(0.0, s.eigenvalues(i));
    switch (f) {
      case SpectralFn::Sqrt:
        g(i) = std::sqrt(lam);
        break;
      case SpectralFn::InvSqrt:
        if (lam <= cutoff)
          throw DomainError("mat_func: inv_sqrt of a singular matrix");
        g(i) = 1.0 / std::sqrt(lam);
        break;
      case SpectralFn::PseudoInvSqrt:
        g(i) = (lam <= cutoff) ? 0.0 : 1.0 / std::sqrt(lam);
        break;
    }
  }
  Mat out = s.eigenvectors * g.asDiagonal() * s.eigenvectors.adjoint();
  return (out + out.adjoint()) / 2.0;
}

ComplexMatrix mat_func(const ComplexMatrix& m, SpectralFn f, const ToleranceConfig& tol) {
  ComplexMatrix out(mat_func(m.mat, f, tol));
  out.dims = m.dims;
  return out;
}

double trace_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == m.cols() && is_hermitian(m, 1e-12)) {
    Spectrum s = herm_eig(m);
    return s.eigenvalues.cwiseAbs().sum();
  }
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues().sum();
}

double trace_norm(const ComplexMatrix& m) { return trace_norm(m.mat); }

double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == m.cols() && is_hermitian(m, 1e-12)) {
    Spectrum s = herm_eig(m);
    return s.eigenvalues.cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

double op_norm(const ComplexMatrix& m) { return op_norm(m.mat); }

bool is_psd(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (!is_hermitian(m, tol)) return false;
  if (max_abs(m) == 0.0) return true;
  Eigen::SelfAdjointEigenSolver<Mat> es((m + m.adjoint()) / 2.0,
                                        Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  return lo >= -tol * scale;
}

bool is_psd(const ComplexMatrix& m, double tol) { return is_psd(m.mat, tol); }

Mat permute_subsystems(const Mat& m, const std::vector<int>& dims, const std::vector<int>& perm) {
  if (m.rows() != m.cols() || dim_product(dims) != m.rows())
    throw ShapeError("permute_subsystems: dims mismatch");
  if (perm.size() != dims.size()) throw ShapeError("permute_subsystems: bad permutation");

  std::vector<int> new_dims(dims.size());
  for (std::size_t j = 0; j < perm.size(); ++j) new_dims[j] = dims[perm[j]];
  const auto old_strides = strides_of(dims);
  const auto new_strides = strides_of(new_dims);

  const long long n = m.rows();
  std::vector<long long> map(n);
  std::vector<int> idx(dims.size(), 0);
  for (long long flat = 0; flat < n; ++flat) {
    long long target = 0;
    for (std::size_t j = 0; j < perm.size(); ++j) target += idx[perm[j]] * new_strides[j];
    map[flat] = target;
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
      if (++idx[k] < dims[k]) break;
      idx[k] = 0;
    }
  }
  Mat out(n, n);
  for (long long c = 0; c < n; ++c)
    for (long long r = 0; r < n; ++r) out(map[r], map[c]) = m(r, c);
  return out;
}

Vec permute_subsystems(const Vec& v, const std::vector<int>& dims, const std::vector<int>& perm) {
  if (dim_product(dims) != v.size()) throw ShapeError("permute_subsystems: dims mismatch");
  if (perm.size() != dims.size()) throw ShapeError("permute_subsystems: bad permutation");
  std::vector<int> new_dims(dims.size());
  for (std::size_t j = 0; j < perm.size(); ++j) new_dims[j] = dims[perm[j]];
  const auto new_strides = strides_of(new_dims);
  Vec out(v.size());
  std::vector<int> idx(dims.size(), 0);
  for (long long flat = 0; flat < v.size(); ++flat) {
    long long target = 0;
    for (std::size_t j = 0; j < perm.size(); ++j) target += idx[perm[j]] * new_strides[j];
    out(target) = v(flat);
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
      if (++idx[k] < dims[k]) break;
      idx[k] = 0;
    }
  }
  return out;
}

int numerical_rank(const Spectrum& s, double rel_cutoff) {
  if (s.eigenvalues.size() == 0) return 0;
  const double lmax = std::max(0.0, s.eigenvalues(0));
  if (lmax == 0.0) return 0;
  const double cutoff = rel_cutoff * lmax;
  int r = 0;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
    if (s.eigenvalues(i) > cutoff) ++r;
  return r;
}

int numerical_rank_psd(const Mat& m, const ToleranceConfig& tol) {
  const int n = static_cast<int>(m.rows());
  if (n <= 256) return numerical_rank(herm_eig(m, tol), tol.rank_cutoff);
  Mat a = (m + m.adjoint()) / 2.0;
  std::vector<lapack_int> piv(n);
  lapack_int rank = 0;
  const double scale = a.real().diagonal().maxCoeff();
  int info = LAPACKE_zpstrf(LAPACK_COL_MAJOR, 'L', n, a.data(), n, piv.data(), &rank,
                            tol.rank_cutoff * scale);
  if (info < 0) throw NumericalError("zpstrf failed");
  return static_cast<int>(rank);
}

bool psd_within_shift(const Mat& m, double shift) {
  const int n = static_cast<int>(m.rows());
  Mat a = (m + m.adjoint()) / 2.0;
  a.diagonal().array() += shift;
  int info = LAPACKE_zpotrf(LAPACK_COL_MAJOR, 'L', n, a.data(), n);
  return info == 0;
}

double power_iteration_norm(const Mat& m, int iters) {
  if (m.rows() == 0) return 0.0;
  Vec v = Vec::Ones(m.rows()).normalized();
  double lam = 0.0;
  for (int i = 0; i < iters; ++i) {
    Vec w = m * v;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    lam = nw;
    v = w / nw;
  }
  return lam;
}

}  // namespace linalg
}  // namespace nlqc
