#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlqc/linalg.hpp"
#include "nlqc/qcore.hpp"
#include "nlqc/rng.hpp"

using namespace nlqc;
using linalg::herm_eig;
using linalg::is_psd;
using linalg::kron;
using linalg::mat_func;
using linalg::op_norm;
using linalg::partial_trace;
using linalg::trace_norm;

namespace {

Mat random_matrix(int r, int c, RngStream& rng) {
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
  return m;
}

Mat random_hermitian(int n, RngStream& rng) {
  Mat a = random_matrix(n, n, rng);
  return (a + a.adjoint()) / 2.0;
}

Mat random_psd(int n, RngStream& rng) {
  Mat a = random_matrix(n, n, rng);
  return a.adjoint() * a;
}

Mat random_unitary(int n, RngStream& rng) {
  Eigen::HouseholderQR<Mat> qr(random_matrix(n, n, rng));
  Mat q = qr.householderQ();
  return q;
}

// independent element-index oracle for the Kronecker product
Mat kron_oracle(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// brute-force index-sum oracle for the partial trace over subsystem 1 of 2
Mat trace_out_second(const Mat& m, int d0, int d1) {
  Mat out = Mat::Zero(d0, d0);
  for (int i = 0; i < d0; ++i)
    for (int j = 0; j < d0; ++j)
      for (int t = 0; t < d1; ++t) out(i, j) += m(i * d1 + t, j * d1 + t);
  return out;
}

}  // namespace

TEST_CASE("kron identities and oracle") {
  ComplexMatrix i2(Mat::Identity(2, 2)), i3(Mat::Identity(3, 3));
  CHECK((kron(i2, i3).mat - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);

  // sigma_1 (x) sigma_3 |00> = |10>
  ComplexMatrix op = kron(qcore::pauli(1), qcore::pauli(3));
  Vec v00 = Vec::Zero(4);
  v00(0) = 1;
  Vec out = op.mat * v00;
  CHECK(std::abs(out(2) - Complex(1, 0)) < 1e-15);
  CHECK(out.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-14));

  RngStream rng(42);
  Mat a = random_matrix(3, 3, rng), b = random_matrix(4, 4, rng);
  CHECK((kron(ComplexMatrix(a), ComplexMatrix(b)).mat - kron_oracle(a, b)).cwiseAbs().maxCoeff() <
        1e-15);

  // dims metadata concatenates
  ComplexMatrix lhs(Mat::Identity(4, 4), {2, 2});
  ComplexMatrix rhs(Mat::Identity(3, 3), {3});
  auto prod = kron(lhs, rhs);
  CHECK(prod.dims == std::vector<int>{2, 2, 3});
}

TEST_CASE("kron associativity property") {
  RngStream rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    Mat a = random_matrix(2, 2, rng), b = random_matrix(3, 3, rng), c = random_matrix(2, 2, rng);
    Mat lhs = kron_oracle(kron_oracle(a, b), c);
    Mat rhs = kron_oracle(a, kron_oracle(b, c));
    ComplexMatrix viaimpl =
        kron(kron(ComplexMatrix(a), ComplexMatrix(b)), ComplexMatrix(c));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((viaimpl.mat - lhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("kron size limit") {
  ToleranceConfig tol;
  tol.max_dim = 64;
  ComplexMatrix a(Mat::Identity(16, 16)), b(Mat::Identity(8, 8));
  CHECK_THROWS_AS(kron(a, b, tol), SizeLimitError);
}

TEST_CASE("partial trace examples and oracle") {
  const int d = 5;
  Vec phi = qcore::max_entangled_vec(d);
  Mat proj = phi * phi.adjoint();
  Mat marg = partial_trace(proj, {d, d}, {0});
  CHECK((marg - Mat::Identity(d, d) / d).cwiseAbs().maxCoeff() < 1e-14);

  // keeping everything changes nothing
  RngStream rng(3);
  Mat m = random_matrix(6, 6, rng);
  CHECK((partial_trace(m, {2, 3}, {0, 1}) - m).cwiseAbs().maxCoeff() == 0.0);

  // tr_2(rho (x) tau) = rho * tr(tau)
  Mat rho = random_psd(3, rng);
  rho /= rho.trace();
  Mat tau = random_psd(4, rng);
  tau /= tau.trace();
  Mat joint = kron_oracle(rho, tau);
  Mat kept = partial_trace(joint, {3, 4}, {0});
  CHECK((kept - rho * tau.trace()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((kept - trace_out_second(joint, 3, 4)).cwiseAbs().maxCoeff() < 1e-14);

  // trace preserved
  CHECK(std::abs(kept.trace() - joint.trace()) < 1e-12);

  CHECK_THROWS_AS(partial_trace(m, {3, 3}, {0}), ShapeError);
}

TEST_CASE("partial_trace of kron equals scaled factor") {
  RngStream rng(11);
  Mat a = random_hermitian(3, rng), b = random_hermitian(2, rng);
  Mat pt = partial_trace(kron_oracle(a, b), {3, 2}, {0});
  CHECK((pt - a * b.trace()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("herm_eig diag and pauli") {
  Mat m = Mat::Zero(3, 3);
  m(0, 0) = 3;
  m(1, 1) = 1;
  m(2, 2) = 2;
  Spectrum s = herm_eig(ComplexMatrix(m));
  CHECK(s.eigenvalues(0) == doctest::Approx(3));
  CHECK(s.eigenvalues(1) == doctest::Approx(2));
  CHECK(s.eigenvalues(2) == doctest::Approx(1));

  Spectrum sx = herm_eig(qcore::pauli(1));
  CHECK(sx.eigenvalues(0) == doctest::Approx(1));
  CHECK(sx.eigenvalues(1) == doctest::Approx(-1));
  // eigenvectors are (|0> +- |1>)/sqrt(2) up to phase
  for (int c = 0; c < 2; ++c) {
    CHECK(std::abs(std::abs(sx.eigenvectors(0, c)) - 1 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(std::abs(sx.eigenvectors(1, c)) - 1 / std::sqrt(2.0)) < 1e-12);
  }
}

TEST_CASE("herm_eig reconstruction and unitarity") {
  RngStream rng(5);
  Mat m = random_hermitian(6, rng);
  Spectrum s = herm_eig(ComplexMatrix(m));
  Mat rec = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.adjoint();
  const double scale = m.cwiseAbs().maxCoeff();
  CHECK((rec - m).cwiseAbs().maxCoeff() <= 1e-10 * scale);
  CHECK((s.eigenvectors.adjoint() * s.eigenvectors - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("herm_eig rejects non-Hermitian input") {
  RngStream rng(9);
  Mat m = random_matrix(4, 4, rng);
  CHECK_THROWS_AS(herm_eig(ComplexMatrix(m)), DomainError);
}

TEST_CASE("herm_eig large path matches small path") {
  RngStream rng(123);
  Mat m = random_hermitian(80, rng);  // routed through LAPACK
  Spectrum s = herm_eig(ComplexMatrix(m));
  Mat rec = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.adjoint();
  CHECK((rec - m).cwiseAbs().maxCoeff() <= 1e-10 * m.cwiseAbs().maxCoeff());
  for (int i = 1; i < 80; ++i) CHECK(s.eigenvalues(i - 1) >= s.eigenvalues(i));
}

TEST_CASE("mat_func sqrt family") {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 4;
  m(1, 1) = 9;
  Mat r = mat_func(ComplexMatrix(m), SpectralFn::Sqrt).mat;
  CHECK(std::abs(r(0, 0) - 2.0) < 1e-12);
  CHECK(std::abs(r(1, 1) - 3.0) < 1e-12);

  Mat p = Mat::Zero(2, 2);
  p(0, 0) = 1;  // |0><0|
  Mat pis = mat_func(ComplexMatrix(p), SpectralFn::PseudoInvSqrt).mat;
  CHECK((pis - p).cwiseAbs().maxCoeff() < 1e-12);

  RngStream rng(21);
  Mat x = random_psd(5, rng);
  Mat sq = mat_func(ComplexMatrix(x), SpectralFn::Sqrt).mat;
  CHECK((sq * sq - x).cwiseAbs().maxCoeff() < 1e-9 * x.cwiseAbs().maxCoeff());

  Mat neg = Mat::Identity(2, 2);
  neg(1, 1) = -1;
  CHECK_THROWS_AS(mat_func(ComplexMatrix(neg), SpectralFn::Sqrt), DomainError);
  CHECK_THROWS_AS(mat_func(ComplexMatrix(p), SpectralFn::InvSqrt), DomainError);
}

TEST_CASE("trace_norm examples") {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 1;
  m(1, 1) = -2;
  CHECK(trace_norm(ComplexMatrix(m)) == doctest::Approx(3.0));

  RngStream rng(2);
  Mat rho = random_psd(3, rng);
  rho /= rho.trace();
  CHECK(trace_norm(ComplexMatrix(Mat(rho - rho))) == doctest::Approx(0.0));

  // |0><0| - |+><+| has eigenvalues +-1/sqrt(2): trace norm sqrt(2)
  Mat zero = Mat::Zero(2, 2);
  zero(0, 0) = 1;
  Mat plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  CHECK(trace_norm(ComplexMatrix(Mat(zero - plus))) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("trace_norm unitary invariance") {
  RngStream rng(33);
  for (int rep = 0; rep < 5; ++rep) {
    Mat m = random_matrix(4, 4, rng);
    Mat u = random_unitary(4, rng), v = random_unitary(4, rng);
    CHECK(trace_norm(ComplexMatrix(Mat(u * m * v))) ==
          doctest::Approx(trace_norm(ComplexMatrix(m))).epsilon(1e-9));
  }
}

TEST_CASE("op_norm examples and power-iteration oracle") {
  CHECK(op_norm(ComplexMatrix(Mat::Identity(7, 7))) == doctest::Approx(1.0));
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 2;
  m(1, 1) = -5;
  CHECK(op_norm(ComplexMatrix(m)) == doctest::Approx(5.0));

  RngStream rng(17);
  Mat a = random_matrix(5, 5, rng);
  // power iteration on a^dagger a gives the squared top singular value
  Mat g = a.adjoint() * a;
  Vec v = Vec::Ones(5).normalized();
  for (int i = 0; i < 2000; ++i) v = (g * v).normalized();
  const double sigma = std::sqrt((v.adjoint() * g * v)(0).real());
  CHECK(op_norm(ComplexMatrix(a)) == doctest::Approx(sigma).epsilon(1e-8));
}

TEST_CASE("op_norm bounded by trace_norm") {
  RngStream rng(77);
  for (int rep = 0; rep < 10; ++rep) {
    Mat m = random_matrix(4, 4, rng);
    CHECK(op_norm(ComplexMatrix(m)) <= trace_norm(ComplexMatrix(m)) + 1e-12);
  }
}

TEST_CASE("is_psd") {
  CHECK(is_psd(ComplexMatrix(Mat::Identity(3, 3)), 1e-9));
  CHECK_FALSE(is_psd(qcore::pauli(3), 1e-9));
  RngStream rng(8);
  Mat g = random_psd(6, rng);
  CHECK(is_psd(ComplexMatrix(g), 1e-9));
}

TEST_CASE("psd shift certificate and rank helpers") {
  RngStream rng(4);
  Mat g = random_psd(5, rng);
  CHECK(linalg::psd_within_shift(g, 1e-12));
  Spectrum s = herm_eig(ComplexMatrix(g));
  CHECK(linalg::numerical_rank(s, 1e-10) == 5);

  Vec phi = qcore::max_entangled_vec(2);
  Mat proj = phi * phi.adjoint();
  CHECK(linalg::numerical_rank_psd(proj) == 1);
}

TEST_CASE("permute_subsystems is an index relabeling") {
  RngStream rng(6);
  Mat a = random_matrix(2, 2, rng), b = random_matrix(3, 3, rng);
  Mat ab = kron_oracle(a, b);
  Mat ba = kron_oracle(b, a);
  CHECK((linalg::permute_subsystems(ab, {2, 3}, {1, 0}) - ba).cwiseAbs().maxCoeff() < 1e-14);
}
