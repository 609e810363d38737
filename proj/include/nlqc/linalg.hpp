#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "nlqc/errors.hpp"
#include "nlqc/tolerance.hpp"

namespace nlqc {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Dense complex matrix with optional subsystem-dimension metadata.
// When dims is non-empty its product must equal the row count (and the
// column count for square operators). Subsystem 0 is the most significant
// index, matching the Kronecker product convention below.
struct ComplexMatrix {
  Mat mat;
  std::vector<int> dims;

  ComplexMatrix() = default;
  explicit ComplexMatrix(Mat m) : mat(std::move(m)) {}
  ComplexMatrix(Mat m, std::vector<int> d);

  Eigen::Index rows() const { return mat.rows(); }
  Eigen::Index cols() const { return mat.cols(); }
};

struct Spectrum {
  Eigen::VectorXd eigenvalues;  // descending
  Mat eigenvectors;             // unitary, columns match eigenvalues
};

enum class SpectralFn { Sqrt, InvSqrt, PseudoInvSqrt };

namespace linalg {

// --- spec operations -------------------------------------------------------

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   const ToleranceConfig& tol = default_tol());

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& dims,
                            const std::vector<int>& keep);

Spectrum herm_eig(const ComplexMatrix& m, const ToleranceConfig& tol = default_tol());

ComplexMatrix mat_func(const ComplexMatrix& m, SpectralFn f,
                       const ToleranceConfig& tol = default_tol());

double trace_norm(const ComplexMatrix& m);
double op_norm(const ComplexMatrix& m);
bool is_psd(const ComplexMatrix& m, double tol);

// --- plumbing on raw matrices ----------------------------------------------

Mat kron(const Mat& a, const Mat& b, int max_dim);
Mat partial_trace(const Mat& m, const std::vector<int>& dims, const std::vector<int>& keep);
Spectrum herm_eig(const Mat& m, const ToleranceConfig& tol = default_tol());
Mat mat_func(const Mat& m, SpectralFn f, const ToleranceConfig& tol = default_tol());
double trace_norm(const Mat& m);
double op_norm(const Mat& m);
bool is_psd(const Mat& m, double tol);

double max_abs(const Mat& m);
bool is_hermitian(const Mat& m, double rel_tol);

// Reorders tensor factors: subsystem j of the result is subsystem perm[j]
// of the input.
Mat permute_subsystems(const Mat& m, const std::vector<int>& dims, const std::vector<int>& perm);
Vec permute_subsystems(const Vec& v, const std::vector<int>& dims, const std::vector<int>& perm);

// Count of eigenvalues above rel_cutoff * lambda_max.
int numerical_rank(const Spectrum& s, double rel_cutoff);
// Rank of a PSD matrix; uses pivoted Cholesky above the dense-eig size.
int numerical_rank_psd(const Mat& m, const ToleranceConfig& tol = default_tol());

// True when m + shift*I admits a Cholesky factorization, i.e. the minimum
// eigenvalue is > -shift. Cheap PSD certificate for large matrices.
bool psd_within_shift(const Mat& m, double shift);

// Largest |eigenvalue| of a Hermitian matrix by power iteration.
double power_iteration_norm(const Mat& m, int iters);

}  // namespace linalg
}  // namespace nlqc
