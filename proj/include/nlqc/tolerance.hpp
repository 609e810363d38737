#pragma once

namespace nlqc {

// Numeric tolerances shared across the toolkit. Relative tolerances are
// taken against the natural scale of the object (maxabs for Hermiticity,
// largest eigenvalue for PSD and rank cutoffs).
struct ToleranceConfig {
  double hermitian = 1e-12;    // max |M_ij - conj(M_ji)| <= hermitian * maxabs
  double psd = 1e-9;           // min eigenvalue >= -psd * lambda_max
  double trace_one = 1e-10;    // |tr - 1|
  double povm_sum = 1e-8;      // operator-norm deviation of sum from identity
  double eig_residual = 1e-10; // reconstruction residual of eigendecompositions
  double rank_cutoff = 1e-10;  // eigenvalues <= rank_cutoff * lambda_max count as 0
  double channel_tp = 1e-8;    // trace-preservation deviation of Choi matrices
  double choi_tp_build = 1e-6; // trace-preservation gate when building a Choi
  double prob_floor = 1e-12;   // outcome probabilities below this are impossible
  int max_dim = 8192;          // dense matrix dimension limit
};

inline const ToleranceConfig& default_tol() {
  static const ToleranceConfig t{};
  return t;
}

}  // namespace nlqc
