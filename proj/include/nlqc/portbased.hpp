#pragma once

#include <vector>

#include "nlqc/qcore.hpp"

namespace nlqc {

// The state family eta^i = |Phi><Phi|_{A'_i B} (x) (I/d)^(N-1) on
// C^{d^(N+1)}, subsystem order (A'_1, ..., A'_N, B) with B last. The
// pseudo-inverse square root of S = sum_i eta^i is cached since every PGM
// element is a congruence by it.
struct PortFamily {
  int d = 0;
  int N = 0;
  std::vector<DensityOperator> eta;
  ComplexMatrix sum_inv_sqrt;
};

// One row of the port-based teleportation study at a given (d, N).
struct PbtReport {
  int d = 0;
  int N = 0;
  double p_succ = 0;           // PGM discrimination success
  double fidelity = 0;         // entanglement fidelity of the induced channel
  double thm1_bound = 0;       // 1 - (d^2-1)/N
  double appendix_bound = 0;   // (d^2/N)(1 - (d^2-1)/N), lower bound on p_succ
  double choi_halfdist = 0;    // (1/2)||J(E) - J(I)||_1
  double choi_fid_bound = 0;   // sqrt(1 - F)
  double diamond_upper = 0;    // 2 d ||J(E) - J(I)||_1
  double corollary1_bound = 0; // 4 d^2 / sqrt(N)
};

namespace portbased {

PortFamily eta_family(int d, int N, const ToleranceConfig& tol = default_tol());

// Pretty good measurement E^i = S^{-1/2} eta^i S^{-1/2} with S = sum eta^j,
// pseudo-inverted on its support; the completion I - Pi_supp is merged into
// the first element.
Povm pgm_build(const std::vector<DensityOperator>& states,
               const ToleranceConfig& tol = default_tol());

// Same POVM computed from the family's cached S^{-1/2} and the analytic
// rank factorization of eta^i; avoids the per-element dense congruence.
Povm pgm_build_from_family(const PortFamily& fam,
                           const ToleranceConfig& tol = default_tol());

double pgm_success(const std::vector<DensityOperator>& states, const Povm& povm);

// Reorders POVM elements from the family's (A'_1..A'_N, B) convention to
// Alice's measurement ordering (A, A'_1..A'_N).
Povm to_alice_ordering(const Povm& povm, int d, int N);

// Choi matrix of the induced teleportation channel; povm must be in the
// Alice ordering (A, A'_1..A'_N).
QuantumChannel pbt_channel(const PortFamily& fam, const Povm& alice_povm,
                           const ToleranceConfig& tol = default_tol());

PbtReport pbt_report(int d, int N, const ToleranceConfig& tol = default_tol());

// 1/(N * rbar * tr(etabar^2)) for a uniform ensemble.
double pgm_generic_bound(const std::vector<DensityOperator>& states,
                         const ToleranceConfig& tol = default_tol());

struct OperatorBoundResult {
  bool holds = false;
  double slack = 0;  // lhs - rhs
  double lhs = 0;    // tr X^2
  double rhs = 0;    // (tr Y')^3 / (rank X * tr Y'^2) after rescaling Y
};

// Rescales y so tr X = tr sqrt(Y') and checks tr X^2 >= (tr Y')^3 / (rank X tr Y'^2).
OperatorBoundResult operator_bound_check(const ComplexMatrix& x, const ComplexMatrix& y,
                                         const ToleranceConfig& tol = default_tol());

}  // namespace portbased
}  // namespace nlqc
