#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nlqc/qcore.hpp"

namespace nlqc {

// d+1 unitaries whose columns form pairwise mutually unbiased bases of C^d.
// bases[0] is always the computational basis (identity).
struct MubFamily {
  int d = 0;
  std::vector<ComplexMatrix> bases;
};

// GF(2^n) with log/antilog tables over a fixed primitive modulus per degree.
class GF2nField {
 public:
  explicit GF2nField(int n);

  int degree() const { return n_; }
  int size() const { return 1 << n_; }
  std::uint32_t modulus() const { return modulus_; }

  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;       // table based
  std::uint32_t mul_poly(std::uint32_t a, std::uint32_t b) const;  // carry-less, reduced
  static std::uint32_t add(std::uint32_t a, std::uint32_t b) { return a ^ b; }
  int log(std::uint32_t a) const;          // discrete log base x
  std::uint32_t exp(int k) const;          // x^k

  static std::uint32_t modulus_for(int n);

 private:
  int n_ = 0;
  std::uint32_t modulus_ = 0;
  std::vector<std::uint16_t> exp_, log_;
};

namespace mub {

// Computational basis plus p bases with components w^(a j^2 + x j)/sqrt(p)
// for odd primes; for p=2 the X and Y eigenbases.
MubFamily mub_prime(int p, const ToleranceConfig& tol = default_tol());

// d = 2^n family via Galois-ring GR(4,n) exponential sums over the
// Teichmueller set.
MubFamily mub_gf2n(int n, const ToleranceConfig& tol = default_tol());

// Dispatch: primes go to mub_prime, powers of two to mub_gf2n.
MubFamily mub_for_dim(int d, const ToleranceConfig& tol = default_tol());

// max over basis pairs and vector pairs of ||<e^a_x|e^b_y>|^2 - 1/d|.
double max_overlap_deviation(const MubFamily& fam);
// max over bases of ||U^dag U - I||_max.
double max_unitarity_deviation(const MubFamily& fam);

// U_AB = sum_a |a><a| (x) U_a^dag and the POVM O_x = (I (x) |x><x|) U_AB,
// returned in the squared form O_x^dag O_x. Uses the first `count` bases.
std::pair<ComplexMatrix, Povm> povm_from_mub(const MubFamily& fam, int count);

}  // namespace mub
}  // namespace nlqc
