#include "nlqc/mub.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace nlqc {

std::uint32_t GF2nField::modulus_for(int n) {
  // primitive polynomials over GF(2), bit i = coefficient of x^i
  switch (n) {
    case 1: return 0b11;         // x + 1
    case 2: return 0b111;        // x^2 + x + 1
    case 3: return 0b1011;       // x^3 + x + 1
    case 4: return 0b10011;      // x^4 + x + 1
    case 5: return 0b100101;     // x^5 + x^2 + 1
    case 6: return 0b1000011;    // x^6 + x + 1
    case 7: return 0b10000011;   // x^7 + x + 1
    case 8: return 0b100011101;  // x^8 + x^4 + x^3 + x^2 + 1
    default: throw DomainError("GF2nField: degree must be in 1..8");
  }
}

GF2nField::GF2nField(int n) : n_(n), modulus_(modulus_for(n)) {
  const int size = 1 << n_;
  exp_.assign(size - 1, 0);
  log_.assign(size, 0);
  std::uint32_t v = 1;
  for (int k = 0; k < size - 1; ++k) {
    exp_[k] = static_cast<std::uint16_t>(v);
    log_[v] = static_cast<std::uint16_t>(k);
    v <<= 1;
    if (v & size) v ^= modulus_;
  }
}

std::uint32_t GF2nField::mul_poly(std::uint32_t a, std::uint32_t b) const {
  std::uint32_t acc = 0;
  while (b) {
    if (b & 1) acc ^= a;
    b >>= 1;
    a <<= 1;
    if (a & (1u << n_)) a ^= modulus_;
  }
  return acc;
}

std::uint32_t GF2nField::mul(std::uint32_t a, std::uint32_t b) const {
  if (a == 0 || b == 0) return 0;
  const int size = 1 << n_;
  return exp_[(log_[a] + log_[b]) % (size - 1)];
}

int GF2nField::log(std::uint32_t a) const {
  if (a == 0) throw DomainError("GF2nField::log(0)");
  return log_[a];
}

std::uint32_t GF2nField::exp(int k) const {
  const int order = (1 << n_) - 1;
  return exp_[((k % order) + order) % order];
}

namespace mub {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_prime(int p) {
  if (p < 2) return false;
  for (int q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

void fix_column_phases(Mat& u) {
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      const Complex z = u(r, c);
      if (std::abs(z) > 1e-12) {
        u.col(c) *= std::conj(z) / std::abs(z);
        break;
      }
    }
  }
}

void check_family(const MubFamily& fam, const ToleranceConfig& tol) {
  if (max_unitarity_deviation(fam) > 1e-10)
    throw ValidationError("mub: basis not unitary");
  if (max_overlap_deviation(fam) > 1e-10)
    throw ValidationError("mub: family not mutually unbiased");
  (void)tol;
}

// Galois ring GR(4,n) = Z4[x]/(h) with h the Hensel lift of the GF(2^n)
// modulus; elements are coefficient vectors mod 4 of length n.
class GaloisRing {
 public:
  explicit GaloisRing(int n) : n_(n), field_(n) {
    hensel_lift();
    build_teichmueller();
  }

  using Poly = std::vector<int>;  // length n_, coefficients mod 4

  const Poly& teich(std::uint32_t field_elem) const { return teich_[field_elem]; }

  Poly mul(const Poly& a, const Poly& b) const {
    std::vector<int> full(2 * n_ - 1, 0);
    for (int i = 0; i < n_; ++i) {
      if (a[i] == 0) continue;
      for (int j = 0; j < n_; ++j) full[i + j] = (full[i + j] + a[i] * b[j]) % 4;
    }
    // reduce by h: x^n = -(h_{n-1} x^{n-1} + ... + h_0)
    for (int k = 2 * n_ - 2; k >= n_; --k) {
      const int c = full[k];
      if (c == 0) continue;
      full[k] = 0;
      for (int j = 0; j < n_; ++j)
        full[k - n_ + j] = (full[k - n_ + j] + c * (4 - h_[j])) % 4;
    }
    full.resize(n_);
    return full;
  }

  Poly add(const Poly& a, const Poly& b) const {
    Poly r(n_);
    for (int i = 0; i < n_; ++i) r[i] = (a[i] + b[i]) % 4;
    return r;
  }

  Poly scale2(const Poly& a) const {
    Poly r(n_);
    for (int i = 0; i < n_; ++i) r[i] = (2 * a[i]) % 4;
    return r;
  }

  // Frobenius phi(u + 2v) = u^2 + 2 v^2 with u, v Teichmueller.
  Poly frobenius(const Poly& z) const {
    std::uint32_t ubits = 0;
    for (int i = 0; i < n_; ++i)
      if (z[i] % 2) ubits |= 1u << i;
    const Poly& u = teich_[ubits];
    std::uint32_t wbits = 0;
    for (int i = 0; i < n_; ++i) {
      const int diff = ((z[i] - u[i]) % 4 + 4) % 4;
      if (diff % 2 != 0) throw NumericalError("GaloisRing: bad 2-adic decomposition");
      if ((diff / 2) % 2) wbits |= 1u << i;
    }
    const Poly& v = teich_[wbits];
    return add(mul(u, u), scale2(mul(v, v)));
  }

  // tr(z) = sum of Frobenius orbit; lands in Z4.
  int trace_z4(const Poly& z) const {
    Poly acc(n_, 0);
    Poly cur = z;
    for (int k = 0; k < n_; ++k) {
      acc = add(acc, cur);
      if (k + 1 < n_) cur = frobenius(cur);
    }
    for (int i = 1; i < n_; ++i)
      if (acc[i] != 0) throw NumericalError("GaloisRing: trace not in Z4");
    return acc[0];
  }

 private:
  void hensel_lift() {
    // h(x^2) = (-1)^n f(x) f(-x) mod 4 (Graeffe step)
    std::vector<int> f(n_ + 1, 0), fneg(n_ + 1, 0);
    const std::uint32_t fbits = field_.modulus();
    for (int i = 0; i <= n_; ++i) {
      f[i] = (fbits >> i) & 1;
      fneg[i] = (i % 2 == 0) ? f[i] : (f[i] ? 3 : 0);
    }
    std::vector<int> prod(2 * n_ + 1, 0);
    for (int i = 0; i <= n_; ++i)
      for (int j = 0; j <= n_; ++j) prod[i + j] = (prod[i + j] + f[i] * fneg[j]) % 4;
    std::vector<int> h(n_ + 1, 0);
    for (int k = 0; k <= n_; ++k) h[k] = prod[2 * k];
    if (n_ % 2 == 1)
      for (auto& c : h) c = (4 - c) % 4;
    if (h[n_] != 1) throw NumericalError("GaloisRing: lift is not monic");
    h_ = std::move(h);
  }

  void build_teichmueller() {
    const int size = 1 << n_;
    teich_.assign(size, Poly(n_, 0));
    Poly xi(n_, 0);
    if (n_ == 1) {
      // h(y) = y + 3, so xi = 1
      xi[0] = 1;
    } else {
      xi[1] = 1;
    }
    Poly cur(n_, 0);
    cur[0] = 1;  // xi^0
    for (int k = 0; k < size - 1; ++k) {
      teich_[field_.exp(k)] = cur;
      cur = mul(cur, xi);
    }
    // xi must have order 2^n - 1 (basic primitive modulus)
    Poly one(n_, 0);
    one[0] = 1;
    if (cur != one) throw NumericalError("GaloisRing: xi has wrong order");
    // consistency: the lift reduces to the field element mod 2
    for (std::uint32_t g = 1; g < static_cast<std::uint32_t>(size); ++g) {
      std::uint32_t bits = 0;
      for (int i = 0; i < n_; ++i)
        if (teich_[g][i] % 2) bits |= 1u << i;
      if (bits != g) throw NumericalError("GaloisRing: Teichmueller lift mismatch");
    }
  }

  int n_;
  GF2nField field_;
  std::vector<int> h_;  // monic modulus mod 4, degree n_
  std::vector<Poly> teich_;
};

}  // namespace

MubFamily mub_prime(int p, const ToleranceConfig& tol) {
  if (p > 97) throw SizeLimitError("mub_prime: p must be <= 97");
  if (!is_prime(p)) throw DomainError("mub_prime: p is not prime");

  MubFamily fam;
  fam.d = p;
  fam.bases.push_back(ComplexMatrix(Mat::Identity(p, p), {p}));

  if (p == 2) {
    Mat x(2, 2), y(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    x << s, s, s, -s;
    y << s, s, Complex(0, s), Complex(0, -s);
    fix_column_phases(x);
    fix_column_phases(y);
    fam.bases.push_back(ComplexMatrix(x, {2}));
    fam.bases.push_back(ComplexMatrix(y, {2}));
  } else {
    const double norm = 1.0 / std::sqrt(static_cast<double>(p));
    for (int a = 0; a < p; ++a) {
      Mat u(p, p);
      for (int x = 0; x < p; ++x)
        for (int j = 0; j < p; ++j) {
          const long long phase = (static_cast<long long>(a) * j * j + static_cast<long long>(x) * j) % p;
          const double ang = 2.0 * kPi * phase / p;
          u(j, x) = norm * Complex(std::cos(ang), std::sin(ang));
        }
      fix_column_phases(u);
      fam.bases.push_back(ComplexMatrix(u, {p}));
    }
  }
  check_family(fam, tol);
  return fam;
}

MubFamily mub_gf2n(int n, const ToleranceConfig& tol) {
  if (n < 1 || n > 6) throw DomainError("mub_gf2n: n must be in 1..6");
  const int d = 1 << n;
  GaloisRing ring(n);

  static const Complex i_pow[4] = {Complex(1, 0), Complex(0, 1), Complex(-1, 0), Complex(0, -1)};
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));

  MubFamily fam;
  fam.d = d;
  fam.bases.push_back(ComplexMatrix(Mat::Identity(d, d), {d}));
  for (int a = 0; a < d; ++a) {
    const auto& ta = ring.teich(static_cast<std::uint32_t>(a));
    Mat u(d, d);
    for (int x = 0; x < d; ++x) {
      // coefficient a + 2x in the Galois ring
      auto coeff = ring.add(ta, ring.scale2(ring.teich(static_cast<std::uint32_t>(x))));
      for (int j = 0; j < d; ++j) {
        const int tr = ring.trace_z4(ring.mul(coeff, ring.teich(static_cast<std::uint32_t>(j))));
        u(j, x) = norm * i_pow[tr];
      }
    }
    fix_column_phases(u);
    fam.bases.push_back(ComplexMatrix(u, {d}));
  }
  check_family(fam, tol);
  return fam;
}

MubFamily mub_for_dim(int d, const ToleranceConfig& tol) {
  if (is_prime(d)) return mub_prime(d, tol);
  if (d > 1 && (d & (d - 1)) == 0) {
    int n = 0;
    while ((1 << n) < d) ++n;
    return mub_gf2n(n, tol);
  }
  throw DomainError("mub_for_dim: dimension must be prime or a power of two");
}

double max_overlap_deviation(const MubFamily& fam) {
  const double target = 1.0 / fam.d;
  double worst = 0;
  for (std::size_t a = 0; a < fam.bases.size(); ++a)
    for (std::size_t b = a + 1; b < fam.bases.size(); ++b) {
      Mat g = fam.bases[a].mat.adjoint() * fam.bases[b].mat;
      for (Eigen::Index r = 0; r < g.rows(); ++r)
        for (Eigen::Index c = 0; c < g.cols(); ++c)
          worst = std::max(worst, std::abs(std::norm(g(r, c)) - target));
    }
  return worst;
}

double max_unitarity_deviation(const MubFamily& fam) {
  double worst = 0;
  for (const auto& u : fam.bases) {
    Mat dev = u.mat.adjoint() * u.mat - Mat::Identity(u.rows(), u.cols());
    worst = std::max(worst, dev.cwiseAbs().maxCoeff());
  }
  return worst;
}

std::pair<ComplexMatrix, Povm> povm_from_mub(const MubFamily& fam, int count) {
  if (count < 1 || count > static_cast<int>(fam.bases.size()))
    throw DomainError("povm_from_mub: count out of range");
  const int d = fam.d;
  const long long dim = static_cast<long long>(count) * d;

  Mat u_ab = Mat::Zero(dim, dim);
  for (int a = 0; a < count; ++a)
    u_ab.block(static_cast<long long>(a) * d, static_cast<long long>(a) * d, d, d) =
        fam.bases[a].mat.adjoint();

  Povm povm;
  for (int x = 0; x < d; ++x) {
    Mat e = Mat::Zero(dim, dim);
    for (int a = 0; a < count; ++a) {
      Vec col = fam.bases[a].mat.col(x);
      e.block(static_cast<long long>(a) * d, static_cast<long long>(a) * d, d, d) =
          col * col.adjoint();
    }
    povm.elements.push_back(ComplexMatrix(std::move(e), {count, d}));
    povm.labels.push_back(std::to_string(x));
  }
  povm.validate();
  return {ComplexMatrix(std::move(u_ab), {count, d}), std::move(povm)};
}

}  // namespace mub
}  // namespace nlqc
