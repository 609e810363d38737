#include "nlqc/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nlqc {

Mat GuessingInstance::basis_projector(int a, int x) const {
  return Mat(static_cast<double>(bases_used) *
             ensemble[x].matrix.mat.block(static_cast<long long>(a) * d,
                                          static_cast<long long>(a) * d, d, d));
}

namespace lowerbound {

namespace {

// tr(a b) for same-size matrices
Complex trace_product(const Mat& a, const Mat& b) {
  return (a.transpose().cwiseProduct(b)).sum();
}

// tau^{a,alpha} = tr_{A'}[(E (x) I_{B'}) eta] on B'
Mat tau_of(const Mat& alice_element, const Mat& eta, int dimA, int dimB) {
  Mat tau = Mat::Zero(dimB, dimB);
  for (int b1 = 0; b1 < dimB; ++b1)
    for (int b2 = 0; b2 < dimB; ++b2) {
      Complex acc(0, 0);
      for (int a1 = 0; a1 < dimA; ++a1)
        for (int a2 = 0; a2 < dimA; ++a2)
          acc += alice_element(a1, a2) *
                 eta(static_cast<long long>(a2) * dimB + b1,
                     static_cast<long long>(a1) * dimB + b2);
      tau(b1, b2) = acc;
    }
  return tau;
}

// C^{beta,a,x} = tr_B[F (P (x) I_{B'})] on B'
Mat bob_contraction(const Mat& bob_element, const Mat& proj, int d, int dimB) {
  Mat c = Mat::Zero(dimB, dimB);
  for (int b1 = 0; b1 < dimB; ++b1)
    for (int b2 = 0; b2 < dimB; ++b2) {
      Complex acc(0, 0);
      for (int b = 0; b < d; ++b)
        for (int bp = 0; bp < d; ++bp)
          acc += bob_element(static_cast<long long>(b) * dimB + b1,
                             static_cast<long long>(bp) * dimB + b2) *
                 proj(bp, b);
      c(b1, b2) = acc;
    }
  return c;
}

struct Tables {
  // term[a][alpha][beta][x] = tr[(E^{a,alpha} (x) F^beta)(P^{a,x}_B (x) eta)]
  std::vector<std::vector<std::vector<std::vector<double>>>> term;
};

Tables build_tables(const GuessingInstance& inst, const AttackStrategy& s) {
  const int bu = inst.bases_used, d = inst.d;
  const int ka = s.alice_povms[0].size(), kb = s.bob_povm.size();
  Tables t;
  t.term.assign(bu, std::vector<std::vector<std::vector<double>>>(
                        ka, std::vector<std::vector<double>>(kb, std::vector<double>(d, 0.0))));
  for (int a = 0; a < bu; ++a) {
    std::vector<Mat> taus(ka);
    for (int al = 0; al < ka; ++al)
      taus[al] = tau_of(s.alice_povms[a].elements[al].mat, s.eta.matrix.mat, s.dimAprime,
                        s.dimBprime);
    for (int be = 0; be < kb; ++be)
      for (int x = 0; x < d; ++x) {
        Mat c = bob_contraction(s.bob_povm.elements[be].mat, inst.basis_projector(a, x), d,
                                s.dimBprime);
        for (int al = 0; al < ka; ++al)
          t.term[a][al][be][x] = trace_product(c, taus[al]).real();
      }
  }
  return t;
}

double evaluate_from_tables(const GuessingInstance& inst, const AttackStrategy& s,
                            const Tables& t) {
  const int bu = inst.bases_used, d = inst.d;
  const int ka = s.alice_povms[0].size(), kb = s.bob_povm.size();
  double p = 0;
  for (int a = 0; a < bu; ++a)
    for (int al = 0; al < ka; ++al)
      for (int be = 0; be < kb; ++be) p += t.term[a][al][be][s.postproc[al][be]];
  return p / (static_cast<double>(d) * bu);
}

double evaluate(const GuessingInstance& inst, const AttackStrategy& s) {
  return evaluate_from_tables(inst, s, build_tables(inst, s));
}

void check_strategy_shapes(const GuessingInstance& inst, const AttackStrategy& s) {
  if (static_cast<int>(s.alice_povms.size()) != inst.bases_used)
    throw ShapeError("attack: need one Alice POVM per basis label");
  const int ka = s.alice_povms[0].size();
  for (const auto& p : s.alice_povms) {
    if (p.size() != ka) throw ShapeError("attack: Alice POVMs must share an outcome count");
    if (p.dim() != s.dimAprime) throw ShapeError("attack: Alice POVM dimension mismatch");
  }
  if (s.bob_povm.dim() != inst.d * s.dimBprime)
    throw ShapeError("attack: Bob POVM dimension mismatch");
  if (s.eta.dim() != s.dimAprime * s.dimBprime)
    throw ShapeError("attack: shared state dimension mismatch");
  if (static_cast<int>(s.postproc.size()) != ka)
    throw ShapeError("attack: postprocessing table has wrong Alice arity");
  for (const auto& row : s.postproc) {
    if (static_cast<int>(row.size()) != s.bob_povm.size())
      throw ShapeError("attack: postprocessing table has wrong Bob arity");
    for (int x : row)
      if (x < 0 || x >= inst.d) throw ShapeError("attack: postprocessing value out of range");
  }
}

// optimal redistribution of E_a + E_b between two outcomes given their
// score operators (Helstrom split on the support of the pair sum)
void helstrom_pair_update(Mat& ea, Mat& eb, const Mat& sa, const Mat& sb,
                          const ToleranceConfig& tol) {
  Mat r = ea + eb;
  if (linalg::max_abs(r) < 1e-13) return;  // nothing to redistribute
  Mat rsqrt = linalg::mat_func(r, SpectralFn::Sqrt, tol);
  Mat m = rsqrt * (sa - sb) * rsqrt;
  Spectrum sp = linalg::herm_eig(Mat((m + m.adjoint()) / 2.0), tol);
  Mat proj = Mat::Zero(r.rows(), r.cols());
  for (Eigen::Index i = 0; i < sp.eigenvalues.size(); ++i)
    if (sp.eigenvalues(i) > 0)
      proj += sp.eigenvectors.col(i) * sp.eigenvectors.col(i).adjoint();
  Mat na = rsqrt * proj * rsqrt;
  na = (na + na.adjoint()) / 2.0;
  eb = (r - na + (r - na).adjoint()) / 2.0;
  ea = std::move(na);
}

}  // namespace

GuessingInstance build_ensemble(const MubFamily& fam, int bases_used) {
  if (bases_used < 1 || bases_used > static_cast<int>(fam.bases.size()))
    throw DomainError("build_ensemble: bases_used out of range");
  GuessingInstance inst;
  inst.d = fam.d;
  inst.bases_used = bases_used;
  const long long dim = static_cast<long long>(bases_used) * fam.d;
  for (int x = 0; x < fam.d; ++x) {
    Mat rho = Mat::Zero(dim, dim);
    for (int a = 0; a < bases_used; ++a) {
      Vec col = fam.bases[a].mat.col(x);
      rho.block(static_cast<long long>(a) * fam.d, static_cast<long long>(a) * fam.d, fam.d,
                fam.d) = col * col.adjoint() / static_cast<double>(bases_used);
    }
    DensityOperator op(ComplexMatrix(std::move(rho), {bases_used, fam.d}));
    op.validate();
    inst.ensemble.push_back(std::move(op));
  }
  return inst;
}

double theoretical_bound(int d, int dimBprime) {
  return 2.0 * dimBprime / std::sqrt(static_cast<double>(d));
}

bool bound_vacuous(double bound) { return bound >= 1.0; }

AttackResult attack_success(const GuessingInstance& inst, const AttackStrategy& strat) {
  check_strategy_shapes(inst, strat);
  for (const auto& p : strat.alice_povms) p.validate();
  strat.bob_povm.validate();
  strat.eta.validate();

  AttackResult res;
  res.p_succ = evaluate(inst, strat);
  res.bound = theoretical_bound(inst.d, strat.dimBprime);
  res.margin = res.bound - res.p_succ;
  if (!bound_vacuous(res.bound) && res.p_succ > res.bound + 1e-9)
    throw NumericalError("attack_success: strategy exceeds the 2 dimB/sqrt(d) ceiling");
  return res;
}

AttackStrategy random_strategy(const GuessingInstance& inst, int dimAprime, int dimBprime,
                               RngStream& rng) {
  auto random_povm = [&rng](int dim, int outcomes, const std::vector<int>& dims) {
    std::vector<Mat> raw(outcomes);
    Mat sum = Mat::Zero(dim, dim);
    for (auto& g : raw) {
      Mat a(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
      g = a.adjoint() * a;
      sum += g;
    }
    Mat sinv = linalg::mat_func(sum, SpectralFn::InvSqrt);
    Povm p;
    for (int i = 0; i < outcomes; ++i) {
      Mat e = sinv * raw[i] * sinv;
      p.elements.push_back(ComplexMatrix((e + e.adjoint()) / 2.0, dims));
      p.labels.push_back(std::to_string(i));
    }
    return p;
  };

  AttackStrategy s;
  s.dimAprime = dimAprime;
  s.dimBprime = dimBprime;
  Vec psi(dimAprime * dimBprime);
  for (int i = 0; i < psi.size(); ++i) psi(i) = Complex(rng.normal(), rng.normal());
  psi.normalize();
  s.eta = DensityOperator(ComplexMatrix(Mat(psi * psi.adjoint()), {dimAprime, dimBprime}));
  for (int a = 0; a < inst.bases_used; ++a)
    s.alice_povms.push_back(random_povm(dimAprime, inst.d, {dimAprime}));
  s.bob_povm = random_povm(inst.d * dimBprime, inst.d, {inst.d, dimBprime});
  s.postproc.assign(inst.d, std::vector<int>(inst.d));
  for (int al = 0; al < inst.d; ++al)
    for (int be = 0; be < inst.d; ++be) s.postproc[al][be] = be;
  return s;
}

SeesawOutcome seesaw_optimize(const GuessingInstance& inst, int dimAprime, int dimBprime,
                              int sweeps, RngStream& rng) {
  if (sweeps < 1) throw DomainError("seesaw_optimize: need at least one sweep");
  const ToleranceConfig& tol = default_tol();
  const int bu = inst.bases_used, d = inst.d;

  AttackStrategy s = random_strategy(inst, dimAprime, dimBprime, rng);
  SeesawOutcome out;
  double p_cur = evaluate(inst, s);

  const double scale = 1.0 / (static_cast<double>(d) * bu);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    // Alice blocks: scores via the B'-contractions of Bob's current POVM
    for (int a = 0; a < bu; ++a) {
      std::vector<Mat> scores(d, Mat::Zero(dimAprime, dimAprime));
      for (int be = 0; be < d; ++be)
        for (int al = 0; al < d; ++al) {
          const int x = s.postproc[al][be];
          Mat c = bob_contraction(s.bob_povm.elements[be].mat, inst.basis_projector(a, x), d,
                                  dimBprime);
          // S[a1,a2] = sum_{b1,b2} C[b1,b2] eta[(a1,b2),(a2,b1)]
          for (int a1 = 0; a1 < dimAprime; ++a1)
            for (int a2 = 0; a2 < dimAprime; ++a2) {
              Complex acc(0, 0);
              for (int b1 = 0; b1 < dimBprime; ++b1)
                for (int b2 = 0; b2 < dimBprime; ++b2)
                  acc += c(b1, b2) * s.eta.matrix.mat(
                                         static_cast<long long>(a1) * dimBprime + b2,
                                         static_cast<long long>(a2) * dimBprime + b1);
              scores[al](a1, a2) += scale * acc;
            }
        }
      for (int a1 = 0; a1 < d; ++a1)
        for (int a2 = a1 + 1; a2 < d; ++a2)
          helstrom_pair_update(s.alice_povms[a].elements[a1].mat,
                               s.alice_povms[a].elements[a2].mat, scores[a1], scores[a2], tol);
    }

    // Bob block: scores T^beta = sum_{a,alpha} P^{a,g(alpha,beta)} (x) tau^{a,alpha}
    {
      std::vector<std::vector<Mat>> taus(bu, std::vector<Mat>(d));
      for (int a = 0; a < bu; ++a)
        for (int al = 0; al < d; ++al)
          taus[a][al] =
              tau_of(s.alice_povms[a].elements[al].mat, s.eta.matrix.mat, dimAprime, dimBprime);
      const int dim_bob = d * dimBprime;
      std::vector<Mat> scores(d, Mat::Zero(dim_bob, dim_bob));
      for (int be = 0; be < d; ++be)
        for (int a = 0; a < bu; ++a)
          for (int al = 0; al < d; ++al) {
            Mat pk = inst.basis_projector(a, s.postproc[al][be]);
            scores[be] += scale * linalg::kron(pk, taus[a][al], default_tol().max_dim);
          }
      for (int b1 = 0; b1 < d; ++b1)
        for (int b2 = b1 + 1; b2 < d; ++b2)
          helstrom_pair_update(s.bob_povm.elements[b1].mat, s.bob_povm.elements[b2].mat,
                               scores[b1], scores[b2], tol);
    }

    // shared state: top eigenvector of its score operator
    {
      const int dim_eta = dimAprime * dimBprime;
      Mat z = Mat::Zero(dim_eta, dim_eta);
      for (int a = 0; a < bu; ++a)
        for (int al = 0; al < d; ++al)
          for (int be = 0; be < d; ++be) {
            Mat c = bob_contraction(s.bob_povm.elements[be].mat,
                                    inst.basis_projector(a, s.postproc[al][be]), d, dimBprime);
            z += scale * linalg::kron(s.alice_povms[a].elements[al].mat, c,
                                      default_tol().max_dim);
          }
      Spectrum sp = linalg::herm_eig(Mat((z + z.adjoint()) / 2.0), tol);
      Vec top = sp.eigenvectors.col(0);
      s.eta = DensityOperator(
          ComplexMatrix(Mat(top * top.adjoint()), {dimAprime, dimBprime}));
    }

    // postprocessing: exact argmax given everything else
    {
      Tables t = build_tables(inst, s);
      for (int al = 0; al < d; ++al)
        for (int be = 0; be < d; ++be) {
          int best = 0;
          double best_v = -1;
          for (int x = 0; x < d; ++x) {
            double v = 0;
            for (int a = 0; a < bu; ++a) v += t.term[a][al][be][x];
            if (v > best_v) {
              best_v = v;
              best = x;
            }
          }
          s.postproc[al][be] = best;
        }
    }

    const double p_new = evaluate(inst, s);
    if (p_new < p_cur - 1e-10)
      throw NumericalError("seesaw_optimize: sweep decreased the objective");
    p_cur = p_new;
    out.history.push_back(p_cur);
  }

  out.strategy = std::move(s);
  out.best_p = p_cur;
  out.sweeps = sweeps;
  return out;
}

DiamondGapReport diamond_gap(const GuessingInstance& inst, const AttackStrategy& strat,
                             const Povm& target) {
  // the target must identify x with certainty on the ensemble
  for (int x = 0; x < inst.d; ++x) {
    auto probs = qcore::povm_probabilities(target, inst.ensemble[x].matrix.mat);
    if (probs[x] < 1.0 - 1e-9)
      throw ValidationError("diamond_gap: target POVM is not deterministic on the ensemble");
  }
  AttackResult res = attack_success(inst, strat);
  DiamondGapReport r;
  r.gap = 2.0 * (1.0 - res.p_succ);
  r.eps = static_cast<double>(strat.dimBprime) / std::sqrt(static_cast<double>(inst.d));
  r.corollary_form = 2.0 * (1.0 - 2.0 * r.eps);
  r.corollary_applicable = r.eps < 0.5;
  return r;
}

}  // namespace lowerbound
}  // namespace nlqc
