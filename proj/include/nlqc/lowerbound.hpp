#pragma once

#include <vector>

#include "nlqc/mub.hpp"
#include "nlqc/qcore.hpp"

namespace nlqc {

// The guessing-game ensemble rho^x = (1/bases_used) sum_a |a><a| (x)
// |e^a_x><e^a_x| on C^{bases_used} (x) C^d, uniform prior 1/d over x.
struct GuessingInstance {
  int d = 0;
  int bases_used = 0;
  std::vector<DensityOperator> ensemble;

  // Projector |e^a_x><e^a_x| recovered from the ensemble blocks.
  Mat basis_projector(int a, int x) const;
};

// Alice holds the classical label a and register A'; Bob holds B B'.
// postproc[alpha][beta] is Charlie's guess.
struct AttackStrategy {
  int dimAprime = 1;
  int dimBprime = 1;
  DensityOperator eta;            // on A' (x) B'
  std::vector<Povm> alice_povms;  // one per a, elements on A'
  Povm bob_povm;                  // on B (x) B'
  std::vector<std::vector<int>> postproc;
};

struct AttackResult {
  double p_succ = 0;
  double bound = 0;   // 2 dim B' / sqrt(d)
  double margin = 0;  // bound - p_succ
  int iterations = 0;
};

struct SeesawOutcome {
  AttackStrategy strategy;
  double best_p = 0;
  int sweeps = 0;
  std::vector<double> history;  // p after each sweep, non-decreasing
};

struct DiamondGapReport {
  double gap = 0;             // 2 (1 - p_succ)
  double eps = 0;             // dim B' / sqrt(d)
  double corollary_form = 0;  // 2 (1 - 2 eps)
  bool corollary_applicable = false;
};

namespace lowerbound {

GuessingInstance build_ensemble(const MubFamily& fam, int bases_used);

AttackResult attack_success(const GuessingInstance& inst, const AttackStrategy& strat);

// 2 dim B' / sqrt(d); values >= 1 are vacuous.
double theoretical_bound(int d, int dimBprime);
bool bound_vacuous(double bound);

// Uniformly random valid strategy (PGM-normalized random POVMs, random
// pure shared state, g =identity on Bob's outcome).
AttackStrategy random_strategy(const GuessingInstance& inst, int dimAprime, int dimBprime,
                               RngStream& rng);

// Alternating ascent: Helstrom-style pairwise POVM redistribution for Alice
// and Bob, exact eigenvector update for eta, exact argmax update for g.
// p never decreases across sweeps.
SeesawOutcome seesaw_optimize(const GuessingInstance& inst, int dimAprime, int dimBprime,
                              int sweeps, RngStream& rng);

DiamondGapReport diamond_gap(const GuessingInstance& inst, const AttackStrategy& strat,
                             const Povm& target);

}  // namespace lowerbound
}  // namespace nlqc
