#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crossnet/matrix.hpp"
#include "crossnet/model.hpp"

namespace crossnet {

// How the per-layer membership factors are tied to the fused matrix S.
enum class ConsistencyForm {
  // ||M M^T - S S^T||^2 over users: S is pinned to users' co-membership.
  UserSimilarity,
  // ||M^T M - S^T S||^2 over communities. Invariant under any permutation
  // of S's rows, so S alone cannot identify user communities.
  CommunitySimilarity,
};

struct SolverConfig {
  std::size_t k = 2;
  std::vector<double> a;  // directed reconstruction weights, length p
  std::vector<double> b;  // symmetric reconstruction weights, length q
  std::vector<double> c;  // directed consistency weights, length p
  std::vector<double> d;  // symmetric consistency weights, length q
  std::size_t max_iter = 500;
  double rel_tol = 1e-6;
  double epsilon = 1e-12;  // denominator guard
  double floor = 1e-15;    // entries are clamped up to this after each update
  std::uint64_t rng_seed = 0;

  ConsistencyForm consistency = ConsistencyForm::UserSimilarity;
  // Row-normalize U and W (Q, R) inside the consistency terms.
  bool normalize_consistency = true;
  // Include the derivative of Q/R with respect to U/W in the updates.
  bool normalization_chain_rule = true;

  // Default config with unit weights sized for `net`.
  static SolverConfig defaults_for(const MultiplexNetwork& net, std::size_t k);
  // Throws Usage errors when the invariants do not hold for `net`.
  void validate(const MultiplexNetwork& net) const;
};

struct FactorSet {
  std::vector<Matrix> U;  // n x k, one per directed layer
  std::vector<Matrix> H;  // k x k, one per directed layer
  std::vector<Matrix> W;  // n x k, one per symmetric layer
  Matrix S;               // n x k

  bool nonnegative() const;
};

struct SolveTrace {
  std::vector<double> objective_per_iter;  // [0] is the initial objective
  std::size_t iterations_run = 0;
  bool converged = false;
};

struct SolveResult {
  FactorSet factors;
  CommunityAssignment assignment;
  SolveTrace trace;
};

// Weighted sum of the four reconstruction/consistency terms.
double objective(const MultiplexNetwork& net, const FactorSet& f, const SolverConfig& cfg);

// Per-term breakdown of objective(), in the order directed reconstruction,
// symmetric reconstruction, directed consistency, symmetric consistency.
struct ObjectiveTerms {
  double directed = 0.0;
  double symmetric = 0.0;
  double directed_consistency = 0.0;
  double symmetric_consistency = 0.0;
  double total() const { return directed + symmetric + directed_consistency + symmetric_consistency; }
};
ObjectiveTerms objective_terms(const MultiplexNetwork& net, const FactorSet& f, const SolverConfig& cfg);

// One sweep of multiplicative updates: each U^(t) then H^(t), each W^(g),
// then S. Throws NumericalBlowup on non-finite results.
FactorSet update_step(const MultiplexNetwork& net, FactorSet f, const SolverConfig& cfg);

// Seeded uniform (0,1] initialization; S is row-normalized.
FactorSet initialize_factors(const MultiplexNetwork& net, const SolverConfig& cfg);

SolveResult solve(const MultiplexNetwork& net, const SolverConfig& cfg);

// Trace as CSV `iter,objective`.
std::string trace_csv(const SolveTrace& trace);

}  // namespace crossnet
