#pragma once

#include <cstdint>
#include <vector>

#include "crossnet/matrix.hpp"
#include "crossnet/model.hpp"

namespace crossnet {

// Weighted sum of all layers, directed layers symmetrized as (A + A^T)/2.
struct FusedNetwork {
  std::size_t n = 0;
  Matrix fused;
};

struct FusionOptions {
  std::vector<double> directed_weights;   // default 1 each
  std::vector<double> symmetric_weights;  // default 1 each
  bool include_symmetric = true;
};

FusedNetwork fuse(const MultiplexNetwork& net, const FusionOptions& options = {});

// Symmetrized views, one per layer (directed layers first).
std::vector<Matrix> symmetric_views(const MultiplexNetwork& net, bool include_symmetric = true);

struct NmfOptions {
  std::size_t max_iter = 500;
  double rel_tol = 1e-6;
  double epsilon = 1e-12;
  double floor = 1e-15;
};

struct BaselineResult {
  CommunityAssignment assignment;
  std::vector<double> objective_per_iter;  // empty for k-means
  bool converged = false;
};

// Lloyd's algorithm with k-means++ seeding on the rows of the fused matrix.
// Throws DegenerateData when there are fewer than k distinct rows.
BaselineResult kmeans_baseline(const FusedNetwork& fn, std::size_t k, std::uint64_t seed, std::size_t max_iter = 300);

// Symmetric NMF fused ≈ W W^T with the square-root multiplicative rule.
BaselineResult concat_nmf(const FusedNetwork& fn, std::size_t k, std::uint64_t seed, const NmfOptions& options = {});

// min sum_v lambda_v ||A_v - U_v S^T||^2 with a shared S.
BaselineResult col_nmf(const std::vector<Matrix>& views, std::size_t k, const std::vector<double>& lambda,
                       std::uint64_t seed, const NmfOptions& options = {});
double col_nmf_objective(const std::vector<Matrix>& views, const std::vector<Matrix>& U, const Matrix& S,
                         const std::vector<double>& lambda);

// min sum_v ||A_v - U_v V_v^T||^2 + lambda_v ||V_v - S||^2.
BaselineResult multi_nmf(const std::vector<Matrix>& views, std::size_t k, const std::vector<double>& lambda,
                         std::uint64_t seed, const NmfOptions& options = {});
double multi_nmf_objective(const std::vector<Matrix>& views, const std::vector<Matrix>& U,
                           const std::vector<Matrix>& V, const Matrix& S, const std::vector<double>& lambda);
// Minimizer of sum_v lambda_v ||V_v - S||^2 over S: the weighted mean.
Matrix consensus(const std::vector<Matrix>& V, const std::vector<double>& lambda);

// Uniform random labels in [0, k); the null model for discovery experiments.
CommunityAssignment random_assignment(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace crossnet
