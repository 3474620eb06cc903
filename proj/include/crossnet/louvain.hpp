#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crossnet/matrix.hpp"
#include "crossnet/model.hpp"

namespace crossnet {

// Undirected weighted graph in adjacency-list form. Each undirected edge
// {i, j} with i != j is listed in both rows; a self-loop appears once with
// weight A_ii.
struct WeightedGraph {
  struct Arc {
    std::size_t target;
    double weight;
  };
  std::vector<std::vector<Arc>> adjacency;

  std::size_t size() const noexcept { return adjacency.size(); }
  // Sum of all adjacency entries (2m in the usual notation).
  double total_weight() const;

  // From a symmetric nonnegative matrix; throws AsymmetricInput otherwise.
  static WeightedGraph from_symmetric(const Matrix& adjacency);
  static WeightedGraph from_edges(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges);
};

// Newman modularity of `labels` on `g`.
double modularity(const WeightedGraph& g, const std::vector<int>& labels);

struct LouvainResult {
  std::vector<int> labels;                 // dense in [0, num_communities)
  double modularity = 0.0;
  std::size_t num_communities = 0;
  std::vector<double> level_modularity;    // after each aggregation level
};

// Two-phase greedy modularity optimization. Node visit order is shuffled
// from `seed`. Throws EmptyGraph when the graph has no edges.
LouvainResult louvain(const WeightedGraph& g, std::uint64_t seed);

struct ModularityReport {
  std::string layer_label;
  double num_communities = 0.0;  // mean over runs
  double modularity = 0.0;       // mean over runs
  std::size_t runs = 0;
};

struct KEstimate {
  std::vector<ModularityReport> reports;
  std::vector<std::string> warnings;  // layers skipped as empty
  std::size_t k_min = 2;
  std::size_t k_max = 2;
};

// [floor(min mean count) - 2, ceil(max mean count) + 2], lower end clipped to 2.
std::pair<std::size_t, std::size_t> widen_k_range(const std::vector<double>& mean_counts);

// Runs louvain `runs` times on each symmetrized directed layer (A + A^T)/2.
KEstimate estimate_k(const MultiplexNetwork& net, std::size_t runs, std::uint64_t seed);

// CSV with columns layer,num_communities,modularity,runs.
std::string modularity_report_csv(const KEstimate& estimate);

}  // namespace crossnet
