#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "crossnet/model.hpp"

namespace crossnet {

// Undirected weighted user-similarity graph; each pair stored once (i < j).
struct SimilarityGraph {
  struct Edge {
    std::size_t i;
    std::size_t j;
    double sim;
    bool operator==(const Edge&) const = default;
  };
  std::size_t n = 0;
  std::vector<Edge> edges;  // sorted by (i, j)

  struct Neighbor {
    std::size_t target;
    double sim;
  };
  std::vector<std::vector<Neighbor>> adjacency() const;
};

// |a ∩ b| / |a ∪ b| over sorted unique id lists; 0 when both are empty.
double jaccard(std::span<const std::size_t> a, std::span<const std::size_t> b);

// Undirected neighbor sets (in ∪ out) of the follow graph, sorted.
std::vector<std::vector<std::size_t>> friend_sets(const SingleNetwork& g);

// Jaccard similarity of friend sets for every pair sharing a friend, kept
// when > threshold; each user then keeps its ceil(sqrt(|L_i|)) strongest
// candidates and an edge survives if either endpoint keeps it.
SimilarityGraph reconstruct(const SingleNetwork& g, double threshold = 0.0);

// TSV `i<TAB>j<TAB>sim` with external ids.
void save_similarity_graph(const SimilarityGraph& g, const UserIndex& users, const std::filesystem::path& path);
SimilarityGraph load_similarity_graph(const UserIndex& users, const std::filesystem::path& path);

}  // namespace crossnet
