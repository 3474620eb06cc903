#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crossnet/io.hpp"
#include "crossnet/model.hpp"

namespace crossnet {

struct SynthSpec {
  std::size_t n_overlap = 200;
  std::size_t k_true = 4;
  // Directed layers: one (p_in, p_out) pair per layer.
  std::vector<std::string> directed_labels = {"follow", "comment", "like"};
  std::vector<double> p_in = {0.3, 0.3, 0.3};
  std::vector<double> p_out = {0.02, 0.02, 0.02};
  // Symmetric layers: one similarity mean pair per layer.
  std::vector<std::string> symmetric_labels = {"semantic"};
  std::vector<double> sim_in = {0.6};
  std::vector<double> sim_out = {0.2};
  double sim_noise = 0.1;  // standard deviation around the means
  // Single networks: one label and one count of extra (non-overlapping) users each.
  std::vector<std::string> network_labels = {"weibo", "zhihu"};
  std::vector<std::size_t> network_extras = {100, 100};
  double network_p_in = 0.3;
  double network_p_out = 0.02;
  double noise = 0.0;  // fraction of edges rewired uniformly at random
  double skew = 0.0;   // 0 = balanced blocks; > 0 makes block sizes geometric-ish
  bool corpora = false;
  std::uint64_t rng_seed = 0;

  std::size_t p() const noexcept { return p_in.size(); }
  std::size_t q() const noexcept { return sim_in.size(); }
  void validate() const;  // throws InvalidSpec
};

struct GroundTruth {
  std::vector<int> overlap_labels;                // per overlapping-user ordinal
  std::vector<std::vector<int>> network_labels;   // [network][local ordinal]
  std::vector<std::vector<std::optional<std::size_t>>> overlap_mapping;  // [network][overlap ordinal]
};

struct SynthData {
  MultiplexNetwork hybrid;
  std::vector<SingleNetwork> networks;
  std::vector<Corpus> corpora;  // one per network when requested
  GroundTruth truth;
};

SynthData generate(const SynthSpec& spec);

// Expected directed edge count of a planted partition with no self-loops.
double expected_directed_edges(const std::vector<std::size_t>& block_sizes, double p_in, double p_out);
// Solves expected_directed_edges(...) = target for p_in with p_out = ratio * p_in.
double calibrate_p_in(const std::vector<std::size_t>& block_sizes, double target_edges, double ratio);
// Balanced block sizes (first n % k blocks get one extra member).
std::vector<std::size_t> balanced_blocks(std::size_t n, std::size_t k);

struct OverlapSplit {
  std::vector<bool> visible;               // per overlapping user
  std::vector<std::vector<std::size_t>> hidden;  // per community t, ascending
};

// Per community, round-half-up(fraction * size) members chosen uniformly stay
// visible; the rest are hidden.
OverlapSplit hide_overlap(const std::vector<int>& labels, std::size_t k, double fraction, std::uint64_t seed);

// Writes layer files, network files, optional corpora, truth.json and a
// dataset.json manifest listing them. Returns the manifest path.
fs::path write_synth_dataset(const SynthData& data, const SynthSpec& spec, const fs::path& out_dir);

}  // namespace crossnet
