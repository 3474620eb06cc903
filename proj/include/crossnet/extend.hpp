#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crossnet/model.hpp"
#include "crossnet/reconstruct.hpp"

namespace crossnet {

// Stub communities over overlapping-user ordinals, plus for each single
// network the local ordinal of every overlapping user (nullopt when the user
// has no account there).
struct StubCommunitySet {
  std::vector<std::vector<std::size_t>> communities;
  std::vector<std::vector<std::optional<std::size_t>>> local_of_overlap;  // [network][overlap ordinal]

  std::size_t k() const noexcept { return communities.size(); }
};

// Maps overlapping users to accounts by identical external id.
std::vector<std::optional<std::size_t>> map_by_id(const UserIndex& overlap, const UserIndex& local);

// Stubs from hard labels; users with `visible[i] == false` are left out.
StubCommunitySet make_stubs(const std::vector<int>& labels, std::size_t k,
                            std::vector<std::vector<std::optional<std::size_t>>> local_of_overlap,
                            const std::vector<bool>& visible = {});

// Strongest-path connection strength from `source` to every node:
// exp(-shortest distance) under edge length -ln(sim). 1 at the source,
// 0 for unreachable nodes.
std::vector<double> connection_strengths_from(const SimilarityGraph& g, std::size_t source);
double connection_strength(const SimilarityGraph& g, std::size_t i, std::size_t j);

// Mean connection strength of `i` to the seeds present in this network.
// Throws EmptySeed when no seed is present.
double cl_strength(const SimilarityGraph& g, std::size_t i, const std::vector<std::optional<std::size_t>>& seeds);

struct RecPolicy {
  enum class Kind { Percentile, Fixed };
  Kind kind = Kind::Percentile;
  double value = 80.0;

  // "percentile:P" or "fixed:V".
  static RecPolicy parse(const std::string& text);
  std::string to_string() const;
};

// Linear-interpolation percentile (p in [0, 100]) of `values`.
double percentile(std::vector<double> values, double p);

struct NetworkExtension {
  std::string network;
  std::vector<std::vector<std::size_t>> communities;  // local ordinals, sorted; seeds included
  std::vector<double> thresholds;                     // Rec_t used per stub (inf when nothing scored)
  std::vector<std::string> warnings;
};

// Grows every stub inside one network: a non-seed user joins C_new^t when its
// cl_strength to stub t exceeds Rec_t. Membership is not exclusive.
NetworkExtension extend(const SimilarityGraph& g, std::size_t network, const std::string& label,
                        const StubCommunitySet& stubs, const RecPolicy& policy);

struct MergedMember {
  std::string key;  // overlap id, or "<network>/<local id>" for non-overlapping accounts
  std::vector<std::pair<std::size_t, std::size_t>> accounts;  // (network, local ordinal)
};
using MergedCommunity = std::vector<MergedMember>;  // sorted by key

struct ExtensionResult {
  std::vector<NetworkExtension> per_network;
  std::vector<MergedCommunity> merged;
};

// Union of C_new^t across networks; overlapping users appear once with all
// their accounts.
std::vector<MergedCommunity> merge(const std::vector<NetworkExtension>& per_network, const StubCommunitySet& stubs,
                                   const UserIndex& overlap_users, const std::vector<const UserIndex*>& network_users);

// CSV network,community,user_id.
std::string communities_csv(const std::vector<NetworkExtension>& per_network,
                            const std::vector<const UserIndex*>& network_users);
std::string merged_json(const std::vector<MergedCommunity>& merged, const std::vector<NetworkExtension>& per_network,
                        const std::vector<const UserIndex*>& network_users);

}  // namespace crossnet
