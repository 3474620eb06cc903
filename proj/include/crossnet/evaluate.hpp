#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crossnet/extend.hpp"
#include "crossnet/io.hpp"

namespace crossnet {

// Normalized mutual information, arithmetic-mean normalization. A constant
// labeling has zero entropy and scores 0 against anything.
double nmi(const std::vector<int>& a, const std::vector<int>& b);

// Cosine similarity of the TF-IDF vectors of two pooled document sets
// (tf = raw count, idf = ln((1 + N) / (1 + df)) + 1 with N = 2).
double text_similarity(const std::vector<std::vector<std::string>>& docs_a,
                       const std::vector<std::vector<std::string>>& docs_b);

enum class DiscoveryRule {
  Conjunction,  // found in C_t of every network where the user has an account
  Disjunction,  // found in C_t of at least one such network
};

// P_t per stub community: share of hidden users of stub t that reappear in the
// grown community t. nullopt when stub t has no hidden users.
std::vector<std::optional<double>> discovery_ratio(const std::vector<std::vector<std::size_t>>& hidden,
                                                   const StubCommunitySet& stubs,
                                                   const std::vector<NetworkExtension>& per_network,
                                                   DiscoveryRule rule = DiscoveryRule::Conjunction);

struct CommunityMetrics {
  std::size_t community = 0;
  std::size_t members = 0;  // merged community size
  std::size_t hidden = 0;
  std::optional<double> discovery;
  std::optional<double> text_similarity;
};

struct EvaluationReport {
  std::string method;
  std::size_t k = 0;
  std::vector<CommunityMetrics> communities;
  std::optional<double> mean_discovery;
  std::optional<double> mean_text_similarity;
  std::optional<double> nmi;
};

// Mean text similarity, per community, between the non-overlapping members of
// C_t in each pair of networks. nullopt when either side has no documents.
std::vector<std::optional<double>> community_text_similarity(const std::vector<NetworkExtension>& per_network,
                                                             const StubCommunitySet& stubs,
                                                             const std::vector<const UserIndex*>& network_users,
                                                             const std::vector<std::optional<Corpus>>& corpora);

// Mean over the defined entries; nullopt when none are.
std::optional<double> defined_mean(const std::vector<std::optional<double>>& values);

// One row per community plus a `mean` row per report.
std::string report_csv(const std::vector<EvaluationReport>& reports);
std::string report_json(const std::vector<EvaluationReport>& reports);
// method,k,<metric> rows for plotting.
std::string fig_similarity_csv(const std::vector<EvaluationReport>& reports);
std::string fig_discovery_csv(const std::vector<EvaluationReport>& reports);

}  // namespace crossnet
