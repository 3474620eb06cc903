#include "crossnet/extend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "crossnet/error.hpp"
#include "crossnet/io.hpp"

namespace crossnet {

std::vector<std::optional<std::size_t>> map_by_id(const UserIndex& overlap, const UserIndex& local) {
  std::vector<std::optional<std::size_t>> out(overlap.size());
  for (std::size_t i = 0; i < overlap.size(); ++i) out[i] = local.find(overlap.id(i));
  return out;
}

StubCommunitySet make_stubs(const std::vector<int>& labels, std::size_t k,
                            std::vector<std::vector<std::optional<std::size_t>>> local_of_overlap,
                            const std::vector<bool>& visible) {
  if (!visible.empty() && visible.size() != labels.size()) {
    fail(ErrorKind::Data, "LengthMismatch", "visibility mask length differs from labels");
  }
  for (const auto& mapping : local_of_overlap) {
    if (mapping.size() != labels.size()) fail(ErrorKind::Data, "LengthMismatch", "overlap mapping length differs");
  }
  StubCommunitySet stubs;
  stubs.communities.resize(k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k) continue;
    if (!visible.empty() && !visible[i]) continue;
    stubs.communities[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  stubs.local_of_overlap = std::move(local_of_overlap);
  return stubs;
}

namespace {

using Adjacency = std::vector<std::vector<SimilarityGraph::Neighbor>>;

std::vector<double> strengths_from(const Adjacency& adj, std::size_t source) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(adj.size(), inf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;
  dist[source] = 0.0;
  frontier.push({0.0, source});
  while (!frontier.empty()) {
    const auto [d, u] = frontier.top();
    frontier.pop();
    if (d > dist[u]) continue;
    for (const auto& nb : adj[u]) {
      const double candidate = d - std::log(nb.sim);
      if (candidate < dist[nb.target]) {
        dist[nb.target] = candidate;
        frontier.push({candidate, nb.target});
      }
    }
  }
  std::vector<double> strength(adj.size(), 0.0);
  for (std::size_t i = 0; i < adj.size(); ++i) strength[i] = std::isinf(dist[i]) ? 0.0 : std::exp(-dist[i]);
  return strength;
}

}  // namespace

std::vector<double> connection_strengths_from(const SimilarityGraph& g, std::size_t source) {
  if (source >= g.n) fail(ErrorKind::Data, "UnknownUser", "source ordinal out of range");
  return strengths_from(g.adjacency(), source);
}

double connection_strength(const SimilarityGraph& g, std::size_t i, std::size_t j) {
  if (j >= g.n) fail(ErrorKind::Data, "UnknownUser", "target ordinal out of range");
  if (i == j) return 1.0;
  return connection_strengths_from(g, i)[j];
}

double cl_strength(const SimilarityGraph& g, std::size_t i, const std::vector<std::optional<std::size_t>>& seeds) {
  double total = 0.0;
  std::size_t present = 0;
  for (const auto& seed : seeds) {
    if (!seed) continue;
    total += connection_strength(g, i, *seed);
    ++present;
  }
  if (present == 0) fail(ErrorKind::Data, "EmptySeed", "no seed member exists in this network");
  return total / static_cast<double>(present);
}

RecPolicy RecPolicy::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) fail(ErrorKind::Usage, "InvalidPolicy", "expected percentile:P or fixed:V, got " + text);
  const std::string kind = text.substr(0, colon);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    fail(ErrorKind::Usage, "InvalidPolicy", "bad number in " + text);
  }
  RecPolicy policy;
  if (kind == "percentile") {
    if (!(value >= 0.0 && value <= 100.0)) fail(ErrorKind::Usage, "InvalidPolicy", "percentile must lie in [0, 100]");
    policy.kind = Kind::Percentile;
  } else if (kind == "fixed") {
    if (!std::isfinite(value)) fail(ErrorKind::Usage, "InvalidPolicy", "fixed threshold must be finite");
    policy.kind = Kind::Fixed;
  } else {
    fail(ErrorKind::Usage, "InvalidPolicy", "unknown policy kind " + kind);
  }
  policy.value = value;
  return policy;
}

std::string RecPolicy::to_string() const {
  std::ostringstream out;
  out << (kind == Kind::Percentile ? "percentile:" : "fixed:") << value;
  return out.str();
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::infinity();
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

NetworkExtension extend(const SimilarityGraph& g, std::size_t network, const std::string& label,
                        const StubCommunitySet& stubs, const RecPolicy& policy) {
  if (network >= stubs.local_of_overlap.size()) fail(ErrorKind::Data, "UnknownNetwork", "no overlap mapping for network");
  const auto& mapping = stubs.local_of_overlap[network];
  NetworkExtension out;
  out.network = label;
  out.communities.resize(stubs.k());
  out.thresholds.assign(stubs.k(), std::numeric_limits<double>::infinity());
  const Adjacency adj = g.adjacency();

  for (std::size_t t = 0; t < stubs.k(); ++t) {
    std::vector<char> is_seed(g.n, 0);
    std::vector<double> score(g.n, 0.0);
    std::size_t present = 0;
    for (std::size_t member : stubs.communities[t]) {
      const auto local = mapping.at(member);
      if (!local) continue;
      if (*local >= g.n) fail(ErrorKind::Data, "UnknownUser", "seed mapped outside the network");
      if (is_seed[*local]) continue;
      is_seed[*local] = 1;
      ++present;
      const auto strengths = strengths_from(adj, *local);
      for (std::size_t i = 0; i < g.n; ++i) score[i] += strengths[i];
    }
    auto& community = out.communities[t];
    if (present == 0) {
      out.warnings.push_back("EmptySeed: stub " + std::to_string(t) + " has no members in network '" + label + "'");
      continue;
    }
    std::vector<double> nonzero;
    for (std::size_t i = 0; i < g.n; ++i) {
      if (is_seed[i]) continue;
      score[i] /= static_cast<double>(present);
      if (score[i] > 0.0) nonzero.push_back(score[i]);
    }
    const double threshold = policy.kind == RecPolicy::Kind::Fixed ? policy.value : percentile(nonzero, policy.value);
    out.thresholds[t] = threshold;
    for (std::size_t i = 0; i < g.n; ++i) {
      if (is_seed[i] || score[i] > threshold) community.push_back(i);
    }
  }
  return out;
}

std::vector<MergedCommunity> merge(const std::vector<NetworkExtension>& per_network, const StubCommunitySet& stubs,
                                   const UserIndex& overlap_users, const std::vector<const UserIndex*>& network_users) {
  if (network_users.size() != per_network.size()) fail(ErrorKind::Data, "LengthMismatch", "one user index per network");
  // Reverse overlap mapping per network: local ordinal -> overlap ordinal.
  std::vector<std::map<std::size_t, std::size_t>> overlap_of_local(per_network.size());
  for (std::size_t net = 0; net < per_network.size(); ++net) {
    const auto& mapping = stubs.local_of_overlap.at(net);
    for (std::size_t o = 0; o < mapping.size(); ++o)
      if (mapping[o]) overlap_of_local[net][*mapping[o]] = o;
  }

  std::vector<MergedCommunity> merged(stubs.k());
  for (std::size_t t = 0; t < stubs.k(); ++t) {
    std::map<std::string, MergedMember> members;
    for (std::size_t o : stubs.communities[t]) members[overlap_users.id(o)].key = overlap_users.id(o);
    for (std::size_t net = 0; net < per_network.size(); ++net) {
      if (per_network[net].communities.size() != stubs.k()) fail(ErrorKind::Data, "LengthMismatch", "k differs across networks");
      for (std::size_t local : per_network[net].communities[t]) {
        auto it = overlap_of_local[net].find(local);
        const std::string key = it != overlap_of_local[net].end()
                                    ? overlap_users.id(it->second)
                                    : per_network[net].network + "/" + network_users[net]->id(local);
        auto& m = members[key];
        m.key = key;
        m.accounts.emplace_back(net, local);
      }
    }
    for (auto& [key, member] : members) merged[t].push_back(std::move(member));
  }
  return merged;
}

std::string communities_csv(const std::vector<NetworkExtension>& per_network,
                            const std::vector<const UserIndex*>& network_users) {
  std::ostringstream out;
  out << "network,community,user_id\n";
  for (std::size_t net = 0; net < per_network.size(); ++net)
    for (std::size_t t = 0; t < per_network[net].communities.size(); ++t)
      for (std::size_t local : per_network[net].communities[t])
        out << per_network[net].network << ',' << t << ',' << network_users[net]->id(local) << '\n';
  return out.str();
}

std::string merged_json(const std::vector<MergedCommunity>& merged, const std::vector<NetworkExtension>& per_network,
                        const std::vector<const UserIndex*>& network_users) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < merged.size(); ++t) {
    nlohmann::ordered_json community;
    community["community"] = t;
    nlohmann::ordered_json members = nlohmann::ordered_json::array();
    for (const auto& m : merged[t]) {
      nlohmann::ordered_json accounts = nlohmann::ordered_json::array();
      for (const auto& [net, local] : m.accounts) {
        accounts.push_back({{"network", per_network[net].network}, {"user_id", network_users[net]->id(local)}});
      }
      members.push_back({{"accounts", accounts}, {"key", m.key}});
    }
    community["members"] = std::move(members);
    doc.push_back(std::move(community));
  }
  return doc.dump(2) + "\n";
}

}  // namespace crossnet
