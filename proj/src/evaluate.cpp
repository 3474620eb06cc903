#include "crossnet/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "crossnet/error.hpp"

namespace crossnet {

namespace {

double entropy(const std::map<int, double>& counts, double n) {
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    const double p = c / n;
    h -= p * std::log(p);
  }
  return h;
}

std::string opt_field(const std::optional<double>& v) { return v ? format_fixed(*v) : std::string(); }

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

double nmi(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) fail(ErrorKind::Usage, "LengthMismatch", "labelings differ in length");
  if (a.empty()) fail(ErrorKind::Usage, "LengthMismatch", "labelings are empty");
  const double n = static_cast<double>(a.size());
  std::map<int, double> ca, cb;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca[a[i]] += 1.0;
    cb[b[i]] += 1.0;
    joint[{a[i], b[i]}] += 1.0;
  }
  const double ha = entropy(ca, n);
  const double hb = entropy(cb, n);
  if (ha <= 0.0 || hb <= 0.0) return 0.0;
  double mi = 0.0;
  for (const auto& [key, c] : joint) mi += c / n * std::log(n * c / (ca[key.first] * cb[key.second]));
  return std::clamp(mi / (0.5 * (ha + hb)), 0.0, 1.0);
}

double text_similarity(const std::vector<std::vector<std::string>>& docs_a,
                       const std::vector<std::vector<std::string>>& docs_b) {
  std::map<std::string, std::pair<double, double>> tf;
  double total_a = 0.0, total_b = 0.0;
  for (const auto& doc : docs_a)
    for (const auto& term : doc) tf[term].first += 1.0, total_a += 1.0;
  for (const auto& doc : docs_b)
    for (const auto& term : doc) tf[term].second += 1.0, total_b += 1.0;
  if (total_a == 0.0 || total_b == 0.0) fail(ErrorKind::Data, "EmptyCorpus", "text similarity needs tokens on both sides");

  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [term, counts] : tf) {
    const double df = (counts.first > 0.0 ? 1.0 : 0.0) + (counts.second > 0.0 ? 1.0 : 0.0);
    const double idf = std::log(3.0 / (1.0 + df)) + 1.0;
    const double wa = counts.first * idf;
    const double wb = counts.second * idf;
    dot += wa * wb;
    na += wa * wa;
    nb += wb * wb;
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

std::vector<std::optional<double>> discovery_ratio(const std::vector<std::vector<std::size_t>>& hidden,
                                                   const StubCommunitySet& stubs,
                                                   const std::vector<NetworkExtension>& per_network,
                                                   DiscoveryRule rule) {
  std::vector<std::optional<double>> out(hidden.size());
  for (std::size_t t = 0; t < hidden.size(); ++t) {
    if (hidden[t].empty()) continue;
    std::size_t found = 0;
    for (const std::size_t user : hidden[t]) {
      std::size_t accounts = 0, hits = 0;
      for (std::size_t net = 0; net < per_network.size(); ++net) {
        const auto local = stubs.local_of_overlap[net][user];
        if (!local) continue;
        ++accounts;
        if (t < per_network[net].communities.size()) {
          const auto& members = per_network[net].communities[t];
          if (std::binary_search(members.begin(), members.end(), *local)) ++hits;
        }
      }
      const bool ok = rule == DiscoveryRule::Conjunction ? (accounts > 0 && hits == accounts) : hits > 0;
      if (ok) ++found;
    }
    out[t] = std::clamp(static_cast<double>(found) / static_cast<double>(hidden[t].size()), 0.0, 1.0);
  }
  return out;
}

std::vector<std::optional<double>> community_text_similarity(const std::vector<NetworkExtension>& per_network,
                                                             const StubCommunitySet& stubs,
                                                             const std::vector<const UserIndex*>& network_users,
                                                             const std::vector<std::optional<Corpus>>& corpora) {
  const std::size_t k = stubs.k();
  std::vector<std::optional<double>> out(k);
  const std::size_t nets = per_network.size();

  std::vector<std::vector<bool>> is_overlap(nets);
  for (std::size_t net = 0; net < nets; ++net) {
    is_overlap[net].assign(network_users[net]->size(), false);
    for (const auto& local : stubs.local_of_overlap[net])
      if (local) is_overlap[net][*local] = true;
  }

  for (std::size_t t = 0; t < k; ++t) {
    std::vector<std::vector<std::vector<std::string>>> docs(nets);
    for (std::size_t net = 0; net < nets; ++net) {
      if (!corpora[net] || t >= per_network[net].communities.size()) continue;
      for (const std::size_t local : per_network[net].communities[t]) {
        if (is_overlap[net][local]) continue;
        const auto it = corpora[net]->find(network_users[net]->id(local));
        if (it != corpora[net]->end() && !it->second.empty()) docs[net].push_back(it->second);
      }
    }
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t x = 0; x < nets; ++x)
      for (std::size_t y = x + 1; y < nets; ++y) {
        if (docs[x].empty() || docs[y].empty()) continue;
        sum += text_similarity(docs[x], docs[y]);
        ++pairs;
      }
    if (pairs > 0) out[t] = sum / static_cast<double>(pairs);
  }
  return out;
}

std::optional<double> defined_mean(const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& v : values)
    if (v) sum += *v, ++count;
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

std::string report_csv(const std::vector<EvaluationReport>& reports) {
  std::string out = "method,k,community,members,hidden,discovery_ratio,text_similarity,nmi\n";
  for (const auto& r : reports) {
    for (const auto& c : r.communities) {
      out += r.method + "," + std::to_string(r.k) + "," + std::to_string(c.community) + "," +
             std::to_string(c.members) + "," + std::to_string(c.hidden) + "," + opt_field(c.discovery) + "," +
             opt_field(c.text_similarity) + ",\n";
    }
    out += r.method + "," + std::to_string(r.k) + ",mean,,," + opt_field(r.mean_discovery) + "," +
           opt_field(r.mean_text_similarity) + "," + opt_field(r.nmi) + "\n";
  }
  return out;
}

std::string report_json(const std::vector<EvaluationReport>& reports) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["method"] = r.method;
    j["k"] = r.k;
    j["nmi"] = opt_json(r.nmi);
    j["mean_discovery_ratio"] = opt_json(r.mean_discovery);
    j["mean_text_similarity"] = opt_json(r.mean_text_similarity);
    auto comms = nlohmann::ordered_json::array();
    for (const auto& c : r.communities) {
      nlohmann::ordered_json cj;
      cj["community"] = c.community;
      cj["members"] = c.members;
      cj["hidden"] = c.hidden;
      cj["discovery_ratio"] = opt_json(c.discovery);
      cj["text_similarity"] = opt_json(c.text_similarity);
      comms.push_back(std::move(cj));
    }
    j["communities"] = std::move(comms);
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string fig_similarity_csv(const std::vector<EvaluationReport>& reports) {
  std::string out = "method,k,mean_text_similarity\n";
  for (const auto& r : reports) out += r.method + "," + std::to_string(r.k) + "," + opt_field(r.mean_text_similarity) + "\n";
  return out;
}

std::string fig_discovery_csv(const std::vector<EvaluationReport>& reports) {
  std::string out = "method,k,mean_discovery_ratio\n";
  for (const auto& r : reports) out += r.method + "," + std::to_string(r.k) + "," + opt_field(r.mean_discovery) + "\n";
  return out;
}

}  // namespace crossnet
