#include "crossnet/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "crossnet/error.hpp"
#include "crossnet/io.hpp"

namespace crossnet {

std::vector<std::vector<SimilarityGraph::Neighbor>> SimilarityGraph::adjacency() const {
  std::vector<std::vector<Neighbor>> adj(n);
  for (const auto& e : edges) {
    adj[e.i].push_back({e.j, e.sim});
    adj[e.j].push_back({e.i, e.sim});
  }
  return adj;
}

double jaccard(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t united = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(united);
}

std::vector<std::vector<std::size_t>> friend_sets(const SingleNetwork& g) {
  std::vector<std::vector<std::size_t>> friends(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (std::size_t j : g.out_edges[i]) {
      friends[i].push_back(j);
      friends[j].push_back(i);
    }
  }
  for (auto& f : friends) {
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
  }
  return friends;
}

SimilarityGraph reconstruct(const SingleNetwork& g, double threshold) {
  if (!(threshold >= 0.0)) fail(ErrorKind::Usage, "InvalidConfig", "threshold must be >= 0");
  const std::size_t n = g.n();
  const auto friends = friend_sets(g);

  // Candidate lists L_i. Pairs without a common friend have similarity 0 and
  // can never pass the strict threshold, so only pairs reachable through the
  // inverted friend lists (i - x - j) are scored.
  std::vector<std::vector<SimilarityGraph::Neighbor>> candidates(n);
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> partners;
  for (std::size_t i = 0; i < n; ++i) {
    partners.clear();
    for (std::size_t x : friends[i]) {
      for (std::size_t j : friends[x]) {
        if (j <= i || seen[j]) continue;
        seen[j] = 1;
        partners.push_back(j);
      }
    }
    for (std::size_t j : partners) {
      seen[j] = 0;
      const double sim = jaccard(friends[i], friends[j]);
      if (sim > threshold) {
        candidates[i].push_back({j, sim});
        candidates[j].push_back({i, sim});
      }
    }
  }

  std::map<std::pair<std::size_t, std::size_t>, double> kept;
  for (std::size_t i = 0; i < n; ++i) {
    auto& list = candidates[i];
    std::sort(list.begin(), list.end(), [](const auto& x, const auto& y) {
      return x.sim != y.sim ? x.sim > y.sim : x.target < y.target;
    });
    const auto keep = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(list.size()))));
    for (std::size_t r = 0; r < keep && r < list.size(); ++r) {
      const std::size_t j = list[r].target;
      kept[{std::min(i, j), std::max(i, j)}] = list[r].sim;
    }
  }

  SimilarityGraph out;
  out.n = n;
  out.edges.reserve(kept.size());
  for (const auto& [ij, sim] : kept) out.edges.push_back({ij.first, ij.second, sim});
  return out;
}

void save_similarity_graph(const SimilarityGraph& g, const UserIndex& users, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& e : g.edges) out << users.id(e.i) << '\t' << users.id(e.j) << '\t' << format_fixed(e.sim, 12) << '\n';
  write_text_file(path, out.str());
}

SimilarityGraph load_similarity_graph(const UserIndex& users, const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::map<std::pair<std::size_t, std::size_t>, double> edges;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b;
    double sim = 0.0;
    if (!std::getline(row, a, '\t') || !std::getline(row, b, '\t') || !(row >> sim)) {
      fail(ErrorKind::Data, "MalformedRow", "expected i<TAB>j<TAB>sim in " + path.string());
    }
    if (!(sim > 0.0 && sim <= 1.0)) fail(ErrorKind::Data, "MalformedRow", "similarity outside (0,1] in " + path.string());
    const std::size_t i = users.ordinal(a), j = users.ordinal(b);
    if (i == j) fail(ErrorKind::Data, "MalformedRow", "self-loop in " + path.string());
    edges[{std::min(i, j), std::max(i, j)}] = sim;
  }
  SimilarityGraph g;
  g.n = users.size();
  for (const auto& [ij, sim] : edges) g.edges.push_back({ij.first, ij.second, sim});
  return g;
}

}  // namespace crossnet
