#include "crossnet/louvain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "crossnet/error.hpp"
#include "crossnet/io.hpp"
#include "crossnet/rng.hpp"

namespace crossnet {

double WeightedGraph::total_weight() const {
  double total = 0.0;
  for (const auto& row : adjacency)
    for (const auto& arc : row) total += arc.weight;
  return total;
}

WeightedGraph WeightedGraph::from_symmetric(const Matrix& m) {
  if (m.rows() != m.cols() || m != m.transpose()) {
    fail(ErrorKind::Data, "AsymmetricInput", "adjacency matrix must be square and symmetric");
  }
  if (!all_nonnegative(m)) fail(ErrorKind::Data, "NegativeWeight", "adjacency matrix has negative entries");
  WeightedGraph g;
  g.adjacency.resize(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) g.adjacency[static_cast<std::size_t>(i)].push_back({static_cast<std::size_t>(j), m(i, j)});
    }
  }
  return g;
}

WeightedGraph WeightedGraph::from_edges(std::size_t n,
                                        const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
  std::vector<std::map<std::size_t, double>> rows(n);
  for (const auto& [i, j, w] : edges) {
    if (i >= n || j >= n) fail(ErrorKind::Data, "UnknownUser", "edge endpoint out of range");
    if (w < 0.0) fail(ErrorKind::Data, "NegativeWeight", "negative edge weight");
    rows[i][j] += w;
    if (i != j) rows[j][i] += w;
  }
  WeightedGraph g;
  g.adjacency.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [j, w] : rows[i])
      if (w != 0.0) g.adjacency[i].push_back({j, w});
  return g;
}

double modularity(const WeightedGraph& g, const std::vector<int>& labels) {
  if (labels.size() != g.size()) fail(ErrorKind::Data, "LengthMismatch", "one label per node required");
  const double m2 = g.total_weight();
  if (m2 <= 0.0) fail(ErrorKind::Data, "EmptyGraph", "modularity undefined on a graph without edges");
  std::map<int, std::pair<double, double>> per_community;  // inside, total
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto& [inside, total] = per_community[labels[i]];
    for (const auto& arc : g.adjacency[i]) {
      total += arc.weight;
      if (labels[arc.target] == labels[i]) inside += arc.weight;
    }
  }
  double q = 0.0;
  for (const auto& [label, sums] : per_community) {
    const double share = sums.second / m2;
    q += sums.first / m2 - share * share;
  }
  return q;
}

namespace {

// Local moving phase. Returns true if any node changed community.
bool move_nodes(const WeightedGraph& g, std::vector<std::size_t>& community, Rng& rng) {
  const std::size_t n = g.size();
  const double m2 = g.total_weight();
  std::vector<double> degree(n, 0.0), total(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& arc : g.adjacency[i]) degree[i] += arc.weight;
    total[community[i]] += degree[i];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<double> link(n, 0.0);
  std::vector<std::size_t> touched;
  const double tolerance = 1e-12 * std::max(1.0, m2);
  bool any_move = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::size_t node : order) {
      const std::size_t own = community[node];
      touched.clear();
      for (const auto& arc : g.adjacency[node]) {
        if (arc.target == node) continue;
        const std::size_t c = community[arc.target];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += arc.weight;
      }
      total[own] -= degree[node];
      std::size_t best = own;
      double best_gain = link[own] - total[own] * degree[node] / m2;
      for (std::size_t c : touched) {
        const double gain = link[c] - total[c] * degree[node] / m2;
        if (gain > best_gain + tolerance) {
          best_gain = gain;
          best = c;
        }
      }
      total[best] += degree[node];
      community[node] = best;
      if (best != own) moved = any_move = true;
      for (std::size_t c : touched) link[c] = 0.0;
      link[own] = 0.0;
    }
  }
  return any_move;
}

// Relabels communities densely in order of first appearance.
std::size_t renumber(std::vector<std::size_t>& community) {
  std::vector<std::size_t> remap(community.size(), SIZE_MAX);
  std::size_t next = 0;
  for (auto& c : community) {
    if (remap[c] == SIZE_MAX) remap[c] = next++;
    c = remap[c];
  }
  return next;
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<std::size_t>& community, std::size_t count) {
  std::vector<std::map<std::size_t, double>> rows(count);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (const auto& arc : g.adjacency[i]) rows[community[i]][community[arc.target]] += arc.weight;
  WeightedGraph out;
  out.adjacency.resize(count);
  for (std::size_t c = 0; c < count; ++c)
    for (const auto& [d, w] : rows[c]) out.adjacency[c].push_back({d, w});
  return out;
}

}  // namespace

LouvainResult louvain(const WeightedGraph& g, std::uint64_t seed) {
  if (g.size() == 0 || g.total_weight() <= 0.0) fail(ErrorKind::Data, "EmptyGraph", "graph has no edges");
  Rng rng(seed);

  std::vector<std::size_t> node_to_community(g.size());
  std::iota(node_to_community.begin(), node_to_community.end(), std::size_t{0});
  WeightedGraph level = g;

  LouvainResult result;
  auto current_labels = [&] {
    std::vector<int> labels(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) labels[i] = static_cast<int>(node_to_community[i]);
    return labels;
  };

  while (true) {
    std::vector<std::size_t> community(level.size());
    std::iota(community.begin(), community.end(), std::size_t{0});
    const bool moved = move_nodes(level, community, rng);
    if (!moved) break;
    const std::size_t count = renumber(community);
    for (auto& c : node_to_community) c = community[c];
    result.level_modularity.push_back(modularity(g, current_labels()));
    if (count == level.size()) break;
    level = aggregate(level, community, count);
  }

  // Dense labels in order of first node appearance.
  renumber(node_to_community);
  result.labels = current_labels();
  result.num_communities = static_cast<std::size_t>(*std::max_element(result.labels.begin(), result.labels.end()) + 1);
  result.modularity = modularity(g, result.labels);
  return result;
}

std::pair<std::size_t, std::size_t> widen_k_range(const std::vector<double>& mean_counts) {
  if (mean_counts.empty()) fail(ErrorKind::Data, "EmptyGraph", "no layer produced a community count");
  const auto [lo_it, hi_it] = std::minmax_element(mean_counts.begin(), mean_counts.end());
  const double lo = std::floor(*lo_it) - 2.0;
  const double hi = std::ceil(*hi_it) + 2.0;
  const auto k_min = static_cast<std::size_t>(std::max(2.0, lo));
  const auto k_max = std::max(k_min, static_cast<std::size_t>(std::max(2.0, hi)));
  return {k_min, k_max};
}

KEstimate estimate_k(const MultiplexNetwork& net, std::size_t runs, std::uint64_t seed) {
  if (net.p() == 0) fail(ErrorKind::Usage, "NoLayers", "k estimation needs at least one directed layer");
  if (runs == 0) fail(ErrorKind::Usage, "InvalidConfig", "runs must be >= 1");
  KEstimate out;
  std::vector<double> means;
  for (std::size_t t = 0; t < net.p(); ++t) {
    const Matrix& a = net.directed[t].weights;
    const Matrix sym = 0.5 * (a + a.transpose());
    const WeightedGraph g = WeightedGraph::from_symmetric(sym);
    if (g.total_weight() <= 0.0) {
      out.warnings.push_back("EmptyGraph: layer '" + net.directed[t].label + "' has no edges");
      continue;
    }
    ModularityReport report;
    report.layer_label = net.directed[t].label;
    report.runs = runs;
    for (std::size_t r = 0; r < runs; ++r) {
      const auto res = louvain(g, derive_seed(seed, t * 1000003ULL + r));
      report.num_communities += static_cast<double>(res.num_communities);
      report.modularity += res.modularity;
    }
    report.num_communities /= static_cast<double>(runs);
    report.modularity /= static_cast<double>(runs);
    means.push_back(report.num_communities);
    out.reports.push_back(std::move(report));
  }
  std::tie(out.k_min, out.k_max) = widen_k_range(means);
  return out;
}

std::string modularity_report_csv(const KEstimate& estimate) {
  std::ostringstream out;
  out << "layer,num_communities,modularity,runs\n";
  for (const auto& r : estimate.reports) {
    out << r.layer_label << ',' << format_fixed(r.num_communities) << ',' << format_fixed(r.modularity) << ','
        << r.runs << '\n';
  }
  return out.str();
}

}  // namespace crossnet
