#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include "crossnet/reconstruct.hpp"
#include "crossnet/solver.hpp"
#include "support.hpp"

namespace oracle {

using namespace crossnet;

// Elementwise loops over the definition, no matrix products.
inline double naive_objective(const MultiplexNetwork& net, const FactorSet& f, const SolverConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(net.n());
  const auto k = static_cast<Eigen::Index>(cfg.k);
  auto row_normalized = [&](const Matrix& x) {
    Matrix m = x;
    if (!cfg.normalize_consistency) return m;
    for (Eigen::Index i = 0; i < n; ++i) {
      double sum = 0.0;
      for (Eigen::Index c = 0; c < k; ++c) sum += x(i, c);
      for (Eigen::Index c = 0; c < k; ++c) m(i, c) = sum > cfg.epsilon ? x(i, c) / sum : 0.0;
    }
    return m;
  };
  auto consistency = [&](const Matrix& m) {
    double total = 0.0;
    if (cfg.consistency == ConsistencyForm::UserSimilarity) {
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
          double mm = 0.0, ss = 0.0;
          for (Eigen::Index c = 0; c < k; ++c) {
            mm += m(i, c) * m(j, c);
            ss += f.S(i, c) * f.S(j, c);
          }
          total += (mm - ss) * (mm - ss);
        }
    } else {
      for (Eigen::Index c = 0; c < k; ++c)
        for (Eigen::Index d = 0; d < k; ++d) {
          double mm = 0.0, ss = 0.0;
          for (Eigen::Index i = 0; i < n; ++i) {
            mm += m(i, c) * m(i, d);
            ss += f.S(i, c) * f.S(i, d);
          }
          total += (mm - ss) * (mm - ss);
        }
    }
    return total;
  };

  double total = 0.0;
  for (std::size_t t = 0; t < net.p(); ++t) {
    const Matrix& u = f.U[t];
    const Matrix& h = f.H[t];
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        double approx = 0.0;
        for (Eigen::Index c = 0; c < k; ++c)
          for (Eigen::Index d = 0; d < k; ++d) approx += u(i, c) * h(c, d) * u(j, d);
        const double r = net.directed[t].weights(i, j) - approx;
        total += cfg.a[t] * r * r;
      }
    total += cfg.c[t] * consistency(row_normalized(u));
  }
  for (std::size_t g = 0; g < net.q(); ++g) {
    const Matrix& w = f.W[g];
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        double approx = 0.0;
        for (Eigen::Index c = 0; c < k; ++c) approx += w(i, c) * w(j, c);
        const double r = net.symmetric[g].weights(i, j) - approx;
        total += cfg.b[g] * r * r;
      }
    total += cfg.d[g] * consistency(row_normalized(w));
  }
  return total;
}

// Factors with zero objective: A = U H U^T, X = W W^T and every row-normalized
// factor equal to S.
inline std::pair<MultiplexNetwork, FactorSet> exact_instance(crossnet::Rng& rng, std::size_t n, std::size_t k) {
  FactorSet f;
  f.S = normalize_rows(testing::random_matrix(rng, n, k));
  MultiplexNetwork net;
  net.users = UserIndex(testing::make_ids(n));
  for (int t = 0; t < 3; ++t) {
    Vector scale(static_cast<Eigen::Index>(n));
    for (auto& s : scale) s = 0.5 + rng.uniform();
    Matrix u = scale.asDiagonal() * f.S;
    Matrix h = testing::random_matrix(rng, k, k);
    net.directed.push_back({"d" + std::to_string(t), u * h * u.transpose()});
    f.U.push_back(u);
    f.H.push_back(h);
  }
  Vector scale(static_cast<Eigen::Index>(n));
  for (auto& s : scale) s = 0.5 + rng.uniform();
  Matrix w = scale.asDiagonal() * f.S;
  net.symmetric.push_back({"s0", w * w.transpose()});
  f.W.push_back(w);
  return {net, f};
}

// All-pairs reconstruction straight from the definition.
inline std::vector<SimilarityGraph::Edge> brute_force_reconstruct(const SingleNetwork& g, double threshold) {
  const std::size_t n = g.n();
  std::vector<std::set<std::size_t>> nb(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const std::size_t j : g.out_edges[i]) {
      nb[i].insert(j);
      nb[j].insert(i);
    }
  std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      std::size_t inter = 0;
      for (const auto x : nb[i]) inter += nb[j].count(x);
      const std::size_t uni = nb[i].size() + nb[j].size() - inter;
      sim[i][j] = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
    }
  std::set<std::pair<std::size_t, std::size_t>> kept;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> cand;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && sim[i][j] > threshold) cand.push_back(j);
    std::sort(cand.begin(), cand.end(), [&](std::size_t x, std::size_t y) {
      return sim[i][x] != sim[i][y] ? sim[i][x] > sim[i][y] : x < y;
    });
    const auto keep = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cand.size()))));
    for (std::size_t r = 0; r < keep; ++r) kept.insert({std::min(i, cand[r]), std::max(i, cand[r])});
  }
  std::vector<SimilarityGraph::Edge> out;
  for (const auto& [i, j] : kept) out.push_back({i, j, sim[i][j]});
  return out;
}

inline SimilarityGraph random_similarity(crossnet::Rng& rng, std::size_t n, double density) {
  SimilarityGraph g;
  g.n = n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform() < density) g.edges.push_back({i, j, rng.uniform_open_closed()});
  return g;
}

// Bellman-Ford over edge lengths -ln(sim), then exp(-distance).
inline std::vector<double> bellman_ford_strengths(const SimilarityGraph& g, std::size_t source) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.n, inf);
  dist[source] = 0.0;
  for (std::size_t round = 0; round + 1 < g.n; ++round) {
    bool changed = false;
    for (const auto& e : g.edges) {
      const double len = -std::log(e.sim);
      if (dist[e.i] + len < dist[e.j]) dist[e.j] = dist[e.i] + len, changed = true;
      if (dist[e.j] + len < dist[e.i]) dist[e.i] = dist[e.j] + len, changed = true;
    }
    if (!changed) break;
  }
  std::vector<double> out(g.n);
  for (std::size_t i = 0; i < g.n; ++i) out[i] = std::isinf(dist[i]) ? 0.0 : std::exp(-dist[i]);
  return out;
}

}  // namespace oracle
