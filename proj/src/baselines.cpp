#include "crossnet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "crossnet/error.hpp"
#include "crossnet/rng.hpp"

namespace crossnet {

namespace {

Matrix random_factor(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform_open_closed();
  return m;
}

void check_finite(const Matrix& m) {
  if (!m.allFinite()) fail(ErrorKind::Numerical, "NumericalBlowup", "non-finite factor entries");
}

bool converged(double previous, double current, double tol) {
  const double change = previous > 0.0 ? std::abs(previous - current) / previous : 0.0;
  return change < tol;
}

void require_k(std::size_t k) {
  if (k < 2) fail(ErrorKind::Usage, "InvalidConfig", "k must be >= 2");
}

}  // namespace

FusedNetwork fuse(const MultiplexNetwork& net, const FusionOptions& options) {
  const auto weight = [](const std::vector<double>& w, std::size_t i) { return w.empty() ? 1.0 : w.at(i); };
  if (!options.directed_weights.empty() && options.directed_weights.size() != net.p()) {
    fail(ErrorKind::Usage, "InvalidConfig", "one fusion weight per directed layer");
  }
  if (!options.symmetric_weights.empty() && options.symmetric_weights.size() != net.q()) {
    fail(ErrorKind::Usage, "InvalidConfig", "one fusion weight per symmetric layer");
  }
  FusedNetwork fn;
  fn.n = net.n();
  const auto n = static_cast<Eigen::Index>(net.n());
  fn.fused = Matrix::Zero(n, n);
  for (std::size_t t = 0; t < net.p(); ++t) {
    const Matrix& a = net.directed[t].weights;
    fn.fused += weight(options.directed_weights, t) * 0.5 * (a + a.transpose());
  }
  if (options.include_symmetric) {
    for (std::size_t g = 0; g < net.q(); ++g) fn.fused += weight(options.symmetric_weights, g) * net.symmetric[g].weights;
  }
  return fn;
}

std::vector<Matrix> symmetric_views(const MultiplexNetwork& net, bool include_symmetric) {
  std::vector<Matrix> views;
  for (const auto& layer : net.directed) views.push_back(0.5 * (layer.weights + layer.weights.transpose()));
  if (include_symmetric)
    for (const auto& layer : net.symmetric) views.push_back(layer.weights);
  return views;
}

BaselineResult kmeans_baseline(const FusedNetwork& fn, std::size_t k, std::uint64_t seed, std::size_t max_iter) {
  require_k(k);
  const Matrix& x = fn.fused;
  const auto n = static_cast<std::size_t>(x.rows());

  {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto row_less = [&](std::size_t a, std::size_t b) {
      for (Eigen::Index j = 0; j < x.cols(); ++j)
        if (x(a, j) != x(b, j)) return x(a, j) < x(b, j);
      return false;
    };
    std::sort(order.begin(), order.end(), row_less);
    std::size_t distinct = n ? 1 : 0;
    for (std::size_t i = 1; i < n; ++i) distinct += row_less(order[i - 1], order[i]) ? 1 : 0;
    if (distinct < k) fail(ErrorKind::Data, "DegenerateData", "fewer distinct rows than clusters");
  }

  Rng rng(seed);
  Matrix centers(static_cast<Eigen::Index>(k), x.cols());
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t first = static_cast<std::size_t>(rng.below(n));
  centers.row(0) = x.row(static_cast<Eigen::Index>(first));
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], (x.row(static_cast<Eigen::Index>(i)) - centers.row(static_cast<Eigen::Index>(c - 1))).squaredNorm());
      total += nearest[i];
    }
    double target = rng.uniform() * total;
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (nearest[i] <= 0.0) continue;
      if (target < nearest[i]) {
        pick = i;
        break;
      }
      target -= nearest[i];
      pick = i;
    }
    centers.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(pick));
  }

  std::vector<int> labels(n, -1);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = (x.row(static_cast<Eigen::Index>(i)) - centers.row(static_cast<Eigen::Index>(c))).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      dist[i] = best_d;
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(static_cast<Eigen::Index>(k), x.cols());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(labels[i]) += x.row(static_cast<Eigen::Index>(i));
      ++counts[static_cast<std::size_t>(labels[i])];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers.row(static_cast<Eigen::Index>(c)) = sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(counts[c]);
      } else {
        // Re-seed an empty cluster at the point farthest from its center.
        const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
        centers.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(far));
        dist[far] = 0.0;
      }
    }
  }

  BaselineResult result;
  result.assignment = CommunityAssignment::from_labels(labels, k);
  result.converged = true;
  return result;
}

BaselineResult concat_nmf(const FusedNetwork& fn, std::size_t k, std::uint64_t seed, const NmfOptions& options) {
  require_k(k);
  Rng rng(seed);
  const Matrix& f = fn.fused;
  Matrix w = random_factor(rng, f.rows(), static_cast<Eigen::Index>(k));
  auto objective = [&] { return (f - w * w.transpose()).squaredNorm(); };

  BaselineResult result;
  double previous = objective();
  result.objective_per_iter.push_back(previous);
  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    const Matrix numerator = f * w;
    const Matrix denominator = w * (w.transpose() * w);
    w.array() *= (numerator.array() / (denominator.array() + options.epsilon)).sqrt();
    w = w.cwiseMax(options.floor);
    check_finite(w);
    const double current = objective();
    result.objective_per_iter.push_back(current);
    const bool done = converged(previous, current, options.rel_tol);
    previous = current;
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.assignment = CommunityAssignment::from_membership(w);
  return result;
}

double col_nmf_objective(const std::vector<Matrix>& views, const std::vector<Matrix>& U, const Matrix& S,
                         const std::vector<double>& lambda) {
  double total = 0.0;
  for (std::size_t v = 0; v < views.size(); ++v) total += lambda[v] * (views[v] - U[v] * S.transpose()).squaredNorm();
  return total;
}

BaselineResult col_nmf(const std::vector<Matrix>& views, std::size_t k, const std::vector<double>& lambda,
                       std::uint64_t seed, const NmfOptions& options) {
  require_k(k);
  if (views.empty() || lambda.size() != views.size()) fail(ErrorKind::Usage, "InvalidConfig", "one lambda per view required");
  Rng rng(seed);
  const Eigen::Index n = views[0].rows();
  const auto kk = static_cast<Eigen::Index>(k);
  std::vector<Matrix> U;
  for (std::size_t v = 0; v < views.size(); ++v) U.push_back(random_factor(rng, n, kk));
  Matrix S = random_factor(rng, n, kk);

  BaselineResult result;
  double previous = col_nmf_objective(views, U, S, lambda);
  result.objective_per_iter.push_back(previous);
  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    const Matrix sts = S.transpose() * S;
    for (std::size_t v = 0; v < views.size(); ++v) {
      const Matrix numerator = views[v] * S;
      const Matrix denominator = U[v] * sts;
      U[v].array() *= numerator.array() / (denominator.array() + options.epsilon);
      U[v] = U[v].cwiseMax(options.floor);
      check_finite(U[v]);
    }
    Matrix numerator = Matrix::Zero(n, kk);
    Matrix gram = Matrix::Zero(kk, kk);
    for (std::size_t v = 0; v < views.size(); ++v) {
      numerator.noalias() += lambda[v] * (views[v].transpose() * U[v]);
      gram.noalias() += lambda[v] * (U[v].transpose() * U[v]);
    }
    const Matrix denominator = S * gram;
    S.array() *= numerator.array() / (denominator.array() + options.epsilon);
    S = S.cwiseMax(options.floor);
    check_finite(S);

    const double current = col_nmf_objective(views, U, S, lambda);
    result.objective_per_iter.push_back(current);
    const bool done = converged(previous, current, options.rel_tol);
    previous = current;
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.assignment = CommunityAssignment::from_membership(S);
  return result;
}

Matrix consensus(const std::vector<Matrix>& V, const std::vector<double>& lambda) {
  double total = 0.0;
  Matrix s = Matrix::Zero(V.at(0).rows(), V.at(0).cols());
  for (std::size_t v = 0; v < V.size(); ++v) {
    s += lambda[v] * V[v];
    total += lambda[v];
  }
  if (total <= 0.0) fail(ErrorKind::Usage, "InvalidConfig", "consensus weights must not all be zero");
  return s / total;
}

double multi_nmf_objective(const std::vector<Matrix>& views, const std::vector<Matrix>& U,
                           const std::vector<Matrix>& V, const Matrix& S, const std::vector<double>& lambda) {
  double total = 0.0;
  for (std::size_t v = 0; v < views.size(); ++v) {
    total += (views[v] - U[v] * V[v].transpose()).squaredNorm() + lambda[v] * (V[v] - S).squaredNorm();
  }
  return total;
}

BaselineResult multi_nmf(const std::vector<Matrix>& views, std::size_t k, const std::vector<double>& lambda,
                         std::uint64_t seed, const NmfOptions& options) {
  require_k(k);
  if (views.empty() || lambda.size() != views.size()) fail(ErrorKind::Usage, "InvalidConfig", "one lambda per view required");
  Rng rng(seed);
  const Eigen::Index n = views[0].rows();
  const auto kk = static_cast<Eigen::Index>(k);
  std::vector<Matrix> U, V;
  for (std::size_t v = 0; v < views.size(); ++v) {
    U.push_back(random_factor(rng, n, kk));
    V.push_back(random_factor(rng, n, kk));
  }
  Matrix S = consensus(V, lambda);

  BaselineResult result;
  double previous = multi_nmf_objective(views, U, V, S, lambda);
  result.objective_per_iter.push_back(previous);
  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    for (std::size_t v = 0; v < views.size(); ++v) {
      {
        const Matrix numerator = views[v] * V[v];
        const Matrix denominator = U[v] * (V[v].transpose() * V[v]);
        U[v].array() *= numerator.array() / (denominator.array() + options.epsilon);
        U[v] = U[v].cwiseMax(options.floor);
        check_finite(U[v]);
      }
      {
        const Matrix numerator = views[v].transpose() * U[v] + lambda[v] * S;
        const Matrix denominator = V[v] * (U[v].transpose() * U[v]) + lambda[v] * V[v];
        V[v].array() *= numerator.array() / (denominator.array() + options.epsilon);
        V[v] = V[v].cwiseMax(options.floor);
        check_finite(V[v]);
      }
    }
    S = consensus(V, lambda);

    const double current = multi_nmf_objective(views, U, V, S, lambda);
    result.objective_per_iter.push_back(current);
    const bool done = converged(previous, current, options.rel_tol);
    previous = current;
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.assignment = CommunityAssignment::from_membership(S);
  return result;
}

CommunityAssignment random_assignment(std::size_t n, std::size_t k, std::uint64_t seed) {
  require_k(k);
  Rng rng(seed);
  std::vector<int> labels(n);
  for (auto& label : labels) label = static_cast<int>(rng.below(k));
  return CommunityAssignment::from_labels(labels, k);
}

}  // namespace crossnet
