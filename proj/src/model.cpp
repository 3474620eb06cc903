#include "crossnet/model.hpp"

#include <algorithm>
#include <cmath>

#include "crossnet/error.hpp"

namespace crossnet {

RowNormalizer row_normalizer(const Matrix& m, double epsilon) {
  RowNormalizer out;
  out.diagonal = Vector::Zero(m.rows());
  out.degenerate.assign(static_cast<std::size_t>(m.rows()), false);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double sum = m.row(i).sum();
    if (sum > epsilon) {
      out.diagonal(i) = 1.0 / sum;
    } else {
      out.degenerate[static_cast<std::size_t>(i)] = true;
    }
  }
  return out;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

bool all_nonnegative(const Matrix& m) { return (m.array() >= 0.0).all(); }

UserIndex::UserIndex(std::vector<std::string> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  lookup_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) lookup_.emplace(ids_[i], i);
}

std::optional<std::size_t> UserIndex::find(std::string_view id) const {
  auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t UserIndex::ordinal(std::string_view id) const {
  if (auto found = find(id)) return *found;
  fail(ErrorKind::Data, "UnknownUser", "user id '" + std::string(id) + "' is not in the user index");
}

void MultiplexNetwork::validate() const {
  if (directed.empty() && symmetric.empty()) {
    fail(ErrorKind::Data, "NoLayers", "multiplex network has no layers");
  }
  const auto n_rows = static_cast<Eigen::Index>(n());
  auto check = [&](const Layer& layer, bool must_be_symmetric) {
    const Matrix& m = layer.weights;
    if (m.rows() != n_rows || m.cols() != n_rows) {
      fail(ErrorKind::Data, "DimensionMismatch", "layer '" + layer.label + "' is not n x n");
    }
    if (!all_finite(m)) fail(ErrorKind::Data, "NonFinite", "layer '" + layer.label + "' has non-finite entries");
    if (!all_nonnegative(m)) fail(ErrorKind::Data, "NegativeWeight", "layer '" + layer.label + "' has negative entries");
    if (must_be_symmetric && m != m.transpose()) {
      fail(ErrorKind::Data, "AsymmetricInput", "layer '" + layer.label + "' is not symmetric");
    }
  };
  for (const auto& layer : directed) check(layer, false);
  for (const auto& layer : symmetric) check(layer, true);
}

std::size_t SingleNetwork::edge_count() const {
  std::size_t total = 0;
  for (const auto& row : out_edges) total += row.size();
  return total;
}

SingleNetwork SingleNetwork::from_edges(std::string label, UserIndex users,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  SingleNetwork net;
  net.label = std::move(label);
  net.out_edges.resize(users.size());
  for (const auto& [src, dst] : edges) {
    if (src >= users.size() || dst >= users.size()) {
      fail(ErrorKind::Data, "UnknownUser", "edge endpoint out of range in network '" + net.label + "'");
    }
    if (src == dst) continue;
    net.out_edges[src].push_back(dst);
  }
  for (auto& row : net.out_edges) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  net.users = std::move(users);
  return net;
}

std::vector<int> harden(const Matrix& membership) {
  std::vector<int> labels(static_cast<std::size_t>(membership.rows()), kUnassigned);
  for (Eigen::Index i = 0; i < membership.rows(); ++i) {
    double best = 0.0;
    for (Eigen::Index j = 0; j < membership.cols(); ++j) {
      if (membership(i, j) > best) {
        best = membership(i, j);
        labels[static_cast<std::size_t>(i)] = static_cast<int>(j);
      }
    }
  }
  return labels;
}

CommunityAssignment CommunityAssignment::from_membership(const Matrix& membership) {
  CommunityAssignment a;
  a.membership = normalize_rows(membership);
  a.labels = harden(a.membership);
  a.k = static_cast<std::size_t>(membership.cols());
  return a;
}

CommunityAssignment CommunityAssignment::from_labels(const std::vector<int>& labels, std::size_t k) {
  CommunityAssignment a;
  a.k = k;
  a.labels = labels;
  a.membership = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kUnassigned) continue;
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k) {
      fail(ErrorKind::Data, "LabelOutOfRange", "label " + std::to_string(labels[i]) + " outside [0, k)");
    }
    a.membership(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return a;
}

std::vector<std::vector<std::size_t>> groups(const std::vector<int>& labels, std::size_t k) {
  std::vector<std::vector<std::size_t>> out(k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0 && static_cast<std::size_t>(labels[i]) < k) out[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  return out;
}

}  // namespace crossnet
