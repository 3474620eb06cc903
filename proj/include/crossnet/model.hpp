#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crossnet/matrix.hpp"

namespace crossnet {

// Bijection between external user ids and dense ordinals [0, n).
// Ordinals follow lexicographic order of the ids.
class UserIndex {
 public:
  UserIndex() = default;
  // Deduplicates and sorts `ids`.
  explicit UserIndex(std::vector<std::string> ids);

  std::size_t size() const noexcept { return ids_.size(); }
  const std::string& id(std::size_t ordinal) const { return ids_.at(ordinal); }
  std::optional<std::size_t> find(std::string_view id) const;
  std::size_t ordinal(std::string_view id) const;  // throws UnknownUser
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  bool operator==(const UserIndex& other) const { return ids_ == other.ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

struct Layer {
  std::string label;
  Matrix weights;
};

// Overlapping-user hybrid network: p directed layers A^(t) and q symmetric
// similarity layers X^(g) over one shared user index.
struct MultiplexNetwork {
  UserIndex users;
  std::vector<Layer> directed;
  std::vector<Layer> symmetric;

  std::size_t n() const noexcept { return users.size(); }
  std::size_t p() const noexcept { return directed.size(); }
  std::size_t q() const noexcept { return symmetric.size(); }

  // Throws Data errors on shape, sign or symmetry violations.
  void validate() const;
};

// One social network's follow graph. Directed, no self-loops.
struct SingleNetwork {
  std::string label;
  UserIndex users;
  std::vector<std::vector<std::size_t>> out_edges;  // sorted, unique

  std::size_t n() const noexcept { return users.size(); }
  std::size_t edge_count() const;

  // Builds from (src, dst) ordinal pairs; drops duplicates and self-loops.
  static SingleNetwork from_edges(std::string label, UserIndex users,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& edges);
};

inline constexpr int kUnassigned = -1;

// Soft membership plus hard labels. A label of kUnassigned marks a row that
// was all-zero.
struct CommunityAssignment {
  Matrix membership;
  std::vector<int> labels;
  std::size_t k = 0;

  std::size_t n() const noexcept { return labels.size(); }

  // Row-normalizes `membership` and hardens it.
  static CommunityAssignment from_membership(const Matrix& membership);
  // One-hot membership.
  static CommunityAssignment from_labels(const std::vector<int>& labels, std::size_t k);
};

// Argmax per row, ties to the smallest index, all-zero rows -> kUnassigned.
std::vector<int> harden(const Matrix& membership);

// Members of each community, in ascending ordinal order.
std::vector<std::vector<std::size_t>> groups(const std::vector<int>& labels, std::size_t k);

}  // namespace crossnet
