#pragma once

// Random instance generators shared by the unit and acceptance tests.

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "crossnet/matrix.hpp"
#include "crossnet/model.hpp"
#include "crossnet/rng.hpp"

namespace testing {

using crossnet::Matrix;

inline std::vector<std::string> make_ids(std::size_t n, const std::string& prefix = "u") {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    std::string num = std::to_string(i);
    ids.push_back(prefix + std::string(5 - num.size(), '0') + num);
  }
  return ids;
}

inline Matrix random_matrix(crossnet::Rng& rng, std::size_t rows, std::size_t cols, double density = 1.0) {
  Matrix m = Matrix::Zero(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (rng.uniform() < density) m(i, j) = rng.uniform_open_closed();
  return m;
}

inline Matrix random_directed(crossnet::Rng& rng, std::size_t n, double density) {
  Matrix m = random_matrix(rng, n, n, density);
  m.diagonal().setZero();
  return m;
}

inline Matrix random_symmetric(crossnet::Rng& rng, std::size_t n) {
  Matrix m = random_matrix(rng, n, n);
  Matrix s = (m + m.transpose()) / 2.0;
  s.diagonal().setOnes();
  return s;
}

inline crossnet::MultiplexNetwork random_multiplex(crossnet::Rng& rng, std::size_t n, std::size_t p, std::size_t q,
                                                   double density = 0.3) {
  crossnet::MultiplexNetwork net;
  net.users = crossnet::UserIndex(make_ids(n));
  for (std::size_t t = 0; t < p; ++t) net.directed.push_back({"d" + std::to_string(t), random_directed(rng, n, density)});
  for (std::size_t g = 0; g < q; ++g) net.symmetric.push_back({"s" + std::to_string(g), random_symmetric(rng, n)});
  return net;
}

// Random follow graph over n users with about `avg_out` edges per user.
inline crossnet::SingleNetwork random_single(crossnet::Rng& rng, std::size_t n, double avg_out) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  const double p = avg_out / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && rng.uniform() < p) edges.emplace_back(i, j);
  return crossnet::SingleNetwork::from_edges("net", crossnet::UserIndex(make_ids(n)), edges);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("crossnet_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)}); }

}  // namespace testing

#include "crossnet/error.hpp"

namespace testing {

// Code of the crossnet::Error thrown by fn, or "" when nothing is thrown.
template <typename F>
std::string error_code_of(F&& fn) {
  try {
    fn();
  } catch (const crossnet::Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace testing
