#pragma once

#include <Eigen/Dense>
#include <vector>

namespace crossnet {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Diagonal of a row-normalizing matrix (Q or R): entry i is 1 / (row sum i),
// or 0 when the row sum is at most `epsilon` (the row is then degenerate).
struct RowNormalizer {
  Vector diagonal;
  std::vector<bool> degenerate;

  Matrix apply(const Matrix& m) const { return diagonal.asDiagonal() * m; }
};

RowNormalizer row_normalizer(const Matrix& m, double epsilon = 1e-12);

inline Matrix normalize_rows(const Matrix& m, double epsilon = 1e-12) {
  return row_normalizer(m, epsilon).apply(m);
}

bool all_finite(const Matrix& m);
bool all_nonnegative(const Matrix& m);

}  // namespace crossnet
