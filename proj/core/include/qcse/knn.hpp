#pragma once

#include <Eigen/Dense>
#include <vector>

namespace qcse {

struct KnnResult {
  /// Distance from point i to its k-th nearest other point.
  Eigen::VectorXd dist;
  /// Index of that neighbor.
  std::vector<int> index;
};

/// Euclidean distance between rows i and j, accumulated in column order so
/// every caller (including test oracles) reproduces the same bits.
double row_distance(const Eigen::MatrixXd& points, int i, int j);

/// k-th nearest neighbor of each row among the other rows, Euclidean
/// metric, ties broken toward the lower index. Brute force: batches in this
/// project are a few hundred rows. Throws if k < 1 or k >= row count.
KnnResult knn_query(const Eigen::MatrixXd& points, int k);

}  // namespace qcse
