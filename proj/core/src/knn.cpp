#include "qcse/knn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcse {

double row_distance(const Eigen::MatrixXd& points, int i, int j) {
  double sq = 0.0;
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    const double d = points(i, c) - points(j, c);
    sq += d * d;
  }
  return std::sqrt(sq);
}

KnnResult knn_query(const Eigen::MatrixXd& points, int k) {
  const int n = static_cast<int>(points.rows());
  if (k < 1) throw std::invalid_argument("knn_query: k must be >= 1");
  if (k >= n) throw std::invalid_argument("knn_query: k must be < number of points");

  KnnResult out;
  out.dist.resize(n);
  out.index.resize(n);
  std::vector<std::pair<double, int>> cand;
  cand.reserve(n - 1);
  for (int i = 0; i < n; ++i) {
    cand.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      cand.emplace_back(row_distance(points, i, j), j);
    }
    std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.end());
    out.dist[i] = cand[k - 1].first;
    out.index[i] = cand[k - 1].second;
  }
  return out;
}

}  // namespace qcse
