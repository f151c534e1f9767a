#include "qcse/intrinsic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qcse/digamma.hpp"
#include "qcse/knn.hpp"

namespace qcse {

IntrinsicBatch qcse_intrinsic(const Eigen::MatrixXd& states,
                              const Eigen::VectorXd& condition,
                              const EntropyConfig& cfg) {
  const int n = static_cast<int>(states.rows());
  const int dim = static_cast<int>(states.cols());
  if (cfg.k < 1) throw std::invalid_argument("qcse_intrinsic: k must be >= 1");
  if (n <= cfg.k) throw std::invalid_argument("qcse_intrinsic: batch size must exceed k");
  if (cfg.duplicate_floor <= 0.0) throw std::invalid_argument("qcse_intrinsic: duplicate_floor must be > 0");

  IntrinsicBatch out;
  out.reward.resize(n);
  out.epsilon.resize(n);
  out.count.assign(n, 0);

  if (cfg.condition_mode == ConditionMode::none) {
    KnnResult knn = knn_query(states, cfg.k);
    for (int i = 0; i < n; ++i) {
      out.epsilon[i] = knn.dist[i];
      out.reward[i] = std::log(std::max(knn.dist[i], cfg.duplicate_floor));
    }
    return out;
  }

  if (condition.size() != n) {
    throw std::invalid_argument("qcse_intrinsic: condition length must equal batch size");
  }
  if (!condition.allFinite()) {
    throw std::invalid_argument("qcse_intrinsic: non-finite condition values");
  }

  std::vector<std::pair<double, int>> cand;
  cand.reserve(n - 1);
  for (int i = 0; i < n; ++i) {
    cand.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double ds = row_distance(states, i, j);
      const double dc = std::abs(condition[i] - condition[j]);
      cand.emplace_back(std::max(ds, dc), j);
    }
    std::nth_element(cand.begin(), cand.begin() + (cfg.k - 1), cand.end());
    const double eps = cand[cfg.k - 1].first;

    int count = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (std::abs(condition[i] - condition[j]) < 0.5 * eps) ++count;
    }
    out.epsilon[i] = eps;
    out.count[i] = count;
    out.reward[i] = digamma(count + 1) / dim + std::log(2.0 * std::max(eps, cfg.duplicate_floor));
  }
  return out;
}

ModifiedRewards modify_rewards(const Eigen::VectorXd& rewards,
                               const Eigen::VectorXd& intrinsic,
                               double lambda) {
  if (rewards.size() != intrinsic.size()) {
    throw std::invalid_argument("modify_rewards: size mismatch");
  }
  if (!intrinsic.allFinite()) {
    throw std::invalid_argument("modify_rewards: non-finite intrinsic rewards");
  }
  ModifiedRewards out;
  out.original = rewards;
  out.intrinsic = intrinsic;
  out.modified = rewards + lambda * intrinsic.array().tanh().matrix();
  return out;
}

double buffer_entropy_estimate(const Eigen::MatrixXd& states, int k,
                               double duplicate_floor, EntropyEstimate mode) {
  const int n = static_cast<int>(states.rows());
  const int dim = static_cast<int>(states.cols());
  if (n <= k) throw std::invalid_argument("buffer_entropy_estimate: sample size must exceed k");

  KnnResult knn = knn_query(states, k);
  double mean_log = 0.0;
  for (int i = 0; i < n; ++i) {
    mean_log += std::log(std::max(knn.dist[i], duplicate_floor));
  }
  mean_log /= n;

  if (mode == EntropyEstimate::proxy) return mean_log;

  // Kozachenko-Leonenko: psi(N) - psi(k) + log V_d + (d/N) sum log r_i with
  // V_d the Euclidean unit-ball volume.
  const double log_unit_ball =
      0.5 * dim * std::log(std::numbers::pi) - std::lgamma(0.5 * dim + 1.0);
  return digamma(n) - digamma(k) + log_unit_ball + dim * mean_log;
}

}  // namespace qcse
