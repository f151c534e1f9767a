#pragma once

#include <Eigen/Dense>
#include <vector>

namespace qcse {

enum class ConditionMode { none, v, q };

/// Knobs of the conditional state-entropy intrinsic reward.
struct EntropyConfig {
  /// Neighbor count; 0 means the intrinsic reward is disabled.
  int k = 15;
  /// Scale of the tanh-bounded bonus added to the task reward.
  double lambda = 1.0;
  ConditionMode condition_mode = ConditionMode::q;
  /// Distances are floored at this value before any log; offline data
  /// contains repeated states and log 0 must not occur.
  double duplicate_floor = 1e-12;

  bool enabled() const { return k > 0 && lambda != 0.0; }
};

/// Per-sample output of the conditional entropy estimator.
struct IntrinsicBatch {
  Eigen::VectorXd reward;   ///< intrinsic reward per sample
  Eigen::VectorXd epsilon;  ///< k-th neighbor radius per sample
  std::vector<int> count;   ///< neighborhood count n(i); 0 in `none` mode
};

/// Conditional state-entropy reward over one batch.
///
/// In `none` mode the condition values are ignored and the per-sample reward
/// is log of the k-th nearest state distance. In `v`/`q` modes the joint
/// metric is max(state Euclidean distance, |condition difference|); with
/// eps_i the k-th joint neighbor radius of sample i and
/// n_i = #{ j != i : |c_i - c_j| < eps_i/2 }, the reward is
///
///   psi(n_i + 1) / state_dim + log(2 * eps_i),
///
/// distances floored at cfg.duplicate_floor inside the log. Joint-neighbor
/// ties break toward the lower index. Throws if rows <= k, if the condition
/// length mismatches, or if any condition value is non-finite in v/q mode.
IntrinsicBatch qcse_intrinsic(const Eigen::MatrixXd& states,
                              const Eigen::VectorXd& condition,
                              const EntropyConfig& cfg);

struct ModifiedRewards {
  Eigen::VectorXd modified;  ///< lambda * tanh(intrinsic) + original
  Eigen::VectorXd original;  ///< retained for logging
  Eigen::VectorXd intrinsic;
};

/// Bounded reward modification: |modified - original| <= lambda always.
ModifiedRewards modify_rewards(const Eigen::VectorXd& rewards,
                               const Eigen::VectorXd& intrinsic,
                               double lambda);

enum class EntropyEstimate {
  /// (1/N) sum log ||s_i - s_i^knn||: the monitoring proxy, constants of the
  /// full estimator dropped.
  proxy,
  /// Full Kozachenko-Leonenko form with unit-ball and digamma constants;
  /// approaches the differential entropy in nats.
  kozachenko_leonenko,
};

/// kNN entropy estimate over a state sample. Throws if rows <= k.
double buffer_entropy_estimate(const Eigen::MatrixXd& states, int k,
                               double duplicate_floor = 1e-12,
                               EntropyEstimate mode = EntropyEstimate::proxy);

}  // namespace qcse
