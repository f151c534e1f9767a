#pragma once

#include "qcse/mlp.hpp"

namespace qcse {

/// Two critics plus their EMA target pair. Every bootstrap target and every
/// conditioning query must go through the min-combining helpers; the
/// counters let tests assert that no single-critic path sneaks in.
struct DoubleQ {
  Mlp q1, q2, t1, t2;
  /// Weight kept on the target per update: t <- (1-ema_rate)*online + ema_rate*t.
  double ema_rate = 0.995;
  double gamma = 0.99;

  DoubleQ(const MlpSpec& critic_spec, Rng& init);

  void ema_update();

  /// Elementwise min of two online-critic outputs.
  Eigen::MatrixXd min_online(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const;
  /// Elementwise min of two target-critic outputs.
  Eigen::MatrixXd min_target(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const;

  mutable long min_online_queries = 0;
  mutable long min_target_queries = 0;
};

}  // namespace qcse
