#pragma once

#include <Eigen/Dense>

#include "qcse/mlp.hpp"

namespace qcse {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected adaptive-moment optimizer over a flat parameter vector.
class Adam {
 public:
  Adam(int dim, AdamConfig cfg = {});

  /// In-place update. Throws on shape mismatch or non-finite gradient
  /// entries (fail fast rather than propagate NaN into the parameters).
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

  long step_count() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

  Eigen::VectorXd m, v;  ///< moment accumulators, exposed for checkpointing
  long t_ = 0;

 private:
  AdamConfig cfg_;
};

/// Flatten-update-unflatten convenience for whole networks.
void adam_apply(Adam& opt, Mlp& net, const Mlp::Grad& grad);

}  // namespace qcse
