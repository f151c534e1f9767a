#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qcse/mlp.hpp"
#include "qcse/rng.hpp"

namespace qcse {

/// Squashed-Gaussian policy head over a raw [mean | log_std] output.
/// Actions are tanh(mean + sigma * xi) with the standard log-determinant
/// correction; log_std is clamped to the MlpSpec range (zero gradient when
/// clamped). All gradient helpers are exact for the values computed here,
/// so finite differences against them must agree.
struct GaussianSample {
  Eigen::MatrixXd action;  ///< N x A, in (-1, 1)
  Eigen::MatrixXd pre;     ///< pre-squash sample
  Eigen::MatrixXd noise;   ///< xi drawn from N(0, I)
  Eigen::VectorXd log_prob;
};

class GaussianHead {
 public:
  explicit GaussianHead(const MlpSpec& spec);

  int action_dim() const { return action_dim_; }

  GaussianSample sample(const Eigen::MatrixXd& raw, Rng& rng) const;
  /// Reuse previously drawn noise (loss evaluations must be deterministic
  /// functions of parameters given fixed noise).
  GaussianSample sample_with_noise(const Eigen::MatrixXd& raw,
                                   const Eigen::MatrixXd& noise) const;
  Eigen::MatrixXd mean_action(const Eigen::MatrixXd& raw) const;

  /// log pi(a|s) for externally given actions (clipped slightly inside the
  /// open cube before atanh).
  Eigen::VectorXd log_prob(const Eigen::MatrixXd& raw, const Eigen::MatrixXd& action) const;

  /// dL/draw given dL/dlog_prob (per sample) and dL/daction (per entry) of
  /// a reparameterized sample.
  Eigen::MatrixXd backward_sample(const Eigen::MatrixXd& raw, const GaussianSample& s,
                                  const Eigen::VectorXd& dlogp,
                                  const Eigen::MatrixXd& daction) const;

  /// dL/draw given dL/dlog_prob for log_prob() of fixed actions.
  Eigen::MatrixXd backward_log_prob(const Eigen::MatrixXd& raw, const Eigen::MatrixXd& action,
                                    const Eigen::VectorXd& dlogp) const;

 private:
  int action_dim_;
  double log_std_min_, log_std_max_;
};

/// Softmax policy head over raw logits.
class CategoricalHead {
 public:
  Eigen::MatrixXd probs(const Eigen::MatrixXd& logits) const;
  Eigen::MatrixXd log_probs(const Eigen::MatrixXd& logits) const;
  std::vector<int> sample(const Eigen::MatrixXd& logits, Rng& rng) const;
  std::vector<int> argmax(const Eigen::MatrixXd& logits) const;
};

/// Numerically stable log(1 + exp(x)).
double softplus(double x);

}  // namespace qcse
