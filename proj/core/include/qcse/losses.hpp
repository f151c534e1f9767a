#pragma once

#include "qcse/actor_critic.hpp"

namespace qcse {

/// Training view of sampled transitions. `actions` is used for box
/// environments, `action_idx` for discrete ones. `online` tags the sample
/// source so reward augmentation can be restricted to online data.
struct Batch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  std::vector<int> action_idx;
  Eigen::VectorXd rewards;
  Eigen::MatrixXd next_states;
  Eigen::VectorXd done;
  std::vector<std::uint8_t> online;

  Eigen::Index size() const { return states.rows(); }
};

struct CriticDiag {
  Eigen::VectorXd targets;  ///< bootstrap targets (no gradient path)
  Eigen::VectorXd q1, q2;   ///< online critic values at the batch actions
  double bellman = 0.0;
  double conservative = 0.0;
};

struct CriticLossResult {
  double loss = 0.0;
  Mlp::Grad g1, g2;
  CriticDiag diag;
};

/// Soft TD loss, averaged over the two critics:
///   y = r + gamma * (1-done) * [minQ_target(s', a') - alpha * log pi(a'|s')]
/// with the entropy term dropped for AWAC (plain expected-Q backup).
/// Next-state actions are one reparameterized draw (box) or an exact
/// expectation (discrete). Throws on non-finite targets.
CriticLossResult critic_bellman_loss(const ActorCritic& ac, const Batch& batch, Rng& rng);

/// Bellman term plus the conservative regularizer written as
///   E[ -Q(s, a) + Q(s', pi(s')) ]
/// per critic (weight cfg.conservative_weight). cfg.cql_logsumexp swaps in
/// the conventional logsumexp-over-actions form instead.
CriticLossResult cql_loss(const ActorCritic& ac, const Batch& batch, Rng& rng);

/// Bellman term plus the calibrated push-down
///   E_{a~pi}[ max(Q(s, a), V_mu(s)) ] - E_D[ Q(s, a) ],
/// with `vmu` the behavior-policy reference values aligned to the batch.
/// Throws if vmu is missing entries or non-finite.
CriticLossResult calql_loss(const ActorCritic& ac, const Batch& batch,
                            const Eigen::VectorXd& vmu, Rng& rng);

struct ActorLossResult {
  double loss = 0.0;
  Mlp::Grad grad;
  double mean_log_prob = 0.0;  ///< E[log pi]; drives optional alpha tuning
  double mean_q = 0.0;
};

/// SAC-family objective E[alpha * log pi - minQ] (critics frozen), or the
/// advantage-weighted regression objective for AWAC:
///   E[ -log pi(a|s) * clip(exp(A/lambda), weight_clip) ],
///   A = minQ(s, a) - minQ(s, pi(s)).
ActorLossResult actor_loss(const ActorCritic& ac, const Batch& batch, Rng& rng);

/// Per-algorithm critic loss dispatch used by the trainer.
CriticLossResult critic_loss_for(const ActorCritic& ac, const Batch& batch,
                                 const Eigen::VectorXd& vmu, Rng& rng);

/// Condition values for the intrinsic reward: Q mode evaluates
/// min(Q1, Q2) at the batch actions; V mode evaluates the state value
/// (exact expectation for discrete policies, mean action for box).
Eigen::VectorXd condition_values(const DoubleQ& qs, const Mlp& policy,
                                 const ActorCriticConfig& cfg, const Batch& batch,
                                 bool v_mode);

}  // namespace qcse
