#pragma once

#include <string>
#include <vector>

#include "qcse/adam.hpp"
#include "qcse/double_q.hpp"
#include "qcse/envs.hpp"
#include "qcse/heads.hpp"

namespace qcse {

enum class Algo { sac, cql, calql, awac };

std::string to_string(Algo algo);
Algo algo_from_string(const std::string& name);

struct ActorCriticConfig {
  Algo algo = Algo::sac;
  ActionKind kind = ActionKind::box;
  int state_dim = 0;
  int action_dim = 0;  ///< action count for discrete, action width for box
  std::vector<int> hidden = {64, 64, 64};
  Activation activation = Activation::relu;
  double gamma = 0.99;
  double ema_rate = 0.995;
  /// Entropy temperature of the actor objective; distinct from the EMA
  /// rate even though the source material reuses the symbol.
  double alpha_temp = 0.2;
  bool auto_alpha = false;  ///< tune alpha toward entropy -action_dim
  double lr_q = 3e-4;
  double lr_pi = 1e-4;
  double lr_alpha = 3e-4;
  /// Weight on the CQL/Cal-QL conservative term.
  double conservative_weight = 1.0;
  /// Replace the written next-state regularizer with the conventional
  /// logsumexp form (sanity-check switch).
  bool cql_logsumexp = false;
  double awac_lambda = 1.0;
  double awac_weight_clip = 100.0;
  double log_std_min = -5.0;
  double log_std_max = 2.0;

  MlpSpec policy_spec() const;
  MlpSpec critic_spec() const;
};

/// Policy, double critics, their optimizers, and the entropy temperature.
struct ActorCritic {
  ActorCriticConfig cfg;
  Mlp policy;
  DoubleQ qs;
  double log_alpha = 0.0;
  Adam opt_policy, opt_q1, opt_q2, opt_alpha;

  explicit ActorCritic(const ActorCriticConfig& cfg, Rng& init);

  double alpha() const;
  GaussianHead gaussian_head() const { return GaussianHead(policy.spec()); }

  /// Draws from the policy (stochastic) or returns its mode. Continuous
  /// actions land in (-1, 1)^d by construction.
  Eigen::VectorXd select_action_box(const Eigen::VectorXd& state, bool stochastic, Rng& rng) const;
  int select_action_discrete(const Eigen::VectorXd& state, bool stochastic, Rng& rng) const;
};

}  // namespace qcse
