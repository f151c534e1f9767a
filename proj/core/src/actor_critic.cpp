#include "qcse/actor_critic.hpp"

#include <cmath>
#include <stdexcept>

namespace qcse {

std::string to_string(Algo algo) {
  switch (algo) {
    case Algo::sac: return "sac";
    case Algo::cql: return "cql";
    case Algo::calql: return "calql";
    case Algo::awac: return "awac";
  }
  throw std::logic_error("to_string(Algo): unreachable");
}

Algo algo_from_string(const std::string& name) {
  if (name == "sac") return Algo::sac;
  if (name == "cql") return Algo::cql;
  if (name == "calql") return Algo::calql;
  if (name == "awac") return Algo::awac;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

MlpSpec ActorCriticConfig::policy_spec() const {
  MlpSpec s;
  s.input_dim = state_dim;
  s.hidden = hidden;
  s.activation = activation;
  if (kind == ActionKind::box) {
    s.output_dim = 2 * action_dim;
    s.head = HeadKind::gaussian;
    s.log_std_min = log_std_min;
    s.log_std_max = log_std_max;
  } else {
    s.output_dim = action_dim;
    s.head = HeadKind::linear;
  }
  return s;
}

MlpSpec ActorCriticConfig::critic_spec() const {
  MlpSpec s;
  s.hidden = hidden;
  s.activation = activation;
  s.head = HeadKind::linear;
  if (kind == ActionKind::box) {
    s.input_dim = state_dim + action_dim;
    s.output_dim = 1;
  } else {
    s.input_dim = state_dim;
    s.output_dim = action_dim;
  }
  return s;
}

ActorCritic::ActorCritic(const ActorCriticConfig& config, Rng& init)
    : cfg(config),
      policy(config.policy_spec(), init),
      qs(config.critic_spec(), init),
      opt_policy(policy.param_count(), AdamConfig{.lr = config.lr_pi}),
      opt_q1(qs.q1.param_count(), AdamConfig{.lr = config.lr_q}),
      opt_q2(qs.q2.param_count(), AdamConfig{.lr = config.lr_q}),
      opt_alpha(1, AdamConfig{.lr = config.lr_alpha}) {
  if (config.state_dim < 1 || config.action_dim < 1) {
    throw std::invalid_argument("ActorCriticConfig: state/action dims must be >= 1");
  }
  if (!(config.alpha_temp >= 0.0)) {
    throw std::invalid_argument("ActorCriticConfig: alpha_temp must be >= 0");
  }
  qs.ema_rate = config.ema_rate;
  qs.gamma = config.gamma;
  log_alpha = std::log(std::max(config.alpha_temp, 1e-12));
}

double ActorCritic::alpha() const {
  return cfg.auto_alpha ? std::exp(log_alpha) : cfg.alpha_temp;
}

Eigen::VectorXd ActorCritic::select_action_box(const Eigen::VectorXd& state, bool stochastic,
                                               Rng& rng) const {
  if (state.size() != cfg.state_dim) {
    throw std::invalid_argument("select_action: state dimension mismatch");
  }
  const Eigen::MatrixXd raw = policy.forward(state.transpose());
  const GaussianHead head = gaussian_head();
  if (!stochastic) return head.mean_action(raw).row(0);
  return head.sample(raw, rng).action.row(0);
}

int ActorCritic::select_action_discrete(const Eigen::VectorXd& state, bool stochastic,
                                        Rng& rng) const {
  if (state.size() != cfg.state_dim) {
    throw std::invalid_argument("select_action: state dimension mismatch");
  }
  const Eigen::MatrixXd logits = policy.forward(state.transpose());
  CategoricalHead head;
  return stochastic ? head.sample(logits, rng)[0] : head.argmax(logits)[0];
}

}  // namespace qcse
