#include "qcse/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace qcse {

namespace {

Eigen::MatrixXd hcat(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

void check_batch(const ActorCritic& ac, const Batch& batch) {
  const auto n = batch.size();
  if (n < 1) throw std::invalid_argument("loss: empty batch");
  if (batch.states.cols() != ac.cfg.state_dim || batch.next_states.cols() != ac.cfg.state_dim) {
    throw std::invalid_argument("loss: state dimension mismatch");
  }
  if (batch.rewards.size() != n || batch.done.size() != n) {
    throw std::invalid_argument("loss: reward/done length mismatch");
  }
  if (ac.cfg.kind == ActionKind::box) {
    if (batch.actions.rows() != n || batch.actions.cols() != ac.cfg.action_dim) {
      throw std::invalid_argument("loss: action shape mismatch");
    }
  } else if (static_cast<Eigen::Index>(batch.action_idx.size()) != n) {
    throw std::invalid_argument("loss: action index length mismatch");
  }
}

/// Shared data-side forward plus bootstrap targets.
struct BellmanCore {
  Eigen::VectorXd y;
  Mlp::Cache c1, c2;
  Eigen::MatrixXd out1, out2;  ///< raw critic outputs at the data states
  Eigen::VectorXd q1, q2;      ///< critic values at the batch actions
};

BellmanCore bellman_core(const ActorCritic& ac, const Batch& batch, Rng& rng) {
  check_batch(ac, batch);
  const auto n = batch.size();
  const bool soft = ac.cfg.algo != Algo::awac;  // AWAC backs up plain expected Q
  const double alpha = ac.alpha();

  BellmanCore core;
  Eigen::VectorXd next_v(n);
  if (ac.cfg.kind == ActionKind::box) {
    const Eigen::MatrixXd raw = ac.policy.forward(batch.next_states);
    const GaussianSample next_a = ac.gaussian_head().sample(raw, rng);
    const Eigen::MatrixXd tin = hcat(batch.next_states, next_a.action);
    const Eigen::MatrixXd tmin = ac.qs.min_target(ac.qs.t1.forward(tin), ac.qs.t2.forward(tin));
    next_v = tmin.col(0);
    if (soft) next_v -= alpha * next_a.log_prob;

    const Eigen::MatrixXd in = hcat(batch.states, batch.actions);
    core.out1 = ac.qs.q1.forward(in, core.c1);
    core.out2 = ac.qs.q2.forward(in, core.c2);
    core.q1 = core.out1.col(0);
    core.q2 = core.out2.col(0);
  } else {
    const Eigen::MatrixXd logits = ac.policy.forward(batch.next_states);
    CategoricalHead head;
    const Eigen::MatrixXd probs = head.probs(logits);
    const Eigen::MatrixXd log_probs = head.log_probs(logits);
    const Eigen::MatrixXd tmin = ac.qs.min_target(ac.qs.t1.forward(batch.next_states),
                                                  ac.qs.t2.forward(batch.next_states));
    for (Eigen::Index i = 0; i < n; ++i) {
      double v = 0.0;
      for (Eigen::Index a = 0; a < tmin.cols(); ++a) {
        v += probs(i, a) * (tmin(i, a) - (soft ? alpha * log_probs(i, a) : 0.0));
      }
      next_v[i] = v;
    }
    core.out1 = ac.qs.q1.forward(batch.states, core.c1);
    core.out2 = ac.qs.q2.forward(batch.states, core.c2);
    core.q1.resize(n);
    core.q2.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      core.q1[i] = core.out1(i, batch.action_idx[i]);
      core.q2[i] = core.out2(i, batch.action_idx[i]);
    }
  }
  core.y = batch.rewards.array() +
           ac.cfg.gamma * (1.0 - batch.done.array()) * next_v.array();
  if (!core.y.allFinite()) throw std::runtime_error("critic loss: non-finite targets");
  return core;
}

/// dLoss/d(raw critic output) for the Bellman term, one critic.
Eigen::MatrixXd bellman_dout(const ActorCritic& ac, const Batch& batch,
                             const BellmanCore& core, const Eigen::VectorXd& qv) {
  const auto n = batch.size();
  Eigen::MatrixXd dout = Eigen::MatrixXd::Zero(core.out1.rows(), core.out1.cols());
  if (ac.cfg.kind == ActionKind::box) {
    dout.col(0) = (qv - core.y) / static_cast<double>(n);
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      dout(i, batch.action_idx[i]) = (qv[i] - core.y[i]) / static_cast<double>(n);
    }
  }
  return dout;
}

double bellman_value(const BellmanCore& core) {
  const double n = static_cast<double>(core.y.size());
  return 0.5 * ((core.q1 - core.y).squaredNorm() / n + (core.q2 - core.y).squaredNorm() / n);
}

}  // namespace

CriticLossResult critic_bellman_loss(const ActorCritic& ac, const Batch& batch, Rng& rng) {
  BellmanCore core = bellman_core(ac, batch, rng);
  CriticLossResult res;
  res.diag.bellman = bellman_value(core);
  res.loss = res.diag.bellman;
  res.g1 = ac.qs.q1.backward(core.c1, bellman_dout(ac, batch, core, core.q1));
  res.g2 = ac.qs.q2.backward(core.c2, bellman_dout(ac, batch, core, core.q2));
  res.diag.targets = core.y;
  res.diag.q1 = core.q1;
  res.diag.q2 = core.q2;
  return res;
}

CriticLossResult cql_loss(const ActorCritic& ac, const Batch& batch, Rng& rng) {
  // Weight zero must reproduce the plain Bellman update exactly, including
  // the rng draw sequence.
  if (ac.cfg.conservative_weight == 0.0) return critic_bellman_loss(ac, batch, rng);
  BellmanCore core = bellman_core(ac, batch, rng);
  const auto n = batch.size();
  const double w = ac.cfg.conservative_weight;
  const double scale = w / (2.0 * static_cast<double>(n));

  Eigen::MatrixXd dout1 = bellman_dout(ac, batch, core, core.q1);
  Eigen::MatrixXd dout2 = bellman_dout(ac, batch, core, core.q2);
  double reg = 0.0;

  CriticLossResult res;
  if (!ac.cfg.cql_logsumexp) {
    // As written: push down Q(s', pi(s')), push up Q(s, a) from the data.
    if (ac.cfg.kind == ActionKind::box) {
      const Eigen::MatrixXd raw = ac.policy.forward(batch.next_states);
      const GaussianSample pa = ac.gaussian_head().sample(raw, rng);
      const Eigen::MatrixXd in = hcat(batch.next_states, pa.action);
      Mlp::Cache cr1, cr2;
      const Eigen::VectorXd v1 = ac.qs.q1.forward(in, cr1).col(0);
      const Eigen::VectorXd v2 = ac.qs.q2.forward(in, cr2).col(0);
      reg = 0.5 * ((v1.mean() - core.q1.mean()) + (v2.mean() - core.q2.mean()));
      Eigen::MatrixXd dr = Eigen::MatrixXd::Constant(n, 1, scale);
      res.g1 = ac.qs.q1.backward(cr1, dr);
      res.g2 = ac.qs.q2.backward(cr2, dr);
    } else {
      CategoricalHead head;
      const Eigen::MatrixXd probs = head.probs(ac.policy.forward(batch.next_states));
      Mlp::Cache cr1, cr2;
      const Eigen::MatrixXd v1 = ac.qs.q1.forward(batch.next_states, cr1);
      const Eigen::MatrixXd v2 = ac.qs.q2.forward(batch.next_states, cr2);
      reg = 0.5 * ((probs.cwiseProduct(v1).sum() - core.q1.sum()) +
                   (probs.cwiseProduct(v2).sum() - core.q2.sum())) /
            static_cast<double>(n);
      res.g1 = ac.qs.q1.backward(cr1, scale * probs);
      res.g2 = ac.qs.q2.backward(cr2, scale * probs);
    }
    // Push-up of the data actions rides on the Bellman caches.
    if (ac.cfg.kind == ActionKind::box) {
      dout1.col(0).array() -= scale;
      dout2.col(0).array() -= scale;
    } else {
      for (Eigen::Index i = 0; i < n; ++i) {
        dout1(i, batch.action_idx[i]) -= scale;
        dout2(i, batch.action_idx[i]) -= scale;
      }
    }
  } else if (ac.cfg.kind == ActionKind::discrete) {
    // Conventional variant: logsumexp over actions at the data states.
    double lse_sum1 = 0.0, lse_sum2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m1 = core.out1.row(i).maxCoeff();
      const double m2 = core.out2.row(i).maxCoeff();
      const Eigen::ArrayXd e1 = (core.out1.row(i).array() - m1).exp();
      const Eigen::ArrayXd e2 = (core.out2.row(i).array() - m2).exp();
      lse_sum1 += m1 + std::log(e1.sum());
      lse_sum2 += m2 + std::log(e2.sum());
      dout1.row(i).array() += scale * (e1 / e1.sum()).transpose();
      dout2.row(i).array() += scale * (e2 / e2.sum()).transpose();
      dout1(i, batch.action_idx[i]) -= scale;
      dout2(i, batch.action_idx[i]) -= scale;
    }
    reg = 0.5 * ((lse_sum1 - core.q1.sum()) + (lse_sum2 - core.q2.sum())) / static_cast<double>(n);
    res.g1 = ac.qs.q1.zero_grad();
    res.g2 = ac.qs.q2.zero_grad();
  } else {
    // Conventional variant, box actions: importance-weighted logsumexp over
    // uniform proposals on [-1,1]^d.
    const int m_samples = 8;
    const double log_vol_term = ac.cfg.action_dim * std::log(2.0) - std::log(double(m_samples));
    Eigen::MatrixXd vals(n, m_samples);
    std::vector<Mlp::Cache> caches1(m_samples), caches2(m_samples);
    Eigen::MatrixXd vals2(n, m_samples);
    for (int m = 0; m < m_samples; ++m) {
      Eigen::MatrixXd a(n, ac.cfg.action_dim);
      for (Eigen::Index i = 0; i < n; ++i)
        for (int d = 0; d < ac.cfg.action_dim; ++d) a(i, d) = rng.uniform(-1.0, 1.0);
      const Eigen::MatrixXd in = hcat(batch.states, a);
      vals.col(m) = ac.qs.q1.forward(in, caches1[m]).col(0);
      vals2.col(m) = ac.qs.q2.forward(in, caches2[m]).col(0);
    }
    res.g1 = ac.qs.q1.zero_grad();
    res.g2 = ac.qs.q2.zero_grad();
    double lse_sum1 = 0.0, lse_sum2 = 0.0;
    Eigen::MatrixXd w1(n, m_samples), w2(n, m_samples);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m1 = vals.row(i).maxCoeff();
      const double m2 = vals2.row(i).maxCoeff();
      const Eigen::ArrayXd e1 = (vals.row(i).array() - m1).exp();
      const Eigen::ArrayXd e2 = (vals2.row(i).array() - m2).exp();
      lse_sum1 += m1 + std::log(e1.sum()) + log_vol_term;
      lse_sum2 += m2 + std::log(e2.sum()) + log_vol_term;
      w1.row(i) = (e1 / e1.sum()).transpose();
      w2.row(i) = (e2 / e2.sum()).transpose();
    }
    for (int m = 0; m < m_samples; ++m) {
      Mlp::Grad gm1 = ac.qs.q1.backward(caches1[m], scale * w1.col(m));
      Mlp::Grad gm2 = ac.qs.q2.backward(caches2[m], scale * w2.col(m));
      Mlp::accumulate(res.g1, gm1);
      Mlp::accumulate(res.g2, gm2);
    }
    reg = 0.5 * ((lse_sum1 - core.q1.sum()) + (lse_sum2 - core.q2.sum())) / static_cast<double>(n);
    dout1.col(0).array() -= scale;
    dout2.col(0).array() -= scale;
  }

  Mlp::accumulate(res.g1, ac.qs.q1.backward(core.c1, dout1));
  Mlp::accumulate(res.g2, ac.qs.q2.backward(core.c2, dout2));
  res.diag.bellman = bellman_value(core);
  res.diag.conservative = w * reg;
  res.loss = res.diag.bellman + res.diag.conservative;
  res.diag.targets = core.y;
  res.diag.q1 = core.q1;
  res.diag.q2 = core.q2;
  return res;
}

CriticLossResult calql_loss(const ActorCritic& ac, const Batch& batch,
                            const Eigen::VectorXd& vmu, Rng& rng) {
  if (ac.cfg.conservative_weight == 0.0) return critic_bellman_loss(ac, batch, rng);
  if (vmu.size() != batch.size()) {
    throw std::invalid_argument("calql_loss: missing reference values for batch states");
  }
  if (!vmu.allFinite()) throw std::invalid_argument("calql_loss: non-finite reference values");

  BellmanCore core = bellman_core(ac, batch, rng);
  const auto n = batch.size();
  const double w = ac.cfg.conservative_weight;
  const double scale = w / (2.0 * static_cast<double>(n));

  Eigen::MatrixXd dout1 = bellman_dout(ac, batch, core, core.q1);
  Eigen::MatrixXd dout2 = bellman_dout(ac, batch, core, core.q2);
  double cal = 0.0;

  CriticLossResult res;
  if (ac.cfg.kind == ActionKind::box) {
    const Eigen::MatrixXd raw = ac.policy.forward(batch.states);
    const GaussianSample pa = ac.gaussian_head().sample(raw, rng);
    const Eigen::MatrixXd in = hcat(batch.states, pa.action);
    Mlp::Cache cr1, cr2;
    const Eigen::VectorXd v1 = ac.qs.q1.forward(in, cr1).col(0);
    const Eigen::VectorXd v2 = ac.qs.q2.forward(in, cr2).col(0);
    Eigen::MatrixXd dr1 = Eigen::MatrixXd::Zero(n, 1);
    Eigen::MatrixXd dr2 = Eigen::MatrixXd::Zero(n, 1);
    double term = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      // max(Q, V_mu): gradient only through the active Q branch.
      term += std::max(v1[i], vmu[i]) + std::max(v2[i], vmu[i]);
      if (v1[i] > vmu[i]) dr1(i, 0) = scale;
      if (v2[i] > vmu[i]) dr2(i, 0) = scale;
    }
    cal = 0.5 * term / static_cast<double>(n) - 0.5 * (core.q1.mean() + core.q2.mean());
    res.g1 = ac.qs.q1.backward(cr1, dr1);
    res.g2 = ac.qs.q2.backward(cr2, dr2);
    dout1.col(0).array() -= scale;
    dout2.col(0).array() -= scale;
  } else {
    CategoricalHead head;
    const Eigen::MatrixXd probs = head.probs(ac.policy.forward(batch.states));
    double term = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index a = 0; a < core.out1.cols(); ++a) {
        term += probs(i, a) * (std::max(core.out1(i, a), vmu[i]) + std::max(core.out2(i, a), vmu[i]));
        if (core.out1(i, a) > vmu[i]) dout1(i, a) += scale * probs(i, a);
        if (core.out2(i, a) > vmu[i]) dout2(i, a) += scale * probs(i, a);
      }
      dout1(i, batch.action_idx[i]) -= scale;
      dout2(i, batch.action_idx[i]) -= scale;
    }
    cal = 0.5 * term / static_cast<double>(n) - 0.5 * (core.q1.mean() + core.q2.mean());
    res.g1 = ac.qs.q1.zero_grad();
    res.g2 = ac.qs.q2.zero_grad();
  }

  Mlp::accumulate(res.g1, ac.qs.q1.backward(core.c1, dout1));
  Mlp::accumulate(res.g2, ac.qs.q2.backward(core.c2, dout2));
  res.diag.bellman = bellman_value(core);
  res.diag.conservative = w * cal;
  res.loss = res.diag.bellman + res.diag.conservative;
  res.diag.targets = core.y;
  res.diag.q1 = core.q1;
  res.diag.q2 = core.q2;
  return res;
}

ActorLossResult actor_loss(const ActorCritic& ac, const Batch& batch, Rng& rng) {
  check_batch(ac, batch);
  const auto n = batch.size();
  const double alpha = ac.alpha();
  ActorLossResult res;

  if (ac.cfg.algo == Algo::awac) {
    // Advantage-weighted regression; weights carry no gradient.
    Eigen::VectorXd adv(n);
    Eigen::VectorXd log_pi(n);
    if (ac.cfg.kind == ActionKind::box) {
      Mlp::Cache cp;
      const Eigen::MatrixXd raw = ac.policy.forward(batch.states, cp);
      const GaussianHead head = ac.gaussian_head();
      const GaussianSample pa = head.sample(raw, rng);
      const Eigen::MatrixXd in_data = hcat(batch.states, batch.actions);
      const Eigen::MatrixXd in_pi = hcat(batch.states, pa.action);
      const Eigen::VectorXd q_data =
          ac.qs.min_online(ac.qs.q1.forward(in_data), ac.qs.q2.forward(in_data)).col(0);
      const Eigen::VectorXd q_pi =
          ac.qs.min_online(ac.qs.q1.forward(in_pi), ac.qs.q2.forward(in_pi)).col(0);
      adv = q_data - q_pi;
      log_pi = head.log_prob(raw, batch.actions);
      if (!log_pi.allFinite()) throw std::runtime_error("actor loss: non-finite log-probabilities");

      Eigen::VectorXd weight(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        weight[i] = std::min(std::exp(adv[i] / ac.cfg.awac_lambda), ac.cfg.awac_weight_clip);
      }
      res.loss = -(weight.array() * log_pi.array()).mean();
      const Eigen::VectorXd dlogp = -weight / static_cast<double>(n);
      const Eigen::MatrixXd draw = head.backward_log_prob(raw, batch.actions, dlogp);
      res.grad = ac.policy.backward(cp, draw);
      res.mean_q = q_data.mean();
    } else {
      Mlp::Cache cp;
      const Eigen::MatrixXd logits = ac.policy.forward(batch.states, cp);
      CategoricalHead head;
      const Eigen::MatrixXd probs = head.probs(logits);
      const Eigen::MatrixXd log_probs = head.log_probs(logits);
      const Eigen::MatrixXd qmin =
          ac.qs.min_online(ac.qs.q1.forward(batch.states), ac.qs.q2.forward(batch.states));
      Eigen::MatrixXd dlogits = Eigen::MatrixXd::Zero(n, ac.cfg.action_dim);
      double loss = 0.0;
      double mean_q = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int a = batch.action_idx[i];
        const double v = probs.row(i).dot(qmin.row(i));
        const double weight =
            std::min(std::exp((qmin(i, a) - v) / ac.cfg.awac_lambda), ac.cfg.awac_weight_clip);
        loss -= weight * log_probs(i, a);
        mean_q += qmin(i, a);
        for (Eigen::Index j = 0; j < ac.cfg.action_dim; ++j) {
          dlogits(i, j) -= weight * (((j == a) ? 1.0 : 0.0) - probs(i, j));
        }
        log_pi[i] = log_probs(i, a);
      }
      res.loss = loss / static_cast<double>(n);
      res.grad = ac.policy.backward(cp, dlogits / static_cast<double>(n));
      res.mean_q = mean_q / static_cast<double>(n);
    }
    res.mean_log_prob = log_pi.mean();
    return res;
  }

  // SAC-family: E[alpha * log pi - minQ], critics frozen.
  if (ac.cfg.kind == ActionKind::box) {
    Mlp::Cache cp;
    const Eigen::MatrixXd raw = ac.policy.forward(batch.states, cp);
    const GaussianHead head = ac.gaussian_head();
    const GaussianSample pa = head.sample(raw, rng);
    if (!pa.log_prob.allFinite()) throw std::runtime_error("actor loss: non-finite log-probabilities");
    const Eigen::MatrixXd in = hcat(batch.states, pa.action);
    Mlp::Cache c1, c2;
    const Eigen::VectorXd v1 = ac.qs.q1.forward(in, c1).col(0);
    const Eigen::VectorXd v2 = ac.qs.q2.forward(in, c2).col(0);
    const Eigen::VectorXd qmin = ac.qs.min_online(v1, v2).col(0);

    res.loss = (alpha * pa.log_prob.array() - qmin.array()).mean();
    res.mean_log_prob = pa.log_prob.mean();
    res.mean_q = qmin.mean();

    // dL/d action flows through whichever critic attains the min.
    Eigen::MatrixXd d1 = Eigen::MatrixXd::Zero(n, 1);
    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      (v1[i] <= v2[i] ? d1 : d2)(i, 0) = -1.0 / static_cast<double>(n);
    }
    const Eigen::MatrixXd dx1 = ac.qs.q1.backward(c1, d1).dx;
    const Eigen::MatrixXd dx2 = ac.qs.q2.backward(c2, d2).dx;
    const Eigen::MatrixXd daction = dx1.rightCols(ac.cfg.action_dim) + dx2.rightCols(ac.cfg.action_dim);
    const Eigen::VectorXd dlogp =
        Eigen::VectorXd::Constant(n, alpha / static_cast<double>(n));
    const Eigen::MatrixXd draw = head.backward_sample(raw, pa, dlogp, daction);
    res.grad = ac.policy.backward(cp, draw);
  } else {
    Mlp::Cache cp;
    const Eigen::MatrixXd logits = ac.policy.forward(batch.states, cp);
    CategoricalHead head;
    const Eigen::MatrixXd probs = head.probs(logits);
    const Eigen::MatrixXd log_probs = head.log_probs(logits);
    const Eigen::MatrixXd qmin =
        ac.qs.min_online(ac.qs.q1.forward(batch.states), ac.qs.q2.forward(batch.states));

    const Eigen::MatrixXd cost = alpha * log_probs - qmin;  // c_a per row
    double loss = 0.0;
    Eigen::MatrixXd dlogits(n, ac.cfg.action_dim);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double row = probs.row(i).dot(cost.row(i));
      loss += row;
      dlogits.row(i) =
          (probs.row(i).array() * (cost.row(i).array() - row)).matrix() / static_cast<double>(n);
    }
    res.loss = loss / static_cast<double>(n);
    res.mean_log_prob = (probs.array() * log_probs.array()).rowwise().sum().mean();
    res.mean_q = (probs.array() * qmin.array()).rowwise().sum().mean();
    res.grad = ac.policy.backward(cp, dlogits);
  }
  return res;
}

CriticLossResult critic_loss_for(const ActorCritic& ac, const Batch& batch,
                                 const Eigen::VectorXd& vmu, Rng& rng) {
  switch (ac.cfg.algo) {
    case Algo::cql: return cql_loss(ac, batch, rng);
    case Algo::calql: return calql_loss(ac, batch, vmu, rng);
    case Algo::sac:
    case Algo::awac: return critic_bellman_loss(ac, batch, rng);
  }
  throw std::logic_error("critic_loss_for: unreachable");
}

Eigen::VectorXd condition_values(const DoubleQ& qs, const Mlp& policy,
                                 const ActorCriticConfig& cfg, const Batch& batch,
                                 bool v_mode) {
  if (cfg.kind == ActionKind::box) {
    Eigen::MatrixXd actions;
    if (v_mode) {
      const GaussianHead head(policy.spec());
      actions = head.mean_action(policy.forward(batch.states));
    } else {
      actions = batch.actions;
    }
    const Eigen::MatrixXd in = hcat(batch.states, actions);
    return qs.min_online(qs.q1.forward(in), qs.q2.forward(in)).col(0);
  }
  const Eigen::MatrixXd qmin =
      qs.min_online(qs.q1.forward(batch.states), qs.q2.forward(batch.states));
  Eigen::VectorXd out(batch.size());
  if (v_mode) {
    CategoricalHead head;
    const Eigen::MatrixXd probs = head.probs(policy.forward(batch.states));
    for (Eigen::Index i = 0; i < batch.size(); ++i) out[i] = probs.row(i).dot(qmin.row(i));
  } else {
    for (Eigen::Index i = 0; i < batch.size(); ++i) out[i] = qmin(i, batch.action_idx[i]);
  }
  return out;
}

}  // namespace qcse
