#include "qcse/tabular.hpp"

#include <cmath>
#include <stdexcept>

namespace qcse {

void TabularMDP::validate(double tol) const {
  if (num_states < 1 || num_actions < 1) {
    throw std::invalid_argument("TabularMDP: empty state or action set");
  }
  if (static_cast<int>(transition.size()) != num_actions) {
    throw std::invalid_argument("TabularMDP: transition tensor shape mismatch");
  }
  for (const auto& p : transition) {
    if (p.rows() != num_states || p.cols() != num_states) {
      throw std::invalid_argument("TabularMDP: transition matrix shape mismatch");
    }
    for (int s = 0; s < num_states; ++s) {
      if (std::abs(p.row(s).sum() - 1.0) > tol || p.row(s).minCoeff() < 0.0) {
        throw std::invalid_argument("TabularMDP: transition rows must be distributions");
      }
    }
  }
  if (reward.rows() != num_states || reward.cols() != num_actions) {
    throw std::invalid_argument("TabularMDP: reward shape mismatch");
  }
  if (initial.size() != num_states || std::abs(initial.sum() - 1.0) > tol || initial.minCoeff() < 0.0) {
    throw std::invalid_argument("TabularMDP: initial distribution invalid");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("TabularMDP: gamma must lie in [0, 1)");
  }
}

TabularMDP TabularMDP::random(int num_states, int num_actions, double gamma, Rng& rng) {
  TabularMDP m;
  m.num_states = num_states;
  m.num_actions = num_actions;
  m.gamma = gamma;
  m.reward.resize(num_states, num_actions);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) m.reward(s, a) = rng.uniform(-1.0, 1.0);
  for (int a = 0; a < num_actions; ++a) {
    Eigen::MatrixXd p(num_states, num_states);
    for (int s = 0; s < num_states; ++s) {
      double sum = 0.0;
      for (int t = 0; t < num_states; ++t) {
        p(s, t) = -std::log(1.0 - rng.uniform());  // exponential: dense simplex draw
        sum += p(s, t);
      }
      p.row(s) /= sum;
    }
    m.transition.push_back(std::move(p));
  }
  m.initial.resize(num_states);
  double sum = 0.0;
  for (int s = 0; s < num_states; ++s) {
    m.initial[s] = -std::log(1.0 - rng.uniform());
    sum += m.initial[s];
  }
  m.initial /= sum;
  return m;
}

void TabularPolicy::validate(double tol) const {
  for (Eigen::Index s = 0; s < pi.rows(); ++s) {
    if (std::abs(pi.row(s).sum() - 1.0) > tol || pi.row(s).minCoeff() < 0.0) {
      throw std::invalid_argument("TabularPolicy: rows must be distributions");
    }
  }
}

TabularPolicy TabularPolicy::uniform(int num_states, int num_actions) {
  TabularPolicy p;
  p.pi = Eigen::MatrixXd::Constant(num_states, num_actions, 1.0 / num_actions);
  return p;
}

TabularPolicy TabularPolicy::random(int num_states, int num_actions, Rng& rng) {
  TabularPolicy p;
  p.pi.resize(num_states, num_actions);
  for (int s = 0; s < num_states; ++s) {
    double sum = 0.0;
    for (int a = 0; a < num_actions; ++a) {
      p.pi(s, a) = -std::log(1.0 - rng.uniform());
      sum += p.pi(s, a);
    }
    p.pi.row(s) /= sum;
  }
  return p;
}

void DensityPair::validate(double tol) const {
  if (rho.size() != target.size()) throw std::invalid_argument("DensityPair: size mismatch");
  if (std::abs(rho.sum() - 1.0) > tol || rho.minCoeff() < 0.0 ||
      std::abs(target.sum() - 1.0) > tol || target.minCoeff() < 0.0) {
    throw std::invalid_argument("DensityPair: entries must be distributions");
  }
}

Eigen::VectorXd marginal_state_distribution(const TabularMDP& mdp,
                                            const TabularPolicy& policy,
                                            int horizon) {
  if (horizon < 1) throw std::invalid_argument("marginal_state_distribution: horizon must be >= 1");
  // One-step state transition under the policy.
  Eigen::MatrixXd step = Eigen::MatrixXd::Zero(mdp.num_states, mdp.num_states);
  for (int a = 0; a < mdp.num_actions; ++a) {
    step += policy.pi.col(a).asDiagonal() * mdp.transition[a];
  }
  Eigen::VectorXd dist = mdp.initial;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(mdp.num_states);
  for (int t = 1; t <= horizon; ++t) {
    dist = (dist.transpose() * step).transpose();
    acc += dist;
  }
  return acc / static_cast<double>(horizon);
}

double smm_kl(const DensityPair& d) {
  double kl = 0.0;
  for (Eigen::Index s = 0; s < d.rho.size(); ++s) {
    if (d.rho[s] <= 0.0) continue;
    if (d.target[s] <= 0.0) {
      throw std::invalid_argument("smm_kl: target has zero mass on the support of rho");
    }
    kl += d.rho[s] * std::log(d.rho[s] / d.target[s]);
  }
  return kl;
}

static double neg_x_log_x(double x) { return x > 0.0 ? -x * std::log(x) : 0.0; }

EntropyBoundReport entropy_bound_check(const DensityPair& d) {
  EntropyBoundReport r;
  for (Eigen::Index s = 0; s < d.rho.size(); ++s) {
    r.entropy_rho += neg_x_log_x(d.rho[s]);
    if (d.rho[s] > d.target[s]) {
      r.term1 += neg_x_log_x(d.rho[s]);
      r.over_target.push_back(static_cast<int>(s));
    } else {
      r.term2 += neg_x_log_x(d.target[s]);
    }
  }
  r.holds = r.entropy_rho <= r.term1 + r.term2 + 1e-12;
  return r;
}

/// One backup sweep: Q <- R + R_int + gamma * P V, V = E_pi [Q - log pi].
static Eigen::MatrixXd soft_backup(const TabularMDP& mdp, const TabularPolicy& policy,
                                   const Eigen::MatrixXd& intrinsic,
                                   const Eigen::MatrixXd& q) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mdp.num_states);
  for (int s = 0; s < mdp.num_states; ++s) {
    double acc = 0.0;
    for (int a = 0; a < mdp.num_actions; ++a) {
      const double p = policy.pi(s, a);
      if (p > 0.0) acc += p * (q(s, a) - std::log(p));
    }
    v[s] = acc;
  }
  Eigen::MatrixXd next(mdp.num_states, mdp.num_actions);
  for (int a = 0; a < mdp.num_actions; ++a) {
    next.col(a) = mdp.reward.col(a) + intrinsic.col(a) + mdp.gamma * (mdp.transition[a] * v);
  }
  return next;
}

Eigen::MatrixXd soft_policy_evaluation(const TabularMDP& mdp, const TabularPolicy& policy,
                                       const Eigen::MatrixXd& intrinsic, double tol,
                                       double* contraction, long max_iter) {
  if (!intrinsic.allFinite()) {
    throw std::invalid_argument("soft_policy_evaluation: intrinsic rewards must be finite");
  }
  if (intrinsic.rows() != mdp.num_states || intrinsic.cols() != mdp.num_actions) {
    throw std::invalid_argument("soft_policy_evaluation: intrinsic shape mismatch");
  }
  // Successive-change threshold such that the true sup-norm error is <= tol.
  const double stop = (mdp.gamma > 0.0) ? tol * (1.0 - mdp.gamma) / mdp.gamma : tol;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(mdp.num_states, mdp.num_actions);
  double prev_delta = -1.0;
  double worst_ratio = 0.0;
  for (long it = 0; it < max_iter; ++it) {
    Eigen::MatrixXd next = soft_backup(mdp, policy, intrinsic, q);
    const double delta = (next - q).cwiseAbs().maxCoeff();
    // Ratios are meaningful only while the successive change sits well
    // above the rounding floor of the Q entries; below it the quotient
    // measures round-off, not the operator.
    const double noise_floor = 1e-8 * std::max(1.0, q.cwiseAbs().maxCoeff());
    if (prev_delta > noise_floor) {
      worst_ratio = std::max(worst_ratio, delta / prev_delta);
    }
    q = std::move(next);
    if (delta <= stop) {
      if (contraction) *contraction = worst_ratio;
      return q;
    }
    prev_delta = delta;
  }
  throw std::runtime_error("soft_policy_evaluation: iteration cap exceeded");
}

TabularPolicy soft_policy_improvement(const Eigen::MatrixXd& q) {
  if (!q.allFinite()) throw std::invalid_argument("soft_policy_improvement: Q must be finite");
  TabularPolicy p;
  p.pi.resize(q.rows(), q.cols());
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    const double m = q.row(s).maxCoeff();
    Eigen::ArrayXd e = (q.row(s).array() - m).exp();
    p.pi.row(s) = (e / e.sum()).matrix();
  }
  return p;
}

SoftPolicyIterationResult soft_policy_iteration(const TabularMDP& mdp,
                                                const Eigen::MatrixXd& intrinsic,
                                                double eval_tol, double policy_tol,
                                                int max_outer) {
  SoftPolicyIterationResult out;
  out.policy = TabularPolicy::uniform(mdp.num_states, mdp.num_actions);
  for (int it = 0; it < max_outer; ++it) {
    double ratio = 0.0;
    Eigen::MatrixXd q = soft_policy_evaluation(mdp, out.policy, intrinsic, eval_tol, &ratio);
    out.worst_contraction = std::max(out.worst_contraction, ratio);
    out.q_trace.push_back(q);
    TabularPolicy next = soft_policy_improvement(q);
    const double change = (next.pi - out.policy.pi).cwiseAbs().maxCoeff();
    out.policy = std::move(next);
    out.iterations = it + 1;
    if (change < policy_tol) return out;
  }
  throw std::runtime_error("soft_policy_iteration: iteration cap exceeded");
}

ConservatismReport conservatism_report(int batches, int batch_size, int state_dim,
                                       const EntropyConfig& cfg, Rng& rng) {
  ConservatismReport rep;
  rep.batches = batches;
  int violations = 0;
  double diff_sum = 0.0;
  for (int bi = 0; bi < batches; ++bi) {
    Eigen::MatrixXd states(batch_size, state_dim);
    Eigen::VectorXd q1(batch_size);
    for (int i = 0; i < batch_size; ++i) {
      for (int d = 0; d < state_dim; ++d) states(i, d) = rng.normal();
      q1[i] = rng.normal();
    }

    // Exact cases: identical critics, then a positive constant offset. Both
    // leave min(Q1, Q2) = Q1, so the intrinsic rewards must coincide.
    const Eigen::VectorXd base = qcse_intrinsic(states, q1, cfg).reward;
    const Eigen::VectorXd same = qcse_intrinsic(states, q1.cwiseMin(q1), cfg).reward;
    const Eigen::VectorXd shifted = (q1.array() + 0.5).matrix();
    const Eigen::VectorXd offset = qcse_intrinsic(states, q1.cwiseMin(shifted), cfg).reward;
    rep.max_equal_case_error = std::max(rep.max_equal_case_error,
                                        (same - base).cwiseAbs().maxCoeff());
    rep.max_equal_case_error = std::max(rep.max_equal_case_error,
                                        (offset - base).cwiseAbs().maxCoeff());

    // Signed perturbation: the theory argues the min-conditioned reward
    // should not exceed the single-critic one; measured, not asserted.
    Eigen::VectorXd q2(batch_size);
    for (int i = 0; i < batch_size; ++i) q2[i] = q1[i] + rng.normal();
    const Eigen::VectorXd min_cond = qcse_intrinsic(states, q1.cwiseMin(q2), cfg).reward;
    const double diff = min_cond.mean() - base.mean();
    diff_sum += diff;
    if (diff > 0.0) ++violations;
  }
  rep.mean_difference = diff_sum / batches;
  rep.violation_fraction = static_cast<double>(violations) / batches;
  return rep;
}

}  // namespace qcse
