#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qcse/intrinsic.hpp"
#include "qcse/rng.hpp"

namespace qcse {

/// Finite MDP with explicit tensors, for exact dynamic programming.
struct TabularMDP {
  int num_states = 0;
  int num_actions = 0;
  /// transition[a] is an S x S matrix: row s, column s'.
  std::vector<Eigen::MatrixXd> transition;
  /// reward(s, a)
  Eigen::MatrixXd reward;
  Eigen::VectorXd initial;  ///< p0 over states
  double gamma = 0.9;

  /// Row-stochasticity and shape checks; throws on violation.
  void validate(double tol = 1e-12) const;

  static TabularMDP random(int num_states, int num_actions, double gamma, Rng& rng);
};

/// pi(a|s) as an S x A row-stochastic matrix.
struct TabularPolicy {
  Eigen::MatrixXd pi;

  void validate(double tol = 1e-12) const;
  static TabularPolicy uniform(int num_states, int num_actions);
  static TabularPolicy random(int num_states, int num_actions, Rng& rng);
};

/// A visitation density and a target density over the same state set.
struct DensityPair {
  Eigen::VectorXd rho;
  Eigen::VectorXd target;

  void validate(double tol = 1e-12) const;
};

/// Time-averaged state visitation over steps 1..horizon, by exact forward
/// propagation of the initial distribution.
Eigen::VectorXd marginal_state_distribution(const TabularMDP& mdp,
                                            const TabularPolicy& policy,
                                            int horizon);

/// KL(rho || target). Throws if the target has zero mass where rho does not.
double smm_kl(const DensityPair& d);

/// Split-entropy bound report: term1 sums -rho log rho where rho exceeds the
/// target, term2 sums -target log target on the complement, and `holds`
/// records whether H[rho] <= term1 + term2 (+1e-12). The bound is not
/// pointwise true once masses exceed 1/e, so callers decide what to assert.
struct EntropyBoundReport {
  double entropy_rho = 0.0;
  double term1 = 0.0;
  double term2 = 0.0;
  bool holds = false;
  std::vector<int> over_target;  ///< states with rho > target
};

EntropyBoundReport entropy_bound_check(const DensityPair& d);

/// Soft policy evaluation under the entropy-augmented backup
///   Q <- R + R_int + gamma * P [ E_pi(Q - log pi) ],
/// iterated to a true sup-norm error below `tol` (the internal successive
/// threshold is tightened by (1-gamma)/gamma). Returns the Q matrix; the
/// measured per-sweep contraction ratio is reported if `contraction` is
/// given (max over sweeps of ||Q_{k+1}-Q_k|| / ||Q_k-Q_{k-1}||).
Eigen::MatrixXd soft_policy_evaluation(const TabularMDP& mdp,
                                       const TabularPolicy& policy,
                                       const Eigen::MatrixXd& intrinsic,
                                       double tol = 1e-10,
                                       double* contraction = nullptr,
                                       long max_iter = 1000000);

/// Softmax(Q) rows: the KL-projection improvement step.
TabularPolicy soft_policy_improvement(const Eigen::MatrixXd& q);

struct SoftPolicyIterationResult {
  TabularPolicy policy;
  std::vector<Eigen::MatrixXd> q_trace;  ///< Q after every evaluation
  double worst_contraction = 0.0;        ///< max contraction ratio seen
  int iterations = 0;
};

/// Alternate evaluation and improvement until the policy changes by less
/// than `policy_tol` in max norm. Throws if the iteration cap is exceeded.
SoftPolicyIterationResult soft_policy_iteration(const TabularMDP& mdp,
                                                const Eigen::MatrixXd& intrinsic,
                                                double eval_tol = 1e-10,
                                                double policy_tol = 1e-10,
                                                int max_outer = 10000);

/// Empirical check of the min-critic conservatism claim: intrinsic rewards
/// conditioned on min(Q1, Q2) versus on Q1 alone, over random batches.
/// The exact cases (Q2 = Q1 and Q2 = Q1 + positive constant) are equalities
/// and are recorded separately; the Gaussian-noise case is a report only.
struct ConservatismReport {
  int batches = 0;
  double mean_difference = 0.0;    ///< mean of (min-conditioned - single)
  double violation_fraction = 0.0; ///< fraction of batches with positive mean diff
  double max_equal_case_error = 0.0;  ///< worst |diff| over the exact cases
};

ConservatismReport conservatism_report(int batches, int batch_size, int state_dim,
                                       const EntropyConfig& cfg, Rng& rng);

}  // namespace qcse
