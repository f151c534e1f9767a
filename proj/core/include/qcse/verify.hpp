#pragma once

#include <string>
#include <vector>

#include "qcse/tabular.hpp"

namespace qcse {

struct VerifyTolerances {
  double monotone = 1e-9;          ///< allowed elementwise dip between iterates
  double dominance = 1e-6;         ///< slack on Q* >= Q^pi
  double contraction_slack = 1e-6; ///< measured ratio must stay <= gamma + slack
  int mdp_count = 50;
  int max_states = 10;
  int max_actions = 4;
  int policies_per_mdp = 100;
  double gamma = 0.9;
  double simplex_step = 0.02;
  std::uint64_t seed = 20250810;
};

struct BoundCounterexample {
  std::vector<double> rho;
  std::vector<double> target;
  double entropy = 0.0;
  double term_sum = 0.0;
};

struct VerifyReport {
  // Hard assertions.
  bool monotone_ok = false;
  double worst_monotone_dip = 0.0;  ///< most negative Q_{k+1}-Q_k seen
  bool dominance_ok = false;
  double worst_dominance_gap = 0.0;  ///< most negative Q*-Q^pi seen
  bool contraction_ok = false;
  double worst_contraction = 0.0;
  bool bound_restricted_ok = false;  ///< all-masses-below-1/e sweep
  long bound_restricted_cases = 0;
  bool kl_ok = false;
  bool equal_case_ok = false;  ///< min(Q,Q)-conditioning must change nothing

  // Reports (not asserted; the underlying inequalities are approximate).
  long bound_total_cases = 0;
  long bound_violations = 0;
  std::vector<BoundCounterexample> bound_examples;  ///< first few violations
  ConservatismReport conservatism;

  int mdps_checked = 0;

  bool all_hard_ok() const {
    return monotone_ok && dominance_ok && contraction_ok && bound_restricted_ok && kl_ok &&
           equal_case_ok;
  }
};

/// Most negative single-step change across a Q trace (0 when monotone).
double worst_monotonicity_dip(const std::vector<Eigen::MatrixXd>& q_trace);

/// Self-contained random-MDP verification suite under fixed seeds.
VerifyReport run_verification(const VerifyTolerances& tol = {});

std::string verify_report_json(const VerifyReport& report, const VerifyTolerances& tol);
std::string verify_report_text(const VerifyReport& report, const VerifyTolerances& tol);

}  // namespace qcse
