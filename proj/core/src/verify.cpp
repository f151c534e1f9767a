#include "qcse/verify.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace qcse {

namespace {

/// All 3-part compositions of 1.0 in units of `step`.
std::vector<Eigen::Vector3d> simplex_grid(double step) {
  const int n = static_cast<int>(std::lround(1.0 / step));
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j + i <= n; ++j) {
      pts.emplace_back(i * step, j * step, (n - i - j) * step);
    }
  }
  return pts;
}

}  // namespace

double worst_monotonicity_dip(const std::vector<Eigen::MatrixXd>& q_trace) {
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < q_trace.size(); ++k) {
    worst = std::min(worst, (q_trace[k + 1] - q_trace[k]).minCoeff());
  }
  return worst;
}

VerifyReport run_verification(const VerifyTolerances& tol) {
  VerifyReport rep;
  Rng root(tol.seed);

  // Soft policy iteration: monotone improvement, optimality of the fixed
  // point against random policies, and the evaluation contraction rate.
  Rng mdp_rng = root.sub("mdps");
  double worst_dip = 0.0;
  double worst_gap = 0.0;
  double worst_ratio = 0.0;
  for (int i = 0; i < tol.mdp_count; ++i) {
    const int ns = 2 + mdp_rng.uniform_int(tol.max_states - 1);
    const int na = 2 + mdp_rng.uniform_int(tol.max_actions - 1);
    TabularMDP mdp = TabularMDP::random(ns, na, tol.gamma, mdp_rng);
    Eigen::MatrixXd intrinsic(ns, na);
    for (int s = 0; s < ns; ++s)
      for (int a = 0; a < na; ++a) intrinsic(s, a) = mdp_rng.uniform(0.0, 0.5);

    const SoftPolicyIterationResult spi = soft_policy_iteration(mdp, intrinsic);
    worst_dip = std::min(worst_dip, worst_monotonicity_dip(spi.q_trace));
    worst_ratio = std::max(worst_ratio, spi.worst_contraction);

    const Eigen::MatrixXd& q_star = spi.q_trace.back();
    for (int p = 0; p < tol.policies_per_mdp; ++p) {
      TabularPolicy pi = TabularPolicy::random(ns, na, mdp_rng);
      double ratio = 0.0;
      const Eigen::MatrixXd q_pi = soft_policy_evaluation(mdp, pi, intrinsic, 1e-10, &ratio);
      worst_ratio = std::max(worst_ratio, ratio);
      worst_gap = std::min(worst_gap, (q_star - q_pi).minCoeff());
    }
    ++rep.mdps_checked;
  }
  rep.worst_monotone_dip = worst_dip;
  rep.monotone_ok = worst_dip >= -tol.monotone;
  rep.worst_dominance_gap = worst_gap;
  rep.dominance_ok = worst_gap >= -tol.dominance;
  rep.worst_contraction = worst_ratio;
  rep.contraction_ok = worst_ratio <= tol.gamma + tol.contraction_slack;

  // Split-entropy bound: exhaustive over the 3-state simplex grid. The
  // restricted sweep (every mass <= 1/e) must hold without exception; the
  // unrestricted sweep only collects counterexamples.
  const auto grid = simplex_grid(tol.simplex_step);
  const double inv_e = 1.0 / std::exp(1.0);
  bool restricted_ok = true;
  for (const auto& rho : grid) {
    for (const auto& target : grid) {
      DensityPair pair;
      pair.rho = rho;
      pair.target = target;
      const EntropyBoundReport r = entropy_bound_check(pair);
      ++rep.bound_total_cases;
      const bool restricted = rho.maxCoeff() <= inv_e && target.maxCoeff() <= inv_e;
      if (restricted) {
        ++rep.bound_restricted_cases;
        if (!r.holds) restricted_ok = false;
      }
      if (!r.holds) {
        ++rep.bound_violations;
        if (rep.bound_examples.size() < 5) {
          BoundCounterexample ex;
          ex.rho = {rho[0], rho[1], rho[2]};
          ex.target = {target[0], target[1], target[2]};
          ex.entropy = r.entropy_rho;
          ex.term_sum = r.term1 + r.term2;
          rep.bound_examples.push_back(std::move(ex));
        }
      }
    }
  }
  rep.bound_restricted_ok = restricted_ok && rep.bound_restricted_cases > 0;

  // KL sanity: zero at equality, nonnegative on random pairs.
  Rng kl_rng = root.sub("kl");
  bool kl_ok = true;
  for (int i = 0; i < 200; ++i) {
    const int ns = 2 + kl_rng.uniform_int(6);
    TabularPolicy rows = TabularPolicy::random(2, ns, kl_rng);  // two simplex draws
    DensityPair pair;
    pair.rho = rows.pi.row(0);
    pair.target = rows.pi.row(1);
    if (smm_kl(pair) < 0.0) kl_ok = false;
    DensityPair same;
    same.rho = pair.rho;
    same.target = pair.rho;
    if (smm_kl(same) != 0.0) kl_ok = false;
  }
  rep.kl_ok = kl_ok;

  // Min-critic conditioning: exact cases must be bit-for-bit neutral;
  // signed perturbations are reported.
  Rng cons_rng = root.sub("conservatism");
  EntropyConfig cfg;
  cfg.k = 5;
  cfg.condition_mode = ConditionMode::q;
  rep.conservatism = conservatism_report(1000, 32, 3, cfg, cons_rng);
  rep.equal_case_ok = rep.conservatism.max_equal_case_error == 0.0;

  return rep;
}

std::string verify_report_json(const VerifyReport& rep, const VerifyTolerances& tol) {
  nlohmann::json j;
  j["hard"] = {
      {"monotone_ok", rep.monotone_ok},
      {"worst_monotone_dip", rep.worst_monotone_dip},
      {"dominance_ok", rep.dominance_ok},
      {"worst_dominance_gap", rep.worst_dominance_gap},
      {"contraction_ok", rep.contraction_ok},
      {"worst_contraction", rep.worst_contraction},
      {"bound_restricted_ok", rep.bound_restricted_ok},
      {"bound_restricted_cases", rep.bound_restricted_cases},
      {"kl_ok", rep.kl_ok},
      {"equal_case_ok", rep.equal_case_ok},
  };
  j["reports"] = {
      {"bound_total_cases", rep.bound_total_cases},
      {"bound_violations", rep.bound_violations},
      {"conservatism",
       {{"batches", rep.conservatism.batches},
        {"mean_difference", rep.conservatism.mean_difference},
        {"violation_fraction", rep.conservatism.violation_fraction},
        {"max_equal_case_error", rep.conservatism.max_equal_case_error}}},
  };
  j["reports"]["bound_examples"] = nlohmann::json::array();
  for (const auto& ex : rep.bound_examples) {
    j["reports"]["bound_examples"].push_back({{"rho", ex.rho},
                                              {"target", ex.target},
                                              {"entropy", ex.entropy},
                                              {"term_sum", ex.term_sum}});
  }
  j["tolerances"] = {
      {"monotone", tol.monotone},
      {"dominance", tol.dominance},
      {"contraction_slack", tol.contraction_slack},
      {"gamma", tol.gamma},
      {"mdp_count", tol.mdp_count},
      {"policies_per_mdp", tol.policies_per_mdp},
      {"simplex_step", tol.simplex_step},
      {"seed", tol.seed},
  };
  j["mdps_checked"] = rep.mdps_checked;
  j["all_hard_ok"] = rep.all_hard_ok();
  return j.dump(2);
}

std::string verify_report_text(const VerifyReport& rep, const VerifyTolerances& tol) {
  std::ostringstream os;
  auto line = [&](bool ok, const std::string& name, double value, double bound) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s  %-22s value=%.3e allowed=%.3e\n", ok ? "PASS" : "FAIL",
                  name.c_str(), value, bound);
    os << buf;
  };
  line(rep.monotone_ok, "monotone-improvement", rep.worst_monotone_dip, -tol.monotone);
  line(rep.dominance_ok, "fixed-point-dominance", rep.worst_dominance_gap, -tol.dominance);
  line(rep.contraction_ok, "evaluation-contraction", rep.worst_contraction,
       tol.gamma + tol.contraction_slack);
  os << (rep.bound_restricted_ok ? "PASS" : "FAIL") << "  entropy-bound (masses <= 1/e), "
     << rep.bound_restricted_cases << " cases\n";
  os << (rep.kl_ok ? "PASS" : "FAIL") << "  kl-nonnegativity\n";
  os << (rep.equal_case_ok ? "PASS" : "FAIL") << "  min-conditioning equal-critic neutrality\n";
  os << "REPORT unrestricted entropy bound: " << rep.bound_violations << " of "
     << rep.bound_total_cases << " pairs violate (counterexamples in the JSON report)\n";
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "REPORT min-vs-single conditioning: mean diff=%.4e, fraction positive=%.3f over %d "
                "batches\n",
                rep.conservatism.mean_difference, rep.conservatism.violation_fraction,
                rep.conservatism.batches);
  os << buf;
  return os.str();
}

}  // namespace qcse
