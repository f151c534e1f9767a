#pragma once

#include <cstdint>
#include <string>

#include "qcse/dataset.hpp"

namespace qcse {

/// Shortest-path policy on a gridworld (BFS distance to goal, ties toward
/// the lower action index). Used for anchors and as the behavior-training
/// target.
class GridWorldExpert {
 public:
  explicit GridWorldExpert(GridWorldSpec spec);
  int action(Cell pos) const;

 private:
  GridWorldSpec spec_;
  std::vector<int> dist_;
  int dist_at(Cell c) const;
};

/// PD controller toward the goal; the point-mass expert.
Eigen::Vector2d pd_expert_action(const Eigen::VectorXd& state, const PointMassSpec& spec,
                                 double kp = 4.0, double kd = 3.0);

/// Mean return of the uniform-random / expert policy; anchor measurement.
double evaluate_random_policy(const EnvSpec& env, int episodes, std::uint64_t seed);
double evaluate_expert_policy(const EnvSpec& env, int episodes, std::uint64_t seed);

/// Offline data generation. `behavior` is one of:
///   "random"        uniform actions;
///   "medium"        a behavior policy trained to roughly the midpoint of
///                   the env's anchor range, frozen, plus epsilon = 0.1
///                   action noise;
///   "medium-replay" the transition stream of that training run.
/// Pure function of (env spec, behavior, size, seed); exactly `size`
/// transitions. Throws std::invalid_argument for unknown behavior ids.
Dataset generate_dataset(const EnvSpec& env, const std::string& behavior,
                         std::int64_t size, std::uint64_t seed);

}  // namespace qcse
