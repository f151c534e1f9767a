#pragma once

#include <Eigen/Dense>
#include <compare>
#include <string>
#include <variant>
#include <vector>

#include "qcse/rng.hpp"

namespace qcse {

enum class ActionKind { discrete, box };

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

/// Delayed-reward navigation task: +1 only on reaching the goal, which ends
/// the episode. States are 2-d normalized cell-center coordinates so the
/// same MLP agents serve both environments.
struct GridWorldSpec {
  int width = 6;
  int height = 6;
  std::vector<Cell> walls;
  Cell start{0, 5};
  Cell goal{5, 0};
  int max_steps = 40;
  double slip_prob = 0.0;

  /// Bounds, wall placement, slip range, and goal reachability (BFS).
  void validate() const;
};

/// Dense-reward continuous control: accelerate a point in a [-1,1]^2 box
/// toward a goal; per-step reward is minus the distance to the goal (or a
/// sparse +1 inside the goal radius when dense = false).
struct PointMassSpec {
  double dt = 0.1;
  Eigen::Vector2d goal{0.7, 0.7};
  double goal_radius = 0.15;
  int max_steps = 60;
  bool dense = true;
  Eigen::Vector2d start{-0.8, -0.8};
  double start_noise = 0.05;

  void validate() const;
};

/// One environment step; the atom of every buffer and dataset.
struct Transition {
  Eigen::VectorXd state;
  int action_index = -1;   ///< discrete environments
  Eigen::VectorXd action;  ///< continuous environments
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool done = false;
};

class GridWorld {
 public:
  explicit GridWorld(GridWorldSpec spec);

  Eigen::VectorXd reset(std::uint64_t seed);
  /// Throws std::logic_error when stepping a finished episode.
  Transition step(int action);

  bool episode_over() const { return terminated_ || steps_ >= spec_.max_steps; }
  int steps() const { return steps_; }
  const GridWorldSpec& spec() const { return spec_; }

  static constexpr int kNumActions = 4;  // up, right, down, left
  int state_dim() const { return 2; }

  Eigen::VectorXd encode(Cell c) const;
  Cell decode(const Eigen::VectorXd& state) const;
  Cell pos() const { return pos_; }
  bool is_wall(Cell c) const;

 private:
  GridWorldSpec spec_;
  Cell pos_;
  int steps_ = 0;
  bool terminated_ = false;
  bool started_ = false;
  Rng rng_{0};
};

class PointMass {
 public:
  explicit PointMass(PointMassSpec spec);

  Eigen::VectorXd reset(std::uint64_t seed);
  Transition step(const Eigen::Vector2d& accel);

  bool episode_over() const { return terminated_ || steps_ >= spec_.max_steps; }
  int steps() const { return steps_; }
  const PointMassSpec& spec() const { return spec_; }

  int state_dim() const { return 4; }
  int action_dim() const { return 2; }

 private:
  Eigen::VectorXd state_vec() const;
  PointMassSpec spec_;
  Eigen::Vector2d pos_, vel_;
  int steps_ = 0;
  bool terminated_ = false;
  bool started_ = false;
  Rng rng_{0};
};

/// Value-semantic wrapper so the trainer is agnostic to the task kind.
class Env {
 public:
  explicit Env(GridWorldSpec spec) : impl_(GridWorld(std::move(spec))) {}
  explicit Env(PointMassSpec spec) : impl_(PointMass(std::move(spec))) {}

  ActionKind action_kind() const;
  int state_dim() const;
  /// Discrete action count (throws for box environments).
  int num_actions() const;
  /// Box action dimension (throws for discrete environments).
  int action_dim() const;
  int max_steps() const;

  Eigen::VectorXd reset(std::uint64_t seed);
  Transition step_discrete(int action);
  Transition step_box(const Eigen::VectorXd& action);
  bool episode_over() const;

  const GridWorld* gridworld() const { return std::get_if<GridWorld>(&impl_); }
  const PointMass* pointmass() const { return std::get_if<PointMass>(&impl_); }

 private:
  std::variant<GridWorld, PointMass> impl_;
};

/// Environment spec plus evaluation anchors for normalized scores.
struct EnvSpec {
  std::string id;
  std::variant<GridWorldSpec, PointMassSpec> spec;
  double score_random = 0.0;
  double score_expert = 1.0;

  ActionKind action_kind() const {
    return std::holds_alternative<GridWorldSpec>(spec) ? ActionKind::discrete : ActionKind::box;
  }
  Env make() const;
  void validate() const;
};

/// Built-in environments with pinned anchors. Throws on unknown id.
EnvSpec registry_env(const std::string& id);
std::vector<std::string> registry_ids();

}  // namespace qcse
