#include "qcse/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <stdexcept>

namespace qcse {

namespace {

constexpr int kDx[4] = {0, 1, 0, -1};
constexpr int kDy[4] = {-1, 0, 1, 0};
constexpr double kActionNoise = 0.1;

using DiscretePolicy = std::function<int(const GridWorld&, Cell)>;
using BoxPolicy = std::function<Eigen::Vector2d(const Eigen::VectorXd&)>;

double rollout_return(GridWorld& env, const DiscretePolicy& policy, std::uint64_t seed) {
  env.reset(seed);
  double ret = 0.0;
  while (!env.episode_over()) {
    ret += env.step(policy(env, env.pos())).reward;
  }
  return ret;
}

double rollout_return(PointMass& env, const BoxPolicy& policy, std::uint64_t seed) {
  Eigen::VectorXd s = env.reset(seed);
  double ret = 0.0;
  while (!env.episode_over()) {
    Transition t = env.step(policy(s));
    ret += t.reward;
    s = t.next_state;
  }
  return ret;
}

/// Tabular Q-learning run on a gridworld. Keeps the whole transition
/// stream plus periodic greedy-policy snapshots with their success rate.
struct GridSnapshot {
  double eval_return = 0.0;
  Eigen::MatrixXd q;
  std::size_t stream_cutoff = 0;  // stream prefix that produced this Q
};

struct GridTrainingRun {
  std::vector<Transition> stream;
  std::vector<GridSnapshot> snapshots;
  Eigen::MatrixXd final_q;
};

int greedy_action(const Eigen::MatrixXd& q, int cell_index) {
  int best = 0;
  for (int a = 1; a < GridWorld::kNumActions; ++a) {
    if (q(cell_index, a) > q(cell_index, best)) best = a;
  }
  return best;
}

// Deployed-policy evaluation: greedy with the epsilon noise the dataset
// collection will use, so mid-training snapshots have graded quality even
// on a deterministic grid.
double eval_greedy_noisy(const GridWorldSpec& spec, const Eigen::MatrixXd& q, int episodes,
                         Rng& rng) {
  GridWorld env(spec);
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    total += rollout_return(
        env,
        [&](const GridWorld&, Cell c) {
          if (rng.uniform() < kActionNoise) return rng.uniform_int(GridWorld::kNumActions);
          return greedy_action(q, c.y * spec.width + c.x);
        },
        rng.next_u64());
  }
  return total / episodes;
}

GridTrainingRun train_gridworld_behavior(const GridWorldSpec& spec, std::int64_t min_stream,
                                         Rng rng) {
  const int cells = spec.width * spec.height;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(cells, GridWorld::kNumActions);
  GridTrainingRun run;
  GridWorld env(spec);
  Rng explore = rng.sub("explore");
  Rng eval_rng = rng.sub("eval");
  Rng episode_rng = rng.sub("episodes");

  const double alpha = 0.3;
  const double gamma = 0.99;
  const double eps = 0.3;
  const int min_episodes = 1000;
  const int eval_episodes = 24;

  int episode = 0;
  while (episode < min_episodes || static_cast<std::int64_t>(run.stream.size()) < min_stream) {
    Eigen::VectorXd s = env.reset(episode_rng.next_u64());
    while (!env.episode_over()) {
      const int ci = env.pos().y * spec.width + env.pos().x;
      int a = (explore.uniform() < eps) ? explore.uniform_int(GridWorld::kNumActions)
                                        : greedy_action(q, ci);
      Transition t = env.step(a);
      const Cell nc = env.pos();
      const int ni = nc.y * spec.width + nc.x;
      const double target =
          t.reward + (t.done ? 0.0 : gamma * q.row(ni).maxCoeff());
      q(ci, a) += alpha * (target - q(ci, a));
      run.stream.push_back(std::move(t));
    }
    ++episode;
    // Dense snapshots while the policy is still forming, sparse afterwards.
    if (episode <= 600 || episode % 10 == 0) {
      run.snapshots.push_back({eval_greedy_noisy(spec, q, eval_episodes, eval_rng), q,
                               run.stream.size()});
    }
    if (episode > 100000) {
      throw std::runtime_error("train_gridworld_behavior: did not gather enough transitions");
    }
  }
  run.final_q = q;
  return run;
}

/// Cross-entropy search over PD gains; the point-mass behavior trainer.
struct PointSnapshot {
  double eval_return = 0.0;
  Eigen::Vector2d gains;
  std::size_t stream_cutoff = 0;
};

struct PointTrainingRun {
  std::vector<Transition> stream;
  std::vector<PointSnapshot> snapshots;
  Eigen::Vector2d final_gains;
};

Eigen::Vector2d pd_action(const Eigen::VectorXd& state, const PointMassSpec& spec,
                          const Eigen::Vector2d& gains) {
  const Eigen::Vector2d pos(state[0], state[1]);
  const Eigen::Vector2d vel(state[2], state[3]);
  Eigen::Vector2d a = gains[0] * (spec.goal - pos) - gains[1] * vel;
  return a.cwiseMax(-1.0).cwiseMin(1.0);
}

PointTrainingRun train_pointmass_behavior(const PointMassSpec& spec, std::int64_t min_stream,
                                          Rng rng) {
  PointTrainingRun run;
  PointMass env(spec);
  Rng gains_rng = rng.sub("gains");
  Rng episode_rng = rng.sub("episodes");
  Rng eval_rng = rng.sub("eval");

  Eigen::Vector2d mean(0.0, 0.0);
  Eigen::Vector2d sd(2.0, 2.0);
  const int population = 24;
  const int elites = 6;
  const int min_iterations = 10;
  const int fit_episodes = 4;
  const int eval_episodes = 16;

  int iteration = 0;
  while (iteration < min_iterations || static_cast<std::int64_t>(run.stream.size()) < min_stream) {
    std::vector<std::pair<double, Eigen::Vector2d>> scored;
    for (int m = 0; m < population; ++m) {
      Eigen::Vector2d g(mean[0] + sd[0] * gains_rng.normal(),
                        mean[1] + sd[1] * gains_rng.normal());
      double fitness = 0.0;
      for (int e = 0; e < fit_episodes; ++e) {
        Eigen::VectorXd s = env.reset(episode_rng.next_u64());
        while (!env.episode_over()) {
          Transition t = env.step(pd_action(s, spec, g));
          fitness += t.reward;
          s = t.next_state;
          run.stream.push_back(std::move(t));
        }
      }
      scored.emplace_back(fitness / fit_episodes, g);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      return a.first > b.first;
    });
    Eigen::Vector2d new_mean(0.0, 0.0);
    for (int i = 0; i < elites; ++i) new_mean += scored[i].second;
    new_mean /= elites;
    Eigen::Vector2d var(0.0, 0.0);
    for (int i = 0; i < elites; ++i) {
      var += (scored[i].second - new_mean).cwiseProduct(scored[i].second - new_mean);
    }
    mean = new_mean;
    sd = (var / elites).cwiseSqrt().cwiseMax(0.05);

    PointMass eval_env(spec);
    double score = 0.0;
    for (int e = 0; e < eval_episodes; ++e) {
      score += rollout_return(
          eval_env, [&](const Eigen::VectorXd& s) { return pd_action(s, spec, mean); },
          eval_rng.next_u64());
    }
    run.snapshots.push_back({score / eval_episodes, mean, run.stream.size()});
    ++iteration;
    if (iteration > 2000) {
      throw std::runtime_error("train_pointmass_behavior: did not gather enough transitions");
    }
  }
  run.final_gains = mean;
  return run;
}

template <typename Snapshot>
const Snapshot& pick_medium_snapshot(const std::vector<Snapshot>& snapshots, double target) {
  if (snapshots.empty()) throw std::runtime_error("behavior training produced no snapshots");
  std::size_t best = 0;
  for (std::size_t i = 1; i < snapshots.size(); ++i) {
    if (std::abs(snapshots[i].eval_return - target) < std::abs(snapshots[best].eval_return - target)) {
      best = i;
    }
  }
  return snapshots[best];
}

DatasetMeta make_meta(const EnvSpec& env, const std::string& behavior, std::uint64_t seed) {
  DatasetMeta meta;
  meta.env_id = env.id;
  meta.behavior_id = behavior;
  meta.seed = seed;
  meta.action_kind = env.action_kind();
  Env e = env.make();
  meta.state_dim = e.state_dim();
  meta.action_dim =
      meta.action_kind == ActionKind::discrete ? e.num_actions() : e.action_dim();
  return meta;
}

void collect_gridworld(std::vector<Transition>& out, const GridWorldSpec& spec,
                       const DiscretePolicy& policy, std::int64_t size, Rng& rng) {
  GridWorld env(spec);
  while (static_cast<std::int64_t>(out.size()) < size) {
    env.reset(rng.next_u64());
    while (!env.episode_over() && static_cast<std::int64_t>(out.size()) < size) {
      out.push_back(env.step(policy(env, env.pos())));
    }
  }
}

void collect_pointmass(std::vector<Transition>& out, const PointMassSpec& spec,
                       const BoxPolicy& policy, std::int64_t size, Rng& rng) {
  PointMass env(spec);
  while (static_cast<std::int64_t>(out.size()) < size) {
    Eigen::VectorXd s = env.reset(rng.next_u64());
    while (!env.episode_over() && static_cast<std::int64_t>(out.size()) < size) {
      Transition t = env.step(policy(s));
      s = t.next_state;
      out.push_back(std::move(t));
    }
  }
}

}  // namespace

GridWorldExpert::GridWorldExpert(GridWorldSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  dist_.assign(static_cast<std::size_t>(spec_.width) * spec_.height,
               std::numeric_limits<int>::max());
  std::deque<Cell> queue{spec_.goal};
  dist_[spec_.goal.y * spec_.width + spec_.goal.x] = 0;
  while (!queue.empty()) {
    Cell c = queue.front();
    queue.pop_front();
    for (int a = 0; a < 4; ++a) {
      Cell n{c.x + kDx[a], c.y + kDy[a]};
      if (n.x < 0 || n.x >= spec_.width || n.y < 0 || n.y >= spec_.height) continue;
      if (std::find(spec_.walls.begin(), spec_.walls.end(), n) != spec_.walls.end()) continue;
      if (dist_[n.y * spec_.width + n.x] != std::numeric_limits<int>::max()) continue;
      dist_[n.y * spec_.width + n.x] = dist_[c.y * spec_.width + c.x] + 1;
      queue.push_back(n);
    }
  }
}

int GridWorldExpert::dist_at(Cell c) const {
  if (c.x < 0 || c.x >= spec_.width || c.y < 0 || c.y >= spec_.height) {
    return std::numeric_limits<int>::max();
  }
  if (std::find(spec_.walls.begin(), spec_.walls.end(), c) != spec_.walls.end()) {
    return std::numeric_limits<int>::max();
  }
  return dist_[c.y * spec_.width + c.x];
}

int GridWorldExpert::action(Cell pos) const {
  int best = 0;
  int best_dist = std::numeric_limits<int>::max();
  for (int a = 0; a < 4; ++a) {
    Cell n{pos.x + kDx[a], pos.y + kDy[a]};
    const int d = dist_at(n);
    if (d < best_dist) {
      best_dist = d;
      best = a;
    }
  }
  return best;
}

Eigen::Vector2d pd_expert_action(const Eigen::VectorXd& state, const PointMassSpec& spec,
                                 double kp, double kd) {
  return pd_action(state, spec, Eigen::Vector2d(kp, kd));
}

double evaluate_random_policy(const EnvSpec& env, int episodes, std::uint64_t seed) {
  Rng rng(seed);
  Rng act = rng.sub("actions");
  double total = 0.0;
  if (env.action_kind() == ActionKind::discrete) {
    GridWorld g(std::get<GridWorldSpec>(env.spec));
    for (int e = 0; e < episodes; ++e) {
      total += rollout_return(
          g, [&](const GridWorld&, Cell) { return act.uniform_int(GridWorld::kNumActions); },
          rng.next_u64());
    }
  } else {
    PointMass p(std::get<PointMassSpec>(env.spec));
    for (int e = 0; e < episodes; ++e) {
      total += rollout_return(
          p,
          [&](const Eigen::VectorXd&) {
            return Eigen::Vector2d(act.uniform(-1.0, 1.0), act.uniform(-1.0, 1.0));
          },
          rng.next_u64());
    }
  }
  return total / episodes;
}

double evaluate_expert_policy(const EnvSpec& env, int episodes, std::uint64_t seed) {
  Rng rng(seed);
  double total = 0.0;
  if (env.action_kind() == ActionKind::discrete) {
    const auto& spec = std::get<GridWorldSpec>(env.spec);
    GridWorldExpert expert(spec);
    GridWorld g(spec);
    for (int e = 0; e < episodes; ++e) {
      total += rollout_return(
          g, [&](const GridWorld&, Cell c) { return expert.action(c); }, rng.next_u64());
    }
  } else {
    const auto& spec = std::get<PointMassSpec>(env.spec);
    PointMass p(spec);
    for (int e = 0; e < episodes; ++e) {
      total += rollout_return(
          p, [&](const Eigen::VectorXd& s) { return pd_expert_action(s, spec); },
          rng.next_u64());
    }
  }
  return total / episodes;
}

Dataset generate_dataset(const EnvSpec& env, const std::string& behavior, std::int64_t size,
                         std::uint64_t seed) {
  if (size < 1) throw std::invalid_argument("generate_dataset: size must be >= 1");
  env.validate();
  if (behavior != "random" && behavior != "medium" && behavior != "medium-replay") {
    throw std::invalid_argument("generate_dataset: unknown behavior id '" + behavior + "'");
  }

  Dataset ds;
  ds.meta = make_meta(env, behavior, seed);
  Rng rng(seed);
  Rng noise = rng.sub("noise");
  Rng episodes = rng.sub("collect");
  const double target =
      0.5 * (env.score_random + env.score_expert);  // midpoint of the anchor range

  if (env.action_kind() == ActionKind::discrete) {
    const auto& spec = std::get<GridWorldSpec>(env.spec);
    if (behavior == "random") {
      collect_gridworld(
          ds.transitions, spec,
          [&](const GridWorld&, Cell) { return noise.uniform_int(GridWorld::kNumActions); },
          size, episodes);
    } else {
      GridTrainingRun run = train_gridworld_behavior(spec, 0, rng.sub("train"));
      const auto& snap = pick_medium_snapshot(run.snapshots, target);
      const Eigen::MatrixXd q = snap.q;
      auto medium_policy = [&](const GridWorld&, Cell c) {
        if (noise.uniform() < kActionNoise) return noise.uniform_int(GridWorld::kNumActions);
        return greedy_action(q, c.y * spec.width + c.x);
      };
      if (behavior == "medium-replay") {
        // The run's buffer up to the point the policy reached medium
        // quality; padded with medium rollouts when the request is larger.
        run.stream.resize(std::min(snap.stream_cutoff, run.stream.size()));
        ds.transitions = std::move(run.stream);
        if (static_cast<std::int64_t>(ds.transitions.size()) > size) {
          ds.transitions.resize(static_cast<std::size_t>(size));
        } else {
          collect_gridworld(ds.transitions, spec, medium_policy, size, episodes);
        }
      } else {
        collect_gridworld(ds.transitions, spec, medium_policy, size, episodes);
      }
    }
  } else {
    const auto& spec = std::get<PointMassSpec>(env.spec);
    if (behavior == "random") {
      collect_pointmass(
          ds.transitions, spec,
          [&](const Eigen::VectorXd&) {
            return Eigen::Vector2d(noise.uniform(-1.0, 1.0), noise.uniform(-1.0, 1.0));
          },
          size, episodes);
    } else {
      PointTrainingRun run = train_pointmass_behavior(spec, 0, rng.sub("train"));
      const auto& snap = pick_medium_snapshot(run.snapshots, target);
      const Eigen::Vector2d gains = snap.gains;
      auto medium_policy = [&](const Eigen::VectorXd& s) {
        if (noise.uniform() < kActionNoise) {
          return Eigen::Vector2d(noise.uniform(-1.0, 1.0), noise.uniform(-1.0, 1.0));
        }
        return pd_action(s, spec, gains);
      };
      if (behavior == "medium-replay") {
        run.stream.resize(std::min(snap.stream_cutoff, run.stream.size()));
        ds.transitions = std::move(run.stream);
        if (static_cast<std::int64_t>(ds.transitions.size()) > size) {
          ds.transitions.resize(static_cast<std::size_t>(size));
        } else {
          collect_pointmass(ds.transitions, spec, medium_policy, size, episodes);
        }
      } else {
        collect_pointmass(ds.transitions, spec, medium_policy, size, episodes);
      }
    }
  }
  ds.validate();
  return ds;
}

}  // namespace qcse
