#include "qcse/trainer.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>

#include <json.hpp>

#include "qcse/reference_values.hpp"
#include "qcse/replay_buffer.hpp"
#include "qcse/stats.hpp"

namespace qcse {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_agent_dataset(const ActorCriticConfig& cfg, const DatasetMeta& meta) {
  if (cfg.state_dim != meta.state_dim) {
    throw std::invalid_argument("trainer: agent/dataset state dimension mismatch");
  }
  if (cfg.kind != meta.action_kind || cfg.action_dim != meta.action_dim) {
    throw std::invalid_argument("trainer: agent/dataset action space mismatch");
  }
}

void check_agent_env(const ActorCriticConfig& cfg, const EnvSpec& env_spec) {
  Env env = env_spec.make();
  if (cfg.state_dim != env.state_dim()) {
    throw std::invalid_argument("trainer: agent/env state dimension mismatch");
  }
  if (cfg.kind != env.action_kind()) {
    throw std::invalid_argument("trainer: agent/env action kind mismatch");
  }
  const int dim = cfg.kind == ActionKind::box ? env.action_dim() : env.num_actions();
  if (cfg.action_dim != dim) {
    throw std::invalid_argument("trainer: agent/env action dimension mismatch");
  }
}

void append_row(Batch& batch, Eigen::Index row, const Transition& t, bool online,
                ActionKind kind) {
  batch.states.row(row) = t.state;
  batch.next_states.row(row) = t.next_state;
  batch.rewards[row] = t.reward;
  batch.done[row] = t.done ? 1.0 : 0.0;
  batch.online[static_cast<std::size_t>(row)] = online ? 1 : 0;
  if (kind == ActionKind::box) {
    batch.actions.row(row) = t.action;
  } else {
    batch.action_idx[static_cast<std::size_t>(row)] = t.action_index;
  }
}

Batch empty_batch(const ActorCriticConfig& cfg, Eigen::Index n) {
  Batch b;
  b.states.resize(n, cfg.state_dim);
  b.next_states.resize(n, cfg.state_dim);
  b.rewards.resize(n);
  b.done.resize(n);
  b.online.assign(static_cast<std::size_t>(n), 0);
  if (cfg.kind == ActionKind::box) {
    b.actions.resize(n, cfg.action_dim);
  } else {
    b.action_idx.assign(static_cast<std::size_t>(n), 0);
  }
  return b;
}

struct StepOutcome {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double mean_q = 0.0;
};

StepOutcome update_agent(ActorCritic& agent, const Batch& batch, const Eigen::VectorXd& vmu,
                         Rng& loss_rng) {
  StepOutcome out;
  CriticLossResult closs = critic_loss_for(agent, batch, vmu, loss_rng);
  if (!std::isfinite(closs.loss)) throw std::runtime_error("non-finite critic loss");
  adam_apply(agent.opt_q1, agent.qs.q1, closs.g1);
  adam_apply(agent.opt_q2, agent.qs.q2, closs.g2);

  ActorLossResult aloss = actor_loss(agent, batch, loss_rng);
  if (!std::isfinite(aloss.loss)) throw std::runtime_error("non-finite actor loss");
  adam_apply(agent.opt_policy, agent.policy, aloss.grad);
  if (agent.cfg.auto_alpha) {
    const double target_entropy = -static_cast<double>(agent.cfg.action_dim);
    Eigen::VectorXd p(1), g(1);
    p[0] = agent.log_alpha;
    g[0] = -(aloss.mean_log_prob + target_entropy);
    agent.opt_alpha.step(p, g);
    agent.log_alpha = p[0];
  }
  agent.qs.ema_update();

  out.critic_loss = closs.loss;
  out.actor_loss = aloss.loss;
  out.mean_q = 0.5 * (closs.diag.q1.mean() + closs.diag.q2.mean());
  return out;
}

/// Entropy proxy over a without-replacement state sample; NaN when the
/// sample cannot support the estimator.
double monitor_entropy(const std::vector<const Transition*>& pool, int k, long max_samples,
                       int state_dim, Rng& rng) {
  const long n = std::min<long>(max_samples, static_cast<long>(pool.size()));
  if (n <= k) return std::numeric_limits<double>::quiet_NaN();
  std::vector<std::size_t> idx(pool.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (long i = 0; i < n; ++i) {
    const long j = i + rng.uniform_int(static_cast<int>(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  Eigen::MatrixXd states(n, state_dim);
  for (long i = 0; i < n; ++i) states.row(i) = pool[idx[i]]->state;
  return buffer_entropy_estimate(states, k);
}

void save_diagnostic(const ActorCritic& agent, const std::string& dir, long step) {
  if (dir.empty()) return;
  fs::create_directories(dir);
  save_checkpoint(make_checkpoint(agent), dir + "/diagnostic_step" + std::to_string(step) + ".qckp");
}

}  // namespace

void TrainConfig::validate() const {
  if (offline_steps < 0 || online_steps < 0) {
    throw std::invalid_argument("TrainConfig: step counts must be >= 0");
  }
  if (batch_size < 2) throw std::invalid_argument("TrainConfig: batch_size must be >= 2");
  if (!(mix_ratio >= 0.0 && mix_ratio <= 1.0)) {
    throw std::invalid_argument("TrainConfig: mix_ratio must lie in [0, 1]");
  }
  if (eval_interval < 1) throw std::invalid_argument("TrainConfig: eval_interval must be >= 1");
  if (eval_episodes < 1) throw std::invalid_argument("TrainConfig: eval_episodes must be >= 1");
  if (entropy.k < 0) throw std::invalid_argument("TrainConfig: entropy k must be >= 0");
  if (entropy.lambda < 0.0 || !std::isfinite(entropy.lambda)) {
    throw std::invalid_argument("TrainConfig: entropy lambda must be finite and >= 0");
  }
  if (!(entropy.duplicate_floor > 0.0)) {
    throw std::invalid_argument("TrainConfig: duplicate_floor must be > 0");
  }
  if (entropy.enabled()) {
    if (batch_size < 2 * (entropy.k + 1)) {
      throw std::invalid_argument("TrainConfig: batch_size must be >= 2*(k+1) for the entropy estimator");
    }
    if (online_share() <= entropy.k) {
      throw std::invalid_argument("TrainConfig: online batch share must exceed entropy k");
    }
  }
  if (entropy_monitor_k < 1) throw std::invalid_argument("TrainConfig: entropy_monitor_k must be >= 1");
  if (online_capacity < 1) throw std::invalid_argument("TrainConfig: online_capacity must be >= 1");
}

EvalResult evaluate_policy(const ActorCritic& agent, const EnvSpec& env_spec, int episodes,
                           Rng rng) {
  if (episodes < 1) throw std::invalid_argument("evaluate_policy: episodes must be >= 1");
  check_agent_env(agent.cfg, env_spec);
  Env env = env_spec.make();
  Rng noise = rng.sub("noise");
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    Eigen::VectorXd s = env.reset(rng.next_u64());
    while (!env.episode_over()) {
      Transition t = env.action_kind() == ActionKind::discrete
                         ? env.step_discrete(agent.select_action_discrete(s, false, noise))
                         : env.step_box(agent.select_action_box(s, false, noise));
      total += t.reward;
      s = t.next_state;
    }
  }
  EvalResult res;
  res.mean_return = total / episodes;
  res.norm_score = 100.0 * (res.mean_return - env_spec.score_random) /
                   (env_spec.score_expert - env_spec.score_random);
  return res;
}

MetricLog pretrain_offline(ActorCritic& agent, const Dataset& data, const EnvSpec& env_spec,
                           const TrainConfig& cfg, std::uint64_t seed, const RunPaths& paths) {
  cfg.validate();
  data.validate();
  check_agent_dataset(agent.cfg, data.meta);
  check_agent_env(agent.cfg, env_spec);

  ReferenceValues rv;
  if (agent.cfg.algo == Algo::calql) rv = compute_reference_values(data, agent.cfg.gamma);

  MetricLog log = paths.metrics_csv.empty() ? MetricLog() : MetricLog(paths.metrics_csv);
  Rng root(seed);
  Rng sample_rng = root.sub("sampling");
  Rng loss_rng = root.sub("loss");
  Rng monitor_rng = root.sub("monitor");
  const auto start = Clock::now();

  const long n_data = static_cast<long>(data.transitions.size());
  std::vector<const Transition*> pool(data.transitions.size());
  for (std::size_t i = 0; i < data.transitions.size(); ++i) pool[i] = &data.transitions[i];

  double acc_closs = 0.0, acc_aloss = 0.0, acc_q = 0.0;
  long acc_n = 0;
  long eval_idx = 0;
  for (long step = 1; step <= cfg.offline_steps; ++step) {
    Batch batch = empty_batch(agent.cfg, cfg.batch_size);
    Eigen::VectorXd vmu = Eigen::VectorXd::Zero(cfg.batch_size);
    for (int r = 0; r < cfg.batch_size; ++r) {
      const long i = sample_rng.uniform_int(static_cast<int>(n_data));
      append_row(batch, r, data.transitions[static_cast<std::size_t>(i)], false, agent.cfg.kind);
      if (agent.cfg.algo == Algo::calql) vmu[r] = rv.value[i];
    }
    StepOutcome out;
    try {
      out = update_agent(agent, batch, vmu, loss_rng);
    } catch (const std::exception& e) {
      save_diagnostic(agent, paths.diagnostics_dir, step);
      throw std::runtime_error("pretrain aborted at step " + std::to_string(step) + ": " + e.what());
    }
    acc_closs += out.critic_loss;
    acc_aloss += out.actor_loss;
    acc_q += out.mean_q;
    ++acc_n;

    if (step % cfg.eval_interval == 0 || step == cfg.offline_steps) {
      const EvalResult ev = evaluate_policy(agent, env_spec, cfg.eval_episodes,
                                            root.sub("eval", static_cast<std::uint64_t>(eval_idx)));
      ++eval_idx;
      MetricRow row;
      row.step = step;
      row.critic_loss = acc_closs / acc_n;
      row.actor_loss = acc_aloss / acc_n;
      row.mean_q = acc_q / acc_n;
      row.mean_intrinsic = 0.0;
      row.buffer_entropy = monitor_entropy(pool, cfg.entropy_monitor_k,
                                           cfg.entropy_monitor_samples, agent.cfg.state_dim,
                                           monitor_rng);
      row.eval_return = ev.mean_return;
      row.norm_score = ev.norm_score;
      row.wall_ms = elapsed_ms(start);
      log.append(row);
      acc_closs = acc_aloss = acc_q = 0.0;
      acc_n = 0;
    }
  }
  return log;
}

MetricLog finetune_online(ActorCritic& agent, const EnvSpec& env_spec, const Dataset& offline,
                          const TrainConfig& cfg, std::uint64_t seed, const RunPaths& paths,
                          FinetuneStats* stats) {
  cfg.validate();
  offline.validate();
  check_agent_dataset(agent.cfg, offline.meta);
  check_agent_env(agent.cfg, env_spec);
  const int n_off = cfg.offline_share();
  const int n_on = cfg.online_share();
  if (n_on < 1) throw std::invalid_argument("finetune_online: online batch share must be >= 1");

  ReferenceValues rv;
  if (agent.cfg.algo == Algo::calql) rv = compute_reference_values(offline, agent.cfg.gamma);

  MetricLog log = paths.metrics_csv.empty() ? MetricLog() : MetricLog(paths.metrics_csv);
  Rng root(seed);
  Rng sample_rng = root.sub("sampling");
  Rng loss_rng = root.sub("loss");
  Rng monitor_rng = root.sub("monitor");
  Rng action_rng = root.sub("action");
  Rng episode_rng = root.sub("episodes");
  const auto start = Clock::now();

  // Freshly initialized critic pair for the scratch-condition ablation,
  // trained alongside with the plain soft backup; only the intrinsic
  // condition reads it.
  std::optional<ActorCritic> shadow;
  Rng shadow_rng = root.sub("scratch");
  if (cfg.scratch_condition_q) {
    ActorCriticConfig scfg = agent.cfg;
    scfg.algo = Algo::sac;
    shadow.emplace(scfg, shadow_rng);
  }

  Env env = env_spec.make();
  ReplayBuffer online(cfg.online_capacity, BufferSource::online);
  // (absolute index, reward, done) of the open episode, for return-to-go
  // backfill once it closes.
  std::vector<std::tuple<std::uint64_t, double, bool>> episode;
  auto backfill = [&](void) {
    double g = 0.0;
    for (auto it = episode.rbegin(); it != episode.rend(); ++it) {
      const auto& [abs, r, done] = *it;
      g = r + agent.cfg.gamma * (done ? 0.0 : g);
      if (online.live(abs)) online.set_aux(abs, g);
    }
    episode.clear();
  };

  Eigen::VectorXd s = env.reset(episode_rng.next_u64());
  FinetuneStats local_stats;
  double acc_closs = 0.0, acc_aloss = 0.0, acc_q = 0.0, acc_intr = 0.0;
  long acc_n = 0, acc_intr_n = 0;
  long eval_idx = 0;

  for (long step = 1; step <= cfg.online_steps; ++step) {
    if (env.episode_over()) {
      backfill();
      s = env.reset(episode_rng.next_u64());
    }
    Transition t = agent.cfg.kind == ActionKind::discrete
                       ? env.step_discrete(agent.select_action_discrete(s, true, action_rng))
                       : env.step_box(agent.select_action_box(s, true, action_rng));
    s = t.next_state;
    const double reward = t.reward;
    const bool done = t.done;
    const std::uint64_t abs = online.push(std::move(t), reward);
    episode.emplace_back(abs, reward, done);
    ++local_stats.env_steps;
    if (env.episode_over()) backfill();

    // Mixed batch: offline share first, online remainder.
    Batch batch = empty_batch(agent.cfg, cfg.batch_size);
    Eigen::VectorXd vmu = Eigen::VectorXd::Zero(cfg.batch_size);
    for (int r = 0; r < n_off; ++r) {
      const long i = sample_rng.uniform_int(static_cast<int>(offline.transitions.size()));
      append_row(batch, r, offline.transitions[static_cast<std::size_t>(i)], false, agent.cfg.kind);
      if (agent.cfg.algo == Algo::calql) vmu[r] = rv.value[i];
    }
    const std::vector<std::uint64_t> on_abs = online.sample(static_cast<std::size_t>(n_on), sample_rng);
    for (int r = 0; r < n_on; ++r) {
      append_row(batch, n_off + r, online.at(on_abs[static_cast<std::size_t>(r)]), true,
                 agent.cfg.kind);
      if (agent.cfg.algo == Algo::calql) {
        vmu[n_off + r] = online.aux(on_abs[static_cast<std::size_t>(r)]);
      }
    }

    // Reward augmentation of the online rows only (Algorithm-1 fine-tuning).
    if (cfg.entropy.enabled()) {
      Batch sub = empty_batch(agent.cfg, n_on);
      for (int r = 0; r < n_on; ++r) {
        append_row(sub, r, online.at(on_abs[static_cast<std::size_t>(r)]), true, agent.cfg.kind);
      }
      Eigen::VectorXd cond;
      if (cfg.entropy.condition_mode != ConditionMode::none) {
        const DoubleQ& qsrc = shadow ? shadow->qs : agent.qs;
        cond = condition_values(qsrc, agent.policy, agent.cfg, sub,
                                cfg.entropy.condition_mode == ConditionMode::v);
      }
      const IntrinsicBatch intr = qcse_intrinsic(sub.states, cond, cfg.entropy);
      const ModifiedRewards mod = modify_rewards(sub.rewards, intr.reward, cfg.entropy.lambda);
      for (int r = 0; r < n_on; ++r) {
        const double shift = std::abs(mod.modified[r] - mod.original[r]);
        if (shift > cfg.entropy.lambda + 1e-9) {
          throw std::logic_error("finetune_online: reward shift exceeded lambda");
        }
        local_stats.max_abs_reward_shift = std::max(local_stats.max_abs_reward_shift, shift);
        batch.rewards[n_off + r] = mod.modified[r];
      }
      local_stats.augmented_samples += n_on;
      acc_intr += intr.reward.mean();
      ++acc_intr_n;
    }
    ++local_stats.batches;

    StepOutcome out;
    try {
      out = update_agent(agent, batch, vmu, loss_rng);
      if (shadow) {
        shadow->policy.unflatten(agent.policy.flatten());
        CriticLossResult sc = critic_bellman_loss(*shadow, batch, shadow_rng);
        adam_apply(shadow->opt_q1, shadow->qs.q1, sc.g1);
        adam_apply(shadow->opt_q2, shadow->qs.q2, sc.g2);
        shadow->qs.ema_update();
      }
    } catch (const std::exception& e) {
      save_diagnostic(agent, paths.diagnostics_dir, step);
      throw std::runtime_error("finetune aborted at step " + std::to_string(step) + ": " + e.what());
    }
    acc_closs += out.critic_loss;
    acc_aloss += out.actor_loss;
    acc_q += out.mean_q;
    ++acc_n;

    if (step % cfg.eval_interval == 0 || step == cfg.online_steps) {
      const EvalResult ev = evaluate_policy(agent, env_spec, cfg.eval_episodes,
                                            root.sub("eval", static_cast<std::uint64_t>(eval_idx)));
      ++eval_idx;
      std::vector<const Transition*> pool;
      pool.reserve(online.size());
      for (std::uint64_t i = online.first_live(); i < online.total_pushed(); ++i) {
        pool.push_back(&online.at(i));
      }
      MetricRow row;
      row.step = step;
      row.critic_loss = acc_closs / std::max(1L, acc_n);
      row.actor_loss = acc_aloss / std::max(1L, acc_n);
      row.mean_q = acc_q / std::max(1L, acc_n);
      row.mean_intrinsic = acc_intr_n > 0 ? acc_intr / acc_intr_n : 0.0;
      row.buffer_entropy = monitor_entropy(pool, cfg.entropy_monitor_k,
                                           cfg.entropy_monitor_samples, agent.cfg.state_dim,
                                           monitor_rng);
      row.eval_return = ev.mean_return;
      row.norm_score = ev.norm_score;
      row.wall_ms = elapsed_ms(start);
      log.append(row);
      acc_closs = acc_aloss = acc_q = acc_intr = 0.0;
      acc_n = acc_intr_n = 0;
    }
  }
  local_stats.online_pushed = online.total_pushed();
  if (stats) *stats = local_stats;
  return log;
}

Checkpoint make_checkpoint(const ActorCritic& agent) {
  Checkpoint ck;
  ck.put("policy", agent.policy);
  ck.put("q1", agent.qs.q1);
  ck.put("q2", agent.qs.q2);
  ck.put("t1", agent.qs.t1);
  ck.put("t2", agent.qs.t2);
  const nlohmann::json meta = {
      {"algo", to_string(agent.cfg.algo)},
      {"kind", agent.cfg.kind == ActionKind::box ? "box" : "discrete"},
      {"state_dim", agent.cfg.state_dim},
      {"action_dim", agent.cfg.action_dim},
      {"log_alpha", agent.log_alpha},
  };
  ck.meta_json = meta.dump();
  return ck;
}

void restore_agent(ActorCritic& agent, const Checkpoint& ck) {
  const nlohmann::json meta = nlohmann::json::parse(ck.meta_json);
  if (meta.at("state_dim").get<int>() != agent.cfg.state_dim ||
      meta.at("action_dim").get<int>() != agent.cfg.action_dim) {
    throw std::runtime_error("restore_agent: checkpoint dimensions do not match the agent");
  }
  const std::string kind = meta.at("kind").get<std::string>();
  if ((kind == "box") != (agent.cfg.kind == ActionKind::box)) {
    throw std::runtime_error("restore_agent: checkpoint action kind does not match the agent");
  }
  agent.policy.unflatten(ck.sections.at("policy").params);
  agent.qs.q1.unflatten(ck.sections.at("q1").params);
  agent.qs.q2.unflatten(ck.sections.at("q2").params);
  agent.qs.t1.unflatten(ck.sections.at("t1").params);
  agent.qs.t2.unflatten(ck.sections.at("t2").params);
  agent.log_alpha = meta.at("log_alpha").get<double>();
}

ExperimentSummary run_experiment(const ExperimentSpec& spec) {
  spec.env.validate();
  spec.train.validate();
  if (spec.seeds.empty()) throw std::invalid_argument("run_experiment: need at least one seed");
  if (!spec.out_dir.empty()) fs::create_directories(spec.out_dir);

  ExperimentSummary summary;
  for (const std::uint64_t seed : spec.seeds) {
    SeedResult res;
    res.seed = seed;
    try {
      Rng init = Rng(seed).sub("init");
      ActorCritic agent(spec.agent, init);
      const std::string tag = "_seed" + std::to_string(seed);
      RunPaths pre_paths, fin_paths;
      if (!spec.out_dir.empty()) {
        pre_paths.metrics_csv = spec.out_dir + "/pretrain" + tag + ".csv";
        pre_paths.diagnostics_dir = spec.out_dir + "/diagnostics";
        fin_paths.metrics_csv = spec.out_dir + "/metrics" + tag + ".csv";
        fin_paths.diagnostics_dir = spec.out_dir + "/diagnostics";
      }
      if (!spec.skip_pretrain) {
        pretrain_offline(agent, spec.offline, spec.env, spec.train, seed, pre_paths);
      }
      MetricLog log = finetune_online(agent, spec.env, spec.offline, spec.train, seed, fin_paths);
      if (!spec.out_dir.empty()) {
        save_checkpoint(make_checkpoint(agent), spec.out_dir + "/checkpoint" + tag + ".qckp");
      }
      if (!log.rows().empty()) {
        res.final_eval_return = log.rows().back().eval_return;
        res.final_norm_score = log.rows().back().norm_score;
        const long quarter_start = spec.train.online_steps - spec.train.online_steps / 4;
        std::vector<double> norms, entropies;
        for (const auto& row : log.rows()) {
          if (row.step > quarter_start) {
            norms.push_back(row.norm_score);
            if (std::isfinite(row.buffer_entropy)) entropies.push_back(row.buffer_entropy);
          }
        }
        if (norms.empty()) norms.push_back(log.rows().back().norm_score);
        res.final_quarter_mean_norm = mean(norms);
        res.final_quarter_mean_entropy = entropies.empty()
                                             ? std::numeric_limits<double>::quiet_NaN()
                                             : mean(entropies);
      }
      res.ok = true;
    } catch (const std::exception& e) {
      res.ok = false;
      res.error = e.what();
      ++summary.failed;
    }
    summary.seeds.push_back(std::move(res));
  }

  std::vector<double> norms, rets;
  for (const auto& r : summary.seeds) {
    if (!r.ok) continue;
    norms.push_back(r.final_norm_score);
    rets.push_back(r.final_eval_return);
  }
  if (!norms.empty()) {
    summary.mean_final_norm = mean(norms);
    summary.median_final_norm = median(norms);
    summary.mean_final_return = mean(rets);
    summary.median_final_return = median(rets);
  }
  if (!spec.out_dir.empty()) {
    std::ofstream os(spec.out_dir + "/summary.json");
    os << summary_to_json(summary) << '\n';
  }
  return summary;
}

std::string summary_to_json(const ExperimentSummary& summary) {
  nlohmann::json j;
  j["failed"] = summary.failed;
  j["mean_final_norm"] = summary.mean_final_norm;
  j["median_final_norm"] = summary.median_final_norm;
  j["mean_final_return"] = summary.mean_final_return;
  j["median_final_return"] = summary.median_final_return;
  j["seeds"] = nlohmann::json::array();
  for (const auto& r : summary.seeds) {
    j["seeds"].push_back({
        {"seed", r.seed},
        {"ok", r.ok},
        {"error", r.error},
        {"final_eval_return", r.final_eval_return},
        {"final_norm_score", r.final_norm_score},
        {"final_quarter_mean_norm", r.final_quarter_mean_norm},
    });
  }
  return j.dump(2);
}

}  // namespace qcse
