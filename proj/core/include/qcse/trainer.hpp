#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcse/checkpoint.hpp"
#include "qcse/dataset.hpp"
#include "qcse/intrinsic.hpp"
#include "qcse/losses.hpp"
#include "qcse/metrics.hpp"

namespace qcse {

struct TrainConfig {
  long offline_steps = 20000;
  long online_steps = 50000;
  int batch_size = 256;
  /// Offline fraction of each mixed batch (rounded down); the remainder is
  /// sampled from the online buffer. 0 trains online-only.
  double mix_ratio = 0.5;
  long eval_interval = 1000;
  int eval_episodes = 20;
  EntropyConfig entropy;
  /// Neighbor count of the monitoring entropy curve (fixed so arms with
  /// different intrinsic settings stay comparable).
  int entropy_monitor_k = 3;
  long entropy_monitor_samples = 5000;
  std::size_t online_capacity = 1u << 20;
  /// Condition the intrinsic reward on a freshly initialized critic pair
  /// (trained alongside) instead of the pretrained one.
  bool scratch_condition_q = false;

  /// Batch arithmetic must keep the entropy estimator well-posed: the
  /// online share of a batch has to exceed k whenever the intrinsic reward
  /// is enabled. Throws std::invalid_argument on violation.
  void validate() const;

  int offline_share() const { return static_cast<int>(mix_ratio * batch_size); }
  int online_share() const { return batch_size - offline_share(); }
};

struct EvalResult {
  double mean_return = 0.0;
  double norm_score = 0.0;
};

/// Frozen-parameter evaluation: deterministic-mode rollouts, normalized as
/// 100 * (score - random anchor) / (expert anchor - random anchor).
EvalResult evaluate_policy(const ActorCritic& agent, const EnvSpec& env, int episodes, Rng rng);

/// Paths are optional; empty strings keep everything in memory.
struct RunPaths {
  std::string metrics_csv;
  std::string diagnostics_dir;  ///< for the abort checkpoint on non-finite loss
};

/// Fine-tuning counters surfaced for invariant checks.
struct FinetuneStats {
  long batches = 0;
  long augmented_samples = 0;
  double max_abs_reward_shift = 0.0;  ///< over all augmented samples
  long env_steps = 0;
  std::uint64_t online_pushed = 0;
};

/// Offline pretraining: offline_steps iterations of critic loss (per the
/// agent's algorithm), actor loss, and an EMA update. No environment
/// interaction and no intrinsic reward.
MetricLog pretrain_offline(ActorCritic& agent, const Dataset& data, const EnvSpec& env,
                           const TrainConfig& cfg, std::uint64_t seed,
                           const RunPaths& paths = {});

/// Online fine-tuning: per iteration one environment step into the online
/// buffer, a mixed batch with the configured offline share, reward
/// augmentation of the online rows only, then critic/actor/EMA updates.
MetricLog finetune_online(ActorCritic& agent, const EnvSpec& env, const Dataset& offline,
                          const TrainConfig& cfg, std::uint64_t seed,
                          const RunPaths& paths = {}, FinetuneStats* stats = nullptr);

/// Networks-only agent checkpoint (policy, critics, targets + metadata).
Checkpoint make_checkpoint(const ActorCritic& agent);
void restore_agent(ActorCritic& agent, const Checkpoint& ck);

struct ExperimentSpec {
  EnvSpec env;
  Dataset offline;
  ActorCriticConfig agent;
  TrainConfig train;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  bool skip_pretrain = false;
};

struct SeedResult {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double final_eval_return = 0.0;
  double final_norm_score = 0.0;
  /// Mean normalized score over the last quarter of online evaluations.
  double final_quarter_mean_norm = 0.0;
  double final_quarter_mean_entropy = 0.0;
};

struct ExperimentSummary {
  std::vector<SeedResult> seeds;
  int failed = 0;
  double mean_final_norm = 0.0;
  double median_final_norm = 0.0;
  double mean_final_return = 0.0;
  double median_final_return = 0.0;
};

/// Pretrain + finetune per seed, sequentially; one seed's failure is
/// recorded without discarding the others. Writes per-seed metric CSVs and
/// summary.json under out_dir (if set).
ExperimentSummary run_experiment(const ExperimentSpec& spec);

std::string summary_to_json(const ExperimentSummary& summary);

}  // namespace qcse
