// Command-line front end: dataset generation, offline pretraining, online
// fine-tuning, theory verification, and knn ablation sweeps.
//
// Exit codes: 0 success, 1 usage/config error, 2 verification assertion
// failure, 3 runtime failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcse/behavior.hpp"
#include "qcse/experiment_config.hpp"
#include "qcse/stats.hpp"
#include "qcse/trainer.hpp"
#include "qcse/verify.hpp"

namespace fs = std::filesystem;
using namespace qcse;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> lambda;
  std::optional<int> knn;
  std::optional<std::string> condition_mode;
  bool scratch_condition_q = false;
  std::optional<std::string> algo;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& ov, const std::string& subdir) {
  if (ov.seed) cfg.seeds = {*ov.seed};
  if (ov.out) cfg.out_dir = *ov.out;
  if (ov.lambda) cfg.train.entropy.lambda = *ov.lambda;
  if (ov.knn) cfg.train.entropy.k = *ov.knn;
  if (ov.condition_mode) {
    if (*ov.condition_mode == "none") cfg.train.entropy.condition_mode = ConditionMode::none;
    else if (*ov.condition_mode == "v") cfg.train.entropy.condition_mode = ConditionMode::v;
    else if (*ov.condition_mode == "q") cfg.train.entropy.condition_mode = ConditionMode::q;
    else throw ConfigError("--condition-mode must be one of none/v/q");
  }
  if (ov.scratch_condition_q) cfg.train.scratch_condition_q = true;
  if (ov.algo) cfg.agent.algo = algo_from_string(*ov.algo);
  cfg.train.validate();

  // Output root: --out / config value, under QCSE_OUT_ROOT when that is set
  // and the path is relative.
  std::string out = cfg.out_dir.empty() ? ("runs/" + subdir) : cfg.out_dir;
  if (const char* root = std::getenv("QCSE_OUT_ROOT"); root && *root && !fs::path(out).is_absolute()) {
    out = (fs::path(root) / out).string();
  }
  cfg.out_dir = out;
}

void write_resolved(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  std::ofstream os(cfg.out_dir + "/config.resolved.json");
  os << cfg.resolved_json() << '\n';
}

Dataset obtain_dataset(const ExperimentConfig& cfg) {
  if (!cfg.dataset_path.empty()) {
    return load_dataset(cfg.dataset_path);
  }
  if (cfg.generate.present) {
    return generate_dataset(cfg.env, cfg.generate.behavior, cfg.generate.size,
                            cfg.generate.seed);
  }
  throw ConfigError("config: this command needs a 'dataset' block (path or generate)");
}

std::uint64_t file_fnv64(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return fnv1a64(bytes);
}

int cmd_generate(const ExperimentConfig& cfg) {
  if (!cfg.generate.present) {
    throw ConfigError("config: 'dataset.generate' block required for generate");
  }
  fs::create_directories(cfg.out_dir);
  const Dataset ds = generate_dataset(cfg.env, cfg.generate.behavior, cfg.generate.size,
                                      cfg.generate.seed);
  const std::string path = cfg.dataset_path.empty() ? cfg.out_dir + "/dataset.qds"
                                                    : cfg.dataset_path;
  save_dataset(ds, path);

  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(file_fnv64(path)));
  const nlohmann::json manifest = {
      {"path", path},
      {"fnv1a64", hash},
      {"size", ds.transitions.size()},
      {"behavior", ds.meta.behavior_id},
      {"seed", ds.meta.seed},
      {"env", ds.meta.env_id},
      {"avg_episode_return", ds.average_episode_return()},
  };
  std::ofstream os(cfg.out_dir + "/manifest.json");
  os << manifest.dump(2) << '\n';
  std::cout << "dataset written to " << path << " (fnv1a64 " << hash << ")\n";
  return 0;
}

int cmd_pretrain(const ExperimentConfig& cfg) {
  write_resolved(cfg);
  const Dataset data = obtain_dataset(cfg);
  for (const std::uint64_t seed : cfg.seeds) {
    Rng init = Rng(seed).sub("init");
    ActorCritic agent(cfg.agent, init);
    RunPaths paths;
    paths.metrics_csv = cfg.out_dir + "/pretrain_seed" + std::to_string(seed) + ".csv";
    paths.diagnostics_dir = cfg.out_dir + "/diagnostics";
    MetricLog log = pretrain_offline(agent, data, cfg.env, cfg.train, seed, paths);
    const std::string ckpt = cfg.out_dir + "/pretrain_seed" + std::to_string(seed) + ".qckp";
    save_checkpoint(make_checkpoint(agent), ckpt);
    const double final_norm = log.rows().empty() ? 0.0 : log.rows().back().norm_score;
    std::cout << "seed " << seed << ": pretrained " << cfg.train.offline_steps
              << " steps, final normalized score " << final_norm << ", checkpoint " << ckpt
              << "\n";
  }
  return 0;
}

int cmd_finetune(const ExperimentConfig& cfg, const std::string& from, bool from_scratch) {
  write_resolved(cfg);
  const Dataset data = obtain_dataset(cfg);
  std::vector<double> final_norms;
  for (const std::uint64_t seed : cfg.seeds) {
    Rng init = Rng(seed).sub("init");
    ActorCritic agent(cfg.agent, init);
    if (!from_scratch) {
      std::string ckpt = from.empty()
                             ? cfg.out_dir + "/pretrain_seed" + std::to_string(seed) + ".qckp"
                             : from;
      if (!fs::exists(ckpt)) {
        throw ConfigError("finetune: checkpoint '" + ckpt +
                          "' not found (run pretrain first or pass --from/--from-scratch)");
      }
      restore_agent(agent, load_checkpoint(ckpt));
    }
    RunPaths paths;
    paths.metrics_csv = cfg.out_dir + "/metrics_seed" + std::to_string(seed) + ".csv";
    paths.diagnostics_dir = cfg.out_dir + "/diagnostics";
    FinetuneStats stats;
    MetricLog log = finetune_online(agent, cfg.env, data, cfg.train, seed, paths, &stats);
    save_checkpoint(make_checkpoint(agent),
                    cfg.out_dir + "/finetune_seed" + std::to_string(seed) + ".qckp");
    const double final_norm = log.rows().empty() ? 0.0 : log.rows().back().norm_score;
    final_norms.push_back(final_norm);
    std::cout << "seed " << seed << ": fine-tuned " << cfg.train.online_steps
              << " steps, final normalized score " << final_norm << ", max reward shift "
              << stats.max_abs_reward_shift << "\n";
  }
  if (!final_norms.empty()) {
    std::cout << "mean final normalized score " << mean(final_norms) << " over "
              << final_norms.size() << " seed(s)\n";
  }
  return 0;
}

int cmd_verify(const VerifyTolerances& tol, const std::string& out_dir) {
  const VerifyReport rep = run_verification(tol);
  std::cout << verify_report_text(rep, tol);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream os(out_dir + "/verify_report.json");
    os << verify_report_json(rep, tol) << '\n';
    std::cout << "report written to " << out_dir << "/verify_report.json\n";
  }
  return rep.all_hard_ok() ? 0 : 2;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  write_resolved(cfg);
  const Dataset data = obtain_dataset(cfg);
  if (cfg.knn_sweep.empty()) throw ConfigError("config: 'knn_sweep' must be nonempty");
  std::vector<int> ks;
  std::set<int> seen;
  for (int k : cfg.knn_sweep) {
    if (seen.insert(k).second) ks.push_back(k);
    else std::cerr << "warning: duplicate knn value " << k << " ignored\n";
  }

  // One pretrain per seed, shared across every k arm.
  std::vector<Checkpoint> pretrained;
  for (const std::uint64_t seed : cfg.seeds) {
    Rng init = Rng(seed).sub("init");
    ActorCritic agent(cfg.agent, init);
    if (cfg.train.offline_steps > 0) {
      RunPaths paths;
      paths.metrics_csv = cfg.out_dir + "/pretrain_seed" + std::to_string(seed) + ".csv";
      paths.diagnostics_dir = cfg.out_dir + "/diagnostics";
      pretrain_offline(agent, data, cfg.env, cfg.train, seed, paths);
    }
    pretrained.push_back(make_checkpoint(agent));
  }

  nlohmann::json table = nlohmann::json::array();
  std::string csv = "k,mean_final_norm_score\n";
  for (int k : ks) {
    TrainConfig tc = cfg.train;
    tc.entropy.k = k;  // k = 0 disables the intrinsic reward
    tc.validate();
    std::vector<double> finals;
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
      const std::uint64_t seed = cfg.seeds[i];
      Rng init = Rng(seed).sub("init");
      ActorCritic agent(cfg.agent, init);
      restore_agent(agent, pretrained[i]);
      RunPaths paths;
      paths.metrics_csv = cfg.out_dir + "/metrics_k" + std::to_string(k) + "_seed" +
                          std::to_string(seed) + ".csv";
      paths.diagnostics_dir = cfg.out_dir + "/diagnostics";
      MetricLog log = finetune_online(agent, cfg.env, data, tc, seed, paths);
      finals.push_back(log.rows().empty() ? 0.0 : log.rows().back().norm_score);
    }
    const double m = mean(finals);
    table.push_back({{"k", k}, {"mean_final_norm_score", m}});
    csv += std::to_string(k) + "," + std::to_string(m) + "\n";
    std::cout << "k=" << k << ": mean final normalized score " << m << "\n";
  }
  std::ofstream(cfg.out_dir + "/sweep.json") << table.dump(2) << '\n';
  std::ofstream(cfg.out_dir + "/sweep.csv") << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline-to-online RL laboratory with conditional state-entropy exploration"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  std::string ov_out, ov_mode, ov_algo;
  std::uint64_t ov_seed = 0;
  double ov_lambda = 0.0;
  int ov_knn = 0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* copt = sub->add_option("--config", config_path, "experiment config (JSON)");
    if (needs_config) copt->required();
    sub->add_option("--seed", ov_seed, "override the seed list with one seed")
        ->each([&](const std::string&) { ov.seed = ov_seed; });
    sub->add_option("--out", ov_out, "output directory")
        ->each([&](const std::string&) { ov.out = ov_out; });
    return sub;
  };
  auto add_finetune_flags = [&](CLI::App* sub) {
    sub->add_option("--lambda", ov_lambda, "intrinsic reward scale")
        ->each([&](const std::string&) { ov.lambda = ov_lambda; });
    sub->add_option("--knn", ov_knn, "neighbor count (0 disables)")
        ->each([&](const std::string&) { ov.knn = ov_knn; });
    sub->add_option("--condition-mode", ov_mode, "none|v|q")
        ->each([&](const std::string&) { ov.condition_mode = ov_mode; });
    sub->add_flag("--scratch-condition-q", ov.scratch_condition_q,
                  "condition the intrinsic reward on a freshly initialized critic");
    sub->add_option("--algo", ov_algo, "sac|cql|calql|awac")
        ->each([&](const std::string&) { ov.algo = ov_algo; });
  };

  auto* gen = add_common(app.add_subcommand("generate", "write an offline dataset"), true);
  auto* pre = add_common(app.add_subcommand("pretrain", "offline pretraining"), true);
  add_finetune_flags(pre);
  auto* fin = add_common(app.add_subcommand("finetune", "online fine-tuning"), true);
  add_finetune_flags(fin);
  std::string from;
  bool from_scratch = false;
  fin->add_option("--from", from, "checkpoint to fine-tune from");
  fin->add_flag("--from-scratch", from_scratch, "skip loading a pretrained checkpoint");
  auto* swp = add_common(app.add_subcommand("sweep", "fine-tune across the knn list"), true);
  add_finetune_flags(swp);

  auto* ver = app.add_subcommand("verify", "run the tabular theory suite");
  VerifyTolerances tol;
  std::string verify_out;
  ver->add_option("--out", verify_out, "directory for the JSON report");
  ver->add_option("--seed", tol.seed, "suite seed");
  ver->add_option("--mdps", tol.mdp_count, "number of random MDPs");
  ver->add_option("--policies", tol.policies_per_mdp, "random policies per MDP");
  ver->add_option("--tol-monotone", tol.monotone, "monotonicity tolerance");
  ver->add_option("--tol-dominance", tol.dominance, "dominance tolerance");
  ver->add_option("--simplex-step", tol.simplex_step, "density grid step");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ver->parsed()) {
      if (const char* root = std::getenv("QCSE_OUT_ROOT");
          root && *root && !verify_out.empty() && !fs::path(verify_out).is_absolute()) {
        verify_out = (fs::path(root) / verify_out).string();
      }
      return cmd_verify(tol, verify_out);
    }
    ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
    if (gen->parsed()) {
      apply_overrides(cfg, ov, "generate");
      return cmd_generate(cfg);
    }
    if (pre->parsed()) {
      apply_overrides(cfg, ov, "pretrain");
      return cmd_pretrain(cfg);
    }
    if (fin->parsed()) {
      apply_overrides(cfg, ov, "finetune");
      return cmd_finetune(cfg, from, from_scratch);
    }
    if (swp->parsed()) {
      apply_overrides(cfg, ov, "sweep");
      return cmd_sweep(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DatasetSchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
