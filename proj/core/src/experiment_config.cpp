#include "qcse/experiment_config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace qcse {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("config: unknown key '" + where + key + "'");
    }
  }
}

template <typename T>
T get_or(const json& obj, const std::string& where, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: field '" + where + key + "' has the wrong type");
  }
}

template <typename T>
T require(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("config: missing field '" + where + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: field '" + where + key + "' has the wrong type");
  }
}

Eigen::Vector2d vec2(const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.size() != 2) {
    throw ConfigError("config: '" + where + "' must be a 2-element array");
  }
  return {arr[0].get<double>(), arr[1].get<double>()};
}

Cell cell(const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.size() != 2) {
    throw ConfigError("config: '" + where + "' must be a 2-element array");
  }
  return {arr[0].get<int>(), arr[1].get<int>()};
}

EnvSpec parse_env(const json& j) {
  reject_unknown(j, "env.", {"id", "gridworld", "pointmass", "score_random", "score_expert"});
  const std::string id = require<std::string>(j, "env.", "id");
  EnvSpec spec;
  const bool inline_spec = j.contains("gridworld") || j.contains("pointmass");
  if (!inline_spec) {
    spec = registry_env(id);
  } else {
    spec.id = id;
    if (j.contains("gridworld") && j.contains("pointmass")) {
      throw ConfigError("config: env defines both 'gridworld' and 'pointmass'");
    }
    if (j.contains("gridworld")) {
      const json& g = j.at("gridworld");
      reject_unknown(g, "env.gridworld.",
                     {"width", "height", "walls", "start", "goal", "max_steps", "slip_prob"});
      GridWorldSpec gs;
      gs.width = get_or(g, "env.gridworld.", "width", gs.width);
      gs.height = get_or(g, "env.gridworld.", "height", gs.height);
      if (g.contains("walls")) {
        gs.walls.clear();
        for (const auto& w : g.at("walls")) gs.walls.push_back(cell(w, "env.gridworld.walls[]"));
      }
      if (g.contains("start")) gs.start = cell(g.at("start"), "env.gridworld.start");
      if (g.contains("goal")) gs.goal = cell(g.at("goal"), "env.gridworld.goal");
      gs.max_steps = get_or(g, "env.gridworld.", "max_steps", gs.max_steps);
      gs.slip_prob = get_or(g, "env.gridworld.", "slip_prob", gs.slip_prob);
      spec.spec = gs;
      spec.score_random = 0.0;
      spec.score_expert = 1.0;
    } else {
      const json& p = j.at("pointmass");
      reject_unknown(p, "env.pointmass.",
                     {"dt", "goal", "goal_radius", "max_steps", "dense", "start", "start_noise"});
      PointMassSpec ps;
      ps.dt = get_or(p, "env.pointmass.", "dt", ps.dt);
      if (p.contains("goal")) ps.goal = vec2(p.at("goal"), "env.pointmass.goal");
      ps.goal_radius = get_or(p, "env.pointmass.", "goal_radius", ps.goal_radius);
      ps.max_steps = get_or(p, "env.pointmass.", "max_steps", ps.max_steps);
      ps.dense = get_or(p, "env.pointmass.", "dense", ps.dense);
      if (p.contains("start")) ps.start = vec2(p.at("start"), "env.pointmass.start");
      ps.start_noise = get_or(p, "env.pointmass.", "start_noise", ps.start_noise);
      spec.spec = ps;
      spec.score_random = -100.0;
      spec.score_expert = 0.0;
    }
  }
  spec.score_random = get_or(j, "env.", "score_random", spec.score_random);
  spec.score_expert = get_or(j, "env.", "score_expert", spec.score_expert);
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid env: ") + e.what());
  }
  return spec;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config: not valid JSON");
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(j, "",
                 {"env", "dataset", "algo", "agent", "train", "entropy", "knn_sweep", "out",
                  "seeds"});

  ExperimentConfig cfg;
  if (!j.contains("env")) throw ConfigError("config: missing field 'env'");
  cfg.env = parse_env(j.at("env"));

  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    reject_unknown(d, "dataset.", {"path", "generate"});
    cfg.dataset_path = get_or<std::string>(d, "dataset.", "path", "");
    if (d.contains("generate")) {
      const json& g = d.at("generate");
      reject_unknown(g, "dataset.generate.", {"behavior", "size", "seed"});
      cfg.generate.present = true;
      cfg.generate.behavior = get_or<std::string>(g, "dataset.generate.", "behavior",
                                                  cfg.generate.behavior);
      cfg.generate.size = get_or<std::int64_t>(g, "dataset.generate.", "size", cfg.generate.size);
      cfg.generate.seed = get_or<std::uint64_t>(g, "dataset.generate.", "seed", cfg.generate.seed);
    }
    if (cfg.dataset_path.empty() && !cfg.generate.present) {
      throw ConfigError("config: 'dataset' needs 'path' or 'generate'");
    }
  }

  cfg.agent.algo = algo_from_string(get_or<std::string>(j, "", "algo", "sac"));
  Env env = cfg.env.make();
  cfg.agent.kind = env.action_kind();
  cfg.agent.state_dim = env.state_dim();
  cfg.agent.action_dim =
      cfg.agent.kind == ActionKind::box ? env.action_dim() : env.num_actions();

  if (j.contains("agent")) {
    const json& a = j.at("agent");
    reject_unknown(a, "agent.",
                   {"hidden", "activation", "gamma", "ema_rate", "alpha_temp", "auto_alpha",
                    "lr_q", "lr_pi", "lr_alpha", "conservative_weight", "cql_logsumexp",
                    "awac_lambda", "awac_weight_clip", "log_std_min", "log_std_max"});
    cfg.agent.hidden = get_or(a, "agent.", "hidden", cfg.agent.hidden);
    const std::string act = get_or<std::string>(a, "agent.", "activation", "relu");
    if (act == "relu") cfg.agent.activation = Activation::relu;
    else if (act == "tanh") cfg.agent.activation = Activation::tanh;
    else throw ConfigError("config: agent.activation must be 'relu' or 'tanh'");
    cfg.agent.gamma = get_or(a, "agent.", "gamma", cfg.agent.gamma);
    cfg.agent.ema_rate = get_or(a, "agent.", "ema_rate", cfg.agent.ema_rate);
    cfg.agent.alpha_temp = get_or(a, "agent.", "alpha_temp", cfg.agent.alpha_temp);
    cfg.agent.auto_alpha = get_or(a, "agent.", "auto_alpha", cfg.agent.auto_alpha);
    cfg.agent.lr_q = get_or(a, "agent.", "lr_q", cfg.agent.lr_q);
    cfg.agent.lr_pi = get_or(a, "agent.", "lr_pi", cfg.agent.lr_pi);
    cfg.agent.lr_alpha = get_or(a, "agent.", "lr_alpha", cfg.agent.lr_alpha);
    cfg.agent.conservative_weight =
        get_or(a, "agent.", "conservative_weight", cfg.agent.conservative_weight);
    cfg.agent.cql_logsumexp = get_or(a, "agent.", "cql_logsumexp", cfg.agent.cql_logsumexp);
    cfg.agent.awac_lambda = get_or(a, "agent.", "awac_lambda", cfg.agent.awac_lambda);
    cfg.agent.awac_weight_clip =
        get_or(a, "agent.", "awac_weight_clip", cfg.agent.awac_weight_clip);
    cfg.agent.log_std_min = get_or(a, "agent.", "log_std_min", cfg.agent.log_std_min);
    cfg.agent.log_std_max = get_or(a, "agent.", "log_std_max", cfg.agent.log_std_max);
  }

  if (j.contains("train")) {
    const json& t = j.at("train");
    reject_unknown(t, "train.",
                   {"offline_steps", "online_steps", "batch_size", "mix_ratio", "eval_interval",
                    "eval_episodes", "online_capacity", "scratch_condition_q",
                    "entropy_monitor_k", "entropy_monitor_samples"});
    cfg.train.offline_steps = get_or(t, "train.", "offline_steps", cfg.train.offline_steps);
    cfg.train.online_steps = get_or(t, "train.", "online_steps", cfg.train.online_steps);
    cfg.train.batch_size = get_or(t, "train.", "batch_size", cfg.train.batch_size);
    cfg.train.mix_ratio = get_or(t, "train.", "mix_ratio", cfg.train.mix_ratio);
    cfg.train.eval_interval = get_or(t, "train.", "eval_interval", cfg.train.eval_interval);
    cfg.train.eval_episodes = get_or(t, "train.", "eval_episodes", cfg.train.eval_episodes);
    cfg.train.online_capacity = get_or(t, "train.", "online_capacity", cfg.train.online_capacity);
    cfg.train.scratch_condition_q =
        get_or(t, "train.", "scratch_condition_q", cfg.train.scratch_condition_q);
    cfg.train.entropy_monitor_k =
        get_or(t, "train.", "entropy_monitor_k", cfg.train.entropy_monitor_k);
    cfg.train.entropy_monitor_samples =
        get_or(t, "train.", "entropy_monitor_samples", cfg.train.entropy_monitor_samples);
  }

  if (j.contains("entropy")) {
    const json& e = j.at("entropy");
    reject_unknown(e, "entropy.", {"k", "lambda", "condition_mode", "duplicate_floor"});
    cfg.train.entropy.k = get_or(e, "entropy.", "k", cfg.train.entropy.k);
    cfg.train.entropy.lambda = get_or(e, "entropy.", "lambda", cfg.train.entropy.lambda);
    const std::string mode = get_or<std::string>(e, "entropy.", "condition_mode", "q");
    if (mode == "none") cfg.train.entropy.condition_mode = ConditionMode::none;
    else if (mode == "v") cfg.train.entropy.condition_mode = ConditionMode::v;
    else if (mode == "q") cfg.train.entropy.condition_mode = ConditionMode::q;
    else throw ConfigError("config: entropy.condition_mode must be one of none/v/q");
    cfg.train.entropy.duplicate_floor =
        get_or(e, "entropy.", "duplicate_floor", cfg.train.entropy.duplicate_floor);
  }

  cfg.knn_sweep = get_or(j, "", "knn_sweep", cfg.knn_sweep);
  cfg.out_dir = get_or<std::string>(j, "", "out", "");
  cfg.seeds = get_or(j, "", "seeds", cfg.seeds);
  if (cfg.seeds.empty()) throw ConfigError("config: 'seeds' must be nonempty");

  try {
    cfg.train.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid train block: ") + e.what());
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return from_json_text(text);
}

std::string ExperimentConfig::resolved_json() const {
  json j;
  json env;
  env["id"] = this->env.id;
  env["score_random"] = this->env.score_random;
  env["score_expert"] = this->env.score_expert;
  if (const auto* g = std::get_if<GridWorldSpec>(&this->env.spec)) {
    json walls = json::array();
    for (const Cell& w : g->walls) walls.push_back({w.x, w.y});
    env["gridworld"] = {{"width", g->width},   {"height", g->height},
                        {"walls", walls},      {"start", {g->start.x, g->start.y}},
                        {"goal", {g->goal.x, g->goal.y}}, {"max_steps", g->max_steps},
                        {"slip_prob", g->slip_prob}};
  } else {
    const auto& p = std::get<PointMassSpec>(this->env.spec);
    env["pointmass"] = {{"dt", p.dt},
                        {"goal", {p.goal.x(), p.goal.y()}},
                        {"goal_radius", p.goal_radius},
                        {"max_steps", p.max_steps},
                        {"dense", p.dense},
                        {"start", {p.start.x(), p.start.y()}},
                        {"start_noise", p.start_noise}};
  }
  j["env"] = env;

  if (!dataset_path.empty() || generate.present) {
    json d;
    if (!dataset_path.empty()) d["path"] = dataset_path;
    if (generate.present) {
      d["generate"] = {{"behavior", generate.behavior},
                       {"size", generate.size},
                       {"seed", generate.seed}};
    }
    j["dataset"] = d;
  }

  j["algo"] = to_string(agent.algo);
  j["agent"] = {
      {"hidden", agent.hidden},
      {"activation", agent.activation == Activation::relu ? "relu" : "tanh"},
      {"gamma", agent.gamma},
      {"ema_rate", agent.ema_rate},
      {"alpha_temp", agent.alpha_temp},
      {"auto_alpha", agent.auto_alpha},
      {"lr_q", agent.lr_q},
      {"lr_pi", agent.lr_pi},
      {"lr_alpha", agent.lr_alpha},
      {"conservative_weight", agent.conservative_weight},
      {"cql_logsumexp", agent.cql_logsumexp},
      {"awac_lambda", agent.awac_lambda},
      {"awac_weight_clip", agent.awac_weight_clip},
      {"log_std_min", agent.log_std_min},
      {"log_std_max", agent.log_std_max},
  };
  j["train"] = {
      {"offline_steps", train.offline_steps},
      {"online_steps", train.online_steps},
      {"batch_size", train.batch_size},
      {"mix_ratio", train.mix_ratio},
      {"eval_interval", train.eval_interval},
      {"eval_episodes", train.eval_episodes},
      {"online_capacity", train.online_capacity},
      {"scratch_condition_q", train.scratch_condition_q},
      {"entropy_monitor_k", train.entropy_monitor_k},
      {"entropy_monitor_samples", train.entropy_monitor_samples},
  };
  j["entropy"] = {
      {"k", train.entropy.k},
      {"lambda", train.entropy.lambda},
      {"condition_mode", train.entropy.condition_mode == ConditionMode::none
                             ? "none"
                             : (train.entropy.condition_mode == ConditionMode::v ? "v" : "q")},
      {"duplicate_floor", train.entropy.duplicate_floor},
  };
  j["knn_sweep"] = knn_sweep;
  j["out"] = out_dir;
  j["seeds"] = seeds;
  return j.dump(2);
}

}  // namespace qcse
