#include <doctest.h>

#include <cstring>
#include <filesystem>

#include "qcse/behavior.hpp"
#include "qcse/replay_buffer.hpp"
#include "qcse/trainer.hpp"

using namespace qcse;
namespace fs = std::filesystem;

namespace {

struct Fixture {
  EnvSpec env = registry_env("gridmaze-8x8");
  Dataset data;
  ActorCriticConfig agent_cfg;
  TrainConfig train;

  Fixture() {
    data = generate_dataset(env, "random", 1200, 77);
    agent_cfg.algo = Algo::cql;
    agent_cfg.kind = ActionKind::discrete;
    agent_cfg.state_dim = 2;
    agent_cfg.action_dim = 4;
    agent_cfg.hidden = {16, 16};
    train.offline_steps = 40;
    train.online_steps = 120;
    train.batch_size = 32;
    train.eval_interval = 60;
    train.eval_episodes = 2;
    train.entropy.k = 5;
    train.entropy.lambda = 1.0;
    train.entropy.condition_mode = ConditionMode::q;
    train.entropy_monitor_samples = 200;
  }

  ActorCritic make_agent(std::uint64_t seed) const {
    Rng init = Rng(seed).sub("init");
    return ActorCritic(agent_cfg, init);
  }
};

bool same_rows(const std::vector<MetricRow>& a, const std::vector<MetricRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].step != b[i].step) return false;
    // every column except the timing one
    for (auto f : {&MetricRow::critic_loss, &MetricRow::actor_loss, &MetricRow::mean_q,
                   &MetricRow::mean_intrinsic, &MetricRow::buffer_entropy,
                   &MetricRow::eval_return, &MetricRow::norm_score}) {
      const double x = a[i].*f, y = b[i].*f;
      if (std::memcmp(&x, &y, sizeof(double)) != 0 && !(std::isnan(x) && std::isnan(y))) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("replay buffer is FIFO with absolute indexing") {
  ReplayBuffer buf(3, BufferSource::online);
  Transition t;
  t.state = Eigen::VectorXd::Zero(1);
  t.next_state = Eigen::VectorXd::Zero(1);
  for (int i = 0; i < 5; ++i) {
    t.reward = i;
    CHECK(buf.push(t, 10.0 + i) == static_cast<std::uint64_t>(i));
  }
  CHECK(buf.size() == 3);
  CHECK(buf.first_live() == 2);
  CHECK_FALSE(buf.live(1));
  CHECK(buf.at(2).reward == 2.0);
  CHECK(buf.at(4).reward == 4.0);
  CHECK(buf.aux(3) == 13.0);
  buf.set_aux(3, -1.0);
  CHECK(buf.aux(3) == -1.0);
  CHECK_THROWS_AS(buf.at(1), std::out_of_range);
  CHECK_THROWS_AS(buf.at(5), std::out_of_range);
  Rng rng(1);
  for (std::uint64_t i : buf.sample(100, rng)) {
    REQUIRE(i >= 2);
    REQUIRE(i < 5);
  }
}

TEST_CASE("batch share arithmetic follows the mix ratio exactly") {
  TrainConfig t;
  t.batch_size = 256;
  t.mix_ratio = 0.5;
  CHECK(t.offline_share() == 128);
  CHECK(t.online_share() == 128);
  t.batch_size = 10;
  t.mix_ratio = 0.37;  // rounded down for the offline share
  CHECK(t.offline_share() == 3);
  CHECK(t.online_share() == 7);
  t.mix_ratio = 0.0;
  CHECK(t.offline_share() == 0);

  TrainConfig bad;
  bad.batch_size = 16;
  bad.entropy.k = 15;  // needs batch >= 2*(k+1)
  bad.entropy.lambda = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.batch_size = 64;
  bad.mix_ratio = 0.9;  // online share 7 <= k
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.mix_ratio = 0.5;
  CHECK_NOTHROW(bad.validate());
}

TEST_CASE("zero offline steps leave the agent untouched") {
  Fixture fx;
  fx.train.offline_steps = 0;
  ActorCritic agent = fx.make_agent(1);
  const Eigen::VectorXd before = agent.policy.flatten();
  pretrain_offline(agent, fx.data, fx.env, fx.train, 1);
  CHECK(agent.policy.flatten() == before);
}

TEST_CASE("identical seeds give bit-identical checkpoints and metric rows") {
  Fixture fx;
  ActorCritic a1 = fx.make_agent(5);
  ActorCritic a2 = fx.make_agent(5);
  const MetricLog l1 = pretrain_offline(a1, fx.data, fx.env, fx.train, 5);
  const MetricLog l2 = pretrain_offline(a2, fx.data, fx.env, fx.train, 5);
  CHECK(a1.policy.flatten() == a2.policy.flatten());
  CHECK(a1.qs.q1.flatten() == a2.qs.q1.flatten());
  CHECK(a1.qs.t2.flatten() == a2.qs.t2.flatten());
  CHECK(same_rows(l1.rows(), l2.rows()));

  FinetuneStats s1, s2;
  const MetricLog f1 = finetune_online(a1, fx.env, fx.data, fx.train, 5, {}, &s1);
  const MetricLog f2 = finetune_online(a2, fx.env, fx.data, fx.train, 5, {}, &s2);
  CHECK(a1.policy.flatten() == a2.policy.flatten());
  CHECK(same_rows(f1.rows(), f2.rows()));
  CHECK(s1.online_pushed == s2.online_pushed);
}

TEST_CASE("fine-tuning augments exactly the online share of every batch") {
  Fixture fx;
  ActorCritic agent = fx.make_agent(9);
  FinetuneStats stats;
  finetune_online(agent, fx.env, fx.data, fx.train, 9, {}, &stats);
  CHECK(stats.batches == fx.train.online_steps);
  CHECK(stats.env_steps == fx.train.online_steps);
  CHECK(stats.online_pushed == static_cast<std::uint64_t>(fx.train.online_steps));
  CHECK(stats.augmented_samples == fx.train.online_steps * fx.train.online_share());
  CHECK(stats.max_abs_reward_shift <= fx.train.entropy.lambda + 1e-9);
  CHECK(stats.max_abs_reward_shift > 0.0);
}

TEST_CASE("lambda zero reproduces the disabled-intrinsic trajectory bit-for-bit") {
  Fixture fx;
  fx.train.entropy.lambda = 0.0;
  ActorCritic a1 = fx.make_agent(11);
  FinetuneStats s1;
  const MetricLog l1 = finetune_online(a1, fx.env, fx.data, fx.train, 11, {}, &s1);

  TrainConfig disabled = fx.train;
  disabled.entropy.k = 0;  // the other off-switch
  disabled.entropy.lambda = 1.0;
  ActorCritic a2 = fx.make_agent(11);
  FinetuneStats s2;
  const MetricLog l2 = finetune_online(a2, fx.env, fx.data, disabled, 11, {}, &s2);

  CHECK(a1.policy.flatten() == a2.policy.flatten());
  CHECK(a1.qs.q1.flatten() == a2.qs.q1.flatten());
  CHECK(same_rows(l1.rows(), l2.rows()));
  CHECK(s1.augmented_samples == 0);
  CHECK(s2.augmented_samples == 0);
}

TEST_CASE("evaluate_policy normalizes against the registry anchors") {
  Fixture fx;
  ActorCritic agent = fx.make_agent(13);
  const EvalResult r = evaluate_policy(agent, fx.env, 4, Rng(99));
  const double want =
      100.0 * (r.mean_return - fx.env.score_random) / (fx.env.score_expert - fx.env.score_random);
  CHECK(r.norm_score == doctest::Approx(want).epsilon(1e-12));

  EnvSpec at_random = fx.env;
  at_random.score_random = r.mean_return - 1.0;
  at_random.score_expert = r.mean_return;  // this policy *is* the expert anchor
  CHECK(evaluate_policy(agent, at_random, 4, Rng(99)).norm_score ==
        doctest::Approx(100.0).epsilon(1e-9));
  EnvSpec at_expert = fx.env;
  at_expert.score_random = r.mean_return;  // this policy *is* the random anchor
  at_expert.score_expert = r.mean_return + 2.0;
  CHECK(evaluate_policy(agent, at_expert, 4, Rng(99)).norm_score ==
        doctest::Approx(0.0).epsilon(1e-9));
  EnvSpec midway = fx.env;
  midway.score_random = r.mean_return - 0.5;
  midway.score_expert = r.mean_return + 0.5;
  CHECK(evaluate_policy(agent, midway, 4, Rng(99)).norm_score ==
        doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("checkpoints restore an agent for fine-tuning") {
  Fixture fx;
  ActorCritic a = fx.make_agent(17);
  pretrain_offline(a, fx.data, fx.env, fx.train, 17);
  const Checkpoint ck = make_checkpoint(a);
  ActorCritic b = fx.make_agent(18);  // different init
  restore_agent(b, ck);
  CHECK(a.policy.flatten() == b.policy.flatten());
  CHECK(a.qs.t1.flatten() == b.qs.t1.flatten());

  ActorCriticConfig other = fx.agent_cfg;
  other.state_dim = 3;
  Rng oinit(1);
  ActorCritic c(other, oinit);
  CHECK_THROWS_AS(restore_agent(c, ck), std::runtime_error);
}

TEST_CASE("a diverging run aborts with a diagnostic checkpoint") {
  Fixture fx;
  fx.agent_cfg.lr_q = 1e100;  // guaranteed blow-up
  fx.train.offline_steps = 400;
  ActorCritic agent = fx.make_agent(19);
  const std::string dir = (fs::temp_directory_path() / "qcse_diag_test").string();
  fs::remove_all(dir);
  RunPaths paths;
  paths.diagnostics_dir = dir;
  CHECK_THROWS_WITH_AS(pretrain_offline(agent, fx.data, fx.env, fx.train, 19, paths),
                       doctest::Contains("aborted at step"), std::runtime_error);
  bool found = false;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().string().find("diagnostic_step") != std::string::npos) found = true;
  }
  CHECK(found);
  fs::remove_all(dir);
}

TEST_CASE("run_experiment aggregates per-seed finals and isolates failures") {
  Fixture fx;
  const std::string dir = (fs::temp_directory_path() / "qcse_exp_test").string();
  fs::remove_all(dir);
  ExperimentSpec spec;
  spec.env = fx.env;
  spec.offline = fx.data;
  spec.agent = fx.agent_cfg;
  spec.train = fx.train;
  spec.seeds = {3, 4};
  spec.out_dir = dir;
  const ExperimentSummary sum = run_experiment(spec);
  REQUIRE(sum.seeds.size() == 2);
  CHECK(sum.failed == 0);
  CHECK(sum.mean_final_norm ==
        doctest::Approx(0.5 * (sum.seeds[0].final_norm_score + sum.seeds[1].final_norm_score)));
  CHECK(fs::exists(dir + "/metrics_seed3.csv"));
  CHECK(fs::exists(dir + "/summary.json"));
  CHECK(fs::exists(dir + "/checkpoint_seed4.qckp"));

  // One-seed summary equals that seed's finals.
  ExperimentSpec one = spec;
  one.seeds = {3};
  one.out_dir.clear();
  const ExperimentSummary s1 = run_experiment(one);
  CHECK(s1.mean_final_norm == s1.seeds[0].final_norm_score);
  CHECK(s1.median_final_norm == s1.seeds[0].final_norm_score);
  CHECK(s1.seeds[0].final_norm_score == sum.seeds[0].final_norm_score);  // rerun determinism

  // Failures are recorded per seed without discarding the rest.
  ExperimentSpec broken = spec;
  broken.out_dir.clear();
  broken.agent.lr_q = 1e100;
  broken.train.offline_steps = 400;
  const ExperimentSummary bs = run_experiment(broken);
  CHECK(bs.failed == 2);
  CHECK_FALSE(bs.seeds[0].ok);
  CHECK(bs.seeds[0].error.find("aborted") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("metric csv files are byte-identical across reruns except wall time") {
  Fixture fx;
  const std::string d1 = (fs::temp_directory_path() / "qcse_csv_a").string();
  const std::string d2 = (fs::temp_directory_path() / "qcse_csv_b").string();
  fs::create_directories(d1);
  fs::create_directories(d2);
  for (const std::string& dir : {d1, d2}) {
    ActorCritic agent = fx.make_agent(21);
    RunPaths paths;
    paths.metrics_csv = dir + "/metrics.csv";
    finetune_online(agent, fx.env, fx.data, fx.train, 21, paths);
  }
  std::ifstream f1(d1 + "/metrics.csv"), f2(d2 + "/metrics.csv");
  std::string line1, line2;
  int lines = 0;
  while (std::getline(f1, line1) && std::getline(f2, line2)) {
    const auto cut1 = line1.rfind(',');
    const auto cut2 = line2.rfind(',');
    REQUIRE(line1.substr(0, cut1) == line2.substr(0, cut2));
    ++lines;
  }
  CHECK(lines >= 3);  // header + at least two eval rows
  fs::remove_all(d1);
  fs::remove_all(d2);
}
