#include <doctest.h>

#include <cmath>
#include <cstring>

#include "qcse/losses.hpp"
#include "qcse/reference_values.hpp"
#include "qcse/behavior.hpp"

using namespace qcse;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ActorCriticConfig box_cfg(Algo algo = Algo::sac, std::vector<int> hidden = {8}) {
  ActorCriticConfig c;
  c.algo = algo;
  c.kind = ActionKind::box;
  c.state_dim = 3;
  c.action_dim = 2;
  c.hidden = std::move(hidden);
  return c;
}

ActorCriticConfig grid_cfg(Algo algo = Algo::sac, std::vector<int> hidden = {8}) {
  ActorCriticConfig c;
  c.algo = algo;
  c.kind = ActionKind::discrete;
  c.state_dim = 2;
  c.action_dim = 4;
  c.hidden = std::move(hidden);
  return c;
}

Batch random_batch(const ActorCriticConfig& cfg, int n, Rng& rng, bool with_done = false) {
  Batch b;
  b.states.resize(n, cfg.state_dim);
  b.next_states.resize(n, cfg.state_dim);
  b.rewards.resize(n);
  b.done = VectorXd::Zero(n);
  b.online.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < cfg.state_dim; ++j) {
      b.states(i, j) = rng.normal();
      b.next_states(i, j) = rng.normal();
    }
    b.rewards[i] = rng.normal();
    if (with_done && rng.uniform() < 0.3) b.done[i] = 1.0;
  }
  if (cfg.kind == ActionKind::box) {
    b.actions.resize(n, cfg.action_dim);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < cfg.action_dim; ++j) b.actions(i, j) = rng.uniform(-0.9, 0.9);
  } else {
    b.action_idx.resize(n);
    for (int i = 0; i < n; ++i) b.action_idx[i] = rng.uniform_int(cfg.action_dim);
  }
  return b;
}

template <typename LossFn>
VectorXd fd_grad_net(Mlp& net, LossFn loss, double h = 1e-5) {
  VectorXd p = net.flatten();
  VectorXd g(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double keep = p[i];
    p[i] = keep + h;
    net.unflatten(p);
    const double up = loss();
    p[i] = keep - h;
    net.unflatten(p);
    const double dn = loss();
    p[i] = keep;
    net.unflatten(p);
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

double max_rel_err(const VectorXd& a, const VectorXd& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max({1.0, std::abs(a[i]), std::abs(b[i])});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

}  // namespace

TEST_CASE("discount zero reduces the bellman loss to reward regression") {
  ActorCriticConfig cfg = box_cfg();
  cfg.gamma = 0.0;
  Rng init(1);
  ActorCritic ac(cfg, init);
  ac.qs.q2 = ac.qs.q1;  // identical critics so the loss is one critic's mse
  Rng brng(2);
  const Batch b = random_batch(cfg, 16, brng);
  Rng lrng(3);
  const CriticLossResult r = critic_bellman_loss(ac, b, lrng);
  const double want = (r.diag.q1 - b.rewards).squaredNorm() / 16.0;
  CHECK(r.loss == doctest::Approx(want).epsilon(1e-12));
  for (int i = 0; i < 16; ++i) REQUIRE(r.diag.targets[i] == b.rewards[i]);
}

TEST_CASE("terminal transitions use the raw reward as the target") {
  ActorCriticConfig cfg = grid_cfg();
  Rng init(4);
  ActorCritic ac(cfg, init);
  Rng brng(5);
  Batch b = random_batch(cfg, 8, brng);
  b.done = VectorXd::Ones(8);
  Rng lrng(6);
  const CriticLossResult r = critic_bellman_loss(ac, b, lrng);
  for (int i = 0; i < 8; ++i) REQUIRE(r.diag.targets[i] == b.rewards[i]);
}

TEST_CASE("single-transition scalar linear critics match hand algebra") {
  ActorCriticConfig cfg;
  cfg.algo = Algo::sac;
  cfg.kind = ActionKind::box;
  cfg.state_dim = 1;
  cfg.action_dim = 1;
  cfg.hidden = {};
  cfg.alpha_temp = 0.2;
  cfg.gamma = 0.9;
  Rng init(7);
  ActorCritic ac(cfg, init);

  Batch b;
  b.states = MatrixXd::Constant(1, 1, 0.4);
  b.actions = MatrixXd::Constant(1, 1, -0.3);
  b.rewards = VectorXd::Constant(1, 0.7);
  b.next_states = MatrixXd::Constant(1, 1, 0.1);
  b.done = VectorXd::Zero(1);
  b.online.assign(1, 0);

  Rng lrng(8);
  const CriticLossResult r = critic_bellman_loss(ac, b, lrng);
  // loss = ((q1-y)^2 + (q2-y)^2) / 2 with q_i = w_s s + w_a a + b_i
  const double q1 = ac.qs.q1.W[0](0, 0) * 0.4 + ac.qs.q1.W[0](1, 0) * (-0.3) + ac.qs.q1.b[0][0];
  const double y = r.diag.targets[0];
  CHECK(r.diag.q1[0] == doctest::Approx(q1).epsilon(1e-12));
  CHECK(r.loss ==
        doctest::Approx(0.5 * ((q1 - y) * (q1 - y) +
                               (r.diag.q2[0] - y) * (r.diag.q2[0] - y))).epsilon(1e-12));
  // dL/dw_s = (q1 - y) * s, dL/dw_a = (q1 - y) * a, dL/db = (q1 - y)
  CHECK(r.g1.dW[0](0, 0) == doctest::Approx((q1 - y) * 0.4).epsilon(1e-10));
  CHECK(r.g1.dW[0](1, 0) == doctest::Approx((q1 - y) * -0.3).epsilon(1e-10));
  CHECK(r.g1.db[0][0] == doctest::Approx(q1 - y).epsilon(1e-10));
}

TEST_CASE("critic losses match finite differences for every algorithm and action kind") {
  struct Case { Algo algo; bool box; bool logsumexp; };
  const Case cases[] = {{Algo::sac, true, false},  {Algo::sac, false, false},
                        {Algo::cql, true, false},  {Algo::cql, false, false},
                        {Algo::cql, true, true},   {Algo::cql, false, true},
                        {Algo::calql, true, false},{Algo::calql, false, false},
                        {Algo::awac, true, false}, {Algo::awac, false, false}};
  int idx = 0;
  for (const Case& c : cases) {
    CAPTURE(idx);
    ActorCriticConfig cfg = c.box ? box_cfg(c.algo, {6}) : grid_cfg(c.algo, {6});
    cfg.cql_logsumexp = c.logsumexp;
    cfg.conservative_weight = 0.7;
    Rng init(100 + idx);
    ActorCritic ac(cfg, init);
    Rng brng(200 + idx);
    const Batch b = random_batch(cfg, 5, brng, true);
    VectorXd vmu(5);
    for (int i = 0; i < 5; ++i) vmu[i] = 0.05 * brng.normal();

    const std::uint64_t seed = 300 + idx;
    auto compute = [&]() {
      Rng r(seed);
      return critic_loss_for(ac, b, vmu, r);
    };
    const CriticLossResult res = compute();
    auto loss_value = [&]() { return compute().loss; };
    const VectorXd fd1 = fd_grad_net(ac.qs.q1, loss_value);
    REQUIRE(max_rel_err(ac.qs.q1.flatten_grad(res.g1), fd1) < 2e-4);
    const VectorXd fd2 = fd_grad_net(ac.qs.q2, loss_value);
    REQUIRE(max_rel_err(ac.qs.q2.flatten_grad(res.g2), fd2) < 2e-4);
    ++idx;
  }
}

TEST_CASE("conservative weight zero is bitwise the plain bellman update") {
  for (Algo algo : {Algo::cql, Algo::calql}) {
    ActorCriticConfig cfg = box_cfg(algo);
    cfg.conservative_weight = 0.0;
    Rng init(9);
    ActorCritic ac(cfg, init);
    Rng brng(10);
    const Batch b = random_batch(cfg, 12, brng);
    const VectorXd vmu = VectorXd::Zero(12);
    Rng r1(11), r2(11);
    const CriticLossResult a = critic_loss_for(ac, b, vmu, r1);
    const CriticLossResult plain = critic_bellman_loss(ac, b, r2);
    CHECK(a.loss == plain.loss);
    CHECK(ac.qs.q1.flatten_grad(a.g1) == ac.qs.q1.flatten_grad(plain.g1));
    CHECK(ac.qs.q2.flatten_grad(a.g2) == ac.qs.q2.flatten_grad(plain.g2));
  }
}

TEST_CASE("cql regularizer reduces to the written difference for a one-hot policy") {
  ActorCriticConfig cfg = grid_cfg(Algo::cql, {});
  cfg.conservative_weight = 1.0;
  Rng init(12);
  ActorCritic ac(cfg, init);
  // Policy that all but surely picks action 2 everywhere.
  ac.policy.W[0].setZero();
  ac.policy.b[0].setZero();
  ac.policy.b[0][2] = 40.0;

  Rng brng(13);
  const Batch b = random_batch(cfg, 6, brng);
  Rng lrng(14);
  const CriticLossResult r = cql_loss(ac, b, lrng);

  const MatrixXd q1n = ac.qs.q1.forward(b.next_states);
  const MatrixXd q2n = ac.qs.q2.forward(b.next_states);
  const MatrixXd q1s = ac.qs.q1.forward(b.states);
  const MatrixXd q2s = ac.qs.q2.forward(b.states);
  double want = 0.0;
  for (int i = 0; i < 6; ++i) {
    want += 0.5 * (q1n(i, 2) - q1s(i, b.action_idx[i]) + q2n(i, 2) - q2s(i, b.action_idx[i]));
  }
  want /= 6.0;
  CHECK(r.diag.conservative == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("duplicating a transition leaves the mean loss unchanged") {
  // Discrete losses are exact expectations, so duplication is pure mean
  // arithmetic (continuous losses draw one policy action per row).
  ActorCriticConfig cfg = grid_cfg(Algo::cql);
  Rng init(15);
  ActorCritic ac(cfg, init);
  Rng brng(16);
  Batch one = random_batch(cfg, 1, brng);
  Batch two;
  two.states = MatrixXd(2, cfg.state_dim);
  two.states << one.states, one.states;
  two.next_states = MatrixXd(2, cfg.state_dim);
  two.next_states << one.next_states, one.next_states;
  two.action_idx = {one.action_idx[0], one.action_idx[0]};
  two.rewards = VectorXd::Constant(2, one.rewards[0]);
  two.done = VectorXd::Zero(2);
  two.online.assign(2, 0);
  Rng r1(17), r2(17);
  const double l1 = cql_loss(ac, one, r1).loss;
  const double l2 = cql_loss(ac, two, r2).loss;
  CHECK(l1 == doctest::Approx(l2).epsilon(1e-12));
}

TEST_CASE("calql saturations push the expected branches") {
  ActorCriticConfig cfg = box_cfg(Algo::calql);
  cfg.conservative_weight = 1.0;
  Rng init(18);
  ActorCritic ac(cfg, init);
  Rng brng(19);
  const Batch b = random_batch(cfg, 10, brng);

  // Reference values far below any critic output: max(Q, vmu) = Q.
  Rng r1(20);
  const CriticLossResult low = calql_loss(ac, b, VectorXd::Constant(10, -1e6), r1);
  // Identical rng: the sampled policy action matches.
  Rng r2(20);
  const CriticLossResult bell = critic_bellman_loss(ac, b, r2);
  const MatrixXd raw = ac.policy.forward(b.next_states);  // consume nothing; just sanity
  CHECK(low.diag.bellman == doctest::Approx(bell.loss).epsilon(1e-12));

  // Reference values far above: the max saturates at vmu, so the push-up of
  // data actions is the only live term.
  Rng r3(20);
  const CriticLossResult high = calql_loss(ac, b, VectorXd::Constant(10, 1e6), r3);
  const double push_up = -0.5 * (high.diag.q1.mean() + high.diag.q2.mean());
  CHECK(high.diag.conservative == doctest::Approx(1e6 + push_up).epsilon(1e-9));

  CHECK_THROWS_AS(calql_loss(ac, b, VectorXd::Zero(3), r3), std::invalid_argument);
  VectorXd nan_vmu = VectorXd::Zero(10);
  nan_vmu[4] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(calql_loss(ac, b, nan_vmu, r3), std::invalid_argument);
}

TEST_CASE("scalar calql with vmu between the critic values matches hand evaluation") {
  ActorCriticConfig cfg;
  cfg.algo = Algo::calql;
  cfg.kind = ActionKind::discrete;
  cfg.state_dim = 1;
  cfg.action_dim = 2;
  cfg.hidden = {};
  cfg.gamma = 0.0;
  cfg.conservative_weight = 1.0;
  Rng init(21);
  ActorCritic ac(cfg, init);
  ac.policy.W[0].setZero();
  ac.policy.b[0].setZero();  // uniform policy
  ac.qs.q1.W[0].setZero();
  ac.qs.q1.b[0] << 1.0, -1.0;
  ac.qs.q2 = ac.qs.q1;

  Batch b;
  b.states = MatrixXd::Zero(1, 1);
  b.next_states = MatrixXd::Zero(1, 1);
  b.rewards = VectorXd::Zero(1);
  b.done = VectorXd::Ones(1);
  b.action_idx = {0};
  b.online.assign(1, 0);

  Rng lrng(22);
  const CriticLossResult r = calql_loss(ac, b, VectorXd::Constant(1, 0.25), lrng);
  // bellman: q(s,0)=1, y=r=0 -> (1-0)^2 = 1 per critic -> loss term 1
  // calibration per critic: E_pi max(Q, .25) - Q(s,0)
  //   = 0.5*max(1,.25) + 0.5*max(-1,.25) - 1 = 0.5 + 0.125 - 1 = -0.375
  CHECK(r.diag.bellman == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.diag.conservative == doctest::Approx(-0.375).epsilon(1e-12));
  CHECK(r.loss == doctest::Approx(0.625).epsilon(1e-12));
}

TEST_CASE("actor losses match finite differences") {
  struct Case { Algo algo; bool box; };
  const Case cases[] = {{Algo::sac, true}, {Algo::sac, false}, {Algo::cql, true},
                        {Algo::calql, false}};
  int idx = 0;
  for (const Case& c : cases) {
    CAPTURE(idx);
    ActorCriticConfig cfg = c.box ? box_cfg(c.algo, {6}) : grid_cfg(c.algo, {6});
    Rng init(400 + idx);
    ActorCritic ac(cfg, init);
    Rng brng(500 + idx);
    const Batch b = random_batch(cfg, 5, brng);
    const std::uint64_t seed = 600 + idx;
    auto loss_value = [&]() {
      Rng r(seed);
      return actor_loss(ac, b, r).loss;
    };
    Rng r(seed);
    const ActorLossResult res = actor_loss(ac, b, r);
    const VectorXd fd = fd_grad_net(ac.policy, loss_value);
    REQUIRE(max_rel_err(ac.policy.flatten_grad(res.grad), fd) < 2e-4);
    ++idx;
  }
}

TEST_CASE("awac with zero advantage is behavior cloning") {
  ActorCriticConfig cfg = box_cfg(Algo::awac, {6});
  Rng init(23);
  ActorCritic ac(cfg, init);
  // Critics identically zero: qmin(s, a) = qmin(s, pi(s)) = 0, so w = 1.
  for (Mlp* net : {&ac.qs.q1, &ac.qs.q2}) {
    for (int l = 0; l < net->layer_count(); ++l) {
      net->W[l].setZero();
      net->b[l].setZero();
    }
  }
  Rng brng(24);
  const Batch b = random_batch(cfg, 6, brng);
  const std::uint64_t seed = 25;
  auto loss_value = [&]() {
    Rng r(seed);
    return actor_loss(ac, b, r).loss;
  };
  Rng r(seed);
  const ActorLossResult res = actor_loss(ac, b, r);
  // behavior cloning: loss = -mean log pi(a_data | s)
  const GaussianHead head = ac.gaussian_head();
  const VectorXd lp = head.log_prob(ac.policy.forward(b.states), b.actions);
  CHECK(res.loss == doctest::Approx(-lp.mean()).epsilon(1e-12));
  // weights are all one, so the full-loss finite difference is exact here
  CHECK(max_rel_err(ac.policy.flatten_grad(res.grad), fd_grad_net(ac.policy, loss_value)) < 2e-4);
}

TEST_CASE("actor gradient vanishes at the argmax with zero temperature") {
  ActorCriticConfig cfg = grid_cfg(Algo::sac, {});
  cfg.alpha_temp = 0.0;
  Rng init(26);
  ActorCritic ac(cfg, init);
  // Known Q: constant per action, independent of state.
  ac.qs.q1.W[0].setZero();
  ac.qs.q1.b[0] << 0.3, 1.7, -0.2, 0.9;  // argmax action 1
  ac.qs.q2 = ac.qs.q1;
  ac.policy.W[0].setZero();
  ac.policy.b[0].setZero();
  ac.policy.b[0][1] = 60.0;  // near-deterministic at the argmax

  Rng brng(27);
  const Batch b = random_batch(cfg, 8, brng);
  Rng r(28);
  const ActorLossResult res = actor_loss(ac, b, r);
  CHECK(ac.policy.flatten_grad(res.grad).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("two-action categorical actor gradient matches the softmax closed form") {
  ActorCriticConfig cfg;
  cfg.algo = Algo::sac;
  cfg.kind = ActionKind::discrete;
  cfg.state_dim = 1;
  cfg.action_dim = 2;
  cfg.hidden = {};
  cfg.alpha_temp = 0.5;
  Rng init(29);
  ActorCritic ac(cfg, init);
  ac.policy.W[0].setZero();
  ac.policy.b[0] << 0.4, -0.6;
  ac.qs.q1.W[0].setZero();
  ac.qs.q1.b[0] << 1.2, 0.1;
  ac.qs.q2 = ac.qs.q1;

  Batch b;
  b.states = MatrixXd::Zero(1, 1);
  b.next_states = MatrixXd::Zero(1, 1);
  b.rewards = VectorXd::Zero(1);
  b.done = VectorXd::Ones(1);
  b.action_idx = {0};
  b.online.assign(1, 0);

  Rng r(30);
  const ActorLossResult res = actor_loss(ac, b, r);
  // closed form: dL/dz_j = pi_j (c_j - sum pi c), c = alpha log pi - q
  const double z0 = 0.4, z1 = -0.6;
  const double m = std::max(z0, z1);
  const double e0 = std::exp(z0 - m), e1 = std::exp(z1 - m);
  const double p0 = e0 / (e0 + e1), p1 = e1 / (e0 + e1);
  const double c0 = 0.5 * std::log(p0) - 1.2, c1 = 0.5 * std::log(p1) - 0.1;
  const double cbar = p0 * c0 + p1 * c1;
  CHECK(res.grad.db[0][0] == doctest::Approx(p0 * (c0 - cbar)).epsilon(1e-10));
  CHECK(res.grad.db[0][1] == doctest::Approx(p1 * (c1 - cbar)).epsilon(1e-10));
  CHECK(res.loss == doctest::Approx(cbar).epsilon(1e-12));
}

TEST_CASE("ema update follows the written rule") {
  ActorCriticConfig cfg = box_cfg();
  Rng init(31);
  {
    ActorCritic ac(cfg, init);
    ac.qs.ema_rate = 1.0;
    const VectorXd before = ac.qs.t1.flatten();
    ac.qs.q1.W[0].array() += 5.0;
    ac.qs.ema_update();
    CHECK(ac.qs.t1.flatten() == before);
  }
  {
    Rng init2(32);
    ActorCritic ac(cfg, init2);
    ac.qs.ema_rate = 0.0;
    ac.qs.q1.W[0].array() += 5.0;
    ac.qs.ema_update();
    CHECK(ac.qs.t1.flatten() == ac.qs.q1.flatten());
  }
  {
    MlpSpec spec;
    spec.input_dim = 1;
    spec.output_dim = 1;
    Rng init3(33);
    DoubleQ qs(spec, init3);
    qs.ema_rate = 0.995;
    qs.q1.W[0](0, 0) = 1.0;
    qs.t1.W[0](0, 0) = 0.0;
    qs.ema_update();
    CHECK(qs.t1.W[0](0, 0) == doctest::Approx(0.005).epsilon(1e-15));
  }
}

TEST_CASE("targets move only through the ema update") {
  ActorCriticConfig cfg = box_cfg(Algo::cql);
  Rng init(34);
  ActorCritic ac(cfg, init);
  Rng brng(35);
  const Batch b = random_batch(cfg, 8, brng);
  const VectorXd t1_before = ac.qs.t1.flatten();
  const VectorXd t2_before = ac.qs.t2.flatten();
  Rng lrng(36);
  const CriticLossResult c = cql_loss(ac, b, lrng);
  adam_apply(ac.opt_q1, ac.qs.q1, c.g1);
  adam_apply(ac.opt_q2, ac.qs.q2, c.g2);
  const ActorLossResult a = actor_loss(ac, b, lrng);
  adam_apply(ac.opt_policy, ac.policy, a.grad);
  CHECK(ac.qs.t1.flatten() == t1_before);
  CHECK(ac.qs.t2.flatten() == t2_before);
  ac.qs.ema_update();
  CHECK(ac.qs.t1.flatten() != t1_before);
}

TEST_CASE("every bootstrap target and condition query goes through the min combiner") {
  ActorCriticConfig cfg = box_cfg(Algo::sac);
  Rng init(37);
  ActorCritic ac(cfg, init);
  Rng brng(38);
  Batch b = random_batch(cfg, 8, brng);
  b.online.assign(8, 1);
  const long target_before = ac.qs.min_target_queries;
  const long online_before = ac.qs.min_online_queries;
  Rng lrng(39);
  critic_bellman_loss(ac, b, lrng);
  CHECK(ac.qs.min_target_queries == target_before + 1);
  actor_loss(ac, b, lrng);
  CHECK(ac.qs.min_online_queries > online_before);
  condition_values(ac.qs, ac.policy, ac.cfg, b, false);
  condition_values(ac.qs, ac.policy, ac.cfg, b, true);
  CHECK(ac.qs.min_online_queries >= online_before + 3);

  // Targets recomputed through min match the loss diagnostics.
  Rng lrng2(39);
  const CriticLossResult r = critic_bellman_loss(ac, b, lrng2);
  Rng lrng3(39);
  const Eigen::MatrixXd raw = ac.policy.forward(b.next_states);
  const GaussianSample s = ac.gaussian_head().sample(raw, lrng3);
  Eigen::MatrixXd in(8, 5);
  in << b.next_states, s.action;
  const VectorXd tmin = ac.qs.t1.forward(in).cwiseMin(ac.qs.t2.forward(in)).col(0);
  const VectorXd want = b.rewards.array() +
                        ac.cfg.gamma * (1.0 - b.done.array()) *
                            (tmin.array() - ac.alpha() * s.log_prob.array());
  for (int i = 0; i < 8; ++i) REQUIRE(r.diag.targets[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("select_action is deterministic in mode and bounded when sampling") {
  ActorCriticConfig cfg = box_cfg();
  Rng init(40);
  ActorCritic ac(cfg, init);
  Rng arng(41);
  VectorXd s(3);
  s << 0.2, -0.4, 0.8;
  const VectorXd a1 = ac.select_action_box(s, false, arng);
  const VectorXd a2 = ac.select_action_box(s, false, arng);
  CHECK(std::memcmp(a1.data(), a2.data(), 2 * sizeof(double)) == 0);
  for (int t = 0; t < 200; ++t) {
    const VectorXd a = ac.select_action_box(s, true, arng);
    REQUIRE(a.cwiseAbs().maxCoeff() < 1.0);
  }

  ActorCriticConfig dcfg = grid_cfg();
  Rng dinit(42);
  ActorCritic dac(dcfg, dinit);
  VectorXd ds(2);
  ds << 0.3, 0.7;
  const int d1 = dac.select_action_discrete(ds, false, arng);
  const int d2 = dac.select_action_discrete(ds, false, arng);
  CHECK(d1 == d2);
  // Sampling frequencies within 3 sigma of the softmax probabilities.
  const Eigen::MatrixXd logits = dac.policy.forward(ds.transpose());
  const Eigen::MatrixXd p = CategoricalHead().probs(logits);
  int counts[4] = {0, 0, 0, 0};
  const int n = 100000;
  for (int t = 0; t < n; ++t) ++counts[dac.select_action_discrete(ds, true, arng)];
  for (int a = 0; a < 4; ++a) {
    const double sd = std::sqrt(n * p(0, a) * (1.0 - p(0, a)));
    CHECK(std::abs(counts[a] - n * p(0, a)) <= 3.0 * sd + 1.0);
  }
}

TEST_CASE("reference values are the discounted return-to-go with zero bootstrap") {
  Dataset ds;
  ds.meta.env_id = "x";
  ds.meta.behavior_id = "b";
  ds.meta.state_dim = 1;
  ds.meta.action_kind = ActionKind::discrete;
  ds.meta.action_dim = 2;
  auto tr = [](double s, double r, double ns, bool done) {
    Transition t;
    t.state = VectorXd::Constant(1, s);
    t.action_index = 0;
    t.reward = r;
    t.next_state = VectorXd::Constant(1, ns);
    t.done = done;
    return t;
  };
  // Episode 1: two steps ending in done; episode 2: truncated single step.
  ds.transitions = {tr(0, 1.0, 1, false), tr(1, 2.0, 2, true), tr(5, 3.0, 6, false)};
  const ReferenceValues rv = compute_reference_values(ds, 0.5);
  CHECK(rv.value[0] == doctest::Approx(1.0 + 0.5 * 2.0).epsilon(1e-15));
  CHECK(rv.value[1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(rv.value[2] == doctest::Approx(3.0).epsilon(1e-15));  // truncated: bootstrap 0
}
