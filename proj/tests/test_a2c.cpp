#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "combat/nn/a2c.hpp"
#include "combat/nn/adam.hpp"
#include "combat/nn/sampling.hpp"
#include "combat/rep/layout.hpp"
#include "combat/rng.hpp"

using namespace combat;
using namespace combat::nn;

namespace {

rep::FeatureTensor random_input(int n, Rng& rng) {
  rep::FeatureTensor f;
  f.board_size = n;
  f.data.resize(static_cast<std::size_t>(rep::kNumChannels) * n * n);
  for (double& x : f.data) x = rng.uniform();
  return f;
}

Trajectory random_trajectory(int n, int steps, bool terminal, double gamma, Rng& rng,
                             int action_dim) {
  Trajectory traj;
  traj.gamma = gamma;
  for (int t = 0; t < steps; ++t) {
    TrajectoryStep s;
    s.obs = random_input(n, rng);
    s.action = static_cast<int>(rng.bounded(static_cast<uint64_t>(action_dim)));
    s.reward = rng.uniform(-1.0, 1.0);
    traj.steps.push_back(std::move(s));
  }
  traj.bootstrap_value = terminal ? 0.0 : rng.uniform(-1.0, 1.0);
  return traj;
}

// The exact objective a2c_gradients climbs, evaluated at arbitrary
// parameters with the TD errors frozen to the supplied constants.
double surrogate(const NetworkParams& net, const std::vector<Trajectory>& batch,
                 const std::vector<double>& deltas, const Hyperparams& hp) {
  std::vector<rep::FeatureTensor> obs;
  for (const Trajectory& traj : batch)
    for (const TrajectoryStep& s : traj.steps) obs.push_back(s.obs);
  ForwardPass fp = forward(net, obs);

  const int dim = net.action_dim();
  std::vector<double> row(static_cast<std::size_t>(dim));
  double j = 0.0;
  const double inv_m = 1.0 / static_cast<double>(obs.size());
  int r = 0;
  for (const Trajectory& traj : batch)
    for (const TrajectoryStep& s : traj.steps) {
      for (int a = 0; a < dim; ++a) row[static_cast<std::size_t>(a)] = fp.logits(r, a);
      std::vector<double> probs = softmax(row.data(), dim);
      j += inv_m * deltas[static_cast<std::size_t>(r)] *
           std::log(probs[static_cast<std::size_t>(s.action)]);
      j += inv_m * hp.value_coeff * deltas[static_cast<std::size_t>(r)] * fp.values(r);
      j += inv_m * hp.entropy_coeff * entropy(probs);
      ++r;
    }
  return j;
}

NetworkParams tiny_net(uint64_t seed) {
  Rng rng(seed);
  return NetworkParams::init(5, 8, rng);
}

}  // namespace

TEST_CASE("td errors follow the one-step targets exactly on a constant-value net") {
  NetworkParams net = tiny_net(3);
  for (auto& [name, t] : net.named())
    if (name != "value_b") t->fill(0.0);
  net.value_b.data[0] = 0.7;  // every state now values 0.7

  Rng rng(17);
  Trajectory traj;
  traj.gamma = 0.5;
  double rewards[] = {1.0, 0.0, -1.0};
  for (int t = 0; t < 3; ++t) {
    TrajectoryStep s;
    s.obs = random_input(5, rng);
    s.action = t;
    s.reward = rewards[t];
    traj.steps.push_back(std::move(s));
  }

  traj.bootstrap_value = 0.0;  // episode ended here
  auto d = td_errors(net, traj);
  CHECK(d[0] == doctest::Approx(1.0 + 0.5 * 0.7 - 0.7));
  CHECK(d[1] == doctest::Approx(0.0 + 0.5 * 0.7 - 0.7));
  CHECK(d[2] == doctest::Approx(-1.0 + 0.0 - 0.7));

  traj.bootstrap_value = 0.7;  // cut mid-episode, critic estimate recorded
  d = td_errors(net, traj);
  CHECK(d[2] == doctest::Approx(-1.0 + 0.5 * 0.7 - 0.7));
}

TEST_CASE("gradient computation rejects malformed batches") {
  NetworkParams net = tiny_net(4);
  Hyperparams hp;
  CHECK_THROWS_AS(a2c_gradients(net, {}, hp), std::invalid_argument);

  Trajectory hollow;  // no steps
  CHECK_THROWS_AS(a2c_gradients(net, {hollow}, hp), std::invalid_argument);

  Rng rng(5);
  Trajectory bad = random_trajectory(5, 2, true, 0.5, rng, net.action_dim());
  bad.steps[1].action = net.action_dim();  // out of range
  CHECK_THROWS_AS(a2c_gradients(net, {bad}, hp), std::invalid_argument);
}

TEST_CASE("a2c gradient matches finite differences of the frozen-target surrogate") {
  NetworkParams net = tiny_net(0xabcd);
  Rng rng(0x1234);
  Hyperparams hp;
  hp.value_coeff = 0.5;
  hp.entropy_coeff = 0.02;

  // Two segments with different discounts and boundary kinds in one batch.
  std::vector<Trajectory> batch{random_trajectory(5, 3, true, 0.9, rng, net.action_dim()),
                                random_trajectory(5, 2, false, 0.5, rng, net.action_dim())};
  A2cGradients g = a2c_gradients(net, batch, hp);

  auto params = net.named();
  auto grads = g.grad.named();
  const double eps = 1e-6;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& t = *params[i].second;
    std::size_t picks[] = {0, t.size() / 2, t.size() - 1};
    for (std::size_t j : picks) {
      const double keep = t.data[j];
      t.data[j] = keep + eps;
      const double hi = surrogate(net, batch, g.deltas, hp);
      t.data[j] = keep - eps;
      const double lo = surrogate(net, batch, g.deltas, hp);
      t.data[j] = keep;
      const double fd = (hi - lo) / (2.0 * eps);
      const double an = grads[i].second->data[j];
      CHECK(std::abs(an - fd) <= 1e-7 + 1e-5 * std::abs(fd));
    }
  }
}

TEST_CASE("zero TD error and zero entropy coefficient yield a zero gradient") {
  NetworkParams net = tiny_net(21);
  for (auto& [name, t] : net.named())
    if (name != "value_b") t->fill(0.0);
  net.value_b.data[0] = 0.4;

  Rng rng(22);
  Trajectory traj;
  traj.gamma = 0.5;
  TrajectoryStep s;
  s.obs = random_input(5, rng);
  s.action = 2;
  s.reward = 0.4 - 0.5 * 0.4;  // makes δ = r + γ·v' − v = 0 exactly
  traj.steps.push_back(std::move(s));
  traj.bootstrap_value = 0.4;

  Hyperparams hp;
  hp.entropy_coeff = 0.0;
  A2cGradients g = a2c_gradients(net, {traj}, hp);
  CHECK(g.deltas[0] == doctest::Approx(0.0).epsilon(1e-12));
  for (auto& [name, t] : g.grad.named())
    for (double x : t->data) CHECK(x == 0.0);
}

TEST_CASE("adam's first step moves every coordinate by the learning rate") {
  NetworkParams net = tiny_net(9);
  NetworkParams before = net;
  NetworkParams grad = NetworkParams::zeros_like(net);
  for (auto& [name, t] : grad.named()) t->fill(1.0);

  AdamState opt = AdamState::zeros_like(net);
  adam_step(net, grad, opt, 0.1, 0.9, 0.999, 1e-8);
  CHECK(opt.step == 1);

  auto was = before.named();
  auto now = net.named();
  for (std::size_t i = 0; i < was.size(); ++i)
    for (std::size_t j = 0; j < was[i].second->size(); ++j)
      CHECK(now[i].second->data[j] ==
            doctest::Approx(was[i].second->data[j] - 0.1).epsilon(1e-7));

  // Identical gradient again: bias correction keeps the step at -lr.
  adam_step(net, grad, opt, 0.1, 0.9, 0.999, 1e-8);
  for (std::size_t i = 0; i < was.size(); ++i)
    CHECK(now[i].second->data[0] ==
          doctest::Approx(was[i].second->data[0] - 0.2).epsilon(1e-7));
}

TEST_CASE("two adam steps reproduce a hand-rolled scalar trace") {
  // One coordinate followed through two updates with different gradients.
  NetworkParams net = tiny_net(33);
  NetworkParams grad = NetworkParams::zeros_like(net);
  AdamState opt = AdamState::zeros_like(net);
  const double theta0 = net.fc_b.data[0];
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;

  grad.fc_b.data[0] = 1.0;
  adam_step(net, grad, opt, lr, b1, b2, eps);
  double m = 0.1, v = 0.001;  // (1-b1)*1, (1-b2)*1
  double theta = theta0 - lr * (m / (1 - b1)) / (std::sqrt(v / (1 - b2)) + eps);
  CHECK(net.fc_b.data[0] == doctest::Approx(theta).epsilon(1e-12));

  grad.fc_b.data[0] = 0.5;
  adam_step(net, grad, opt, lr, b1, b2, eps);
  m = b1 * m + (1 - b1) * 0.5;
  v = b2 * v + (1 - b2) * 0.25;
  theta -= lr * (m / (1 - b1 * b1)) / (std::sqrt(v / (1 - b2 * b2)) + eps);
  CHECK(net.fc_b.data[0] == doctest::Approx(theta).epsilon(1e-12));
}

TEST_CASE("adam rejects non-finite gradients by tensor name and leaves parameters alone") {
  NetworkParams net = tiny_net(10);
  NetworkParams before = net;
  NetworkParams grad = NetworkParams::zeros_like(net);
  grad.fc_w.data[3] = std::nan("");
  AdamState opt = AdamState::zeros_like(net);

  try {
    adam_step(net, grad, opt, 0.1, 0.9, 0.999, 1e-8);
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("fc_w") != std::string::npos);
  }
  CHECK(opt.step == 0);
  auto was = before.named();
  auto now = net.named();
  for (std::size_t i = 0; i < was.size(); ++i)
    CHECK(was[i].second->data == now[i].second->data);
}

TEST_CASE("a2c updates solve a one-armed contextual bandit") {
  NetworkParams net = tiny_net(0xfade);
  AdamState opt = AdamState::zeros_like(net);
  Hyperparams hp;
  hp.lr = 0.02;
  hp.entropy_coeff = 0.0;

  Rng rng(0xca11);
  rep::FeatureTensor ctx = random_input(5, rng);
  const int lucky = 7;
  const int dim = net.action_dim();

  for (int round = 0; round < 600; ++round) {
    ForwardPass fp = forward(net, ctx);
    std::vector<double> row(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a) row[static_cast<std::size_t>(a)] = fp.logits(0, a);
    int action = sample_index(softmax(row.data(), dim), rng);

    Trajectory traj;
    traj.gamma = 0.99;
    TrajectoryStep s;
    s.obs = ctx;
    s.action = action;
    s.reward = action == lucky ? 1.0 : 0.0;
    traj.steps.push_back(std::move(s));
    traj.bootstrap_value = 0.0;
    a2c_update(net, opt, {traj}, hp);
  }

  ForwardPass fp = forward(net, ctx);
  std::vector<double> row(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a) row[static_cast<std::size_t>(a)] = fp.logits(0, a);
  std::vector<double> probs = softmax(row.data(), dim);
  CHECK(probs[lucky] > 0.8);
  CHECK(fp.values(0) > 0.5);  // the critic tracks the expected payoff
}
