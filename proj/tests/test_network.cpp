#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "combat/nn/network.hpp"
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

// Scalar probe loss: fixed random weights against every head output.
double probe_loss(const NetworkParams& net, const std::vector<rep::FeatureTensor>& batch,
                  const Eigen::MatrixXd& rl, const Eigen::VectorXd& rv) {
  ForwardPass fp = forward(net, batch);
  return (fp.logits.array() * rl.array()).sum() + fp.values.dot(rv);
}

}  // namespace

TEST_CASE("initialization: bounded weights, zero biases, seed-deterministic") {
  Rng a(42), b(42), c(43);
  NetworkParams p = NetworkParams::init(5, 8, a);
  NetworkParams q = NetworkParams::init(5, 8, b);
  NetworkParams r = NetworkParams::init(5, 8, c);

  for (auto& [name, t] : p.named()) {
    bool is_bias = name.ends_with("_b");
    double bound = is_bias ? 0.0 : 1.0 / std::sqrt(static_cast<double>(t->dims[0]));
    for (double x : t->data) {
      CHECK(x <= bound);
      CHECK(x >= -bound);
    }
  }

  auto ps = p.named();
  auto qs = q.named();
  auto rs = r.named();
  bool all_equal = true, any_diff = false;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    all_equal = all_equal && ps[i].second->data == qs[i].second->data;
    any_diff = any_diff || ps[i].second->data != rs[i].second->data;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("zeroed trunk reduces the network to its head biases") {
  Rng rng(7);
  NetworkParams net = NetworkParams::init(5, 8, rng);
  for (auto& [name, t] : net.named())
    if (name != "policy_b" && name != "value_b") t->fill(0.0);
  for (std::size_t i = 0; i < net.policy_b.size(); ++i)
    net.policy_b.data[i] = 0.1 * static_cast<double>(i);
  net.value_b.data[0] = 0.7;

  rep::FeatureTensor x = random_input(5, rng);
  ForwardPass fp = forward(net, x);
  CHECK(fp.values(0) == doctest::Approx(0.7).epsilon(1e-12));
  for (int a = 0; a < net.action_dim(); ++a)
    CHECK(fp.logits(0, a) == doctest::Approx(0.1 * a).epsilon(1e-12));
}

TEST_CASE("fresh network on a zero input is exactly uniform") {
  Rng rng(11);
  NetworkParams net = NetworkParams::init(5, 8, rng);
  rep::FeatureTensor x;
  x.board_size = 5;
  x.data.assign(static_cast<std::size_t>(rep::kNumChannels) * 25, 0.0);
  ForwardPass fp = forward(net, x);

  std::vector<double> row(static_cast<std::size_t>(net.action_dim()));
  for (int a = 0; a < net.action_dim(); ++a) row[static_cast<std::size_t>(a)] = fp.logits(0, a);
  std::vector<double> probs = softmax(row.data(), net.action_dim());
  for (double p : probs) CHECK(p == doctest::Approx(1.0 / net.action_dim()).epsilon(1e-12));
  CHECK(entropy(probs) == doctest::Approx(std::log(static_cast<double>(net.action_dim()))));
  CHECK(fp.values(0) == doctest::Approx(0.0));
}

TEST_CASE("forward is deterministic and batch matches singles") {
  Rng rng(99);
  NetworkParams net = NetworkParams::init(5, 8, rng);
  std::vector<rep::FeatureTensor> batch{random_input(5, rng), random_input(5, rng),
                                        random_input(5, rng)};
  ForwardPass once = forward(net, batch);
  ForwardPass twice = forward(net, batch);
  CHECK((once.logits - twice.logits).cwiseAbs().maxCoeff() == 0.0);
  CHECK((once.values - twice.values).cwiseAbs().maxCoeff() == 0.0);

  for (int m = 0; m < 3; ++m) {
    ForwardPass solo = forward(net, batch[static_cast<std::size_t>(m)]);
    for (int a = 0; a < net.action_dim(); ++a)
      CHECK(solo.logits(0, a) == doctest::Approx(once.logits(m, a)).epsilon(1e-12));
    CHECK(solo.values(0) == doctest::Approx(once.values(m)).epsilon(1e-12));
  }
}

TEST_CASE("backward matches central finite differences on every tensor") {
  Rng rng(0x5eed);
  NetworkParams net = NetworkParams::init(5, 8, rng);
  std::vector<rep::FeatureTensor> batch{random_input(5, rng), random_input(5, rng),
                                        random_input(5, rng)};
  const int dim = net.action_dim();
  Eigen::MatrixXd rl(3, dim);
  Eigen::VectorXd rv(3);
  for (int m = 0; m < 3; ++m) {
    rv(m) = rng.uniform(-1.0, 1.0);
    for (int a = 0; a < dim; ++a) rl(m, a) = rng.uniform(-1.0, 1.0);
  }

  NetworkParams grad = NetworkParams::zeros_like(net);
  ForwardPass fp = forward(net, batch);
  backward(net, fp, rl, rv, grad);

  auto params = net.named();
  auto grads = grad.named();
  const double eps = 1e-6;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& t = *params[i].second;
    std::size_t picks[] = {0, t.size() / 2, t.size() - 1};
    for (std::size_t j : picks) {
      const double keep = t.data[j];
      t.data[j] = keep + eps;
      const double hi = probe_loss(net, batch, rl, rv);
      t.data[j] = keep - eps;
      const double lo = probe_loss(net, batch, rl, rv);
      t.data[j] = keep;
      const double fd = (hi - lo) / (2.0 * eps);
      const double an = grads[i].second->data[j];
      CHECK(std::abs(an - fd) <= 1e-7 + 1e-5 * std::abs(fd));
    }
  }
}

TEST_CASE("backward over a batch equals the sum of per-sample backward passes") {
  Rng rng(0xbadbad);
  NetworkParams net = NetworkParams::init(5, 8, rng);
  std::vector<rep::FeatureTensor> batch{random_input(5, rng), random_input(5, rng)};
  const int dim = net.action_dim();
  Eigen::MatrixXd rl(2, dim);
  Eigen::VectorXd rv(2);
  for (int m = 0; m < 2; ++m) {
    rv(m) = rng.uniform(-1.0, 1.0);
    for (int a = 0; a < dim; ++a) rl(m, a) = rng.uniform(-1.0, 1.0);
  }

  NetworkParams whole = NetworkParams::zeros_like(net);
  ForwardPass fp = forward(net, batch);
  backward(net, fp, rl, rv, whole);

  NetworkParams parts = NetworkParams::zeros_like(net);
  for (int m = 0; m < 2; ++m) {
    ForwardPass solo = forward(net, batch[static_cast<std::size_t>(m)]);
    backward(net, solo, rl.row(m), rv.segment(m, 1), parts);
  }

  auto ws = whole.named();
  auto ss = parts.named();
  for (std::size_t i = 0; i < ws.size(); ++i)
    for (std::size_t j = 0; j < ws[i].second->size(); ++j)
      CHECK(ws[i].second->data[j] ==
            doctest::Approx(ss[i].second->data[j]).epsilon(1e-10).scale(1.0));
}

TEST_CASE("softmax handles extreme logits and ties") {
  double flat[3] = {0.0, 0.0, 0.0};
  auto p = softmax(flat, 3);
  for (double x : p) CHECK(x == doctest::Approx(1.0 / 3.0));

  double wild[3] = {1000.0, 0.0, -1000.0};
  p = softmax(wild, 3);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] >= 0.0);
  CHECK(p[2] >= 0.0);
  CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0));

  CHECK(argmax(flat, 3) == 0);  // first tie wins
  double rising[4] = {0.0, 2.0, 2.0, 1.0};
  CHECK(argmax(rising, 4) == 1);
}

TEST_CASE("entropy: uniform is log(n), a point mass is zero") {
  CHECK(entropy({0.25, 0.25, 0.25, 0.25}) == doctest::Approx(std::log(4.0)));
  CHECK(entropy({1.0, 0.0, 0.0}) == doctest::Approx(0.0));
}

TEST_CASE("sample_index follows the distribution") {
  Rng rng(31337);
  CHECK(sample_index({0.0, 1.0, 0.0}, rng) == 1);

  std::vector<double> probs{0.2, 0.3, 0.5};
  int counts[3] = {0, 0, 0};
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) counts[sample_index(probs, rng)]++;
  CHECK(std::abs(counts[0] / static_cast<double>(draws) - 0.2) < 0.02);
  CHECK(std::abs(counts[1] / static_cast<double>(draws) - 0.3) < 0.02);
  CHECK(std::abs(counts[2] / static_cast<double>(draws) - 0.5) < 0.02);
}
