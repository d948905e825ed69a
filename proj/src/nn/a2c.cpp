#include "combat/nn/a2c.hpp"

#include <cmath>
#include <stdexcept>

#include "combat/nn/sampling.hpp"

namespace combat::nn {
namespace {

std::size_t validate(const std::vector<Trajectory>& batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  std::size_t total = 0;
  for (const Trajectory& t : batch) {
    if (t.steps.empty()) throw std::invalid_argument("empty trajectory in batch");
    total += t.steps.size();
  }
  return total;
}

}  // namespace

std::vector<double> td_errors(const NetworkParams& net, const Trajectory& traj) {
  validate({traj});
  std::vector<rep::FeatureTensor> obs;
  obs.reserve(traj.steps.size());
  for (const TrajectoryStep& s : traj.steps) obs.push_back(s.obs);
  ForwardPass fp = forward(net, obs);

  const int m_count = static_cast<int>(traj.steps.size());
  std::vector<double> deltas(static_cast<std::size_t>(m_count));
  for (int t = 0; t < m_count; ++t) {
    const double vnext = t + 1 < m_count ? fp.values(t + 1) : traj.bootstrap_value;
    deltas[static_cast<std::size_t>(t)] =
        traj.steps[static_cast<std::size_t>(t)].reward + traj.gamma * vnext - fp.values(t);
  }
  return deltas;
}

A2cGradients a2c_gradients(const NetworkParams& net, const std::vector<Trajectory>& batch,
                           const Hyperparams& hp) {
  const std::size_t total = validate(batch);
  const int dim = net.action_dim();

  std::vector<rep::FeatureTensor> obs;
  obs.reserve(total);
  for (const Trajectory& traj : batch)
    for (const TrajectoryStep& s : traj.steps) obs.push_back(s.obs);
  ForwardPass fp = forward(net, obs);

  A2cGradients out;
  out.grad = NetworkParams::zeros_like(net);
  out.deltas.reserve(total);

  Eigen::MatrixXd dlogits = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(total), dim);
  Eigen::VectorXd dvalues(static_cast<Eigen::Index>(total));
  std::vector<double> logit_row(static_cast<std::size_t>(dim));
  const double inv_m = 1.0 / static_cast<double>(total);

  int row = 0;
  for (const Trajectory& traj : batch) {
    const int len = static_cast<int>(traj.steps.size());
    for (int t = 0; t < len; ++t, ++row) {
      const TrajectoryStep& step = traj.steps[static_cast<std::size_t>(t)];
      if (step.action < 0 || step.action >= dim)
        throw std::invalid_argument("action index out of range");

      const double vnext = t + 1 < len ? fp.values(row + 1) : traj.bootstrap_value;
      const double delta = step.reward + traj.gamma * vnext - fp.values(row);
      out.deltas.push_back(delta);

      for (int a = 0; a < dim; ++a) logit_row[static_cast<std::size_t>(a)] = fp.logits(row, a);
      const std::vector<double> probs = softmax(logit_row.data(), dim);
      const double ent = entropy(probs);

      for (int a = 0; a < dim; ++a) {
        const double p = probs[static_cast<std::size_t>(a)];
        // lim p→0 of −p(ln p + H) is 0, so fully-starved actions contribute
        // no entropy pressure instead of a NaN.
        const double dent = p > 0.0 ? -p * (std::log(p) + ent) : 0.0;
        const double onehot = a == step.action ? 1.0 : 0.0;
        dlogits(row, a) = (delta * (onehot - p) + hp.entropy_coeff * dent) * inv_m;
      }
      dvalues(row) = hp.value_coeff * delta * inv_m;
      out.mean_entropy += ent * inv_m;
      out.mean_value += fp.values(row) * inv_m;
    }
  }

  backward(net, fp, dlogits, dvalues, out.grad);
  return out;
}

A2cGradients a2c_update(NetworkParams& net, AdamState& opt, const std::vector<Trajectory>& batch,
                        const Hyperparams& hp) {
  A2cGradients g = a2c_gradients(net, batch, hp);
  NetworkParams descent = NetworkParams::zeros_like(net);
  auto src = g.grad.named();
  auto dst = descent.named();
  for (std::size_t i = 0; i < src.size(); ++i)
    for (std::size_t j = 0; j < src[i].second->data.size(); ++j)
      dst[i].second->data[j] = -src[i].second->data[j];
  adam_step(net, descent, opt, hp.lr, hp.adam_beta1, hp.adam_beta2, hp.adam_eps);
  return g;
}

}  // namespace combat::nn
