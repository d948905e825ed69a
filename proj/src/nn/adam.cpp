#include "combat/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace combat::nn {

AdamState AdamState::zeros_like(const NetworkParams& net) {
  AdamState s;
  s.m = NetworkParams::zeros_like(net);
  s.v = NetworkParams::zeros_like(net);
  s.step = 0;
  return s;
}

void adam_step(NetworkParams& params, const NetworkParams& grad, AdamState& state, double lr,
               double beta1, double beta2, double eps) {
  auto ps = params.named();
  auto gs = grad.named();
  auto ms = state.m.named();
  auto vs = state.v.named();

  // Validate everything up front so a poisoned gradient leaves the parameters
  // exactly as they were.
  for (std::size_t i = 0; i < ps.size(); ++i) {
    check_same_shape(*ps[i].second, *gs[i].second, ps[i].first);
    for (double g : gs[i].second->data)
      if (!std::isfinite(g)) throw std::runtime_error("non-finite gradient in " + gs[i].first);
  }

  state.step += 1;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto& p = ps[i].second->data;
    const auto& g = gs[i].second->data;
    auto& m = ms[i].second->data;
    auto& v = vs[i].second->data;
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = beta1 * m[j] + (1.0 - beta1) * g[j];
      v[j] = beta2 * v[j] + (1.0 - beta2) * g[j] * g[j];
      p[j] -= lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + eps);
    }
  }
}

}  // namespace combat::nn
