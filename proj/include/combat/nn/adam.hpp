#pragma once
#include "combat/nn/network.hpp"

namespace combat::nn {

// Per-parameter first and second moments plus the shared step counter.
struct AdamState {
  NetworkParams m, v;
  long long step = 0;

  static AdamState zeros_like(const NetworkParams& net);
};

// One bias-corrected descent step on a minimization gradient:
//   m ← β1 m + (1-β1) g,  v ← β2 v + (1-β2) g²,  θ ← θ − lr·m̂/(√v̂+ε).
// Throws std::runtime_error naming the offending tensor when a gradient entry
// is not finite; the parameters are untouched in that case.
void adam_step(NetworkParams& params, const NetworkParams& grad, AdamState& state, double lr,
               double beta1, double beta2, double eps);

}  // namespace combat::nn
