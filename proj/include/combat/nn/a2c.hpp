#pragma once
#include <optional>
#include <vector>

#include "combat/nn/adam.hpp"
#include "combat/nn/network.hpp"

namespace combat::nn {

struct Hyperparams {
  double lr = 0.0005;
  double value_coeff = 0.5;
  double entropy_coeff = 0.01;
  int minibatch_horizon = 256;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

struct TrajectoryStep {
  rep::FeatureTensor obs;
  int action = 0;
  double reward = 0.0;
};

// One contiguous run of experience for a single seat.  `bootstrap_value` is
// the critic's estimate of the state after the last step, recorded when the
// segment was cut; it is exactly 0 when the episode ended there.  `gamma` is
// the discount in effect when the experience was collected.
struct Trajectory {
  std::vector<TrajectoryStep> steps;
  double bootstrap_value = 0.0;
  double gamma = 0.5;
  std::string agent_id;  // bookkeeping for the orchestrator; unused here
};

// One-step temporal-difference errors δ_t = r_t + γ·V(s_{t+1}) − V(s_t) at
// the current parameters, with the stored bootstrap value standing in for
// V(s_{t+1}) at the segment boundary.  Targets are constants downstream.
std::vector<double> td_errors(const NetworkParams& net, const Trajectory& traj);

struct A2cGradients {
  NetworkParams grad;          // exact ascent gradient of the surrogate below
  std::vector<double> deltas;  // the frozen δ̄ the surrogate was built with
  double mean_entropy = 0.0;
  double mean_value = 0.0;
};

// Ascent gradient of the batch-mean surrogate over all steps of all
// trajectories (M = total step count):
//   (1/M) Σ_t [ δ̄_t·ln π(a_t|s_t) + value_coeff·δ̄_t·V(s_t) + entropy_coeff·H(π(s_t)) ]
// where δ̄ is frozen at the current parameters (no gradient flows through the
// targets).  The logit seed per step works out to
//   δ̄_t·(1{a=a_t} − π_a) − entropy_coeff·π_a·(ln π_a + H_t),
// the value seed to value_coeff·δ̄_t, both divided by M.
A2cGradients a2c_gradients(const NetworkParams& net, const std::vector<Trajectory>& batch,
                           const Hyperparams& hp);

// Computes the ascent gradient and applies it with Adam (negated into the
// optimizer's descent convention).  Returns the gradient bundle for logging.
A2cGradients a2c_update(NetworkParams& net, AdamState& opt, const std::vector<Trajectory>& batch,
                        const Hyperparams& hp);

}  // namespace combat::nn
