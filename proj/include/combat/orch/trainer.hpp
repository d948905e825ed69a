#pragma once

#include <iosfwd>
#include <string>

#include "combat/orch/checkpoint.hpp"
#include "combat/orch/config.hpp"

namespace combat::orch {

struct TrainStats {
  long matches = 0;
  long gradient_updates = 0;
  long stale_drops = 0;      // segments discarded for parameter staleness
  long anneals = 0;
  long removals = 0;
  long spawns = 0;
  long stage_advances = 0;
  long checkpoints = 0;
};

// Drives the continual-training loop: per pickup, schedule one team match,
// play it, update the ranking, push episode returns, apply per-segment
// gradient updates behind copy-on-write installs, then run the population
// pass (anneal converged agents, else replace persistent losers), advancing
// the curriculum stage once every learner has converged on the current one.
//
// With `workers` > 1, up to `workers` pickups are scheduled upfront and their
// matches play in parallel against the batch-start parameter snapshots;
// results are processed strictly in pickup order. A population or stage
// change mid-batch discards the not-yet-processed tail and reschedules from
// the exact scheduler/rng state after the last processed pickup, so roster
// transitions behave as in the sequential loop. Segments played against
// parameters more than one install behind are dropped (staleness rule);
// match outcomes still count for the ranking either way. For a fixed worker
// count the whole run is a pure function of the config, replaying
// bit-identically; workers=1 reproduces the strict sequential loop.
class Trainer {
 public:
  explicit Trainer(RunConfig config);

  // A new population: `trainable_count` freshly initialized learners plus
  // `scripted_count` rule-based anchors, everyone rated at the initial
  // rating, stage and shaping taken from `start_stage`.
  TrainState fresh_state() const;

  // Runs pickups state.pickup+1 .. total_pickups, mutating `state` in place.
  // Appends to the match log (truncating entries beyond state.pickup first)
  // and checkpoints every checkpoint_interval pickups plus once at the end.
  // `info`, when given, receives one progress line per checkpoint.
  TrainStats run(TrainState& state, std::ostream* info = nullptr);

  std::string run_dir() const;
  std::string checkpoint_path() const;
  std::string match_log_path() const;

  const RunConfig& config() const { return config_; }

  // Entropy bonus in effect for an agent's next gradient update: linear in
  // the agent's own update count from entropy_start to entropy_end over
  // entropy_anneal_updates, constant afterwards.
  double entropy_coeff_at(long agent_updates) const;

 private:
  RunConfig config_;
};

}  // namespace combat::orch
