#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "combat/env/replay.hpp"
#include "combat/env/types.hpp"
#include "combat/nn/a2c.hpp"
#include "combat/orch/stage.hpp"
#include "combat/pop/population.hpp"
#include "combat/rating/elo.hpp"
#include "combat/rng.hpp"
#include "combat/sched/scheduler.hpp"

namespace combat::orch {

// What one seat took away from a match.  Scripted seats carry no segments.
struct SeatOutcome {
  std::string agent_id;
  bool trainable = false;
  double episode_return = 0.0;  // undiscounted shaped return (terminal + shaping)
  int items_collected = 0;
  std::vector<nn::Trajectory> segments;
};

struct MatchOutput {
  rating::Outcome outcome = rating::Outcome::Draw;
  int episode_length = 0;
  std::array<SeatOutcome, 4> seats;  // seating order 0..3
  std::uint64_t final_hash = 0;
  bool self_play = false;  // any id held more than one seat
};

// Seats: team A fills 0 and 2, team B fills 1 and 3 (teams are seat parity).
constexpr std::array<int, 2> kTeamASeats = {0, 2};
constexpr std::array<int, 2> kTeamBSeats = {1, 3};

// Kick gating: while `kick_enabled` is false, a directional move by `seat`
// into a cell holding a bomb is coerced to Stop (so collected kick power-ups
// stay dormant); every other move passes through unchanged.
env::Move gate_kick(const env::BoardState& state, int seat, env::Move move, bool kick_enabled);

// Plays one episode from the spec's board seed.  Learner seats act by
// sampling the policy head over destination cells (plus the bomb action) and
// resolving the pick to a primitive move; scripted seats act by registry
// name.  All randomness flows through `rng` in seat order, so a fixed rng
// state replays the exact match.
//
// While the stage forbids kicking, any directional move into a bomb-holding
// cell is coerced to Stop for every seat, so collected kick power-ups stay
// dormant until stage 4.
//
// Per-step shaping adds w_pickup per power-up consumed (each learner's own
// weight); terminal rewards land on each seat's final step.  A learner's
// experience is cut into segments of at most `minibatch_horizon` steps, each
// closed with the critic's value of the next observation — exactly 0 when the
// episode (or that agent's life) ended instead.
//
// When `replay` is given it receives a verifiable episode log: the board
// seed, the config, and every tick's final (post-coercion) actions with the
// state digest after the tick.
MatchOutput play_match(const sched::MatchSpec& spec, const pop::Population& population,
                       const StageConfig& stage, const env::GameConfig& base_env,
                       int minibatch_horizon, Rng& rng, env::ReplayLog* replay = nullptr);

}  // namespace combat::orch
