#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "combat/env/types.hpp"

namespace combat::env {

// Outcome of one simultaneous-move tick.  `rewards` is populated only when
// `done` is true (terminal rewards in seating order); per-seat pickup counts
// let callers shape rewards without diffing states.
struct StepResult {
  BoardState state;
  bool done = false;
  std::optional<std::array<double, kNumAgents>> rewards;
  std::array<int, kNumAgents> items_collected{};  // picked up this tick
  std::array<bool, kNumAgents> died{};            // died this tick
  int woods_destroyed = 0;
  int items_revealed = 0;
};

// Moves legal for `agent` in `state`, in enum order.  Stop is always legal;
// a directional move needs an in-bounds target that is not Rigid/Wood and,
// if a bomb sits there, kicking ability; LayBomb needs ammo and a bomb-free
// cell.  Other agents and flames do not make a move illegal (collisions
// bounce, flames kill).  Throws if the agent is dead or out of range.
std::vector<Move> legal_primitive_moves(const BoardState& state, int agent,
                                        const GameConfig& config);

// Advances the state by one tick.  Resolution order, fixed and relied upon by
// the tests:
//   1. bomb and flame timers tick down; expired flames disappear
//   2. bombs at zero detonate, chaining into any bomb their cross covers in
//      the same tick; covered agents die; covered cells catch flame
//   3. destroyed Wood turns to Passage, surfacing its buried power-up if any
//   4. bombs sliding from an earlier kick advance one cell, stopping against
//      walls, bombs, or agents
//   5. agents act: illegal moves become Stop, simultaneous conflicts bounce
//      both movers, kicks start a bomb sliding, walking into flame is fatal
//   6. agents standing on a surfaced power-up consume it
//   7. the step counter advances; the episode ends when at most one team
//      (Team) or agent (FFA) survives, or at max_steps
// Actions for dead agents are ignored.
StepResult step(const BoardState& state, const std::array<Move, kNumAgents>& actions,
                const GameConfig& config);

bool is_terminal(const BoardState& state, const GameConfig& config);

// Terminal rewards in seating order: +1 winners, -1 losers, draw_reward for
// everyone when nobody wins.  Throws std::logic_error on non-terminal states.
std::array<double, kNumAgents> terminal_reward(const BoardState& state,
                                               const GameConfig& config);

// The board as seen from one seat: cells outside the view window are Unknown,
// bombs/flames/other agents are included only inside the window.  Life status
// of every seat and the viewer's own scalars are always known.  Throws if the
// agent is dead or out of range.
ObservedState observe(const BoardState& state, int agent, const GameConfig& config);

// Stable digest of the full state (grid, hidden items, bombs, flames, agents,
// step) used by replay logs and determinism checks.
uint64_t state_hash(const BoardState& state);

}  // namespace combat::env
