#pragma once
#include <functional>
#include <map>
#include <string>

#include "combat/env/types.hpp"
#include "combat/rng.hpp"

namespace combat::agents {

// Tuning knobs for the rule-based policy.  Defaults match the behaviour the
// unit tests pin down; they exist so experiments can tighten or relax the
// agent without touching the rules.
struct ScriptedConfig {
  // Flee when the agent's own cell is covered by a blast due within this many
  // ticks (chain-resolved timers); voluntary moves never enter such cells.
  // The default matches a full bomb fuse, so an agent leaves its own blast
  // zone right after laying instead of loitering until the timer runs down.
  int danger_horizon = 10;
  // Relative weight of standing still in the random-walk fallback; each legal
  // directional move has weight 1.
  double stop_weight = 2.0;
  // Extra weight on directional moves that reduce distance to the nearest
  // visible enemy in the random-walk fallback (0 = pure Stop-biased walk).
  double seek_weight = 2.0;
  // Extra weight on moves toward the nearest living enemy's spawn corner when
  // no enemy is in sight — a navigation prior that keeps the walk drifting
  // toward where opponents started instead of diffusing forever.
  double roam_weight = 2.0;
};

// Rule-based policy over an observed state.  Decision order:
//   1. flee cells covered by a pending blast due within danger_horizon ticks,
//   2. pick up an adjacent revealed power-up,
//   3. lay a bomb when adjacent to Wood or an enemy stands in blast range,
//      but only if a safe retreat exists afterwards,
//   4. otherwise a random legal move with a bias toward standing still.
// The returned move is always legal, and never knowingly steps onto a cell
// that is lethal this tick (active flames, or the cross of a bomb whose
// chain-resolved timer is about to run out).
env::Move scripted_act(const env::ObservedState& view, Rng& rng, const ScriptedConfig& cfg);
env::Move scripted_act(const env::ObservedState& view, Rng& rng);

// Named policy registry so match configs can refer to scripted opponents by
// string.  Built-ins: "scripted:simple" (the rule-based policy above) and
// "scripted:idle" (always Stop).
using ScriptedPolicy = std::function<env::Move(const env::ObservedState&, Rng&)>;

// Registered names in deterministic (sorted) order.
const std::map<std::string, ScriptedPolicy>& scripted_registry();

// Adds or replaces a named policy.
void register_scripted(const std::string& name, ScriptedPolicy policy);

// Looks up `name` and runs it; throws std::out_of_range for unknown names.
env::Move scripted_act_by_name(const std::string& name, const env::ObservedState& view,
                               Rng& rng);

}  // namespace combat::agents
