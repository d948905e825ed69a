#pragma once
#include <vector>

#include "combat/env/types.hpp"
#include "combat/rep/layout.hpp"

namespace combat::rep {

// Policy actions address board destinations: index d < N*N names cell
// (d / N, d % N), and index N*N is the bomb action.
using ActionIndex = int;

constexpr ActionIndex bomb_action(const ChannelLayout& layout) {
  return layout.board_size * layout.board_size;
}

// Distances from the viewer's cell over traversable cells (Passage; bomb
// cells only when the viewer can kick; Wood/Rigid/Unknown block).  Unreached
// cells hold -1.  Exposed for tests; resolve_action builds on it.
std::vector<int> path_distances(const env::ObservedState& view);

// Translates a destination action into this tick's primitive move:
//   - own cell: Stop
//   - reachable destination: first move of a shortest path, ties broken
//     Up, Down, Left, Right
//   - unreachable destination: one step toward the reachable cell closest to
//     it by Manhattan distance (ties by smaller row, then smaller column);
//     Stop when the viewer already stands on that cell
//   - bomb action: LayBomb when ammo and cell allow it, Stop otherwise
// Throws std::out_of_range for an action outside [0, N*N].
env::Move resolve_action(const env::ObservedState& view, ActionIndex action,
                         const ChannelLayout& layout);

}  // namespace combat::rep
