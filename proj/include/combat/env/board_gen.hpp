#pragma once
#include <cstdint>

#include "combat/env/types.hpp"

namespace combat::env {

// Builds the starting board for a seed: four agents in the corners, a
// transpose-symmetric arrangement of rigid and wooden walls, and exactly
// resolved_item_count() power-ups buried under wood.  Rigid walls never land
// on the outer ring, so the border acts as a guaranteed (breakable-at-worst)
// corridor between all corners.  Throws std::invalid_argument when the
// requested counts cannot fit.
BoardState generate_board(const GameConfig& config, uint64_t seed);

}  // namespace combat::env
