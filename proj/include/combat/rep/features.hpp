#pragma once
#include <map>
#include <vector>

#include "combat/env/types.hpp"
#include "combat/rep/layout.hpp"

namespace combat::rep {

// Channel-major feature planes: value(ch, r, c) at ch*N*N + r*N + c.
struct FeatureTensor {
  int board_size = 11;
  std::vector<double> data;

  double& at(int ch, int r, int c) {
    return data[(static_cast<std::size_t>(ch) * board_size + r) * board_size + c];
  }
  double at(int ch, int r, int c) const {
    return data[(static_cast<std::size_t>(ch) * board_size + r) * board_size + c];
  }
};

struct FixedBomb {
  int life = 0;       // resolved timer after chain analysis
  int strength = 2;   // the bomb's own reach (chains do not transfer strength)
};

// Resolves effective bomb timers under chain reactions: a bomb goes off no
// later than any bomb whose blast covers it, propagated to a fixed point.
// Unknown cells block blast like Rigid (a conservative read for fogged
// views).  The result is independent of bomb order.
std::map<env::Pos, FixedBomb> fix_bomb_chains(const std::vector<env::Bomb>& bombs,
                                              const env::ObservedState& view);

// Cells a blast from `origin` with `strength` would cover against the
// observed grid: a cross blocked by Rigid and fog, including the first Wood
// hit in each arm.  Shared by the encoder and the rule-based agents.
std::vector<env::Pos> blast_cells(const env::ObservedState& view, env::Pos origin, int strength);

// Encodes one observation into the canonical feature planes; every entry
// lands in [0, 1].  Throws std::invalid_argument when the observation's board
// size differs from the layout's.
FeatureTensor encode(const env::ObservedState& view, const ChannelLayout& layout);

}  // namespace combat::rep
