#pragma once
#include <cstdint>

namespace combat::rep {

// Feature plane order.  The full layout contract (including the scalar
// broadcast corners of the Self plane) lives in docs/feature-layout.md.
enum Channel : int {
  kPassage = 0,
  kRigid = 1,
  kWood = 2,
  kFog = 3,
  kBombStrength = 4,  // min(resolved strength, board_size) / board_size at bomb cells
  kBombLife = 5,      // resolved life / bomb_life_max at bomb cells
  kFlames = 6,
  kItems = 7,         // revealed power-ups of any kind
  kSelf = 8,          // 1 at own cell, plus scalar broadcast corners
  kTeammate = 9,
  kEnemies = 10,
};

constexpr int kNumChannels = 11;
constexpr uint8_t kLayoutVersion = 1;

// The encoder is board-size generic; a layout pins the size it was built for
// so mismatched inputs fail loudly instead of silently mis-shaping tensors.
struct ChannelLayout {
  uint8_t version = kLayoutVersion;
  int board_size = 11;

  int action_dim() const { return board_size * board_size + 1; }
};

}  // namespace combat::rep
