#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace combat::env {

enum class CellKind : uint8_t { Passage = 0, Rigid = 1, Wood = 2 };

enum class Item : uint8_t { ExtraAmmo = 0, ExtraRange = 1, CanKick = 2 };

// Primitive moves.  Enum order doubles as the deterministic tie-break order
// used by path resolution (Up before Down before Left before Right).
enum class Move : uint8_t { Stop = 0, Up = 1, Down = 2, Left = 3, Right = 4, LayBomb = 5 };

constexpr int kNumAgents = 4;

inline int move_dr(Move m) {
  switch (m) {
    case Move::Up: return -1;
    case Move::Down: return 1;
    default: return 0;
  }
}
inline int move_dc(Move m) {
  switch (m) {
    case Move::Left: return -1;
    case Move::Right: return 1;
    default: return 0;
  }
}

struct Pos {
  int r = 0;
  int c = 0;
  bool operator==(const Pos&) const = default;
  auto operator<=>(const Pos&) const = default;
};

struct Cell {
  CellKind kind = CellKind::Passage;
  // Power-up buried under Wood; revealed when the wall is destroyed.
  std::optional<Item> hidden_item;
  // Power-up lying in the open on a Passage cell, consumable by whoever steps on it.
  std::optional<Item> revealed_item;
};

struct Bomb {
  Pos pos;
  int owner = -1;                 // seat of the agent that laid it
  int life = 0;                   // steps until detonation; explodes when it reaches 0
  int blast_strength = 2;         // cross reach including own cell
  std::optional<Move> velocity;   // direction while sliding after a kick
};

struct Flame {
  Pos pos;
  int remaining = 0;  // steps the flame stays lethal
};

struct AgentStatus {
  Pos pos;
  int ammo = 1;
  int blast_strength = 2;
  bool can_kick = false;
  bool alive = true;
  int team = 0;  // seat % 2 in Team mode, the seat itself in FFA
};

enum class Mode : uint8_t { FFA = 0, Team = 1 };

struct GameConfig {
  int board_size = 11;
  Mode mode = Mode::Team;
  int rigid_count = 36;
  int wood_count = 36;
  int item_count = -1;  // -1: derived as wood_count * (1 - wood_passage_probability)
  double wood_passage_probability = 0.5;  // share of destroyed walls that yield nothing
  int view_radius = 3;
  bool full_observability = false;
  int max_steps = 800;
  int bomb_life = 10;
  int flame_life = 2;
  int initial_ammo = 1;
  int initial_blast = 2;
  double draw_reward = -1.0;  // terminal reward for every seat when nobody wins

  int resolved_item_count() const {
    if (item_count >= 0) return item_count;
    return static_cast<int>(wood_count * (1.0 - wood_passage_probability) + 0.5);
  }
};

struct BoardState {
  int board_size = 11;
  Mode mode = Mode::Team;
  std::vector<Cell> grid;  // row-major board_size * board_size
  std::vector<Bomb> bombs;
  std::vector<Flame> flames;
  std::array<AgentStatus, kNumAgents> agents;
  int step = 0;

  Cell& at(int r, int c) { return grid[static_cast<std::size_t>(r) * board_size + c]; }
  const Cell& at(int r, int c) const {
    return grid[static_cast<std::size_t>(r) * board_size + c];
  }
  Cell& at(Pos p) { return at(p.r, p.c); }
  const Cell& at(Pos p) const { return at(p.r, p.c); }
  bool in_bounds(int r, int c) const {
    return r >= 0 && r < board_size && c >= 0 && c < board_size;
  }
  bool in_bounds(Pos p) const { return in_bounds(p.r, p.c); }
};

// Fogged view of the board from one seat.  Cells outside the view window are
// marked unknown; bombs, flames and other agents are listed only when inside
// the window (the full-observability flag turns the window into the whole board).
enum class CellView : uint8_t { Passage = 0, Rigid = 1, Wood = 2, Unknown = 3 };

struct ObsCell {
  CellView view = CellView::Unknown;
  std::optional<Item> revealed_item;
};

struct ObsAgent {
  bool alive = true;     // life status is public knowledge
  bool visible = false;  // position known this step
  Pos pos;               // valid only when visible
  int team = 0;
};

struct ObservedState {
  int board_size = 11;
  Mode mode = Mode::Team;
  int self = 0;
  std::optional<int> teammate;  // seat, Team mode only
  std::vector<ObsCell> grid;
  std::vector<Bomb> bombs;
  std::vector<Flame> flames;
  std::array<ObsAgent, kNumAgents> agents;
  int step = 0;
  int bomb_life_max = 10;  // normalization constant carried for feature encoding
  // Own scalars (always known regardless of fog).
  int ammo = 0;
  int blast_strength = 2;
  bool can_kick = false;

  ObsCell& at(int r, int c) { return grid[static_cast<std::size_t>(r) * board_size + c]; }
  const ObsCell& at(int r, int c) const {
    return grid[static_cast<std::size_t>(r) * board_size + c];
  }
  const ObsCell& at(Pos p) const { return at(p.r, p.c); }
  bool in_bounds(int r, int c) const {
    return r >= 0 && r < board_size && c >= 0 && c < board_size;
  }
  bool in_bounds(Pos p) const { return in_bounds(p.r, p.c); }
  Pos self_pos() const { return agents[self].pos; }
};

}  // namespace combat::env
