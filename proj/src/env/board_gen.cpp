#include "combat/env/board_gen.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "combat/rng.hpp"

namespace combat::env {
namespace {

// Corner seats in seating order; teams in Team mode are seat % 2, which puts
// teammates on the same board diagonal (seats 0,2 on the main diagonal,
// seats 1,3 on the anti-diagonal).
std::array<Pos, kNumAgents> corner_positions(int n) {
  return {Pos{0, 0}, Pos{0, n - 1}, Pos{n - 1, n - 1}, Pos{n - 1, 0}};
}

// Cells kept clear so every agent can always make an opening move.
std::vector<Pos> protected_cells(int n) {
  std::vector<Pos> out;
  for (Pos p : corner_positions(n)) {
    out.push_back(p);
    for (Pos d : {Pos{p.r, p.c == 0 ? 1 : n - 2}, Pos{p.r == 0 ? 1 : n - 2, p.c}})
      out.push_back(d);
  }
  return out;
}

bool on_border(int n, Pos p) {
  return p.r == 0 || p.c == 0 || p.r == n - 1 || p.c == n - 1;
}

// Unordered transpose pair {p, pᵀ}; diagonal cells pair with themselves.
struct PairSlot {
  Pos a;        // r <= c representative
  bool diagonal;
  int cells() const { return diagonal ? 1 : 2; }
};

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.bounded(i)]);
}

}  // namespace

BoardState generate_board(const GameConfig& config, uint64_t seed) {
  const int n = config.board_size;
  if (n < 5 || n % 2 == 0)
    throw std::invalid_argument("board_size must be odd and at least 5");
  if (config.rigid_count < 0 || config.wood_count < 0)
    throw std::invalid_argument("wall counts must be non-negative");
  const int items = config.resolved_item_count();
  if (items > config.wood_count)
    throw std::invalid_argument("item_count exceeds wood_count");

  BoardState state;
  state.board_size = n;
  state.mode = config.mode;
  state.grid.assign(static_cast<std::size_t>(n) * n, Cell{});
  state.step = 0;

  auto corners = corner_positions(n);
  for (int i = 0; i < kNumAgents; ++i) {
    AgentStatus& a = state.agents[i];
    a.pos = corners[i];
    a.ammo = config.initial_ammo;
    a.blast_strength = config.initial_blast;
    a.can_kick = false;
    a.alive = true;
    a.team = config.mode == Mode::Team ? i % 2 : i;
  }

  std::vector<bool> blocked(static_cast<std::size_t>(n) * n, false);
  for (Pos p : protected_cells(n)) blocked[static_cast<std::size_t>(p.r) * n + p.c] = true;

  // Enumerate transpose pair slots with r <= c representatives.
  std::vector<PairSlot> interior;  // eligible for rigid or wood
  std::vector<PairSlot> border;    // eligible for wood only, keeps corridors rigid-free
  for (int r = 0; r < n; ++r) {
    for (int c = r; c < n; ++c) {
      Pos p{r, c};
      Pos q{c, r};
      if (blocked[static_cast<std::size_t>(p.r) * n + p.c] ||
          blocked[static_cast<std::size_t>(q.r) * n + q.c])
        continue;
      PairSlot slot{p, r == c};
      if (on_border(n, p) || on_border(n, q))
        border.push_back(slot);
      else
        interior.push_back(slot);
    }
  }

  Rng rng(mix_seed(seed, 0xb0a2d));
  shuffle(interior, rng);
  shuffle(border, rng);

  // Greedy placement that spends pair slots while two or more cells are
  // needed and keeps diagonal singletons for odd remainders, so any count
  // that fits at all is met exactly.
  auto place = [&](std::vector<PairSlot>& pool, int count, CellKind kind,
                   std::vector<PairSlot>& placed) {
    int remaining = count;
    while (remaining > 0) {
      auto pick = pool.end();
      for (auto it = pool.begin(); it != pool.end(); ++it) {
        if (it->cells() > remaining) continue;
        if (pick == pool.end() || (pick->diagonal && !it->diagonal)) pick = it;
        if (!pick->diagonal) break;
      }
      if (pick == pool.end())
        throw std::invalid_argument("wall counts do not fit the board");
      state.at(pick->a).kind = kind;
      state.at(Pos{pick->a.c, pick->a.r}).kind = kind;
      placed.push_back(*pick);
      remaining -= pick->cells();
      pool.erase(pick);
    }
  };

  std::vector<PairSlot> rigid_slots, wood_slots;
  // An odd item count needs at least one diagonal wood cell to pair an item
  // with itself; reserve one up front in that case.
  if (items % 2 == 1) {
    auto it = std::find_if(interior.begin(), interior.end(),
                           [](const PairSlot& s) { return s.diagonal; });
    if (it == interior.end())
      throw std::invalid_argument("odd item_count needs a free diagonal cell");
    PairSlot diag = *it;
    interior.erase(it);
    if (config.wood_count < 1)
      throw std::invalid_argument("odd item_count requires wood");
    state.at(diag.a).kind = CellKind::Wood;
    wood_slots.push_back(diag);
  }

  place(interior, config.rigid_count, CellKind::Rigid, rigid_slots);
  // Wood may also occupy the border ring.
  std::vector<PairSlot> wood_pool = interior;
  wood_pool.insert(wood_pool.end(), border.begin(), border.end());
  shuffle(wood_pool, rng);
  int wood_needed = config.wood_count - (items % 2 == 1 ? 1 : 0);
  place(wood_pool, wood_needed, CellKind::Wood, wood_slots);

  // Bury power-ups pairwise so the item mask is transpose-symmetric too.
  // Pair slots are consumed first; diagonal singletons absorb odd remainders
  // (one was reserved above when the item count is odd).
  shuffle(wood_slots, rng);
  int need = items;
  while (need > 0) {
    auto pick = wood_slots.end();
    for (auto it = wood_slots.begin(); it != wood_slots.end(); ++it) {
      if (it->cells() > need) continue;
      if (pick == wood_slots.end() || (pick->diagonal && !it->diagonal)) pick = it;
      if (!pick->diagonal) break;
    }
    if (pick == wood_slots.end())
      throw std::invalid_argument("item parity cannot be satisfied");
    Item kind = static_cast<Item>(rng.bounded(3));
    state.at(pick->a).hidden_item = kind;
    state.at(Pos{pick->a.c, pick->a.r}).hidden_item = kind;
    need -= pick->cells();
    wood_slots.erase(pick);
  }

  return state;
}

}  // namespace combat::env
