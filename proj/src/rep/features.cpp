#include "combat/rep/features.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace combat::rep {

using env::CellView;
using env::Pos;

namespace {

bool blast_blocks(const env::ObservedState& view, Pos p) {
  CellView v = view.at(p).view;
  return v == CellView::Rigid || v == CellView::Unknown;
}

// Cross cells a bomb at `origin` with `strength` would cover, against the
// observed grid (first Wood included then blocked, Rigid/Unknown block).
template <typename Fn>
void for_blast_cells(const env::ObservedState& view, Pos origin, int strength, Fn&& fn) {
  fn(origin);
  using env::Move;
  for (Move m : {Move::Up, Move::Down, Move::Left, Move::Right}) {
    for (int k = 1; k < strength; ++k) {
      Pos p{origin.r + k * env::move_dr(m), origin.c + k * env::move_dc(m)};
      if (!view.in_bounds(p)) break;
      if (blast_blocks(view, p)) break;
      fn(p);
      if (view.at(p).view == CellView::Wood) break;
    }
  }
}

}  // namespace

std::vector<Pos> blast_cells(const env::ObservedState& view, Pos origin, int strength) {
  std::vector<Pos> out;
  for_blast_cells(view, origin, strength, [&](Pos p) { out.push_back(p); });
  return out;
}

std::map<Pos, FixedBomb> fix_bomb_chains(const std::vector<env::Bomb>& bombs,
                                         const env::ObservedState& view) {
  std::map<Pos, FixedBomb> out;
  const std::size_t n = bombs.size();
  if (n == 0) return out;

  // coverage[i] = indices of bombs inside bomb i's blast cross
  std::vector<std::vector<std::size_t>> covers(n);
  for (std::size_t i = 0; i < n; ++i) {
    for_blast_cells(view, bombs[i].pos, bombs[i].blast_strength, [&](Pos p) {
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && bombs[j].pos == p) covers[i].push_back(j);
    });
  }

  // Multi-source shortest-settle: pop the bomb with the smallest resolved
  // timer and relax everything it covers, exactly like a unit Dijkstra.  The
  // settled minimum is final, so the fixed point arrives in one sweep
  // regardless of the bombs' order in the input.
  std::vector<int> fixed(n);
  for (std::size_t i = 0; i < n; ++i) fixed[i] = bombs[i].life;
  using Entry = std::pair<int, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  for (std::size_t i = 0; i < n; ++i) pq.push({fixed[i], i});
  std::vector<bool> settled(n, false);
  while (!pq.empty()) {
    auto [life, i] = pq.top();
    pq.pop();
    if (settled[i] || life != fixed[i]) continue;
    settled[i] = true;
    for (std::size_t j : covers[i]) {
      if (fixed[i] < fixed[j]) {
        fixed[j] = fixed[i];
        pq.push({fixed[j], j});
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    out[bombs[i].pos] = FixedBomb{fixed[i], bombs[i].blast_strength};
  return out;
}

FeatureTensor encode(const env::ObservedState& view, const ChannelLayout& layout) {
  if (view.board_size != layout.board_size)
    throw std::invalid_argument("observation board size does not match layout");
  const int n = layout.board_size;
  FeatureTensor t;
  t.board_size = n;
  t.data.assign(static_cast<std::size_t>(kNumChannels) * n * n, 0.0);

  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      switch (view.at(r, c).view) {
        case CellView::Passage: t.at(kPassage, r, c) = 1.0; break;
        case CellView::Rigid: t.at(kRigid, r, c) = 1.0; break;
        case CellView::Wood: t.at(kWood, r, c) = 1.0; break;
        case CellView::Unknown: t.at(kFog, r, c) = 1.0; break;
      }
      if (view.at(r, c).revealed_item.has_value()) t.at(kItems, r, c) = 1.0;
    }
  }

  auto chains = fix_bomb_chains(view.bombs, view);
  for (const auto& [pos, fb] : chains) {
    t.at(kBombStrength, pos.r, pos.c) =
        static_cast<double>(std::min(fb.strength, n)) / n;
    t.at(kBombLife, pos.r, pos.c) =
        static_cast<double>(std::clamp(fb.life, 0, view.bomb_life_max)) /
        view.bomb_life_max;
  }

  for (const env::Flame& f : view.flames) t.at(kFlames, f.pos.r, f.pos.c) = 1.0;

  // Self plane: scalar broadcast corners first, own-position marker last so
  // the marker wins when the viewer stands on a reserved corner.
  t.at(kSelf, 0, 0) = std::min(view.ammo, 10) / 10.0;
  t.at(kSelf, 0, n - 1) = static_cast<double>(std::min(view.blast_strength, n)) / n;
  t.at(kSelf, n - 1, 0) = view.can_kick ? 1.0 : 0.0;
  Pos self = view.self_pos();
  t.at(kSelf, self.r, self.c) = 1.0;

  for (int i = 0; i < env::kNumAgents; ++i) {
    if (i == view.self) continue;
    const env::ObsAgent& a = view.agents[i];
    if (!a.visible || !a.alive) continue;
    if (view.teammate.has_value() && i == *view.teammate)
      t.at(kTeammate, a.pos.r, a.pos.c) = 1.0;
    else
      t.at(kEnemies, a.pos.r, a.pos.c) = 1.0;
  }
  return t;
}

}  // namespace combat::rep
