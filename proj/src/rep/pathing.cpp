#include "combat/rep/pathing.hpp"

#include <cstdlib>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace combat::rep {
namespace {

constexpr env::Move kDirections[] = {env::Move::Up, env::Move::Down, env::Move::Left,
                                     env::Move::Right};

// Cells an agent could walk through: open Passage, plus bomb cells when the
// viewer can kick.  Wood, Rigid and fogged cells block.  The viewer's own
// cell is always open — it may hold a bomb the viewer just laid.
std::vector<char> traversable(const env::ObservedState& view) {
  const int n = view.board_size;
  std::vector<char> open(static_cast<std::size_t>(n) * n, 0);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      open[static_cast<std::size_t>(r) * n + c] = view.at(r, c).view == env::CellView::Passage;
  if (!view.can_kick)
    for (const auto& b : view.bombs) open[static_cast<std::size_t>(b.pos.r) * n + b.pos.c] = 0;
  const env::Pos self = view.self_pos();
  open[static_cast<std::size_t>(self.r) * n + self.c] = 1;
  return open;
}

// Unit edge weights, so the priority queue settles cells in breadth order.
std::vector<int> dijkstra(const std::vector<char>& open, int n, env::Pos source) {
  std::vector<int> dist(static_cast<std::size_t>(n) * n, -1);
  using Entry = std::pair<int, int>;  // (distance, flat index)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  const int src = source.r * n + source.c;
  dist[src] = 0;
  pq.emplace(0, src);
  while (!pq.empty()) {
    auto [d, idx] = pq.top();
    pq.pop();
    if (d != dist[idx]) continue;  // stale entry
    const int r = idx / n, c = idx % n;
    for (env::Move m : kDirections) {
      const int nr = r + env::move_dr(m), nc = c + env::move_dc(m);
      if (nr < 0 || nr >= n || nc < 0 || nc >= n) continue;
      const int nidx = nr * n + nc;
      if (!open[nidx]) continue;
      if (dist[nidx] == -1 || d + 1 < dist[nidx]) {
        dist[nidx] = d + 1;
        pq.emplace(d + 1, nidx);
      }
    }
  }
  return dist;
}

// First move of a shortest self→dest path: a neighbour lies on one exactly
// when it is one step closer to dest than self is.  Scanning in enum order
// realises the Up/Down/Left/Right tie-break.
env::Move first_step(const env::ObservedState& view, const std::vector<char>& open,
                     env::Pos dest) {
  const int n = view.board_size;
  const env::Pos self = view.self_pos();
  const std::vector<int> from_dest = dijkstra(open, n, dest);
  const int here = from_dest[static_cast<std::size_t>(self.r) * n + self.c];
  for (env::Move m : kDirections) {
    const int nr = self.r + env::move_dr(m), nc = self.c + env::move_dc(m);
    if (nr < 0 || nr >= n || nc < 0 || nc >= n) continue;
    const std::size_t nidx = static_cast<std::size_t>(nr) * n + nc;
    if (open[nidx] && from_dest[nidx] == here - 1) return m;
  }
  return env::Move::Stop;  // unreachable from here; callers pre-check
}

}  // namespace

std::vector<int> path_distances(const env::ObservedState& view) {
  return dijkstra(traversable(view), view.board_size, view.self_pos());
}

env::Move resolve_action(const env::ObservedState& view, ActionIndex action,
                         const ChannelLayout& layout) {
  if (view.board_size != layout.board_size)
    throw std::invalid_argument("layout board size does not match observation");
  const int n = view.board_size;
  if (action < 0 || action > n * n) throw std::out_of_range("action index out of range");

  const env::Pos self = view.self_pos();
  if (action == bomb_action(layout)) {
    bool occupied = false;
    for (const auto& b : view.bombs) occupied = occupied || b.pos == self;
    return (view.ammo > 0 && !occupied) ? env::Move::LayBomb : env::Move::Stop;
  }

  env::Pos dest{action / n, action % n};
  if (dest == self) return env::Move::Stop;

  const std::vector<char> open = traversable(view);
  const std::vector<int> from_self = dijkstra(open, n, self);
  if (from_self[static_cast<std::size_t>(dest.r) * n + dest.c] == -1) {
    // Walk toward the reachable cell nearest the blocked target instead.
    env::Pos best = self;
    int best_md = std::abs(self.r - dest.r) + std::abs(self.c - dest.c);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        if (from_self[static_cast<std::size_t>(r) * n + c] == -1) continue;
        const int md = std::abs(r - dest.r) + std::abs(c - dest.c);
        if (std::tie(md, r, c) < std::tie(best_md, best.r, best.c)) {
          best_md = md;
          best = {r, c};
        }
      }
    if (best == self) return env::Move::Stop;
    dest = best;
  }
  return first_step(view, open, dest);
}

}  // namespace combat::rep
