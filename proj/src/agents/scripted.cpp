#include "combat/agents/scripted.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

#include "combat/rep/features.hpp"

namespace combat::agents {

namespace {

using env::CellView;
using env::Move;
using env::ObservedState;
using env::Pos;

constexpr int kNever = std::numeric_limits<int>::max();
constexpr std::array<Move, 4> kDirs{Move::Up, Move::Down, Move::Left, Move::Right};

// Per-cell threat summary derived from a bomb list (the observed one, or a
// hypothetical one when judging whether laying a bomb leaves an escape).
struct DangerMap {
  int n = 0;
  std::vector<int> due;         // ticks until a blast covers the cell; kNever if none
  std::vector<int> flame_left;  // remaining life of a flame on the cell; 0 if none
  std::vector<char> has_bomb;   // a bomb physically occupies the cell

  int idx(Pos p) const { return p.r * n + p.c; }
};

DangerMap map_danger(const ObservedState& view, const std::vector<env::Bomb>& bombs) {
  DangerMap d;
  d.n = view.board_size;
  const std::size_t cells = static_cast<std::size_t>(d.n) * d.n;
  d.due.assign(cells, kNever);
  d.flame_left.assign(cells, 0);
  d.has_bomb.assign(cells, 0);

  auto fixed = rep::fix_bomb_chains(bombs, view);
  for (const auto& [pos, fb] : fixed) {
    for (Pos p : rep::blast_cells(view, pos, fb.strength)) {
      int& slot = d.due[d.idx(p)];
      slot = std::min(slot, fb.life);
    }
  }
  for (const env::Flame& f : view.flames) {
    int& slot = d.flame_left[d.idx(f.pos)];
    slot = std::max(slot, f.remaining);
  }
  for (const env::Bomb& b : bombs) d.has_bomb[d.idx(b.pos)] = 1;
  return d;
}

bool ground_open(const ObservedState& view, Pos p) {
  return view.at(p).view == CellView::Passage;
}

bool agent_on(const ObservedState& view, Pos p) {
  for (int i = 0; i < env::kNumAgents; ++i) {
    if (i == view.self) continue;
    const env::ObsAgent& a = view.agents[i];
    if (a.alive && a.visible && a.pos == p) return true;
  }
  return false;
}

// Whether a cell can be entered k steps from now and exited on the step
// after.  Timers are already chain-resolved, so a cell covered by a blast due
// at tick t burns during steps t and t+1 and is cleared by t+2; arriving at
// step k therefore needs due > k + 1 (arrival during the detonation step is
// fatal, and so is standing there when it goes off next step).  A flame seen
// with remaining r is gone once k >= r.
// `slack` demands that many spare ticks on top of the bare survival margin;
// the retreat check uses it to absorb a bounced or wasted move.
bool passable_at(const ObservedState& view, const DangerMap& d, Pos p, int k,
                 int slack = 0) {
  if (!view.in_bounds(p) || !ground_open(view, p)) return false;
  const int i = d.idx(p);
  if (d.has_bomb[i]) return false;
  if (d.flame_left[i] > 0 && k < d.flame_left[i]) return false;
  return d.due[i] == kNever || d.due[i] > k + 1 + slack;
}

// Deadly to move onto right now: burning flames, the cross of a bomb about to
// detonate, or the cross of one that detonates next step (entering it means
// being caught there before the following move resolves).
bool safe_to_enter_now(const ObservedState& view, const DangerMap& d, Pos p) {
  return passable_at(view, d, p, 1);
}

// Stricter filter for voluntary moves (item grabs, random walk): stay clear
// of every cell a pending blast will reach within the flee horizon.  Only the
// flee rule itself may cut through such cells, and only on its way out.
bool calm_to_enter(const ObservedState& view, const DangerMap& d, Pos p, int horizon) {
  if (!safe_to_enter_now(view, d, p)) return false;
  const int due = d.due[d.idx(p)];
  return due == kNever || due > horizon;
}

// Breadth-first escape: shortest path to a cell free of pending blasts for
// more than `horizon` ticks, stepping only through cells that are survivable
// at the step they are crossed.  Returns the first move of that path, with
// ties broken by expanding directions in enum order and visiting agent-free
// first steps before occupied ones (bumping into another agent stalls the
// whole escape for a tick).
std::optional<Move> flee_step(const ObservedState& view, const DangerMap& d, int horizon) {
  const int n = view.board_size;
  const Pos self = view.self_pos();
  std::vector<int> dist(static_cast<std::size_t>(n) * n, -1);
  std::vector<Move> first(static_cast<std::size_t>(n) * n, Move::Stop);
  std::deque<int> q;
  dist[d.idx(self)] = 0;
  q.push_back(d.idx(self));

  auto try_visit = [&](int from, Move m) -> std::optional<Move> {
    const Pos fp{from / n, from % n};
    const Pos p{fp.r + env::move_dr(m), fp.c + env::move_dc(m)};
    const int k = dist[from] + 1;
    if (!view.in_bounds(p)) return std::nullopt;
    const int i = d.idx(p);
    if (dist[i] != -1 || !passable_at(view, d, p, k)) return std::nullopt;
    dist[i] = k;
    first[i] = (k == 1) ? m : first[from];
    if (d.due[i] == kNever || d.due[i] > horizon) return first[i];
    q.push_back(i);
    return std::nullopt;
  };

  while (!q.empty()) {
    const int from = q.front();
    q.pop_front();
    if (dist[from] == 0) {
      // Two passes over the first steps: agent-free ones before occupied ones.
      for (int pass = 0; pass < 2; ++pass) {
        for (Move m : kDirs) {
          const Pos p{self.r + env::move_dr(m), self.c + env::move_dc(m)};
          if (view.in_bounds(p) && agent_on(view, p) == (pass == 0)) continue;
          if (auto hit = try_visit(from, m)) return hit;
        }
      }
    } else {
      for (Move m : kDirs)
        if (auto hit = try_visit(from, m)) return hit;
    }
  }
  return std::nullopt;
}

// No full escape exists: buy time on the latest-due reachable cell, breaking
// ties away from the nearest bomb (the cross usually ends in that direction).
// Occupied cells are skipped — bouncing off a blocker burns the tick.
Move stall_step(const ObservedState& view, const DangerMap& d) {
  const Pos self = view.self_pos();
  auto bomb_gap = [&](Pos p) {
    int best = kNever;
    for (const env::Bomb& b : view.bombs)
      best = std::min(best, std::abs(b.pos.r - p.r) + std::abs(b.pos.c - p.c));
    return best;
  };
  Move best = Move::Stop;
  auto best_key = std::pair<long, int>(d.due[d.idx(self)], bomb_gap(self));
  for (Move m : kDirs) {
    const Pos p{self.r + env::move_dr(m), self.c + env::move_dc(m)};
    if (!view.in_bounds(p) || !safe_to_enter_now(view, d, p) || agent_on(view, p))
      continue;
    const auto key = std::pair<long, int>(d.due[d.idx(p)], bomb_gap(p));
    if (key > best_key) {
      best = m;
      best_key = key;
    }
  }
  return best;
}

// Whether laying a bomb here still leaves a reachable fully safe cell, judged
// against the bomb list plus the hypothetical own bomb (chains included).
bool retreat_exists(const ObservedState& view) {
  std::vector<env::Bomb> bombs = view.bombs;
  env::Bomb own;
  own.pos = view.self_pos();
  own.owner = view.self;
  own.life = view.bomb_life_max;
  own.blast_strength = view.blast_strength;
  bombs.push_back(own);
  DangerMap d = map_danger(view, bombs);

  const int n = view.board_size;
  std::vector<int> dist(static_cast<std::size_t>(n) * n, -1);
  std::deque<int> q;
  dist[d.idx(view.self_pos())] = 0;
  q.push_back(d.idx(view.self_pos()));
  while (!q.empty()) {
    const int from = q.front();
    q.pop_front();
    for (Move m : kDirs) {
      const Pos fp{from / n, from % n};
      const Pos p{fp.r + env::move_dr(m), fp.c + env::move_dc(m)};
      if (!view.in_bounds(p)) continue;
      const int i = d.idx(p);
      const int k = dist[from] + 1;
      if (dist[i] != -1 || !passable_at(view, d, p, k, /*slack=*/1)) continue;
      if (d.due[i] == kNever) return true;
      dist[i] = k;
      q.push_back(i);
    }
  }
  return false;
}

bool wants_bomb(const ObservedState& view) {
  if (view.ammo <= 0) return false;
  const Pos self = view.self_pos();
  for (const env::Bomb& b : view.bombs)
    if (b.pos == self) return false;

  for (Move m : kDirs) {
    const Pos p{self.r + env::move_dr(m), self.c + env::move_dc(m)};
    if (view.in_bounds(p) && view.at(p).view == CellView::Wood) return true;
  }

  const int my_team = view.agents[view.self].team;
  for (Pos p : rep::blast_cells(view, self, view.blast_strength)) {
    for (int i = 0; i < env::kNumAgents; ++i) {
      const env::ObsAgent& a = view.agents[i];
      if (i != view.self && a.alive && a.visible && a.team != my_team && a.pos == p)
        return true;
    }
  }
  return false;
}

}  // namespace

env::Move scripted_act(const ObservedState& view, Rng& rng, const ScriptedConfig& cfg) {
  const DangerMap d = map_danger(view, view.bombs);
  const Pos self = view.self_pos();

  // 1. Flee when the own cell is inside a blast due soon.
  const int own_due = d.due[d.idx(self)];
  if (own_due != kNever && own_due <= cfg.danger_horizon) {
    if (auto m = flee_step(view, d, cfg.danger_horizon)) return *m;
    return stall_step(view, d);
  }

  // 2. Grab an adjacent revealed power-up.
  for (Move m : kDirs) {
    const Pos p{self.r + env::move_dr(m), self.c + env::move_dc(m)};
    if (!view.in_bounds(p)) continue;
    if (view.at(p).revealed_item.has_value() &&
        calm_to_enter(view, d, p, cfg.danger_horizon) && !agent_on(view, p))
      return m;
  }

  // 3. Mine wood / attack: bomb when adjacent to Wood or an enemy stands in
  //    blast range, provided an escape from the resulting blast exists.
  if (wants_bomb(view) && retreat_exists(view)) return Move::LayBomb;

  // 4. Stop-biased random walk over the survivable neighbours, never bombing;
  //    biased toward the nearest visible enemy, or — with nobody in sight —
  //    toward the nearest living enemy's spawn corner.
  std::vector<std::pair<Move, double>> cand;
  cand.emplace_back(Move::Stop, cfg.stop_weight);

  const int my_team = view.agents[view.self].team;
  int goal_dist = kNever;
  Pos goal{};
  double pull = 0.0;
  for (int i = 0; i < env::kNumAgents; ++i) {
    const env::ObsAgent& a = view.agents[i];
    if (i == view.self || !a.alive || !a.visible || a.team == my_team) continue;
    const int md = std::abs(a.pos.r - self.r) + std::abs(a.pos.c - self.c);
    if (md < goal_dist) {
      goal_dist = md;
      goal = a.pos;
      pull = cfg.seek_weight;
    }
  }
  if (goal_dist == kNever) {
    // Seating convention: seats take the corners clockwise from the origin.
    // Distance ties break toward the seat after one's own, so the two members
    // of a team fan out to different opponents instead of crowding one.
    const int n = view.board_size;
    const Pos corners[env::kNumAgents] = {{0, 0}, {0, n - 1}, {n - 1, n - 1}, {n - 1, 0}};
    for (int off = 1; off < env::kNumAgents; ++off) {
      const int i = (view.self + off) % env::kNumAgents;
      const env::ObsAgent& a = view.agents[i];
      if (!a.alive || a.team == my_team) continue;
      const int md =
          std::abs(corners[i].r - self.r) + std::abs(corners[i].c - self.c);
      if (md < goal_dist) {
        goal_dist = md;
        goal = corners[i];
        pull = cfg.roam_weight;
      }
    }
  }

  for (Move m : kDirs) {
    const Pos p{self.r + env::move_dr(m), self.c + env::move_dc(m)};
    if (!view.in_bounds(p) || !calm_to_enter(view, d, p, cfg.danger_horizon) ||
        agent_on(view, p))
      continue;
    double w = 1.0;
    if (goal_dist != kNever && pull > 0.0) {
      const int md = std::abs(goal.r - p.r) + std::abs(goal.c - p.c);
      if (md < goal_dist) w += pull;
    }
    cand.emplace_back(m, w);
  }

  double total = 0.0;
  for (const auto& [m, w] : cand) total += w;
  double x = rng.uniform() * total;
  for (const auto& [m, w] : cand) {
    x -= w;
    if (x < 0.0) return m;
  }
  return cand.back().first;
}

env::Move scripted_act(const ObservedState& view, Rng& rng) {
  return scripted_act(view, rng, ScriptedConfig{});
}

namespace {

std::map<std::string, ScriptedPolicy>& registry_mut() {
  static std::map<std::string, ScriptedPolicy> reg = [] {
    std::map<std::string, ScriptedPolicy> m;
    m["scripted:simple"] = [](const ObservedState& v, Rng& r) { return scripted_act(v, r); };
    m["scripted:idle"] = [](const ObservedState&, Rng&) { return Move::Stop; };
    return m;
  }();
  return reg;
}

}  // namespace

const std::map<std::string, ScriptedPolicy>& scripted_registry() { return registry_mut(); }

void register_scripted(const std::string& name, ScriptedPolicy policy) {
  registry_mut()[name] = std::move(policy);
}

env::Move scripted_act_by_name(const std::string& name, const ObservedState& view, Rng& rng) {
  const auto& reg = scripted_registry();
  auto it = reg.find(name);
  if (it == reg.end()) throw std::out_of_range("unknown scripted policy: " + name);
  return it->second(view, rng);
}

}  // namespace combat::agents
