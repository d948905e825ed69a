#include "combat/env/engine.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "combat/binio.hpp"

namespace combat::env {
namespace {

void check_agent(const BoardState& state, int agent) {
  if (agent < 0 || agent >= kNumAgents) throw std::invalid_argument("unknown agent seat");
  if (!state.agents[agent].alive) throw std::invalid_argument("agent is dead");
}

const Bomb* bomb_at(const std::vector<Bomb>& bombs, Pos p) {
  for (const Bomb& b : bombs)
    if (b.pos == p) return &b;
  return nullptr;
}

Bomb* bomb_at(std::vector<Bomb>& bombs, Pos p) {
  for (Bomb& b : bombs)
    if (b.pos == p) return &b;
  return nullptr;
}

bool agent_at(const BoardState& state, Pos p, int ignore = -1) {
  for (int i = 0; i < kNumAgents; ++i)
    if (i != ignore && state.agents[i].alive && state.agents[i].pos == p) return true;
  return false;
}

// Cells covered by a bomb's cross: its own cell plus up to strength-1 cells
// per direction, stopped by Rigid and stopping on the first Wood (which it
// destroys).
std::vector<Pos> blast_cells(const BoardState& state, Pos origin, int strength) {
  std::vector<Pos> out{origin};
  for (Move m : {Move::Up, Move::Down, Move::Left, Move::Right}) {
    for (int k = 1; k < strength; ++k) {
      Pos p{origin.r + k * move_dr(m), origin.c + k * move_dc(m)};
      if (!state.in_bounds(p)) break;
      CellKind kind = state.at(p).kind;
      if (kind == CellKind::Rigid) break;
      out.push_back(p);
      if (kind == CellKind::Wood) break;
    }
  }
  return out;
}

bool flame_at(const BoardState& state, Pos p) {
  for (const Flame& f : state.flames)
    if (f.pos == p) return true;
  return false;
}

int alive_team_count(const BoardState& state) {
  std::set<int> teams;
  for (const AgentStatus& a : state.agents)
    if (a.alive) teams.insert(a.team);
  return static_cast<int>(teams.size());
}

int alive_agent_count(const BoardState& state) {
  int n = 0;
  for (const AgentStatus& a : state.agents) n += a.alive ? 1 : 0;
  return n;
}

}  // namespace

std::vector<Move> legal_primitive_moves(const BoardState& state, int agent,
                                        const GameConfig& config) {
  (void)config;
  check_agent(state, agent);
  const AgentStatus& a = state.agents[agent];
  std::vector<Move> legal{Move::Stop};
  for (Move m : {Move::Up, Move::Down, Move::Left, Move::Right}) {
    Pos t{a.pos.r + move_dr(m), a.pos.c + move_dc(m)};
    if (!state.in_bounds(t)) continue;
    CellKind kind = state.at(t).kind;
    if (kind == CellKind::Rigid || kind == CellKind::Wood) continue;
    if (bomb_at(state.bombs, t) && !a.can_kick) continue;
    legal.push_back(m);
  }
  if (a.ammo > 0 && !bomb_at(state.bombs, a.pos)) legal.push_back(Move::LayBomb);
  return legal;
}

bool is_terminal(const BoardState& state, const GameConfig& config) {
  if (state.step >= config.max_steps) return true;
  if (state.mode == Mode::Team) return alive_team_count(state) <= 1;
  return alive_agent_count(state) <= 1;
}

std::array<double, kNumAgents> terminal_reward(const BoardState& state,
                                               const GameConfig& config) {
  if (!is_terminal(state, config))
    throw std::logic_error("terminal_reward on non-terminal state");
  std::array<double, kNumAgents> r{};
  std::optional<int> winner_team;
  if (state.mode == Mode::Team) {
    if (alive_team_count(state) == 1) {
      for (const AgentStatus& a : state.agents)
        if (a.alive) winner_team = a.team;
    }
  } else {
    if (alive_agent_count(state) == 1) {
      for (int i = 0; i < kNumAgents; ++i)
        if (state.agents[i].alive) winner_team = state.agents[i].team;
    }
  }
  for (int i = 0; i < kNumAgents; ++i) {
    if (!winner_team.has_value())
      r[i] = config.draw_reward;
    else
      r[i] = state.agents[i].team == *winner_team ? 1.0 : -1.0;
  }
  return r;
}

StepResult step(const BoardState& state, const std::array<Move, kNumAgents>& actions,
                const GameConfig& config) {
  StepResult res;
  BoardState& s = res.state;
  s = state;

  // 1. timers
  for (Bomb& b : s.bombs)
    if (b.life > 0) --b.life;
  for (Flame& f : s.flames) --f.remaining;
  std::erase_if(s.flames, [](const Flame& f) { return f.remaining <= 0; });

  // 2. detonations with same-tick chaining
  std::vector<std::size_t> exploding;
  for (std::size_t i = 0; i < s.bombs.size(); ++i)
    if (s.bombs[i].life <= 0) exploding.push_back(i);
  std::vector<bool> detonated(s.bombs.size(), false);
  for (std::size_t i : exploding) detonated[i] = true;
  std::vector<Pos> covered;
  while (!exploding.empty()) {
    std::size_t i = exploding.back();
    exploding.pop_back();
    for (Pos p : blast_cells(s, s.bombs[i].pos, s.bombs[i].blast_strength)) {
      covered.push_back(p);
      for (std::size_t j = 0; j < s.bombs.size(); ++j) {
        if (!detonated[j] && s.bombs[j].pos == p) {
          detonated[j] = true;
          exploding.push_back(j);
        }
      }
    }
  }
  std::sort(covered.begin(), covered.end());
  covered.erase(std::unique(covered.begin(), covered.end()), covered.end());

  if (!covered.empty()) {
    // Returning a bomb resolves it: its owner's ammo comes back.
    for (std::size_t i = 0; i < s.bombs.size(); ++i) {
      if (detonated[i] && s.bombs[i].owner >= 0)
        s.agents[s.bombs[i].owner].ammo += 1;
    }
    std::vector<Bomb> kept;
    for (std::size_t i = 0; i < s.bombs.size(); ++i)
      if (!detonated[i]) kept.push_back(s.bombs[i]);
    s.bombs = std::move(kept);

    for (Pos p : covered) {
      for (int i = 0; i < kNumAgents; ++i) {
        if (s.agents[i].alive && s.agents[i].pos == p) {
          s.agents[i].alive = false;
          res.died[i] = true;
        }
      }
      // 3. wood destruction and power-up reveal
      Cell& cell = s.at(p);
      if (cell.kind == CellKind::Wood) {
        cell.kind = CellKind::Passage;
        res.woods_destroyed += 1;
        if (cell.hidden_item.has_value()) {
          cell.revealed_item = cell.hidden_item;
          cell.hidden_item.reset();
          res.items_revealed += 1;
        }
      }
      // flames last the configured lifetime; overlapping blasts refresh
      bool found = false;
      for (Flame& f : s.flames) {
        if (f.pos == p) {
          f.remaining = std::max(f.remaining, config.flame_life);
          found = true;
        }
      }
      if (!found) s.flames.push_back(Flame{p, config.flame_life});
    }
  }

  // 4. sliding bombs advance
  for (Bomb& b : s.bombs) {
    if (!b.velocity.has_value()) continue;
    Pos t{b.pos.r + move_dr(*b.velocity), b.pos.c + move_dc(*b.velocity)};
    bool free = s.in_bounds(t) && s.at(t).kind == CellKind::Passage &&
                bomb_at(s.bombs, t) == nullptr && !agent_at(s, t);
    if (free)
      b.pos = t;
    else
      b.velocity.reset();  // hit something: the bomb stops where it is
  }

  // 5. agent actions
  std::array<Move, kNumAgents> act = actions;
  for (int i = 0; i < kNumAgents; ++i) {
    if (!s.agents[i].alive) {
      act[i] = Move::Stop;
      continue;
    }
    // Coerce illegal choices to Stop against the post-explosion state.
    Move m = act[i];
    if (m == Move::LayBomb) {
      if (s.agents[i].ammo <= 0 || bomb_at(s.bombs, s.agents[i].pos)) act[i] = Move::Stop;
    } else if (m != Move::Stop) {
      Pos t{s.agents[i].pos.r + move_dr(m), s.agents[i].pos.c + move_dc(m)};
      if (!s.in_bounds(t)) act[i] = Move::Stop;
      else {
        CellKind kind = s.at(t).kind;
        if (kind == CellKind::Rigid || kind == CellKind::Wood) act[i] = Move::Stop;
        else if (bomb_at(s.bombs, t) && !s.agents[i].can_kick) act[i] = Move::Stop;
      }
    }
  }

  // bombs laid this tick (before movement, on the layer's current cell)
  for (int i = 0; i < kNumAgents; ++i) {
    if (act[i] == Move::LayBomb) {
      s.bombs.push_back(Bomb{s.agents[i].pos, i, config.bomb_life,
                             s.agents[i].blast_strength, std::nullopt});
      s.agents[i].ammo -= 1;
    }
  }

  // Movement with bounce-back conflicts and kicks, iterated to a fixed point:
  // a reverted mover can invalidate a neighbour's move, and a failed kick
  // behaves like a bounce.
  std::array<Pos, kNumAgents> target;
  std::array<bool, kNumAgents> moving{};
  for (int i = 0; i < kNumAgents; ++i) {
    target[i] = s.agents[i].pos;
    if (!s.agents[i].alive) continue;
    Move m = act[i];
    if (m == Move::Up || m == Move::Down || m == Move::Left || m == Move::Right) {
      target[i] = Pos{s.agents[i].pos.r + move_dr(m), s.agents[i].pos.c + move_dc(m)};
      moving[i] = true;
    }
  }
  auto revert = [&](int i) {
    moving[i] = false;
    target[i] = s.agents[i].pos;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    // bounce pass: contested cells and position swaps send movers back
    for (int i = 0; i < kNumAgents; ++i) {
      if (!moving[i]) continue;
      for (int j = 0; j < kNumAgents; ++j) {
        if (j == i || !s.agents[j].alive) continue;
        bool contested = target[j] == target[i];  // stationary j has target == pos
        bool swap = moving[j] && target[j] == s.agents[i].pos &&
                    target[i] == s.agents[j].pos;
        if (contested || swap) {
          revert(i);
          if (moving[j]) revert(j);
          changed = true;
          break;
        }
      }
    }
    // kick pass: a surviving mover entering a bomb cell pushes the bomb one
    // cell onward when it can; otherwise the move fails like a bounce.  A
    // bomb laid this very tick can show up here even for a non-kicker whose
    // move was vetted before it existed.
    for (int i = 0; i < kNumAgents; ++i) {
      if (!moving[i]) continue;
      Bomb* b = bomb_at(s.bombs, target[i]);
      if (b == nullptr) continue;
      Move m = act[i];
      Pos beyond{target[i].r + move_dr(m), target[i].c + move_dc(m)};
      bool free = s.agents[i].can_kick && s.in_bounds(beyond) &&
                  s.at(beyond).kind == CellKind::Passage &&
                  bomb_at(s.bombs, beyond) == nullptr && !agent_at(s, beyond);
      for (int j = 0; j < kNumAgents && free; ++j)
        if (moving[j] && j != i && target[j] == beyond) free = false;
      if (free) {
        b->pos = beyond;
        b->velocity = m;
      } else {
        revert(i);
        changed = true;
      }
    }
  }
  for (int i = 0; i < kNumAgents; ++i)
    if (s.agents[i].alive) s.agents[i].pos = target[i];

  // walking into fire is fatal
  for (int i = 0; i < kNumAgents; ++i) {
    if (s.agents[i].alive && flame_at(s, s.agents[i].pos)) {
      s.agents[i].alive = false;
      res.died[i] = true;
    }
  }

  // 6. power-up consumption
  for (int i = 0; i < kNumAgents; ++i) {
    if (!s.agents[i].alive) continue;
    Cell& cell = s.at(s.agents[i].pos);
    if (!cell.revealed_item.has_value()) continue;
    switch (*cell.revealed_item) {
      case Item::ExtraAmmo: s.agents[i].ammo += 1; break;
      case Item::ExtraRange: s.agents[i].blast_strength += 1; break;
      case Item::CanKick: s.agents[i].can_kick = true; break;
    }
    cell.revealed_item.reset();
    res.items_collected[i] += 1;
  }

  // 7. clock and termination
  s.step += 1;
  res.done = is_terminal(s, config);
  if (res.done) res.rewards = terminal_reward(s, config);
  return res;
}

ObservedState observe(const BoardState& state, int agent, const GameConfig& config) {
  check_agent(state, agent);
  ObservedState obs;
  obs.board_size = state.board_size;
  obs.mode = state.mode;
  obs.self = agent;
  obs.step = state.step;
  obs.bomb_life_max = config.bomb_life;
  const AgentStatus& self = state.agents[agent];
  obs.ammo = self.ammo;
  obs.blast_strength = self.blast_strength;
  obs.can_kick = self.can_kick;
  if (state.mode == Mode::Team) {
    for (int i = 0; i < kNumAgents; ++i)
      if (i != agent && state.agents[i].team == self.team) obs.teammate = i;
  }

  const int n = state.board_size;
  const int radius = config.view_radius;
  auto visible = [&](Pos p) {
    if (config.full_observability) return true;
    return std::abs(p.r - self.pos.r) <= radius && std::abs(p.c - self.pos.c) <= radius;
  };

  obs.grid.assign(static_cast<std::size_t>(n) * n, ObsCell{});
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      ObsCell& oc = obs.grid[static_cast<std::size_t>(r) * n + c];
      if (!visible(Pos{r, c})) {
        oc.view = CellView::Unknown;
        continue;
      }
      const Cell& cell = state.at(r, c);
      switch (cell.kind) {
        case CellKind::Passage: oc.view = CellView::Passage; break;
        case CellKind::Rigid: oc.view = CellView::Rigid; break;
        case CellKind::Wood: oc.view = CellView::Wood; break;
      }
      oc.revealed_item = cell.revealed_item;  // buried items stay hidden
    }
  }
  for (const Bomb& b : state.bombs)
    if (visible(b.pos)) obs.bombs.push_back(b);
  for (const Flame& f : state.flames)
    if (visible(f.pos)) obs.flames.push_back(f);
  for (int i = 0; i < kNumAgents; ++i) {
    const AgentStatus& a = state.agents[i];
    ObsAgent& oa = obs.agents[i];
    oa.alive = a.alive;
    oa.team = a.team;
    oa.visible = i == agent || (a.alive && visible(a.pos));
    if (oa.visible) oa.pos = a.pos;
  }
  return obs;
}

uint64_t state_hash(const BoardState& state) {
  Fnv1a h;
  h.add_u64(static_cast<uint64_t>(state.board_size));
  h.add_u64(static_cast<uint64_t>(state.mode));
  h.add_u64(static_cast<uint64_t>(state.step));
  for (const Cell& c : state.grid) {
    h.add_u64(static_cast<uint64_t>(c.kind));
    h.add_u64(c.hidden_item ? 1 + static_cast<uint64_t>(*c.hidden_item) : 0);
    h.add_u64(c.revealed_item ? 1 + static_cast<uint64_t>(*c.revealed_item) : 0);
  }
  std::vector<Bomb> bombs = state.bombs;
  std::sort(bombs.begin(), bombs.end(),
            [](const Bomb& a, const Bomb& b) { return a.pos < b.pos; });
  for (const Bomb& b : bombs) {
    h.add_i32(b.pos.r);
    h.add_i32(b.pos.c);
    h.add_i32(b.owner);
    h.add_i32(b.life);
    h.add_i32(b.blast_strength);
    h.add_i32(b.velocity ? static_cast<int>(*b.velocity) : -1);
  }
  std::vector<Flame> flames = state.flames;
  std::sort(flames.begin(), flames.end(),
            [](const Flame& a, const Flame& b) { return a.pos < b.pos; });
  for (const Flame& f : flames) {
    h.add_i32(f.pos.r);
    h.add_i32(f.pos.c);
    h.add_i32(f.remaining);
  }
  for (const AgentStatus& a : state.agents) {
    h.add_i32(a.pos.r);
    h.add_i32(a.pos.c);
    h.add_i32(a.ammo);
    h.add_i32(a.blast_strength);
    h.add_i32(a.can_kick ? 1 : 0);
    h.add_i32(a.alive ? 1 : 0);
    h.add_i32(a.team);
  }
  return h.value();
}

}  // namespace combat::env
