#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <queue>

#include "combat/env/board_gen.hpp"
#include "combat/env/engine.hpp"

using namespace combat::env;

namespace {

// Independent flood fill over non-Rigid cells (Wood is breakable, so it
// counts as passable for reachability purposes).
std::vector<bool> reachable_from(const BoardState& s, Pos start) {
  const int n = s.board_size;
  std::vector<bool> seen(static_cast<std::size_t>(n) * n, false);
  std::queue<Pos> q;
  q.push(start);
  seen[static_cast<std::size_t>(start.r) * n + start.c] = true;
  while (!q.empty()) {
    Pos p = q.front();
    q.pop();
    const int dr[] = {-1, 1, 0, 0};
    const int dc[] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      Pos t{p.r + dr[k], p.c + dc[k]};
      if (!s.in_bounds(t)) continue;
      std::size_t idx = static_cast<std::size_t>(t.r) * n + t.c;
      if (seen[idx] || s.at(t).kind == CellKind::Rigid) continue;
      seen[idx] = true;
      q.push(t);
    }
  }
  return seen;
}

int count_kind(const BoardState& s, CellKind k) {
  int n = 0;
  for (const Cell& c : s.grid) n += c.kind == k ? 1 : 0;
  return n;
}

int count_hidden(const BoardState& s) {
  int n = 0;
  for (const Cell& c : s.grid) n += c.hidden_item.has_value() ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("corners hold one agent each on passage cells") {
  GameConfig cfg;
  for (uint64_t seed : {0ull, 1ull, 42ull, 999ull}) {
    BoardState s = generate_board(cfg, seed);
    const int n = cfg.board_size;
    Pos corners[] = {{0, 0}, {0, n - 1}, {n - 1, n - 1}, {n - 1, 0}};
    for (int i = 0; i < kNumAgents; ++i) {
      CHECK(s.agents[i].pos == corners[i]);
      CHECK(s.at(corners[i]).kind == CellKind::Passage);
      CHECK(s.agents[i].alive);
      CHECK(s.agents[i].ammo == cfg.initial_ammo);
      CHECK(s.agents[i].blast_strength == cfg.initial_blast);
      CHECK_FALSE(s.agents[i].can_kick);
    }
    CHECK(s.agents[0].team == 0);
    CHECK(s.agents[1].team == 1);
    CHECK(s.agents[2].team == 0);
    CHECK(s.agents[3].team == 1);
  }
}

TEST_CASE("wall and item counts are exact") {
  GameConfig cfg;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    BoardState s = generate_board(cfg, seed);
    CHECK(count_kind(s, CellKind::Rigid) == cfg.rigid_count);
    CHECK(count_kind(s, CellKind::Wood) == cfg.wood_count);
    CHECK(count_hidden(s) == cfg.resolved_item_count());
  }
}

TEST_CASE("odd counts are honored exactly too") {
  GameConfig cfg;
  cfg.rigid_count = 11;
  cfg.wood_count = 15;
  cfg.item_count = 7;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    BoardState s = generate_board(cfg, seed);
    CHECK(count_kind(s, CellKind::Rigid) == 11);
    CHECK(count_kind(s, CellKind::Wood) == 15);
    CHECK(count_hidden(s) == 7);
  }
}

TEST_CASE("board is transpose symmetric, swapping the off-diagonal teammates") {
  GameConfig cfg;
  for (uint64_t seed = 0; seed < 30; ++seed) {
    BoardState s = generate_board(cfg, seed);
    const int n = s.board_size;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        CHECK(s.at(r, c).kind == s.at(c, r).kind);
        CHECK(s.at(r, c).hidden_item == s.at(c, r).hidden_item);
      }
    }
    // transpose maps seat 1's corner to seat 3's and fixes seats 0 and 2
    CHECK(s.agents[1].pos == Pos{0, n - 1});
    CHECK(s.agents[3].pos == Pos{n - 1, 0});
    CHECK(s.agents[1].team == s.agents[3].team);
  }
}

TEST_CASE("every agent can reach every other agent through non-rigid cells") {
  GameConfig cfg;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    BoardState s = generate_board(cfg, seed);
    auto seen = reachable_from(s, s.agents[0].pos);
    for (int i = 1; i < kNumAgents; ++i) {
      Pos p = s.agents[i].pos;
      CHECK(seen[static_cast<std::size_t>(p.r) * s.board_size + p.c]);
    }
  }
}

TEST_CASE("identical seed gives identical board, different seed differs") {
  GameConfig cfg;
  BoardState a = generate_board(cfg, 7);
  BoardState b = generate_board(cfg, 7);
  BoardState c = generate_board(cfg, 8);
  CHECK(state_hash(a) == state_hash(b));
  CHECK(state_hash(a) != state_hash(c));
}

TEST_CASE("hidden items sit under wood only") {
  GameConfig cfg;
  for (uint64_t seed = 0; seed < 30; ++seed) {
    BoardState s = generate_board(cfg, seed);
    for (const Cell& cell : s.grid) {
      if (cell.hidden_item.has_value()) CHECK(cell.kind == CellKind::Wood);
      CHECK_FALSE(cell.revealed_item.has_value());
    }
    CHECK(s.bombs.empty());
    CHECK(s.flames.empty());
    CHECK(s.step == 0);
  }
}

TEST_CASE("the border ring never carries rigid walls") {
  GameConfig cfg;
  for (uint64_t seed = 0; seed < 30; ++seed) {
    BoardState s = generate_board(cfg, seed);
    const int n = s.board_size;
    for (int i = 0; i < n; ++i) {
      CHECK(s.at(0, i).kind != CellKind::Rigid);
      CHECK(s.at(n - 1, i).kind != CellKind::Rigid);
      CHECK(s.at(i, 0).kind != CellKind::Rigid);
      CHECK(s.at(i, n - 1).kind != CellKind::Rigid);
    }
  }
}

TEST_CASE("impossible configurations are rejected") {
  GameConfig cfg;
  cfg.rigid_count = 200;  // more than the interior can hold on 11x11
  CHECK_THROWS_AS(generate_board(cfg, 0), std::invalid_argument);
  GameConfig even;
  even.board_size = 10;
  CHECK_THROWS_AS(generate_board(even, 0), std::invalid_argument);
  GameConfig items;
  items.item_count = 40;  // exceeds wood_count
  CHECK_THROWS_AS(generate_board(items, 0), std::invalid_argument);
}

TEST_CASE("small odd board variant generates cleanly") {
  GameConfig cfg;
  cfg.board_size = 9;
  cfg.rigid_count = 12;
  cfg.wood_count = 16;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    BoardState s = generate_board(cfg, seed);
    CHECK(count_kind(s, CellKind::Rigid) == 12);
    CHECK(count_kind(s, CellKind::Wood) == 16);
    auto seen = reachable_from(s, s.agents[0].pos);
    for (int i = 1; i < kNumAgents; ++i) {
      Pos p = s.agents[i].pos;
      CHECK(seen[static_cast<std::size_t>(p.r) * s.board_size + p.c]);
    }
  }
}
