#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "combat/env/board_gen.hpp"
#include "combat/orch/match.hpp"

using namespace combat;
using orch::MatchOutput;
using orch::StageConfig;

namespace {

pop::Population small_population(int trainables, int board_size, int hidden,
                                 std::uint64_t seed) {
  pop::Population p;
  Rng rng(seed);
  for (int i = 0; i < trainables; ++i) {
    pop::AgentSpec a;
    a.id = "t" + std::to_string(i);
    a.kind = pop::AgentKind::Trainable;
    a.params =
        std::make_shared<nn::NetworkParams>(nn::NetworkParams::init(board_size, hidden, rng));
    a.gamma = 0.6;
    a.reward.w_pickup = 0.1;
    p.agents.push_back(std::move(a));
  }
  for (int i = 0; i < 2; ++i) {
    pop::AgentSpec a;
    a.id = "s" + std::to_string(i);
    a.kind = pop::AgentKind::Scripted;
    a.scripted_name = "scripted:simple";
    p.agents.push_back(std::move(a));
  }
  return p;
}

env::GameConfig small_env() {
  env::GameConfig cfg;
  cfg.board_size = 7;
  cfg.rigid_count = 6;
  cfg.wood_count = 8;
  cfg.max_steps = 100;
  return cfg;
}

sched::MatchSpec spec_of(const std::array<std::string, 2>& a,
                         const std::array<std::string, 2>& b, std::uint64_t seed) {
  sched::MatchSpec s;
  s.team_a = a;
  s.team_b = b;
  s.leaders = {a[0], b[0]};
  s.board_seed = seed;
  s.stage = 3;
  return s;
}

bool same_trajectory(const nn::Trajectory& x, const nn::Trajectory& y) {
  if (x.steps.size() != y.steps.size()) return false;
  if (x.bootstrap_value != y.bootstrap_value) return false;
  if (x.gamma != y.gamma) return false;
  for (std::size_t i = 0; i < x.steps.size(); ++i) {
    if (x.steps[i].action != y.steps[i].action) return false;
    if (x.steps[i].reward != y.steps[i].reward) return false;
    if (x.steps[i].obs.data != y.steps[i].obs.data) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("identical rng states replay the exact match") {
  const auto popn = small_population(4, 7, 8, 11);
  const auto cfg = small_env();
  const auto spec = spec_of({"t0", "t1"}, {"t2", "t3"}, 99);
  const StageConfig stage{3, StageConfig::Teammate::Trainable, false, 0.1};

  Rng r1(777), r2(777);
  const MatchOutput a = orch::play_match(spec, popn, stage, cfg, 32, r1);
  const MatchOutput b = orch::play_match(spec, popn, stage, cfg, 32, r2);

  CHECK(a.final_hash == b.final_hash);
  CHECK(a.outcome == b.outcome);
  CHECK(a.episode_length == b.episode_length);
  CHECK(r1.state() == r2.state());
  for (int s = 0; s < 4; ++s) {
    CHECK(a.seats[s].episode_return == b.seats[s].episode_return);
    REQUIRE(a.seats[s].segments.size() == b.seats[s].segments.size());
    for (std::size_t k = 0; k < a.seats[s].segments.size(); ++k)
      CHECK(same_trajectory(a.seats[s].segments[k], b.seats[s].segments[k]));
  }
}

TEST_CASE("seats, segment shapes and reward accounting") {
  const auto popn = small_population(4, 7, 8, 5);
  const auto cfg = small_env();
  const StageConfig stage{3, StageConfig::Teammate::Trainable, false, 0.1};

  int total_segments = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto spec = spec_of({"t0", "t1"}, {"t2", "t3"}, seed);
    Rng rng(seed * 31);
    const int horizon = 24;
    const MatchOutput out = orch::play_match(spec, popn, stage, cfg, horizon, rng);

    CHECK(out.episode_length >= 1);
    CHECK(out.episode_length <= cfg.max_steps);
    CHECK_FALSE(out.self_play);
    // Seat mapping: team A at 0 and 2, team B at 1 and 3.
    CHECK(out.seats[0].agent_id == "t0");
    CHECK(out.seats[2].agent_id == "t1");
    CHECK(out.seats[1].agent_id == "t2");
    CHECK(out.seats[3].agent_id == "t3");

    // Terminal rewards implied by the outcome, per seat parity.
    std::array<double, 4> term{};
    for (int s = 0; s < 4; ++s) {
      if (out.outcome == rating::Outcome::Draw)
        term[s] = cfg.draw_reward;
      else if ((out.outcome == rating::Outcome::AWins) == (s % 2 == 0))
        term[s] = 1.0;
      else
        term[s] = -1.0;
    }

    for (int s = 0; s < 4; ++s) {
      const auto& seat = out.seats[s];
      REQUIRE(seat.trainable);
      REQUIRE(!seat.segments.empty());
      total_segments += static_cast<int>(seat.segments.size());

      std::size_t steps = 0;
      double reward_sum = 0.0;
      for (std::size_t k = 0; k < seat.segments.size(); ++k) {
        const auto& seg = seat.segments[k];
        REQUIRE(!seg.steps.empty());
        CHECK(seg.steps.size() <= static_cast<std::size_t>(horizon));
        // Lazy cutting: every segment but the last is exactly the horizon.
        if (k + 1 < seat.segments.size())
          CHECK(seg.steps.size() == static_cast<std::size_t>(horizon));
        // The last segment ends with the episode: bootstrap exactly 0.
        if (k + 1 == seat.segments.size()) CHECK(seg.bootstrap_value == 0.0);
        CHECK(seg.gamma == 0.6);
        CHECK(seg.agent_id == seat.agent_id);
        for (const auto& st : seg.steps) {
          CHECK(st.action >= 0);
          CHECK(st.action < 7 * 7 + 1);
          reward_sum += st.reward;
        }
        steps += seg.steps.size();
      }
      // An agent acts every tick it is alive, and only those ticks.
      CHECK(steps <= static_cast<std::size_t>(out.episode_length));

      // All shaping and the terminal reward land inside the steps:
      //   sum of step rewards == episode return
      //   episode return - terminal == w_pickup * items collected
      CHECK(reward_sum == doctest::Approx(seat.episode_return).epsilon(1e-12));
      CHECK(seat.episode_return - term[s] ==
            doctest::Approx(0.1 * seat.items_collected).epsilon(1e-12));
    }
  }
  CHECK(total_segments >= 4 * 20);
}

TEST_CASE("scripted seats play without collecting experience") {
  const auto popn = small_population(2, 7, 8, 3);
  const auto cfg = small_env();
  const StageConfig stage{1, StageConfig::Teammate::Scripted, false, 0.0};
  const auto spec = spec_of({"t0", "s0"}, {"t1", "s1"}, 4);

  Rng rng(12);
  const MatchOutput out = orch::play_match(spec, popn, stage, cfg, 32, rng);
  CHECK(out.seats[2].agent_id == "s0");
  CHECK_FALSE(out.seats[2].trainable);
  CHECK(out.seats[2].segments.empty());
  CHECK(out.seats[3].segments.empty());
  CHECK(!out.seats[0].segments.empty());
  CHECK(!out.seats[1].segments.empty());
}

TEST_CASE("an agent seated twice flags self-play") {
  const auto popn = small_population(2, 7, 8, 3);
  const auto cfg = small_env();
  const StageConfig stage{1, StageConfig::Teammate::Scripted, false, 0.0};
  const auto spec = spec_of({"t0", "s0"}, {"t1", "s0"}, 4);
  Rng rng(12);
  const MatchOutput out = orch::play_match(spec, popn, stage, cfg, 32, rng);
  CHECK(out.self_play);
}

TEST_CASE("unknown participants are rejected") {
  const auto popn = small_population(2, 7, 8, 3);
  const auto cfg = small_env();
  const StageConfig stage{1, StageConfig::Teammate::Scripted, false, 0.0};
  const auto spec = spec_of({"t0", "ghost"}, {"t1", "s0"}, 4);
  Rng rng(12);
  CHECK_THROWS_WITH_AS(orch::play_match(spec, popn, stage, cfg, 32, rng),
                       doctest::Contains("ghost"), std::invalid_argument);
}

TEST_CASE("a captured episode log verifies against re-simulation") {
  const auto popn = small_population(4, 7, 8, 11);
  const auto cfg = small_env();
  const StageConfig stage{3, StageConfig::Teammate::Trainable, false, 0.1};
  for (std::uint64_t seed : {3ULL, 14ULL, 159ULL}) {
    const auto spec = spec_of({"t0", "t1"}, {"t2", "t3"}, seed);
    Rng rng(seed);
    env::ReplayLog log;
    const MatchOutput out = orch::play_match(spec, popn, stage, cfg, 32, rng, &log);
    CHECK(log.header.seed == seed);
    CHECK(static_cast<int>(log.steps.size()) == out.episode_length);
    CHECK(log.steps.back().hash_after == out.final_hash);
    const char* expect = out.outcome == rating::Outcome::AWins   ? "a_wins"
                         : out.outcome == rating::Outcome::BWins ? "b_wins"
                                                                 : "draw";
    CHECK(log.result == expect);
    CHECK(env::verify_replay(log) == -1);
  }
}

TEST_CASE("kick gate: directional moves into bombs stop unless kicking is allowed") {
  env::GameConfig cfg = small_env();
  env::BoardState state = env::generate_board(cfg, 7);
  // Agent 0 sits in a corner; plant a bomb directly below it.
  const env::Pos here = state.agents[0].pos;
  env::Bomb bomb;
  bomb.pos = {here.r + 1, here.c};
  bomb.owner = 1;
  bomb.life = 5;
  state.bombs.push_back(bomb);

  CHECK(orch::gate_kick(state, 0, env::Move::Down, false) == env::Move::Stop);
  CHECK(orch::gate_kick(state, 0, env::Move::Down, true) == env::Move::Down);
  // Moves not aimed at the bomb pass through.
  CHECK(orch::gate_kick(state, 0, env::Move::Right, false) == env::Move::Right);
  CHECK(orch::gate_kick(state, 0, env::Move::Stop, false) == env::Move::Stop);
  CHECK(orch::gate_kick(state, 0, env::Move::LayBomb, false) == env::Move::LayBomb);
  // Off-board targets never index out of bounds.
  CHECK(orch::gate_kick(state, 0, env::Move::Up, false) == env::Move::Up);
}
