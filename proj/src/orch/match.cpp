#include "combat/orch/match.hpp"

#include <stdexcept>

#include "combat/agents/scripted.hpp"
#include "combat/env/board_gen.hpp"
#include "combat/env/engine.hpp"
#include "combat/nn/network.hpp"
#include "combat/nn/sampling.hpp"
#include "combat/rep/features.hpp"
#include "combat/rep/layout.hpp"
#include "combat/rep/pathing.hpp"

namespace combat::orch {
namespace {

bool directional(env::Move m) {
  return m == env::Move::Up || m == env::Move::Down || m == env::Move::Left ||
         m == env::Move::Right;
}

bool bomb_at(const env::BoardState& state, env::Pos p) {
  for (const auto& b : state.bombs)
    if (b.pos == p) return true;
  return false;
}

// Per-seat collection state while the episode runs.
struct SeatWork {
  const pop::AgentSpec* agent = nullptr;
  std::vector<nn::Trajectory> closed;
  nn::Trajectory open;
  bool acted_this_tick = false;
};

void close_segment(SeatWork& w, double bootstrap) {
  if (w.open.steps.empty()) return;
  w.open.bootstrap_value = bootstrap;
  w.closed.push_back(std::move(w.open));
  w.open = nn::Trajectory{};
  w.open.gamma = w.agent->gamma;
  w.open.agent_id = w.agent->id;
}

}  // namespace

env::Move gate_kick(const env::BoardState& state, int seat, env::Move move, bool kick_enabled) {
  if (kick_enabled || !directional(move)) return move;
  const env::Pos here = state.agents[static_cast<std::size_t>(seat)].pos;
  const env::Pos target{here.r + env::move_dr(move), here.c + env::move_dc(move)};
  if (state.in_bounds(target) && bomb_at(state, target)) return env::Move::Stop;
  return move;
}

MatchOutput play_match(const sched::MatchSpec& spec, const pop::Population& population,
                       const StageConfig& stage, const env::GameConfig& base_env,
                       int minibatch_horizon, Rng& rng, env::ReplayLog* replay) {
  if (minibatch_horizon < 1) throw std::invalid_argument("minibatch horizon must be positive");

  // Seat assignment: team A at 0 and 2, team B at 1 and 3.
  std::array<std::string, 4> seat_ids;
  seat_ids[kTeamASeats[0]] = spec.team_a[0];
  seat_ids[kTeamASeats[1]] = spec.team_a[1];
  seat_ids[kTeamBSeats[0]] = spec.team_b[0];
  seat_ids[kTeamBSeats[1]] = spec.team_b[1];

  std::array<SeatWork, 4> work;
  bool self_play = false;
  for (int s = 0; s < 4; ++s) {
    const pop::AgentSpec* agent = population.find(seat_ids[static_cast<std::size_t>(s)]);
    if (!agent)
      throw std::invalid_argument("match references unknown agent '" +
                                  seat_ids[static_cast<std::size_t>(s)] + "'");
    if (agent->trainable() && !agent->params)
      throw std::invalid_argument("trainable agent '" + agent->id + "' has no parameters");
    work[static_cast<std::size_t>(s)].agent = agent;
    work[static_cast<std::size_t>(s)].open.gamma = agent->gamma;
    work[static_cast<std::size_t>(s)].open.agent_id = agent->id;
    for (int t = 0; t < s; ++t)
      if (seat_ids[static_cast<std::size_t>(t)] == seat_ids[static_cast<std::size_t>(s)])
        self_play = true;
  }

  env::BoardState state = env::generate_board(base_env, spec.board_seed);
  const rep::ChannelLayout layout{rep::kLayoutVersion, base_env.board_size};
  const int action_dim = layout.action_dim();

  MatchOutput out;
  out.self_play = self_play;
  for (int s = 0; s < 4; ++s) {
    out.seats[static_cast<std::size_t>(s)].agent_id = seat_ids[static_cast<std::size_t>(s)];
    out.seats[static_cast<std::size_t>(s)].trainable =
        work[static_cast<std::size_t>(s)].agent->trainable();
  }

  if (replay) {
    replay->header.seed = spec.board_seed;
    replay->header.config = base_env;
    replay->steps.clear();
    replay->result = "ongoing";
  }

  std::array<double, 4> terminal{};
  bool done = false;
  int tick = 0;
  while (!done) {
    std::array<env::Move, env::kNumAgents> actions{env::Move::Stop, env::Move::Stop,
                                                   env::Move::Stop, env::Move::Stop};
    for (int s = 0; s < 4; ++s) {
      SeatWork& w = work[static_cast<std::size_t>(s)];
      w.acted_this_tick = false;
      if (!state.agents[static_cast<std::size_t>(s)].alive) continue;
      const env::ObservedState view = env::observe(state, s, base_env);
      env::Move mv = env::Move::Stop;
      if (w.agent->trainable()) {
        rep::FeatureTensor obs = rep::encode(view, layout);
        const nn::ForwardPass fp = nn::forward(*w.agent->params, obs);
        // A full segment is closed the moment its successor state is known:
        // this observation is exactly that state, so its value bootstraps it.
        if (static_cast<int>(w.open.steps.size()) >= minibatch_horizon)
          close_segment(w, fp.values(0));
        std::vector<double> logits(static_cast<std::size_t>(action_dim));
        for (int a = 0; a < action_dim; ++a)
          logits[static_cast<std::size_t>(a)] = fp.logits(0, a);
        const std::vector<double> probs = nn::softmax(logits.data(), action_dim);
        const int action = nn::sample_index(probs, rng);
        mv = rep::resolve_action(view, action, layout);
        w.open.steps.push_back(nn::TrajectoryStep{std::move(obs), action, 0.0});
        w.acted_this_tick = true;
      } else {
        mv = agents::scripted_act_by_name(w.agent->scripted_name, view, rng);
      }
      actions[static_cast<std::size_t>(s)] = gate_kick(state, s, mv, stage.kick_enabled);
    }

    env::StepResult sr = env::step(state, actions, base_env);

    for (int s = 0; s < 4; ++s) {
      SeatWork& w = work[static_cast<std::size_t>(s)];
      SeatOutcome& seat = out.seats[static_cast<std::size_t>(s)];
      const int picked = sr.items_collected[static_cast<std::size_t>(s)];
      if (picked > 0) {
        seat.items_collected += picked;
        const double bonus = w.agent->reward.w_pickup * picked;
        seat.episode_return += bonus;
        if (w.acted_this_tick && !w.open.steps.empty()) w.open.steps.back().reward += bonus;
      }
    }

    done = sr.done;
    if (done && sr.rewards) terminal = *sr.rewards;
    state = std::move(sr.state);
    if (replay) replay->steps.push_back({tick, actions, env::state_hash(state)});
    ++tick;
  }

  // Terminal rewards land on each seat's final recorded step; every still-open
  // segment ends with the episode, so it bootstraps with exactly 0.
  for (int s = 0; s < 4; ++s) {
    SeatWork& w = work[static_cast<std::size_t>(s)];
    SeatOutcome& seat = out.seats[static_cast<std::size_t>(s)];
    seat.episode_return += terminal[static_cast<std::size_t>(s)];
    if (!w.agent->trainable()) continue;
    // Segments are cut lazily (immediately before the next recorded step),
    // so a seat's final step is always in its open segment.
    if (!w.open.steps.empty())
      w.open.steps.back().reward += terminal[static_cast<std::size_t>(s)];
    close_segment(w, 0.0);
    seat.segments = std::move(w.closed);
  }

  if (terminal[0] > 0.0)
    out.outcome = rating::Outcome::AWins;
  else if (terminal[1] > 0.0)
    out.outcome = rating::Outcome::BWins;
  else
    out.outcome = rating::Outcome::Draw;
  out.episode_length = state.step;
  out.final_hash = env::state_hash(state);
  if (replay)
    replay->result = out.outcome == rating::Outcome::AWins   ? "a_wins"
                     : out.outcome == rating::Outcome::BWins ? "b_wins"
                                                             : "draw";
  return out;
}

}  // namespace combat::orch
