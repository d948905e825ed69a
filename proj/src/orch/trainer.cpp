#include "combat/orch/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "json.hpp"

#include "combat/orch/match.hpp"
#include "combat/sched/scheduler.hpp"

namespace combat::orch {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<sched::AgentRef> make_refs(const pop::Population& population) {
  std::vector<sched::AgentRef> refs;
  refs.reserve(population.agents.size());
  for (const auto& a : population.agents) refs.push_back({a.id, a.trainable()});
  return refs;
}

std::map<std::string, double> anchor_weights(const pop::Population& population) {
  std::map<std::string, double> weights;
  for (const auto& a : population.agents)
    if (!a.trainable()) weights[a.id] = 1.0;
  return weights;
}

const char* outcome_name(rating::Outcome o) {
  switch (o) {
    case rating::Outcome::AWins: return "a_wins";
    case rating::Outcome::BWins: return "b_wins";
    default: return "draw";
  }
}

long long wall_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// Keeps only match-log lines with pickup <= resume_pickup; a malformed line
// and everything after it is dropped too (a crash can tear the final line).
void truncate_match_log(const std::string& path, long resume_pickup) {
  std::ifstream in(path);
  if (!in) return;
  std::vector<std::string> keep;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    long pickup = -1;
    try {
      pickup = json::parse(line).at("pickup").get<long>();
    } catch (const json::exception&) {
      break;
    }
    if (pickup > resume_pickup) break;
    keep.push_back(line);
  }
  in.close();
  std::ofstream out(path, std::ios::trunc);
  for (const auto& l : keep) out << l << '\n';
}

// One scheduled pickup awaiting play/processing.
struct Pending {
  long pickup = 0;
  sched::MatchSpec spec;
  std::map<std::string, long> played_version;  // per trainable participant
  MatchOutput out;
};

}  // namespace

Trainer::Trainer(RunConfig config) : config_(std::move(config)) {}

std::string Trainer::run_dir() const {
  return (fs::path(resolve_data_dir(config_)) / config_.run_name).string();
}
std::string Trainer::checkpoint_path() const {
  return (fs::path(run_dir()) / "checkpoint.bin").string();
}
std::string Trainer::match_log_path() const {
  return (fs::path(run_dir()) / "matches.jsonl").string();
}

double Trainer::entropy_coeff_at(long agent_updates) const {
  const double f = std::min(1.0, static_cast<double>(agent_updates) /
                                     static_cast<double>(config_.entropy_anneal_updates));
  return config_.entropy_start + (config_.entropy_end - config_.entropy_start) * f;
}

TrainState Trainer::fresh_state() const {
  TrainState state;
  state.stage = config_.start_stage;
  const StageConfig& stage = stage_config(config_.stages, state.stage);

  Rng master(config_.seed);
  state.sched_rng_state = master.split(1).state();
  state.pop_rng_state = master.split(2).state();

  for (int i = 0; i < config_.trainable_count; ++i) {
    pop::AgentSpec a;
    a.id = config_.pop.spawn_prefix + std::to_string(i);
    a.kind = pop::AgentKind::Trainable;
    Rng init_rng = master.split(100 + static_cast<std::uint64_t>(i));
    a.params = std::make_shared<nn::NetworkParams>(
        nn::NetworkParams::init(config_.env.board_size, config_.hidden, init_rng));
    a.gamma = config_.gamma_init;
    a.alpha = config_.alpha;
    a.reward.w_pickup = stage.w_pickup;
    a.stage = state.stage;
    state.population.agents.push_back(std::move(a));
    state.adam.emplace(state.population.agents.back().id,
                       nn::AdamState::zeros_like(*state.population.agents.back().params));
    state.update_counts.emplace(state.population.agents.back().id, 0L);
  }
  for (int i = 0; i < config_.scripted_count; ++i) {
    pop::AgentSpec a;
    a.id = "sim-" + std::to_string(i);
    a.kind = pop::AgentKind::Scripted;
    a.scripted_name = "scripted:simple";
    a.stage = state.stage;
    state.population.agents.push_back(std::move(a));
  }
  state.population.next_spawn_serial = config_.trainable_count;
  for (const auto& a : state.population.agents) state.ranking.ensure(a.id);
  return state;
}

TrainStats Trainer::run(TrainState& state, std::ostream* info) {
  TrainStats stats;
  fs::create_directories(run_dir());
  // Drop log entries from beyond the resume point (or a previous run's log
  // entirely when starting fresh); a torn final line is dropped too.
  truncate_match_log(match_log_path(), state.pickup);

  std::ofstream match_log(match_log_path(), std::ios::app);
  if (!match_log) throw std::runtime_error("cannot open match log: " + match_log_path());

  sched::Scheduler scheduler(sched::SchedulerConfig{config_.p_anchor});
  Rng sched_rng;
  sched_rng.set_state(state.sched_rng_state);
  Rng pop_rng;
  pop_rng.set_state(state.pop_rng_state);

  std::map<std::string, long> install_version;
  for (const auto& a : state.population.agents)
    if (a.trainable()) install_version[a.id] = 0;

  long last_saved_pickup = state.pickup;
  const auto save = [&](long pickup) {
    state.sched_rng_state = sched_rng.state();
    state.pop_rng_state = pop_rng.state();
    save_checkpoint(checkpoint_path(), state);
    ++stats.checkpoints;
    last_saved_pickup = pickup;
    if (info) {
      const auto leader = state.ranking.sorted();
      (*info) << "pickup " << pickup << "/" << config_.total_pickups << " stage " << state.stage
              << " updates " << state.updates_total << " top "
              << (leader.empty() ? std::string("-") : leader.front().first) << " ("
              << (leader.empty() ? 0.0 : leader.front().second.rating) << ")\n";
      info->flush();
    }
  };

  while (state.pickup < config_.total_pickups) {
    // ----- schedule up to `workers` pickups, snapshotting scheduler state
    // before each draw so a mid-batch roster/stage change can rewind to the
    // exact point after the last processed pickup.
    const long remaining = config_.total_pickups - state.pickup;
    const int batch_size =
        static_cast<int>(std::min<long>(remaining, std::max(1, config_.workers)));
    std::vector<Pending> batch;
    std::vector<std::pair<sched::Scheduler, std::uint64_t>> before_draw;
    const auto refs = make_refs(state.population);
    const auto weights = anchor_weights(state.population);
    for (int w = 0; w < batch_size; ++w) {
      before_draw.emplace_back(scheduler, sched_rng.state());
      Pending p;
      p.pickup = state.pickup + w + 1;
      p.spec = scheduler.next_match(refs, weights, sched_rng, state.stage);
      for (const auto& id : {p.spec.team_a[0], p.spec.team_a[1], p.spec.team_b[0],
                             p.spec.team_b[1]}) {
        const auto it = install_version.find(id);
        if (it != install_version.end()) p.played_version[id] = it->second;
      }
      batch.push_back(std::move(p));
    }

    // ----- play: parameters are immutable during this phase (installs swap
    // pointers only in the processing phase below), so parallel reads of the
    // population are safe. Each match owns an rng derived from its pickup.
    const StageConfig& stage = stage_config(config_.stages, state.stage);
    const auto play_one = [&](Pending& p) {
      Rng match_rng(mix_seed(config_.seed, static_cast<std::uint64_t>(p.pickup)));
      p.out = play_match(p.spec, state.population, stage, config_.env,
                         config_.hp.minibatch_horizon, match_rng);
    };
    if (batch.size() == 1) {
      play_one(batch[0]);
    } else {
      std::vector<std::thread> threads;
      threads.reserve(batch.size());
      for (auto& p : batch) threads.emplace_back([&play_one, &p] { play_one(p); });
      for (auto& t : threads) t.join();
    }

    // ----- process strictly in pickup order
    for (std::size_t idx = 0; idx < batch.size(); ++idx) {
      Pending& p = batch[idx];

      rating::MatchRecord record;
      record.team_a = p.spec.team_a;
      record.team_b = p.spec.team_b;
      record.outcome = p.out.outcome;
      record.episode_length = p.out.episode_length;
      record.pickup = p.pickup;
      record.self_play = p.out.self_play;
      state.ranking = rating::update_ratings(state.ranking, record, config_.k_factor);
      ++stats.matches;

      json entry;
      entry["pickup"] = p.pickup;
      entry["stage"] = state.stage;
      entry["team_a"] = {p.spec.team_a[0], p.spec.team_a[1]};
      entry["team_b"] = {p.spec.team_b[0], p.spec.team_b[1]};
      entry["anchor_team"] = p.spec.anchor_team;
      entry["outcome"] = outcome_name(p.out.outcome);
      entry["length"] = p.out.episode_length;
      entry["board_seed"] = p.spec.board_seed;
      entry["final_hash"] = p.out.final_hash;
      entry["ts_ms"] = wall_clock_ms();  // wall clock lives only in the log
      json returns = json::array();
      for (int s = 0; s < 4; ++s) {
        const SeatOutcome& seat = p.out.seats[static_cast<std::size_t>(s)];
        if (seat.trainable)
          returns.push_back(
              {{"id", seat.agent_id}, {"seat", s}, {"return", seat.episode_return}});
      }
      entry["returns"] = std::move(returns);
      match_log << entry.dump() << '\n';
      match_log.flush();

      // Episode returns and experience, grouped per agent (self-play can give
      // one agent several seats).
      std::map<std::string, std::vector<nn::Trajectory>> segments;
      for (auto& seat : p.out.seats) {
        if (!seat.trainable) continue;
        pop::AgentSpec* agent = state.population.find(seat.agent_id);
        if (!agent) continue;  // removed while this batch was in flight
        pop::push_return(*agent, seat.episode_return, config_.pop.window);
        auto& dst = segments[seat.agent_id];
        for (auto& seg : seat.segments) dst.push_back(std::move(seg));
      }

      // Per-segment gradient updates behind copy-on-write installs. Segments
      // played against parameters more than one install behind are dropped.
      std::map<std::string, std::shared_ptr<nn::NetworkParams>> installs;
      for (auto& [id, segs] : segments) {
        pop::AgentSpec* agent = state.population.find(id);
        if (!agent || !agent->params) continue;
        const long played = p.played_version.count(id) ? p.played_version[id] : 0;
        if (install_version[id] - played > 1) {
          stats.stale_drops += static_cast<long>(segs.size());
          continue;
        }
        auto fresh = std::make_shared<nn::NetworkParams>(*agent->params);
        nn::AdamState& opt = state.adam.at(id);
        long& count = state.update_counts.at(id);
        for (auto& seg : segs) {
          nn::Hyperparams hp = config_.hp;
          hp.entropy_coeff = entropy_coeff_at(count);
          nn::a2c_update(*fresh, opt, {std::move(seg)}, hp);
          ++count;
          ++state.updates_total;
          ++stats.gradient_updates;
        }
        installs[id] = std::move(fresh);
      }

      // Population pass over the post-match snapshot.
      pop::update_min_streaks(state.population, state.ranking);
      pop::PopulationStepResult pr;
      state.population = pop::apply_population_step(state.population, state.ranking, installs,
                                                    config_.pop, pop_rng, &pr);
      for (const auto& id : installs)
        if (state.population.find(id.first)) ++install_version[id.first];
      bool roster_changed = false;
      for (const auto& id : pr.removed) {
        state.ranking.erase(id);
        state.adam.erase(id);
        state.update_counts.erase(id);
        install_version.erase(id);
        roster_changed = true;
      }
      for (const auto& [child, parent] : pr.spawned) {
        state.ranking.ensure(child);
        const pop::AgentSpec* spawned = state.population.find(child);
        state.adam.emplace(child, nn::AdamState::zeros_like(*spawned->params));
        state.update_counts.emplace(child, 0L);
        install_version[child] = 0;
        roster_changed = true;
      }
      stats.anneals += static_cast<long>(pr.annealed.size());
      stats.removals += static_cast<long>(pr.removed.size());
      stats.spawns += static_cast<long>(pr.spawned.size());

      // Curriculum: once every learner has converged on this stage, move on —
      // but only into a stage the roster can satisfy (trainable teammates
      // need at least four learners, scripted teammates at least one anchor).
      bool stage_changed = false;
      if (config_.auto_advance && state.stage < 4) {
        bool all_converged = true;
        for (const auto& a : state.population.agents)
          if (a.trainable() && !a.converged_at_stage) all_converged = false;
        const StageConfig& candidate = stage_config(config_.stages, state.stage + 1);
        const bool satisfiable =
            candidate.teammate == StageConfig::Teammate::Trainable
                ? state.population.trainable_count() >= 4
                : static_cast<int>(state.population.agents.size()) >
                      state.population.trainable_count();
        if (all_converged && satisfiable) {
          ++state.stage;
          ++stats.stage_advances;
          stage_changed = true;
          const StageConfig& next_stage = stage_config(config_.stages, state.stage);
          for (auto& a : state.population.agents) {
            if (!a.trainable()) continue;
            a.converged_at_stage = false;
            a.reward_history.clear();  // shaping changed; old returns incomparable
            a.stage = state.stage;
            a.reward.w_pickup = next_stage.w_pickup;
          }
        }
      }

      state.pickup = p.pickup;

      // A roster or stage change invalidates specs drawn before it: rewind
      // the scheduler to just after this pickup's draw and reschedule.
      if ((roster_changed || stage_changed) && idx + 1 < batch.size()) {
        scheduler = before_draw[idx + 1].first;
        sched_rng.set_state(before_draw[idx + 1].second);
        break;
      }
    }

    if (state.pickup / config_.checkpoint_interval >
        last_saved_pickup / config_.checkpoint_interval)
      save(state.pickup);
  }

  if (last_saved_pickup != state.pickup || stats.checkpoints == 0) save(state.pickup);
  return stats;
}

}  // namespace combat::orch
