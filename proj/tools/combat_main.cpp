// combat: continual match-based training at desk scale.
//
//   combat train  --config run.conf [--seed N] [--workers N] [--total N] [--fresh]
//   combat rank   --checkpoint file
//   combat eval   --checkpoint file [--vs scripted:simple] [--matches N]
//   combat replay <log>            (episode replay or JSONL match log)
//
// Exit codes: 0 success, 1 usage/runtime error, 2 replay digest mismatch.

#include <array>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "combat/agents/scripted.hpp"
#include "combat/env/replay.hpp"
#include "combat/orch/checkpoint.hpp"
#include "combat/orch/match.hpp"
#include "combat/orch/trainer.hpp"

namespace {

using namespace combat;
using nlohmann::json;

int cmd_train(const std::string& config_path, std::uint64_t* seed, int* workers, long* total,
              int* stage, const std::string& data_dir, const std::string& run_name, bool fresh,
              bool quiet) {
  orch::RunConfig config =
      config_path.empty() ? orch::RunConfig{} : orch::load_run_config(config_path);
  if (seed) config.seed = *seed;
  if (workers) config.workers = *workers;
  if (total) config.total_pickups = *total;
  if (stage) config.start_stage = *stage;
  if (!data_dir.empty()) config.data_dir = data_dir;
  if (!run_name.empty()) config.run_name = run_name;

  orch::Trainer trainer(config);
  orch::TrainState state;
  const std::string ckpt = trainer.checkpoint_path();
  if (!fresh && std::ifstream(ckpt).good()) {
    state = orch::load_checkpoint(ckpt);
    std::cout << "resuming " << ckpt << " at pickup " << state.pickup << "\n";
  } else {
    state = trainer.fresh_state();
    std::cout << "fresh run: " << config.trainable_count << " learners + "
              << config.scripted_count << " scripted, stage " << state.stage << ", seed "
              << config.seed << "\n";
  }
  if (state.pickup >= config.total_pickups) {
    std::cout << "nothing to do: checkpoint already at pickup " << state.pickup << "\n";
    return 0;
  }

  const orch::TrainStats stats = trainer.run(state, quiet ? nullptr : &std::cout);

  std::cout << "done: " << stats.matches << " matches, " << stats.gradient_updates
            << " gradient updates";
  if (stats.stale_drops) std::cout << " (" << stats.stale_drops << " stale segments dropped)";
  std::cout << "\n      " << stats.anneals << " anneals, " << stats.removals << " removals, "
            << stats.stage_advances << " stage advances; final stage " << state.stage << "\n";
  std::cout << "checkpoint: " << trainer.checkpoint_path() << "\n";
  std::cout << "match log:  " << trainer.match_log_path() << "\n";
  return 0;
}

int cmd_rank(const std::string& checkpoint) {
  const orch::TrainState state = orch::load_checkpoint(checkpoint);
  std::cout << "pickup " << state.pickup << ", stage " << state.stage << ", "
            << state.updates_total << " gradient updates\n\n";
  std::cout << std::left << std::setw(4) << "#" << std::setw(14) << "agent" << std::right
            << std::setw(9) << "rating" << std::setw(6) << "W" << std::setw(6) << "L"
            << std::setw(6) << "D" << std::setw(8) << "gamma" << std::setw(9) << "anneals"
            << std::setw(10) << "kind" << "\n";
  int place = 1;
  for (const auto& [id, stats] : state.ranking.sorted()) {
    const pop::AgentSpec* agent = state.population.find(id);
    std::cout << std::left << std::setw(4) << place++ << std::setw(14) << id << std::right
              << std::setw(9) << std::fixed << std::setprecision(1) << stats.rating
              << std::setw(6) << stats.wins << std::setw(6) << stats.losses << std::setw(6)
              << stats.draws;
    if (agent && agent->trainable())
      std::cout << std::setw(8) << std::setprecision(3) << agent->gamma << std::setw(9)
                << agent->anneal_count << std::setw(10) << "learner";
    else
      std::cout << std::setw(8) << "-" << std::setw(9) << "-" << std::setw(10) << "scripted";
    std::cout << "\n";
  }
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& vs, int matches,
             std::uint64_t seed, const std::string& config_path,
             const std::string& replay_path) {
  orch::TrainState state = orch::load_checkpoint(checkpoint);
  if (!agents::scripted_registry().count(vs))
    throw std::runtime_error("unknown scripted opponent '" + vs + "'");

  // Top two learners by rating take team A.
  std::vector<std::string> learners;
  for (const auto& [id, stats] : state.ranking.sorted()) {
    const pop::AgentSpec* a = state.population.find(id);
    if (a && a->trainable()) learners.push_back(id);
  }
  if (learners.size() < 2) throw std::runtime_error("checkpoint has fewer than two learners");

  pop::AgentSpec opponent;
  opponent.id = "opponent";
  opponent.kind = pop::AgentKind::Scripted;
  opponent.scripted_name = vs;
  state.population.agents.push_back(opponent);

  env::GameConfig env_cfg;
  orch::StageConfig stage = orch::default_stages()[3];  // full rules: kicking allowed
  const pop::AgentSpec* lead = state.population.find(learners[0]);
  if (!config_path.empty()) {
    const orch::RunConfig rc = orch::load_run_config(config_path);
    env_cfg = rc.env;
    stage = rc.stages[3];
    if (env_cfg.board_size != lead->params->board_size)
      throw std::runtime_error("config board size does not match the checkpoint's networks");
  } else if (env_cfg.board_size != lead->params->board_size) {
    // No config given: match the networks' board and scale wall counts with
    // the board area so the defaults still fit.
    const int n = lead->params->board_size;
    env_cfg.rigid_count = env_cfg.rigid_count * n * n / (11 * 11);
    env_cfg.wood_count = env_cfg.wood_count * n * n / (11 * 11);
    env_cfg.board_size = n;
  }

  sched::MatchSpec spec;
  spec.team_a = {learners[0], learners[1]};
  spec.team_b = {"opponent", "opponent"};
  spec.leaders = {learners[0], "opponent"};
  spec.stage = 4;

  int wins = 0, losses = 0, draws = 0;
  long total_len = 0;
  Rng rng(seed);
  env::ReplayLog replay_log;
  for (int m = 0; m < matches; ++m) {
    spec.board_seed = rng.next_u64();
    Rng match_rng(mix_seed(seed, static_cast<std::uint64_t>(m + 1)));
    const orch::MatchOutput out =
        orch::play_match(spec, state.population, stage, env_cfg, 256, match_rng,
                         replay_path.empty() ? nullptr : &replay_log);
    if (out.outcome == rating::Outcome::AWins)
      ++wins;
    else if (out.outcome == rating::Outcome::BWins)
      ++losses;
    else
      ++draws;
    total_len += out.episode_length;
  }
  std::cout << learners[0] << " + " << learners[1] << " vs " << vs << " x" << matches << ": "
            << wins << "W " << losses << "L " << draws << "D  (win rate "
            << std::fixed << std::setprecision(1) << 100.0 * wins / matches
            << "%, mean length " << (matches ? total_len / matches : 0) << ")\n";
  if (!replay_path.empty()) {
    std::ofstream out(replay_path);
    if (!out) throw std::runtime_error("cannot write replay: " + replay_path);
    out << env::format_header(replay_log.header) << "\n";
    for (const auto& s : replay_log.steps) out << env::format_step(s) << "\n";
    out << env::format_trailer(replay_log) << "\n";
    std::cout << "last match recorded to " << replay_path << "\n";
  }
  return 0;
}

int replay_episode(std::istream& in) {
  const env::ReplayLog log = env::parse_replay(in);
  std::cout << "episode replay: seed " << log.header.seed << ", board "
            << log.header.config.board_size << "x" << log.header.config.board_size << ", "
            << log.steps.size() << " steps, result " << log.result << "\n";
  const int mismatch = env::verify_replay(log);
  if (mismatch >= 0) {
    std::cout << "digest mismatch at step " << mismatch << "\n";
    return 2;
  }
  std::cout << "verified: every per-step digest matches the re-simulation\n";
  return 0;
}

int replay_match_log(std::istream& in) {
  long matches = 0, a_wins = 0, b_wins = 0, draws = 0, total_len = 0;
  int last_stage = 0;
  long last_pickup = 0;
  std::map<std::string, std::array<long, 3>> records;  // id -> {w, l, d}
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json entry = json::parse(line);
    ++matches;
    last_pickup = entry.at("pickup").get<long>();
    last_stage = entry.at("stage").get<int>();
    total_len += entry.at("length").get<long>();
    const std::string outcome = entry.at("outcome").get<std::string>();
    const int slot = outcome == "a_wins" ? 0 : outcome == "b_wins" ? 1 : 2;
    (slot == 0 ? a_wins : slot == 1 ? b_wins : draws) += 1;
    for (int side = 0; side < 2; ++side) {
      for (const auto& id : entry.at(side == 0 ? "team_a" : "team_b")) {
        auto& rec = records[id.get<std::string>()];
        if (slot == 2)
          ++rec[2];
        else
          ++rec[(slot == side) ? 0 : 1];
      }
    }
  }
  if (matches == 0) throw std::runtime_error("match log is empty");
  std::cout << "match log: " << matches << " matches through pickup " << last_pickup
            << " (stage " << last_stage << ")\n";
  std::cout << "outcomes: " << a_wins << " team-A wins, " << b_wins << " team-B wins, " << draws
            << " draws; mean length " << total_len / matches << "\n\nper agent:\n";
  for (const auto& [id, rec] : records)
    std::cout << "  " << std::left << std::setw(14) << id << std::right << rec[0] << "W "
              << rec[1] << "L " << rec[2] << "D\n";
  return 0;
}

int cmd_replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open log: " + path);
  // An episode replay opens with its header tag; a match log is JSONL.
  const int first = in.peek();
  if (first == '{') return replay_match_log(in);
  return replay_episode(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continual match-based multi-agent training"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "run or resume a training loop");
  std::string config_path, data_dir, run_name;
  std::uint64_t seed = 0;
  int workers = 0, stage = 0;
  long total = 0;
  bool fresh = false, quiet = false;
  train->add_option("--config", config_path, "run configuration file (key = value lines)");
  auto* seed_opt = train->add_option("--seed", seed, "override the run seed");
  auto* workers_opt = train->add_option("--workers", workers, "parallel match workers");
  auto* total_opt = train->add_option("--total", total, "override total pickups");
  auto* stage_opt =
      train->add_option("--stage", stage, "override the starting curriculum stage (1-4)");
  train->add_option("--data-dir", data_dir, "override the output directory");
  train->add_option("--run-name", run_name, "override the run name");
  train->add_flag("--fresh", fresh, "ignore an existing checkpoint and start over");
  train->add_flag("--quiet", quiet, "suppress per-checkpoint progress lines");

  // rank
  auto* rank = app.add_subcommand("rank", "print the ranking stored in a checkpoint");
  std::string rank_ckpt;
  rank->add_option("--checkpoint", rank_ckpt, "checkpoint file")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "pit the top two learners against a scripted team");
  std::string eval_ckpt, eval_vs = "scripted:simple", eval_config, eval_replay;
  int eval_matches = 100;
  std::uint64_t eval_seed = 1;
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
  eval->add_option("--vs", eval_vs, "scripted opponent registry name");
  eval->add_option("--matches", eval_matches, "number of evaluation matches")
      ->check(CLI::PositiveNumber);
  eval->add_option("--seed", eval_seed, "evaluation seed");
  eval->add_option("--config", eval_config, "run config supplying environment settings");
  eval->add_option("--replay", eval_replay, "write the last match as a verifiable episode log");

  // replay
  auto* replay = app.add_subcommand("replay", "inspect an episode replay or a match log");
  std::string replay_path;
  replay->add_option("log", replay_path, "log file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed())
      return cmd_train(config_path, seed_opt->count() ? &seed : nullptr,
                       workers_opt->count() ? &workers : nullptr,
                       total_opt->count() ? &total : nullptr,
                       stage_opt->count() ? &stage : nullptr, data_dir, run_name, fresh, quiet);
    if (rank->parsed()) return cmd_rank(rank_ckpt);
    if (eval->parsed())
      return cmd_eval(eval_ckpt, eval_vs, eval_matches, eval_seed, eval_config, eval_replay);
    if (replay->parsed()) return cmd_replay(replay_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
