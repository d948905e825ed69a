#pragma once

#include <deque>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "combat/nn/network.hpp"
#include "combat/rating/elo.hpp"
#include "combat/rng.hpp"

namespace combat::pop {

enum class AgentKind { Trainable, Scripted };

// Per-agent reward shaping weights, applied by the match runner on top of the
// environment's terminal rewards.
struct RewardConfig {
  double w_pickup = 0.0;  // bonus per item collected
};

struct AgentSpec {
  std::string id;
  AgentKind kind = AgentKind::Trainable;
  std::shared_ptr<nn::NetworkParams> params;  // null for scripted agents
  std::string scripted_name;                  // registry name for scripted agents
  double gamma = 0.5;   // discount; only ever raised, stays below 1
  double alpha = 0.1;   // annealing rate in (0, 1)
  RewardConfig reward;
  std::deque<double> reward_history;  // recent per-episode shaped returns
  int stage = 1;

  // Population-step bookkeeping.
  int min_streak = 0;               // snapshots spent as the strict rating minimum
  bool converged_at_stage = false;  // converged since the last stage change
  long anneal_count = 0;

  bool trainable() const { return kind == AgentKind::Trainable; }
};

struct PopulationConfig {
  int window = 200;          // W: episodes per convergence half-window
  double epsilon = 0.02;     // max |mean(last W) - mean(previous W)|
  double sigma_max = 0.5;    // max stddev of the last W returns
  int min_games = 100;       // rated games before an agent can be removed
  int dwell = 50;            // snapshots an agent must sit at the strict minimum
  double margin = 150.0;     // required gap below the median trainable rating
  int top_k = 2;             // clone parents drawn from the k best survivors
  double gamma_init = 0.5;   // newcomers restart here to explore
  std::string spawn_prefix = "agent-";
};

struct Population {
  std::vector<AgentSpec> agents;
  long next_spawn_serial = 0;  // feeds newcomer ids

  AgentSpec* find(const std::string& id);
  const AgentSpec* find(const std::string& id) const;
  int trainable_count() const;
};

// gamma + (1 - gamma) * alpha: each application closes a fixed fraction of the
// remaining gap to 1, so the result is strictly greater and strictly below 1.
// Throws std::invalid_argument unless 0 <= gamma < 1 and 0 < alpha < 1.
double anneal_gamma(double gamma, double alpha);

// True once 2*window returns exist and the last window's mean moved less than
// epsilon from the previous window's while its (population) stddev stays under
// sigma_max.
bool is_converged(const std::deque<double>& reward_history, int window,
                  double epsilon, double sigma_max);
bool is_converged(const AgentSpec& agent, const PopulationConfig& config);

// Appends an episode return, keeping at most 2*window entries.
void push_return(AgentSpec& agent, double episode_return, int window);

// Call once per ranking snapshot: the strict-minimum trainable agent's streak
// grows by one, every other agent's resets (a tie for the minimum resets all).
void update_min_streaks(Population& population, const rating::RankingList& ranking);

// True iff the agent is trainable, has at least min_games rated games, has held
// the strict rating minimum for at least dwell consecutive snapshots, and
// trails the median trainable rating by more than margin.
bool removable(const AgentSpec& agent, const rating::RankingList& ranking,
               const Population& population, const PopulationConfig& config);

struct PopulationStepResult {
  std::vector<std::string> annealed;
  std::vector<std::string> removed;
  std::vector<std::pair<std::string, std::string>> spawned;  // (newcomer, parent)
  std::vector<std::string> refused;  // removals blocked by the 2-trainable floor
};

// One population pass over consistent snapshots. Installs freshly trained
// parameters, then per trainable agent: anneal gamma and clear the reward
// history when converged, otherwise remove when removable. Each removal spawns
// a replacement cloned (bit-equal parameters) from a uniformly random top-k
// surviving trainable, with gamma reset to gamma_init and a fresh history, so
// the population size stays constant. Removals that would drop the trainable
// count below 2 are refused. Annealing and removal are mutually exclusive per
// agent per step. Deterministic given snapshots and rng state. The caller owns
// the ranking: erase removed ids and register newcomers there.
Population apply_population_step(
    const Population& population, const rating::RankingList& ranking,
    const std::map<std::string, std::shared_ptr<nn::NetworkParams>>& installs,
    const PopulationConfig& config, Rng& rng,
    PopulationStepResult* result = nullptr);

}  // namespace combat::pop
