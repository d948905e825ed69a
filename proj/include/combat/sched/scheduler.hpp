#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "combat/rng.hpp"

namespace combat::sched {

// One entry of the population snapshot handed to the scheduler.
struct AgentRef {
  std::string id;
  bool trainable = true;  // false: rule-based agent, eligible for anchor duty
};

// A scheduled four-agent team match. team_a takes seats {0,2}, team_b {1,3}.
struct MatchSpec {
  std::array<std::string, 2> team_a;
  std::array<std::string, 2> team_b;
  // The rotation pair consumed by this match. leaders[0] heads team_a;
  // leaders[1] heads team_b unless the anchor coin fired, in which case that
  // agent sat the match out.
  std::array<std::string, 2> leaders;
  std::uint64_t board_seed = 0;
  int stage = 1;
  bool anchor_team = false;  // team_b was handed to scripted agents
};

struct SchedulerConfig {
  double p_anchor = 0.5;  // chance that team_b is replaced by scripted agents
};

// Round-robin match generator.
//
// Trainable agents rotate as opposing team leaders through every unordered
// pair once per cycle, with the cycle order reshuffled each time around.
// Teammates follow the stage policy: scripted partners in stages 1-2, fellow
// trainables in stages 3-4. Stage 3-4 teammates are planned exactly at cycle
// start: each agent fills precisely n-1 teammate slots per cycle (a randomized
// greedy pass repaired to exactness with augmenting paths), so at every cycle
// boundary all trainable agents have identical appearance counts.
// With probability p_anchor, team_b is replaced wholesale by scripted agents
// and its leader sits out.
//
// Per-call draw order is fixed so match streams replay bit-for-bit:
//   1. cycle reshuffle + teammate plan, when a new cycle starts
//   2. side coin: which leader of the pair takes team_a (also orients the
//      planned teammate pair)
//   3. anchor coin, when at least one scripted agent is selectable
//   4. scripted-agent picks (team_a first)
//   5. board seed
// Forced choices (single candidate) consume no draws.
//
// Not thread-safe: one producer calls next_match and fans the specs out.
class Scheduler {
 public:
  explicit Scheduler(SchedulerConfig config = {});

  // weights: selection weight per scripted agent competing for anchor duty
  // (missing ids default to 1; non-positive excludes). Trainable rotation is
  // exact round-robin, so weights on trainable ids are ignored.
  //
  // A change in the population's trainable id set restarts the rotation and
  // the teammate quota. Throws std::invalid_argument when the population
  // cannot satisfy the stage's teammate policy.
  MatchSpec next_match(const std::vector<AgentRef>& population,
                       const std::map<std::string, double>& weights, Rng& rng,
                       int stage);
  MatchSpec next_match(const std::vector<AgentRef>& population, Rng& rng,
                       int stage);

 private:
  void rebuild(std::vector<std::string> trainable_ids);
  void start_cycle(Rng& rng);
  void plan_teammates(Rng& rng);
  std::string draw_scripted(const std::vector<std::string>& pool,
                            const std::map<std::string, double>& weights,
                            Rng& rng) const;

  SchedulerConfig config_;
  std::vector<std::string> trainable_ids_;     // sorted; base order of the cycle
  std::vector<std::pair<int, int>> pairs_;     // indices into trainable_ids_
  std::vector<std::array<int, 2>> plan_;       // teammates per pair, same order
  std::size_t cursor_ = 0;                     // next pair within the cycle
};

}  // namespace combat::sched
