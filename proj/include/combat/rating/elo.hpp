#pragma once
#include <array>
#include <map>
#include <string>
#include <vector>

namespace combat::rating {

// Per-agent ranking entry.  games_played is derived so the books always
// balance.
struct AgentStats {
  double rating = 1200.0;
  int wins = 0;
  int losses = 0;
  int draws = 0;

  int games_played() const { return wins + losses + draws; }
};

enum class Outcome { AWins, BWins, Draw };

// One finished team match.  Logical time is the pickup index that scheduled
// the match; wall-clock timestamps live only in the match log so that saved
// state stays byte-reproducible.
struct MatchRecord {
  std::array<std::string, 2> team_a;
  std::array<std::string, 2> team_b;
  Outcome outcome = Outcome::Draw;
  int episode_length = 0;
  long pickup = 0;
  // Permits repeated ids among the four slots (e.g. an anchor filling both
  // seats of a team); without it, the four participants must be distinct.
  bool self_play = false;
};

class RankingList {
 public:
  // Returns the entry for `id`, creating it at the initial rating if absent.
  AgentStats& ensure(const std::string& id);
  // Null when the id is unknown.
  const AgentStats* find(const std::string& id) const;
  bool contains(const std::string& id) const { return agents_.count(id) != 0; }
  void erase(const std::string& id) { agents_.erase(id); }
  std::size_t size() const { return agents_.size(); }

  // Rating descending; ties by fewer games played, then id.
  std::vector<std::pair<std::string, AgentStats>> sorted() const;

  auto begin() const { return agents_.begin(); }
  auto end() const { return agents_.end(); }

 private:
  std::map<std::string, AgentStats> agents_;
};

// 1 / (1 + 10^((rating_b - rating_a) / 400)).  Throws std::invalid_argument
// on non-finite input.
double expected_score(double rating_a, double rating_b);

// Applies one match: team rating is the mean of its members, the team delta
// k * (score - expected) is computed once and credited in full to each member
// of A and debited in full from each member of B, so the four slot deltas sum
// to exactly zero.  Pure: returns the updated copy.  Throws std::out_of_range
// for ids missing from the ranking and std::invalid_argument when the four
// slots repeat an id without the self_play flag.
RankingList update_ratings(const RankingList& ranking, const MatchRecord& match,
                           double k_factor);

}  // namespace combat::rating
