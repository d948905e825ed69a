#include "combat/rating/elo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <tuple>

namespace combat::rating {

AgentStats& RankingList::ensure(const std::string& id) { return agents_[id]; }

const AgentStats* RankingList::find(const std::string& id) const {
  auto it = agents_.find(id);
  return it == agents_.end() ? nullptr : &it->second;
}

std::vector<std::pair<std::string, AgentStats>> RankingList::sorted() const {
  std::vector<std::pair<std::string, AgentStats>> out(agents_.begin(), agents_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::make_tuple(b.second.rating, a.second.games_played(), std::cref(a.first)) <
           std::make_tuple(a.second.rating, b.second.games_played(), std::cref(b.first));
  });
  return out;
}

double expected_score(double rating_a, double rating_b) {
  if (!std::isfinite(rating_a) || !std::isfinite(rating_b))
    throw std::invalid_argument("expected_score: ratings must be finite");
  return 1.0 / (1.0 + std::pow(10.0, (rating_b - rating_a) / 400.0));
}

RankingList update_ratings(const RankingList& ranking, const MatchRecord& match,
                           double k_factor) {
  const std::array<const std::string*, 4> slots = {&match.team_a[0], &match.team_a[1],
                                                   &match.team_b[0], &match.team_b[1]};
  for (const std::string* id : slots)
    if (!ranking.contains(*id))
      throw std::out_of_range("update_ratings: unknown agent id: " + *id);
  if (!match.self_play) {
    for (std::size_t i = 0; i < slots.size(); ++i)
      for (std::size_t j = i + 1; j < slots.size(); ++j)
        if (*slots[i] == *slots[j])
          throw std::invalid_argument(
              "update_ratings: repeated participant without self_play: " + *slots[i]);
  }

  RankingList out = ranking;
  const double rating_a =
      (out.ensure(match.team_a[0]).rating + out.ensure(match.team_a[1]).rating) / 2.0;
  const double rating_b =
      (out.ensure(match.team_b[0]).rating + out.ensure(match.team_b[1]).rating) / 2.0;
  const double score =
      match.outcome == Outcome::AWins ? 1.0 : (match.outcome == Outcome::BWins ? 0.0 : 0.5);
  // One shared delta keeps the four slot adjustments exactly zero-sum.
  const double delta = k_factor * (score - expected_score(rating_a, rating_b));

  for (const std::string& id : match.team_a) {
    AgentStats& s = out.ensure(id);
    s.rating += delta;
    if (match.outcome == Outcome::AWins) ++s.wins;
    else if (match.outcome == Outcome::BWins) ++s.losses;
    else ++s.draws;
  }
  for (const std::string& id : match.team_b) {
    AgentStats& s = out.ensure(id);
    s.rating -= delta;
    if (match.outcome == Outcome::BWins) ++s.wins;
    else if (match.outcome == Outcome::AWins) ++s.losses;
    else ++s.draws;
  }
  return out;
}

}  // namespace combat::rating
