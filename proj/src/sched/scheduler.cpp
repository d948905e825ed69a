#include "combat/sched/scheduler.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace combat::sched {

namespace {

double weight_of(const std::map<std::string, double>& weights, const std::string& id) {
  auto it = weights.find(id);
  return it == weights.end() ? 1.0 : it->second;
}

}  // namespace

Scheduler::Scheduler(SchedulerConfig config) : config_(config) {
  if (!(config_.p_anchor >= 0.0 && config_.p_anchor <= 1.0))
    throw std::invalid_argument("scheduler: p_anchor must lie in [0, 1]");
}

void Scheduler::rebuild(std::vector<std::string> trainable_ids) {
  trainable_ids_ = std::move(trainable_ids);
  pairs_.clear();
  const int n = static_cast<int>(trainable_ids_.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs_.emplace_back(i, j);
  cursor_ = pairs_.size();  // force a fresh cycle on the next call
}

void Scheduler::start_cycle(Rng& rng) {
  for (std::size_t i = pairs_.size(); i > 1; --i)
    std::swap(pairs_[i - 1], pairs_[static_cast<std::size_t>(rng.bounded(i))]);
  cursor_ = 0;
  plan_teammates(rng);
}

// Assign two trainable teammates to every match of the cycle so that each
// agent fills exactly n-1 teammate slots. A uniform fractional assignment
// (2/(n-2) per eligible agent) meets every quota, so an exact integral plan
// always exists for n >= 4; the greedy pass below lands near it and the
// augmenting-path repair finishes the job.
void Scheduler::plan_teammates(Rng& rng) {
  const int n = static_cast<int>(trainable_ids_.size());
  const int m_count = static_cast<int>(pairs_.size());
  plan_.assign(pairs_.size(), {-1, -1});
  if (n < 4) return;  // stages 3-4 reject these populations before use

  const int quota = n - 1;
  std::vector<std::vector<int>> chosen(m_count);
  std::vector<int> cnt(n, 0);
  auto eligible = [&](int m, int k) {
    return k != pairs_[m].first && k != pairs_[m].second;
  };
  auto taken = [&](int m, int k) {
    return std::find(chosen[m].begin(), chosen[m].end(), k) != chosen[m].end();
  };

  // Greedy: most remaining quota first, rng breaking ties.
  for (int m = 0; m < m_count; ++m) {
    for (int slot = 0; slot < 2; ++slot) {
      int best = 0;
      std::vector<int> tied;
      for (int k = 0; k < n; ++k) {
        if (!eligible(m, k) || taken(m, k)) continue;
        const int left = quota - cnt[k];
        if (left <= 0) continue;
        if (tied.empty() || left > best) {
          best = left;
          tied.assign(1, k);
        } else if (left == best) {
          tied.push_back(k);
        }
      }
      if (tied.empty()) continue;  // repaired below
      const int pick =
          tied.size() == 1
              ? tied.front()
              : tied[static_cast<std::size_t>(rng.bounded(tied.size()))];
      chosen[m].push_back(pick);
      ++cnt[pick];
    }
  }

  // Repair underfilled matches with augmenting paths: match -> agent edges add
  // an assignment, agent -> match edges take one back. A path ends at an agent
  // with remaining quota, giving the start match one more teammate and leaving
  // every intermediate count unchanged.
  for (int m0 = 0; m0 < m_count; ++m0) {
    while (static_cast<int>(chosen[m0].size()) < 2) {
      std::vector<int> parent_of_agent(n, -1);   // match that reaches the agent
      std::vector<int> parent_of_match(m_count, -1);  // agent that reaches the match
      std::vector<char> match_seen(m_count, 0);
      std::deque<int> frontier;  // match indices
      frontier.push_back(m0);
      match_seen[m0] = 1;
      int free_agent = -1;
      while (!frontier.empty() && free_agent < 0) {
        const int m = frontier.front();
        frontier.pop_front();
        for (int k = 0; k < n && free_agent < 0; ++k) {
          if (!eligible(m, k) || taken(m, k) || parent_of_agent[k] >= 0) continue;
          parent_of_agent[k] = m;
          if (cnt[k] < quota) {
            free_agent = k;
            break;
          }
          for (int m2 = 0; m2 < m_count; ++m2) {
            if (match_seen[m2] || !taken(m2, k)) continue;
            match_seen[m2] = 1;
            parent_of_match[m2] = k;
            frontier.push_back(m2);
          }
        }
      }
      if (free_agent < 0)
        throw std::logic_error("scheduler: teammate plan infeasible");
      ++cnt[free_agent];
      int k = free_agent;
      for (;;) {
        const int m = parent_of_agent[k];
        chosen[m].push_back(k);
        if (m == m0) break;
        k = parent_of_match[m];
        chosen[m].erase(std::find(chosen[m].begin(), chosen[m].end(), k));
      }
    }
  }

  for (int m = 0; m < m_count; ++m) {
    std::sort(chosen[m].begin(), chosen[m].end());
    plan_[m] = {chosen[m][0], chosen[m][1]};
  }
}

std::string Scheduler::draw_scripted(const std::vector<std::string>& pool,
                                     const std::map<std::string, double>& weights,
                                     Rng& rng) const {
  if (pool.size() == 1) return pool.front();
  double total = 0.0;
  for (const std::string& id : pool) total += weight_of(weights, id);
  double roll = rng.uniform() * total;
  for (const std::string& id : pool) {
    roll -= weight_of(weights, id);
    if (roll < 0.0) return id;
  }
  return pool.back();
}

MatchSpec Scheduler::next_match(const std::vector<AgentRef>& population, Rng& rng,
                                int stage) {
  return next_match(population, {}, rng, stage);
}

MatchSpec Scheduler::next_match(const std::vector<AgentRef>& population,
                                const std::map<std::string, double>& weights,
                                Rng& rng, int stage) {
  if (stage < 1 || stage > 4)
    throw std::invalid_argument("scheduler: stage must be 1..4");

  std::vector<std::string> trainables;
  std::vector<std::string> scripted;
  std::set<std::string> seen;
  for (const AgentRef& a : population) {
    if (!seen.insert(a.id).second)
      throw std::invalid_argument("scheduler: duplicate agent id in population: " + a.id);
    (a.trainable ? trainables : scripted).push_back(a.id);
  }
  std::sort(trainables.begin(), trainables.end());
  std::sort(scripted.begin(), scripted.end());

  if (trainables.size() < 2)
    throw std::invalid_argument("scheduler: needs at least 2 trainable agents");
  const bool trainable_teammates = stage >= 3;
  if (trainable_teammates && trainables.size() < 4)
    throw std::invalid_argument(
        "scheduler: stages 3-4 pair trainable teammates and need at least 4 "
        "trainable agents");

  std::vector<std::string> pool;  // scripted agents selectable for anchor duty
  for (const std::string& id : scripted)
    if (weight_of(weights, id) > 0.0) pool.push_back(id);
  if (!trainable_teammates && pool.empty())
    throw std::invalid_argument(
        "scheduler: stages 1-2 give each leader a scripted teammate and need a "
        "selectable scripted agent");

  if (trainables != trainable_ids_) rebuild(trainables);
  if (cursor_ == pairs_.size()) start_cycle(rng);

  const std::size_t slot = cursor_++;
  const auto [i, j] = pairs_[slot];
  const bool first_leads_a = rng.chance(0.5);
  const std::string& lead_a = trainable_ids_[first_leads_a ? i : j];
  const std::string& lead_b = trainable_ids_[first_leads_a ? j : i];

  const bool anchor_fire = !pool.empty() && rng.chance(config_.p_anchor);

  MatchSpec spec;
  spec.leaders = {lead_a, lead_b};
  spec.stage = stage;
  spec.anchor_team = anchor_fire;

  if (trainable_teammates) {
    const auto [m0, m1] = plan_[slot];
    const std::string& mate_a = trainable_ids_[first_leads_a ? m0 : m1];
    const std::string& mate_b = trainable_ids_[first_leads_a ? m1 : m0];
    spec.team_a = {lead_a, mate_a};
    if (anchor_fire)
      spec.team_b = {draw_scripted(pool, weights, rng),
                     draw_scripted(pool, weights, rng)};
    else
      spec.team_b = {lead_b, mate_b};
  } else {
    spec.team_a = {lead_a, draw_scripted(pool, weights, rng)};
    if (anchor_fire)
      spec.team_b = {draw_scripted(pool, weights, rng),
                     draw_scripted(pool, weights, rng)};
    else
      spec.team_b = {lead_b, draw_scripted(pool, weights, rng)};
  }

  spec.board_seed = rng.next_u64();
  return spec;
}

}  // namespace combat::sched
