#include "combat/pop/population.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace combat::pop {

AgentSpec* Population::find(const std::string& id) {
  for (AgentSpec& a : agents)
    if (a.id == id) return &a;
  return nullptr;
}

const AgentSpec* Population::find(const std::string& id) const {
  for (const AgentSpec& a : agents)
    if (a.id == id) return &a;
  return nullptr;
}

int Population::trainable_count() const {
  int n = 0;
  for (const AgentSpec& a : agents) n += a.trainable() ? 1 : 0;
  return n;
}

double anneal_gamma(double gamma, double alpha) {
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("anneal_gamma: gamma must lie in [0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("anneal_gamma: alpha must lie in (0, 1)");
  return gamma + (1.0 - gamma) * alpha;
}

bool is_converged(const std::deque<double>& reward_history, int window,
                  double epsilon, double sigma_max) {
  if (window <= 0) throw std::invalid_argument("is_converged: window must be positive");
  const std::size_t w = static_cast<std::size_t>(window);
  if (reward_history.size() < 2 * w) return false;

  const std::size_t last_begin = reward_history.size() - w;
  const std::size_t prev_begin = reward_history.size() - 2 * w;
  double mean_last = 0.0, mean_prev = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    mean_last += reward_history[last_begin + i];
    mean_prev += reward_history[prev_begin + i];
  }
  mean_last /= static_cast<double>(w);
  mean_prev /= static_cast<double>(w);

  double var = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    const double d = reward_history[last_begin + i] - mean_last;
    var += d * d;
  }
  var /= static_cast<double>(w);

  return std::abs(mean_last - mean_prev) < epsilon && std::sqrt(var) < sigma_max;
}

bool is_converged(const AgentSpec& agent, const PopulationConfig& config) {
  return is_converged(agent.reward_history, config.window, config.epsilon,
                      config.sigma_max);
}

void push_return(AgentSpec& agent, double episode_return, int window) {
  if (window <= 0) throw std::invalid_argument("push_return: window must be positive");
  agent.reward_history.push_back(episode_return);
  const std::size_t cap = 2 * static_cast<std::size_t>(window);
  while (agent.reward_history.size() > cap) agent.reward_history.pop_front();
}

void update_min_streaks(Population& population, const rating::RankingList& ranking) {
  AgentSpec* lowest = nullptr;
  bool tie = false;
  double low = 0.0;
  for (AgentSpec& a : population.agents) {
    if (!a.trainable()) continue;
    const rating::AgentStats* s = ranking.find(a.id);
    if (s == nullptr) {
      a.min_streak = 0;
      continue;
    }
    if (lowest == nullptr || s->rating < low) {
      lowest = &a;
      low = s->rating;
      tie = false;
    } else if (s->rating == low) {
      tie = true;
    }
  }
  for (AgentSpec& a : population.agents) {
    if (!a.trainable()) continue;
    if (!tie && &a == lowest)
      ++a.min_streak;
    else
      a.min_streak = 0;
  }
}

namespace {

double median_trainable_rating(const rating::RankingList& ranking,
                               const Population& population) {
  std::vector<double> ratings;
  for (const AgentSpec& a : population.agents) {
    if (!a.trainable()) continue;
    if (const rating::AgentStats* s = ranking.find(a.id)) ratings.push_back(s->rating);
  }
  if (ratings.empty()) return 0.0;
  std::sort(ratings.begin(), ratings.end());
  const std::size_t n = ratings.size();
  return n % 2 ? ratings[n / 2] : (ratings[n / 2 - 1] + ratings[n / 2]) / 2.0;
}

}  // namespace

bool removable(const AgentSpec& agent, const rating::RankingList& ranking,
               const Population& population, const PopulationConfig& config) {
  if (!agent.trainable()) return false;
  const rating::AgentStats* s = ranking.find(agent.id);
  if (s == nullptr) return false;
  if (s->games_played() < config.min_games) return false;
  if (agent.min_streak < config.dwell) return false;
  return median_trainable_rating(ranking, population) - s->rating > config.margin;
}

Population apply_population_step(
    const Population& population, const rating::RankingList& ranking,
    const std::map<std::string, std::shared_ptr<nn::NetworkParams>>& installs,
    const PopulationConfig& config, Rng& rng, PopulationStepResult* result) {
  Population out = population;
  PopulationStepResult res;

  for (const auto& [id, params] : installs) {
    AgentSpec* a = out.find(id);
    if (a == nullptr)
      throw std::invalid_argument("population step: install for unknown agent: " + id);
    if (!a->trainable())
      throw std::invalid_argument("population step: install for scripted agent: " + id);
    if (params == nullptr)
      throw std::invalid_argument("population step: null params for agent: " + id);
    a->params = params;
  }

  std::vector<std::string> to_remove;
  int survivors = out.trainable_count();
  for (AgentSpec& a : out.agents) {
    if (!a.trainable()) continue;
    if (is_converged(a, config)) {
      a.gamma = anneal_gamma(a.gamma, a.alpha);
      a.reward_history.clear();
      a.converged_at_stage = true;
      ++a.anneal_count;
      res.annealed.push_back(a.id);
    } else if (removable(a, ranking, population, config)) {
      if (survivors - 1 < 2) {
        res.refused.push_back(a.id);
      } else {
        to_remove.push_back(a.id);
        --survivors;
      }
    }
  }

  for (const std::string& id : to_remove) {
    auto it = std::find_if(out.agents.begin(), out.agents.end(),
                           [&](const AgentSpec& a) { return a.id == id; });
    res.removed.push_back(id);
    out.agents.erase(it);
  }

  if (!to_remove.empty()) {
    // Rank the surviving trainables best-first for clone parenthood.
    std::vector<std::string> parents_ranked;
    for (const auto& [id, stats] : ranking.sorted()) {
      const AgentSpec* a = out.find(id);
      if (a != nullptr && a->trainable()) parents_ranked.push_back(id);
    }
    if (parents_ranked.empty())
      throw std::logic_error("population step: no clone parent available");

    std::set<std::string> ids;
    for (const AgentSpec& a : out.agents) ids.insert(a.id);

    const std::size_t k =
        std::min<std::size_t>(static_cast<std::size_t>(config.top_k),
                              parents_ranked.size());
    for (std::size_t spawn = 0; spawn < to_remove.size(); ++spawn) {
      const AgentSpec& parent = *out.find(
          parents_ranked[k == 1 ? 0 : static_cast<std::size_t>(rng.bounded(k))]);
      std::string id;
      do {
        id = config.spawn_prefix + std::to_string(out.next_spawn_serial++);
      } while (ids.count(id));
      ids.insert(id);

      AgentSpec child;
      child.id = id;
      child.kind = AgentKind::Trainable;
      child.params = std::make_shared<nn::NetworkParams>(*parent.params);
      child.gamma = config.gamma_init;
      child.alpha = parent.alpha;
      child.reward = parent.reward;
      child.stage = parent.stage;
      res.spawned.emplace_back(child.id, parent.id);
      out.agents.push_back(std::move(child));
    }
  }

  if (result != nullptr) *result = res;
  return out;
}

}  // namespace combat::pop
