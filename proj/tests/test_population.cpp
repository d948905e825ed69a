#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "combat/pop/population.hpp"
#include "combat/rng.hpp"

using namespace combat::pop;
using combat::Rng;
using combat::rating::RankingList;

namespace {

AgentSpec trainable_agent(const std::string& id, double gamma = 0.5) {
  AgentSpec a;
  a.id = id;
  a.kind = AgentKind::Trainable;
  a.params = std::make_shared<combat::nn::NetworkParams>();
  a.gamma = gamma;
  return a;
}

AgentSpec scripted_agent(const std::string& id) {
  AgentSpec a;
  a.id = id;
  a.kind = AgentKind::Scripted;
  a.scripted_name = "scripted:simple";
  return a;
}

// Population of n trainables plus one scripted agent, ranked by the given
// ratings (scripted pinned at 1200, 500 games each).
struct Setup {
  Population pop;
  RankingList ranking;
};

Setup make_setup(const std::vector<double>& ratings) {
  Setup s;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    const std::string id = "t" + std::to_string(i);
    s.pop.agents.push_back(trainable_agent(id));
    auto& st = s.ranking.ensure(id);
    st.rating = ratings[i];
    st.wins = 250;
    st.losses = 250;
  }
  s.pop.agents.push_back(scripted_agent("sim"));
  s.ranking.ensure("sim").rating = 1200.0;
  s.ranking.ensure("sim").wins = 500;
  return s;
}

std::deque<double> constant_history(int n, double v) {
  return std::deque<double>(static_cast<std::size_t>(n), v);
}

}  // namespace

TEST_CASE("annealing closes a fixed fraction of the gap to one") {
  CHECK(anneal_gamma(0.5, 0.5) == 0.75);
  CHECK(anneal_gamma(0.9, 0.1) == doctest::Approx(0.91).epsilon(1e-12));

  Rng rng(0xa11ea1);
  for (int i = 0; i < 1000; ++i) {
    const double g = rng.uniform();          // [0, 1)
    const double a = rng.uniform(1e-6, 1.0); // (0, 1)
    const double next = anneal_gamma(g, a);
    CHECK(next > g);
    CHECK(next < 1.0);
  }

  CHECK_THROWS_AS(anneal_gamma(1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(anneal_gamma(-0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(anneal_gamma(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(anneal_gamma(0.5, 1.0), std::invalid_argument);
}

TEST_CASE("iterated annealing matches its closed form") {
  // t applications from gamma0 give 1 - (1-gamma0)(1-alpha)^t.
  for (auto [g0, a] : std::vector<std::pair<double, double>>{
           {0.5, 0.5}, {0.9, 0.1}, {0.0, 0.3}, {0.75, 0.05}}) {
    double g = g0;
    for (int t = 1; t <= 20; ++t) {
      g = anneal_gamma(g, a);
      const double closed = 1.0 - (1.0 - g0) * std::pow(1.0 - a, t);
      CHECK(std::abs(g - closed) < 1e-12);
    }
  }
}

TEST_CASE("convergence requires two full stable windows") {
  const int W = 200;
  CHECK(is_converged(constant_history(2 * W, 1.0), W, 0.02, 0.5));
  CHECK_FALSE(is_converged(constant_history(2 * W - 1, 1.0), W, 0.02, 0.5));
  CHECK_FALSE(is_converged({}, W, 0.02, 0.5));

  // Arithmetic climb: window means differ by W*step, well over epsilon.
  std::deque<double> climb;
  const double step = 0.02 / W * 4.0;
  for (int i = 0; i < 2 * W; ++i) climb.push_back(i * step);
  CHECK_FALSE(is_converged(climb, W, 0.02, 0.5));

  // Stable mean but noisy: alternating +-1 has stddev 1 > sigma_max.
  std::deque<double> noisy;
  for (int i = 0; i < 2 * W; ++i) noisy.push_back(i % 2 ? 1.0 : -1.0);
  CHECK_FALSE(is_converged(noisy, W, 0.02, 0.5));
  CHECK(is_converged(noisy, W, 0.02, 1.5));  // generous sigma_max admits it

  // Small-window arithmetic: means {1,2,3} vs {4,5,6} differ by 3.
  CHECK_FALSE(is_converged({1, 2, 3, 4, 5, 6}, 3, 2.9, 10.0));
  CHECK(is_converged({1, 2, 3, 4, 5, 6}, 3, 3.1, 10.0));
  CHECK_THROWS_AS(is_converged({}, 0, 0.1, 0.5), std::invalid_argument);
}

TEST_CASE("the return buffer is capped at twice the window") {
  AgentSpec a = trainable_agent("t0");
  for (int i = 0; i < 950; ++i) push_return(a, i, 200);
  CHECK(a.reward_history.size() == 400);
  CHECK(a.reward_history.front() == 550.0);
  CHECK(a.reward_history.back() == 949.0);
}

TEST_CASE("the strict minimum accrues a streak and ties break it") {
  Setup s = make_setup({1300, 1200, 1100});
  for (int i = 0; i < 3; ++i) update_min_streaks(s.pop, s.ranking);
  CHECK(s.pop.find("t2")->min_streak == 3);
  CHECK(s.pop.find("t0")->min_streak == 0);

  // A tie for the minimum resets everyone.
  s.ranking.ensure("t1").rating = 1100.0;
  update_min_streaks(s.pop, s.ranking);
  CHECK(s.pop.find("t2")->min_streak == 0);
  CHECK(s.pop.find("t1")->min_streak == 0);

  // The minimum moving elsewhere restarts the count there.
  s.ranking.ensure("t0").rating = 1000.0;
  update_min_streaks(s.pop, s.ranking);
  CHECK(s.pop.find("t0")->min_streak == 1);
  CHECK(s.pop.find("t2")->min_streak == 0);

  // Scripted agents never accrue a streak even at the bottom.
  s.ranking.ensure("sim").rating = 1.0;
  update_min_streaks(s.pop, s.ranking);
  CHECK(s.pop.find("sim")->min_streak == 0);
  CHECK(s.pop.find("t0")->min_streak == 2);
}

TEST_CASE("removal needs kind, games, dwell and margin together") {
  PopulationConfig cfg;  // min_games 100, dwell 50, margin 150
  // Median of {1400,1350,1300,1250,1200,1150,1100,900} is 1225; t7 trails by 325.
  Setup s = make_setup({1400, 1350, 1300, 1250, 1200, 1150, 1100, 900});
  AgentSpec* loser = s.pop.find("t7");
  loser->min_streak = 50;
  CHECK(removable(*loser, s.ranking, s.pop, cfg));

  SUBCASE("a scripted agent at the minimum is immune") {
    AgentSpec* sim = s.pop.find("sim");
    s.ranking.ensure("sim").rating = 100.0;
    sim->min_streak = 1000;
    CHECK_FALSE(removable(*sim, s.ranking, s.pop, cfg));
  }
  SUBCASE("too few games") {
    s.ranking.ensure("t7").wins = 5;
    s.ranking.ensure("t7").losses = 5;
    CHECK_FALSE(removable(*loser, s.ranking, s.pop, cfg));
  }
  SUBCASE("streak one short of dwell") {
    loser->min_streak = 49;
    CHECK_FALSE(removable(*loser, s.ranking, s.pop, cfg));
  }
  SUBCASE("margin is strict") {
    s.ranking.ensure("t7").rating = 1225.0 - 150.0;  // trails by exactly margin
    CHECK_FALSE(removable(*loser, s.ranking, s.pop, cfg));
    s.ranking.ensure("t7").rating = 1225.0 - 150.001;
    CHECK(removable(*loser, s.ranking, s.pop, cfg));
  }
}

TEST_CASE("a quiet step only installs parameters") {
  Setup s = make_setup({1300, 1250, 1200, 1150});
  auto fresh = std::make_shared<combat::nn::NetworkParams>();
  fresh->hidden = 31;  // recognizable marker
  Rng rng(7);
  PopulationStepResult res;
  Population next = apply_population_step(s.pop, s.ranking, {{"t1", fresh}},
                                          PopulationConfig{}, rng, &res);
  CHECK(next.agents.size() == s.pop.agents.size());
  CHECK(next.find("t1")->params->hidden == 31);
  CHECK(s.pop.find("t1")->params->hidden == 256);  // input snapshot untouched
  CHECK(res.annealed.empty());
  CHECK(res.removed.empty());
  CHECK(res.spawned.empty());

  CHECK_THROWS_AS(apply_population_step(s.pop, s.ranking, {{"ghost", fresh}},
                                        PopulationConfig{}, rng, nullptr),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_population_step(s.pop, s.ranking, {{"sim", fresh}},
                                        PopulationConfig{}, rng, nullptr),
                  std::invalid_argument);
}

TEST_CASE("a converged agent anneals and starts a fresh history") {
  Setup s = make_setup({1300, 1250, 1200, 1150});
  PopulationConfig cfg;
  AgentSpec* t0 = s.pop.find("t0");
  t0->gamma = 0.5;
  t0->alpha = 0.5;
  t0->reward_history = constant_history(2 * cfg.window, 0.8);
  Rng rng(7);
  PopulationStepResult res;
  Population next = apply_population_step(s.pop, s.ranking, {}, cfg, rng, &res);
  CHECK(next.find("t0")->gamma == 0.75);
  CHECK(next.find("t0")->reward_history.empty());
  CHECK(next.find("t0")->converged_at_stage);
  CHECK(next.find("t0")->anneal_count == 1);
  CHECK(res.annealed == std::vector<std::string>{"t0"});
  CHECK(s.pop.find("t0")->gamma == 0.5);  // snapshot untouched
}

TEST_CASE("convergence shields an otherwise removable agent") {
  PopulationConfig cfg;
  Setup s = make_setup({1400, 1350, 1300, 1250, 1200, 1150, 1100, 900});
  AgentSpec* loser = s.pop.find("t7");
  loser->min_streak = 50;
  loser->reward_history = constant_history(2 * cfg.window, -0.9);
  Rng rng(7);
  PopulationStepResult res;
  Population next = apply_population_step(s.pop, s.ranking, {}, cfg, rng, &res);
  CHECK(next.find("t7") != nullptr);  // still present
  CHECK(next.find("t7")->gamma > 0.5);
  CHECK(res.annealed == std::vector<std::string>{"t7"});
  CHECK(res.removed.empty());
}

TEST_CASE("a removal spawns a bit-equal clone of a top survivor") {
  PopulationConfig cfg;
  Setup s = make_setup({1400, 1350, 1300, 1250, 1200, 1150, 1100, 900});
  // Give the top agents distinctive parameters.
  Rng init_rng(0x9a9a);
  for (int i = 0; i < 2; ++i) {
    auto p = std::make_shared<combat::nn::NetworkParams>(
        combat::nn::NetworkParams::init(5, 16, init_rng));
    s.pop.find("t" + std::to_string(i))->params = p;
  }
  AgentSpec* loser = s.pop.find("t7");
  loser->min_streak = 50;

  Rng rng(0x5feed);
  PopulationStepResult res;
  Population next = apply_population_step(s.pop, s.ranking, {}, cfg, rng, &res);

  CHECK(next.agents.size() == s.pop.agents.size());  // 8 trainable + 1 scripted
  CHECK(next.find("t7") == nullptr);
  CHECK(next.find("sim") != nullptr);
  CHECK(res.removed == std::vector<std::string>{"t7"});
  REQUIRE(res.spawned.size() == 1);
  const auto& [child_id, parent_id] = res.spawned[0];
  CHECK(next.find(child_id) != nullptr);
  CHECK((parent_id == "t0" || parent_id == "t1"));  // top-2 by rating

  const AgentSpec* child = next.find(child_id);
  const AgentSpec* parent = next.find(parent_id);
  CHECK(child->gamma == cfg.gamma_init);
  CHECK(child->reward_history.empty());
  CHECK(child->min_streak == 0);
  CHECK(child->params.get() != parent->params.get());  // deep copy, not shared
  auto child_t = child->params->named();
  auto parent_t = parent->params->named();
  REQUIRE(child_t.size() == parent_t.size());
  for (std::size_t i = 0; i < child_t.size(); ++i) {
    CHECK(child_t[i].second->dims == parent_t[i].second->dims);
    CHECK(child_t[i].second->data == parent_t[i].second->data);  // bit-equal
  }

  // Both top-2 parents get picked across seeds.
  std::set<std::string> parents;
  for (int seed = 0; seed < 40; ++seed) {
    Rng r(seed);
    PopulationStepResult rr;
    apply_population_step(s.pop, s.ranking, {}, cfg, r, &rr);
    parents.insert(rr.spawned[0].second);
  }
  CHECK(parents == std::set<std::string>{"t0", "t1"});
}

TEST_CASE("the two-trainable floor refuses removals") {
  PopulationConfig cfg;
  cfg.margin = 10.0;
  Setup s = make_setup({1300, 900});
  AgentSpec* loser = s.pop.find("t1");
  loser->min_streak = 50;
  CHECK(removable(*loser, s.ranking, s.pop, cfg));  // predicate itself fires
  Rng rng(7);
  PopulationStepResult res;
  Population next = apply_population_step(s.pop, s.ranking, {}, cfg, rng, &res);
  CHECK(next.find("t1") != nullptr);
  CHECK(next.trainable_count() == 2);
  CHECK(res.removed.empty());
  CHECK(res.refused == std::vector<std::string>{"t1"});
}

TEST_CASE("population steps are deterministic given the rng state") {
  PopulationConfig cfg;
  Setup s = make_setup({1400, 1350, 1300, 1250, 1200, 1150, 1100, 900});
  s.pop.find("t7")->min_streak = 50;
  auto run = [&](uint64_t seed) {
    Rng r(seed);
    PopulationStepResult rr;
    apply_population_step(s.pop, s.ranking, {}, cfg, r, &rr);
    return rr;
  };
  for (uint64_t seed : {1ull, 99ull, 0xfeedull}) {
    PopulationStepResult a = run(seed);
    PopulationStepResult b = run(seed);
    CHECK(a.spawned == b.spawned);
    CHECK(a.removed == b.removed);
  }
}
