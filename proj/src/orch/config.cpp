#include "combat/orch/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace combat::orch {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::invalid_argument("bad value for config key '" + key + "': '" + value + "'");
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) bad_value(key, value);
    return v;
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  } catch (const std::out_of_range&) {
    bad_value(key, value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  const long v = parse_long(key, value);
  if (v < static_cast<long>(INT32_MIN) || v > static_cast<long>(INT32_MAX))
    bad_value(key, value);
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) bad_value(key, value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  } catch (const std::out_of_range&) {
    bad_value(key, value);
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) bad_value(key, value);
    return v;
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  } catch (const std::out_of_range&) {
    bad_value(key, value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value);
}

StageConfig::Teammate parse_teammate(const std::string& key, const std::string& value) {
  if (value == "scripted") return StageConfig::Teammate::Scripted;
  if (value == "trainable") return StageConfig::Teammate::Trainable;
  bad_value(key, value);
}

// Applies one key=value pair; returns false when the key is unknown.
bool apply(RunConfig& c, const std::string& key, const std::string& value) {
  // Run shape
  if (key == "population.trainable") { c.trainable_count = parse_int(key, value); return true; }
  if (key == "population.scripted") { c.scripted_count = parse_int(key, value); return true; }
  if (key == "total_pickups") { c.total_pickups = parse_long(key, value); return true; }
  if (key == "seed") { c.seed = parse_u64(key, value); return true; }
  if (key == "workers") { c.workers = parse_int(key, value); return true; }
  if (key == "checkpoint_interval") { c.checkpoint_interval = parse_long(key, value); return true; }
  if (key == "start_stage") { c.start_stage = parse_int(key, value); return true; }
  if (key == "auto_advance") { c.auto_advance = parse_bool(key, value); return true; }
  if (key == "run_name") { c.run_name = value; return true; }
  if (key == "data_dir") { c.data_dir = value; return true; }
  // Match-making
  if (key == "k_factor") { c.k_factor = parse_double(key, value); return true; }
  if (key == "p_anchor") { c.p_anchor = parse_double(key, value); return true; }
  // Environment
  if (key == "env.board_size") { c.env.board_size = parse_int(key, value); return true; }
  if (key == "env.mode") {
    if (value == "team") { c.env.mode = env::Mode::Team; return true; }
    if (value == "ffa") { c.env.mode = env::Mode::FFA; return true; }
    bad_value(key, value);
  }
  if (key == "env.rigid_count") { c.env.rigid_count = parse_int(key, value); return true; }
  if (key == "env.wood_count") { c.env.wood_count = parse_int(key, value); return true; }
  if (key == "env.item_count") { c.env.item_count = parse_int(key, value); return true; }
  if (key == "env.wood_passage_probability") {
    c.env.wood_passage_probability = parse_double(key, value);
    return true;
  }
  if (key == "env.view_radius") { c.env.view_radius = parse_int(key, value); return true; }
  if (key == "env.full_observability") {
    c.env.full_observability = parse_bool(key, value);
    return true;
  }
  if (key == "env.max_steps") { c.env.max_steps = parse_int(key, value); return true; }
  if (key == "env.bomb_life") { c.env.bomb_life = parse_int(key, value); return true; }
  if (key == "env.flame_life") { c.env.flame_life = parse_int(key, value); return true; }
  if (key == "env.initial_ammo") { c.env.initial_ammo = parse_int(key, value); return true; }
  if (key == "env.initial_blast") { c.env.initial_blast = parse_int(key, value); return true; }
  if (key == "env.draw_reward") { c.env.draw_reward = parse_double(key, value); return true; }
  // Network and optimizer
  if (key == "net.hidden") { c.hidden = parse_int(key, value); return true; }
  if (key == "hp.lr") { c.hp.lr = parse_double(key, value); return true; }
  if (key == "hp.value_coeff") { c.hp.value_coeff = parse_double(key, value); return true; }
  if (key == "hp.entropy_coeff") { c.hp.entropy_coeff = parse_double(key, value); return true; }
  if (key == "hp.minibatch_horizon") { c.hp.minibatch_horizon = parse_int(key, value); return true; }
  if (key == "hp.adam_beta1") { c.hp.adam_beta1 = parse_double(key, value); return true; }
  if (key == "hp.adam_beta2") { c.hp.adam_beta2 = parse_double(key, value); return true; }
  if (key == "hp.adam_eps") { c.hp.adam_eps = parse_double(key, value); return true; }
  // Entropy schedule
  if (key == "entropy.start") { c.entropy_start = parse_double(key, value); return true; }
  if (key == "entropy.end") { c.entropy_end = parse_double(key, value); return true; }
  if (key == "entropy.updates") { c.entropy_anneal_updates = parse_long(key, value); return true; }
  // Population management
  if (key == "pop.window") { c.pop.window = parse_int(key, value); return true; }
  if (key == "pop.epsilon") { c.pop.epsilon = parse_double(key, value); return true; }
  if (key == "pop.sigma_max") { c.pop.sigma_max = parse_double(key, value); return true; }
  if (key == "pop.min_games") { c.pop.min_games = parse_int(key, value); return true; }
  if (key == "pop.dwell") { c.pop.dwell = parse_int(key, value); return true; }
  if (key == "pop.margin") { c.pop.margin = parse_double(key, value); return true; }
  if (key == "pop.top_k") { c.pop.top_k = parse_int(key, value); return true; }
  if (key == "pop.spawn_prefix") { c.pop.spawn_prefix = value; return true; }
  if (key == "gamma_init") {
    c.gamma_init = parse_double(key, value);
    c.pop.gamma_init = c.gamma_init;
    return true;
  }
  if (key == "alpha") { c.alpha = parse_double(key, value); return true; }
  // Curriculum overrides
  for (int s = 1; s <= 4; ++s) {
    const std::string prefix = "stage" + std::to_string(s) + ".";
    if (key == prefix + "w_pickup") {
      c.stages[static_cast<std::size_t>(s - 1)].w_pickup = parse_double(key, value);
      return true;
    }
    if (key == prefix + "kick") {
      c.stages[static_cast<std::size_t>(s - 1)].kick_enabled = parse_bool(key, value);
      return true;
    }
    if (key == prefix + "teammate") {
      c.stages[static_cast<std::size_t>(s - 1)].teammate = parse_teammate(key, value);
      return true;
    }
  }
  return false;
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("invalid config: " + what);
  };
  if (c.trainable_count < 2) fail("population.trainable must be at least 2");
  if (c.scripted_count < 0) fail("population.scripted must be non-negative");
  if (c.total_pickups < 1) fail("total_pickups must be positive");
  if (c.workers < 1) fail("workers must be positive");
  if (c.checkpoint_interval < 1) fail("checkpoint_interval must be positive");
  if (c.start_stage < 1 || c.start_stage > 4) fail("start_stage must be in 1..4");
  if (!(c.k_factor > 0.0)) fail("k_factor must be positive");
  if (!(c.p_anchor >= 0.0 && c.p_anchor <= 1.0)) fail("p_anchor must be in [0, 1]");
  if (c.env.board_size < 5 || c.env.board_size % 2 == 0)
    fail("env.board_size must be odd and at least 5");
  if (c.env.max_steps < 1) fail("env.max_steps must be positive");
  if (c.hidden < 1) fail("net.hidden must be positive");
  if (!(c.hp.lr > 0.0)) fail("hp.lr must be positive");
  if (c.hp.minibatch_horizon < 1) fail("hp.minibatch_horizon must be positive");
  if (!(c.gamma_init >= 0.0 && c.gamma_init < 1.0)) fail("gamma_init must be in [0, 1)");
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) fail("alpha must be in (0, 1]");
  if (c.entropy_anneal_updates < 1) fail("entropy.updates must be positive");
  if ((c.start_stage <= 2 ||
       c.stages[static_cast<std::size_t>(c.start_stage - 1)].teammate ==
           StageConfig::Teammate::Scripted) &&
      c.scripted_count < 1)
    fail("scripted-teammate stages need at least one scripted agent");
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    if (!apply(config, key, value))
      throw std::invalid_argument("unknown config key '" + key + "' (line " +
                                  std::to_string(line_no) + ")");
  }
  validate(config);
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config_text(buf.str());
}

std::string resolve_data_dir(const RunConfig& config) {
  if (!config.data_dir.empty()) return config.data_dir;
  if (const char* env_dir = std::getenv("COMBAT_DATA_DIR"); env_dir && *env_dir)
    return env_dir;
  return "combat-data";
}

}  // namespace combat::orch
