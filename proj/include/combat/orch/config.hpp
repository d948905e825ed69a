#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "combat/env/types.hpp"
#include "combat/nn/a2c.hpp"
#include "combat/orch/stage.hpp"
#include "combat/pop/population.hpp"

namespace combat::orch {

// Everything a training run needs, with defaults matching the reference
// setup (8 learners + 1 scripted anchor on the full 11x11 board).
struct RunConfig {
  // Run shape
  int trainable_count = 8;
  int scripted_count = 1;
  long total_pickups = 1000;  // T: scheduler pickups in this run
  std::uint64_t seed = 1;
  int workers = 1;
  long checkpoint_interval = 100;  // pickups between checkpoints
  int start_stage = 1;
  bool auto_advance = true;  // advance the stage once every learner converged
  std::string run_name = "run";
  std::string data_dir;  // empty: $COMBAT_DATA_DIR, else ./combat-data

  // Match-making
  double k_factor = 32.0;
  double p_anchor = 0.5;

  // Environment
  env::GameConfig env;

  // Network and optimizer
  int hidden = 256;
  nn::Hyperparams hp;

  // Entropy bonus schedule: per-agent linear ramp over its first
  // `entropy_anneal_updates` gradient updates.
  double entropy_start = 0.01;
  double entropy_end = 0.05;
  long entropy_anneal_updates = 10000;

  // Population management
  pop::PopulationConfig pop;
  double alpha = 0.1;        // discount annealing rate for new agents
  double gamma_init = 0.5;   // initial discount for new agents

  // Curriculum (per-stage overrides may be applied by the config file)
  std::array<StageConfig, 4> stages = default_stages();
};

// Parse `key = value` lines (# comments, blank lines allowed). Unknown keys
// and malformed values raise std::invalid_argument naming the offender.
RunConfig parse_run_config_text(const std::string& text);
RunConfig load_run_config(const std::string& path);

// Resolved output directory: config value, else $COMBAT_DATA_DIR, else
// ./combat-data.
std::string resolve_data_dir(const RunConfig& config);

}  // namespace combat::orch
