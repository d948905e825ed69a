#pragma once

#include <array>
#include <stdexcept>

namespace combat::orch {

// Curriculum stage: who partners the learners, whether bomb-kicking is
// allowed, and how episode rewards are shaped on top of the terminal result.
struct StageConfig {
  enum class Teammate { Scripted, Trainable };

  int id = 1;
  Teammate teammate = Teammate::Scripted;
  bool kick_enabled = false;
  double w_pickup = 0.0;  // reward per power-up consumed
};

// The four-stage ladder: scripted teammates first, power-up shaping from
// stage 2, trainable teammates from stage 3, kicking only in stage 4.
inline std::array<StageConfig, 4> default_stages() {
  return {{
      {1, StageConfig::Teammate::Scripted, false, 0.0},
      {2, StageConfig::Teammate::Scripted, false, 0.1},
      {3, StageConfig::Teammate::Trainable, false, 0.1},
      {4, StageConfig::Teammate::Trainable, true, 0.1},
  }};
}

inline const StageConfig& stage_config(const std::array<StageConfig, 4>& stages, int id) {
  if (id < 1 || id > 4) throw std::invalid_argument("unknown stage id");
  return stages[static_cast<std::size_t>(id - 1)];
}

}  // namespace combat::orch
