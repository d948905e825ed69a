#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "combat/nn/adam.hpp"
#include "combat/pop/population.hpp"
#include "combat/rating/elo.hpp"

namespace combat::orch {

// Typed failures so callers (and tests) can tell corrupt inputs apart.
struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadMagicError : CheckpointError {
  using CheckpointError::CheckpointError;
};
struct BadVersionError : CheckpointError {
  using CheckpointError::CheckpointError;
};
struct TruncatedError : CheckpointError {
  using CheckpointError::CheckpointError;
};
struct ShapeError : CheckpointError {
  using CheckpointError::CheckpointError;
};

// Everything a run needs to continue exactly where it stopped, minus the
// match log (which lives beside the checkpoint as JSONL).
struct TrainState {
  int stage = 1;
  long pickup = 0;         // pickups completed
  long updates_total = 0;  // gradient updates across all agents
  std::uint64_t sched_rng_state = 0;
  std::uint64_t pop_rng_state = 0;
  pop::Population population;
  rating::RankingList ranking;
  std::map<std::string, nn::AdamState> adam;  // per trainable agent id
  std::map<std::string, long> update_counts;  // per-agent gradient updates
};

// Binary image: "CMBT" magic, u16 format version, u8 feature-layout version,
// run counters, rng states, then each agent (id, kind, gamma, alpha, shaping,
// history, and for learners the parameter/moment tensors as named row-major
// float32 little-endian payloads), then the ranking table.  Fixed field
// order and sorted containers make encode(decode(x)) byte-identical.
std::vector<std::uint8_t> encode_checkpoint(const TrainState& state);
TrainState decode_checkpoint(const std::vector<std::uint8_t>& bytes);

// File forms.  Saving writes to a temporary sibling and renames, so a crash
// mid-write never leaves a half-written checkpoint under the final name.
void save_checkpoint(const std::string& path, const TrainState& state);
TrainState load_checkpoint(const std::string& path);

}  // namespace combat::orch
