#pragma once
#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "combat/env/types.hpp"

namespace combat::env {

// Episode replay log: a header line with everything needed to rebuild the
// board, one line per step (index, four moves, state digest after the step),
// and a trailer.  Grammar in docs/replay-format.md.
struct ReplayHeader {
  uint64_t seed = 0;
  GameConfig config;
};

struct ReplayStep {
  int step = 0;
  std::array<Move, kNumAgents> actions{};
  uint64_t hash_after = 0;
};

struct ReplayLog {
  ReplayHeader header;
  std::vector<ReplayStep> steps;
  std::string result;  // a_wins | b_wins | draw | <FFA seat> | ongoing
};

std::string format_header(const ReplayHeader& h);
std::string format_step(const ReplayStep& s);
std::string format_trailer(const ReplayLog& log);

// Parses a full log; throws std::runtime_error with a line number on grammar
// violations.
ReplayLog parse_replay(std::istream& in);

// Re-simulates the logged episode and checks every per-step digest.  Returns
// the first mismatching step index, or -1 when the whole log verifies.
int verify_replay(const ReplayLog& log);

}  // namespace combat::env
