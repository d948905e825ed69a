#include "combat/env/replay.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "combat/env/board_gen.hpp"
#include "combat/env/engine.hpp"

namespace combat::env {
namespace {

std::string hex16(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

uint64_t parse_hex(const std::string& s) {
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::runtime_error("bad hex value: " + s);
  return v;
}

std::map<std::string, std::string> parse_kv(const std::string& line, std::size_t from) {
  std::map<std::string, std::string> kv;
  std::istringstream ss(line.substr(from));
  std::string tok;
  while (ss >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::runtime_error("expected key=value: " + tok);
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

long long req_int(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw std::runtime_error("missing field: " + key);
  return std::stoll(it->second);
}

}  // namespace

std::string format_header(const ReplayHeader& h) {
  const GameConfig& c = h.config;
  std::ostringstream ss;
  ss << "replay v1 seed=" << h.seed << " board_size=" << c.board_size
     << " mode=" << (c.mode == Mode::Team ? "team" : "ffa")
     << " rigid=" << c.rigid_count << " wood=" << c.wood_count
     << " items=" << c.resolved_item_count() << " view_radius=" << c.view_radius
     << " max_steps=" << c.max_steps << " bomb_life=" << c.bomb_life
     << " flame_life=" << c.flame_life << " ammo=" << c.initial_ammo
     << " blast=" << c.initial_blast;
  return ss.str();
}

std::string format_step(const ReplayStep& s) {
  std::ostringstream ss;
  ss << "step=" << s.step << " actions=";
  for (int i = 0; i < kNumAgents; ++i)
    ss << (i ? "," : "") << static_cast<int>(s.actions[i]);
  ss << " hash=" << hex16(s.hash_after);
  return ss.str();
}

std::string format_trailer(const ReplayLog& log) {
  std::ostringstream ss;
  ss << "end steps=" << log.steps.size() << " result=" << log.result;
  return ss.str();
}

ReplayLog parse_replay(std::istream& in) {
  ReplayLog log;
  std::string line;
  int lineno = 0;
  bool have_header = false, have_trailer = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw std::runtime_error("replay line " + std::to_string(lineno) + ": " + why);
    };
    if (!have_header) {
      if (line.rfind("replay v1 ", 0) != 0) fail("expected 'replay v1' header");
      auto kv = parse_kv(line, 10);
      log.header.seed = static_cast<uint64_t>(req_int(kv, "seed"));
      GameConfig& c = log.header.config;
      c.board_size = static_cast<int>(req_int(kv, "board_size"));
      auto mode = kv.find("mode");
      if (mode == kv.end()) fail("missing field: mode");
      if (mode->second == "team") c.mode = Mode::Team;
      else if (mode->second == "ffa") c.mode = Mode::FFA;
      else fail("bad mode: " + mode->second);
      c.rigid_count = static_cast<int>(req_int(kv, "rigid"));
      c.wood_count = static_cast<int>(req_int(kv, "wood"));
      c.item_count = static_cast<int>(req_int(kv, "items"));
      c.view_radius = static_cast<int>(req_int(kv, "view_radius"));
      c.max_steps = static_cast<int>(req_int(kv, "max_steps"));
      c.bomb_life = static_cast<int>(req_int(kv, "bomb_life"));
      c.flame_life = static_cast<int>(req_int(kv, "flame_life"));
      c.initial_ammo = static_cast<int>(req_int(kv, "ammo"));
      c.initial_blast = static_cast<int>(req_int(kv, "blast"));
      have_header = true;
      continue;
    }
    if (line.rfind("step=", 0) == 0) {
      if (have_trailer) fail("step record after trailer");
      auto kv = parse_kv(line, 0);
      ReplayStep s;
      s.step = static_cast<int>(req_int(kv, "step"));
      auto actions = kv.find("actions");
      if (actions == kv.end()) fail("missing field: actions");
      std::istringstream as(actions->second);
      std::string tok;
      int i = 0;
      while (std::getline(as, tok, ',')) {
        if (i >= kNumAgents) fail("too many actions");
        int v = std::stoi(tok);
        if (v < 0 || v > 5) fail("action out of range: " + tok);
        s.actions[i++] = static_cast<Move>(v);
      }
      if (i != kNumAgents) fail("expected 4 actions");
      auto hash = kv.find("hash");
      if (hash == kv.end()) fail("missing field: hash");
      s.hash_after = parse_hex(hash->second);
      if (s.step != static_cast<int>(log.steps.size())) fail("step index out of order");
      log.steps.push_back(s);
      continue;
    }
    if (line.rfind("end ", 0) == 0) {
      auto kv = parse_kv(line, 4);
      if (req_int(kv, "steps") != static_cast<long long>(log.steps.size()))
        fail("trailer step count mismatch");
      auto res = kv.find("result");
      if (res == kv.end()) fail("missing field: result");
      log.result = res->second;
      have_trailer = true;
      continue;
    }
    fail("unrecognized record");
  }
  if (!have_header) throw std::runtime_error("replay: missing header");
  if (!have_trailer) throw std::runtime_error("replay: missing trailer");
  return log;
}

int verify_replay(const ReplayLog& log) {
  BoardState state = generate_board(log.header.config, log.header.seed);
  for (const ReplayStep& s : log.steps) {
    StepResult r = step(state, s.actions, log.header.config);
    state = std::move(r.state);
    if (state_hash(state) != s.hash_after) return s.step;
  }
  return -1;
}

}  // namespace combat::env
