#include "combat/orch/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "combat/rep/layout.hpp"
#include "combat/rng.hpp"

namespace combat::orch {
namespace {

constexpr char kMagic[4] = {'C', 'M', 'B', 'T'};
constexpr std::uint16_t kFormatVersion = 1;

// ---------------------------------------------------------------- writing

struct Writer {
  std::vector<std::uint8_t> bytes;

  void u8(std::uint8_t v) { bytes.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) {
    std::uint64_t raw = 0;
    std::memcpy(&raw, &v, sizeof raw);
    u64(raw);
  }
  void f32(float v) {
    std::uint32_t raw = 0;
    std::memcpy(&raw, &v, sizeof raw);
    u32(raw);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes.insert(bytes.end(), s.begin(), s.end());
  }
  void tensor(const std::string& name, const Tensor& t) {
    str(name);
    u8(static_cast<std::uint8_t>(t.dims.size()));
    for (std::size_t d : t.dims) u32(static_cast<std::uint32_t>(d));
    for (double x : t.data) f32(static_cast<float>(x));
  }
};

// ---------------------------------------------------------------- reading

struct Reader {
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;

  void need(std::size_t n, const char* what) {
    if (pos + n > bytes.size())
      throw TruncatedError(std::string("checkpoint truncated while reading ") + what);
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return bytes[pos++];
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(bytes[pos++]) << (8 * i);
    return v;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos++]) << (8 * i);
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[pos++]) << (8 * i);
    return v;
  }
  std::int32_t i32(const char* what) { return static_cast<std::int32_t>(u32(what)); }
  std::int64_t i64(const char* what) { return static_cast<std::int64_t>(u64(what)); }
  double f64(const char* what) {
    const std::uint64_t raw = u64(what);
    double v = 0;
    std::memcpy(&v, &raw, sizeof v);
    return v;
  }
  float f32(const char* what) {
    const std::uint32_t raw = u32(what);
    float v = 0;
    std::memcpy(&v, &raw, sizeof v);
    return v;
  }
  std::string str(const char* what) {
    const std::uint32_t len = u32(what);
    need(len, what);
    std::string s(reinterpret_cast<const char*>(bytes.data() + pos), len);
    pos += len;
    return s;
  }
};

void write_params_block(Writer& w, const nn::NetworkParams& params, const nn::AdamState& adam,
                        long update_count) {
  w.i32(params.board_size);
  w.i32(params.hidden);
  w.i64(adam.step);
  w.i64(update_count);
  const auto named_p = params.named();
  const auto named_m = adam.m.named();
  const auto named_v = adam.v.named();
  w.u32(static_cast<std::uint32_t>(3 * named_p.size()));
  for (const auto& [name, t] : named_p) w.tensor("p." + name, *t);
  for (const auto& [name, t] : named_m) w.tensor("m." + name, *t);
  for (const auto& [name, t] : named_v) w.tensor("v." + name, *t);
}

// Reads one tensor record into `dst`, which already has the expected shape.
// Dims are validated before any payload byte is consumed.
void read_tensor_into(Reader& r, const std::string& expected_name, Tensor& dst) {
  const std::string name = r.str("tensor name");
  if (name != expected_name)
    throw ShapeError("unexpected tensor '" + name + "' (expected '" + expected_name + "')");
  const std::uint8_t rank = r.u8("tensor rank");
  std::vector<std::size_t> dims(rank);
  for (auto& d : dims) d = r.u32("tensor dims");
  if (dims != dst.dims) {
    std::string got = "[", want = "[";
    for (std::size_t d : dims) got += std::to_string(d) + " ";
    for (std::size_t d : dst.dims) want += std::to_string(d) + " ";
    throw ShapeError("tensor '" + name + "' shape mismatch: stored " + got + "], expected " +
                     want + "]");
  }
  for (double& x : dst.data) x = static_cast<double>(r.f32("tensor payload"));
}

void read_params_block(Reader& r, const std::string& id, TrainState& out, pop::AgentSpec& agent) {
  const int board_size = r.i32("params board size");
  const int hidden = r.i32("params hidden width");
  if (board_size < 1 || hidden < 1)
    throw ShapeError("agent '" + id + "' has invalid network dimensions");
  const std::int64_t adam_step = r.i64("optimizer step");
  const std::int64_t update_count = r.i64("update count");

  Rng shape_rng(0);  // values are overwritten below; init only fixes shapes
  auto params = std::make_shared<nn::NetworkParams>(
      nn::NetworkParams::init(board_size, hidden, shape_rng));
  nn::AdamState adam = nn::AdamState::zeros_like(*params);
  adam.step = adam_step;

  const auto named_p = params->named();
  auto named_m = adam.m.named();
  auto named_v = adam.v.named();
  const std::uint32_t tensor_count = r.u32("tensor count");
  if (tensor_count != 3 * named_p.size())
    throw ShapeError("agent '" + id + "' stores " + std::to_string(tensor_count) +
                     " tensors, expected " + std::to_string(3 * named_p.size()));
  for (auto& [name, t] : named_p) read_tensor_into(r, "p." + name, *t);
  for (auto& [name, t] : named_m) read_tensor_into(r, "m." + name, *t);
  for (auto& [name, t] : named_v) read_tensor_into(r, "v." + name, *t);

  agent.params = std::move(params);
  out.adam.emplace(id, std::move(adam));
  out.update_counts.emplace(id, static_cast<long>(update_count));
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const TrainState& state) {
  Writer w;
  w.bytes.insert(w.bytes.end(), kMagic, kMagic + 4);
  w.u16(kFormatVersion);
  w.u8(rep::kLayoutVersion);

  w.u8(static_cast<std::uint8_t>(state.stage));
  w.i64(state.pickup);
  w.i64(state.updates_total);
  w.u64(state.sched_rng_state);
  w.u64(state.pop_rng_state);
  w.i64(state.population.next_spawn_serial);

  w.u32(static_cast<std::uint32_t>(state.population.agents.size()));
  for (const auto& agent : state.population.agents) {
    w.str(agent.id);
    w.u8(agent.kind == pop::AgentKind::Trainable ? 0 : 1);
    w.str(agent.scripted_name);
    w.f64(agent.gamma);
    w.f64(agent.alpha);
    w.f64(agent.reward.w_pickup);
    w.i32(agent.stage);
    w.i32(agent.min_streak);
    w.u8(agent.converged_at_stage ? 1 : 0);
    w.i64(agent.anneal_count);
    w.u32(static_cast<std::uint32_t>(agent.reward_history.size()));
    for (double x : agent.reward_history) w.f64(x);
    w.u8(agent.params ? 1 : 0);
    if (agent.params) {
      const auto adam_it = state.adam.find(agent.id);
      const auto count_it = state.update_counts.find(agent.id);
      const long updates = count_it != state.update_counts.end() ? count_it->second : 0;
      if (adam_it != state.adam.end()) {
        write_params_block(w, *agent.params, adam_it->second, updates);
      } else {
        write_params_block(w, *agent.params, nn::AdamState::zeros_like(*agent.params), updates);
      }
    }
  }

  w.u32(static_cast<std::uint32_t>(state.ranking.size()));
  for (const auto& [id, stats] : state.ranking) {
    w.str(id);
    w.f64(stats.rating);
    w.i32(stats.wins);
    w.i32(stats.losses);
    w.i32(stats.draws);
  }
  return w.bytes;
}

TrainState decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader r{bytes};
  r.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw BadMagicError("not a checkpoint: bad magic");
  r.pos = 4;
  const std::uint16_t version = r.u16("format version");
  if (version != kFormatVersion)
    throw BadVersionError("unsupported checkpoint format version " + std::to_string(version));
  const std::uint8_t layout = r.u8("feature layout version");
  if (layout != rep::kLayoutVersion)
    throw BadVersionError("unsupported feature layout version " + std::to_string(layout));

  TrainState out;
  out.stage = r.u8("stage");
  if (out.stage < 1 || out.stage > 4)
    throw ShapeError("stage " + std::to_string(out.stage) + " out of range");
  out.pickup = static_cast<long>(r.i64("pickup counter"));
  out.updates_total = static_cast<long>(r.i64("update counter"));
  out.sched_rng_state = r.u64("scheduler rng state");
  out.pop_rng_state = r.u64("population rng state");
  out.population.next_spawn_serial = static_cast<long>(r.i64("spawn serial"));

  const std::uint32_t agent_count = r.u32("agent count");
  for (std::uint32_t i = 0; i < agent_count; ++i) {
    pop::AgentSpec agent;
    agent.id = r.str("agent id");
    const std::uint8_t kind = r.u8("agent kind");
    if (kind > 1) throw ShapeError("agent '" + agent.id + "' has unknown kind");
    agent.kind = kind == 0 ? pop::AgentKind::Trainable : pop::AgentKind::Scripted;
    agent.scripted_name = r.str("scripted policy name");
    agent.gamma = r.f64("gamma");
    agent.alpha = r.f64("alpha");
    agent.reward.w_pickup = r.f64("pickup shaping weight");
    agent.stage = r.i32("agent stage");
    agent.min_streak = r.i32("minimum streak");
    agent.converged_at_stage = r.u8("convergence flag") != 0;
    agent.anneal_count = static_cast<long>(r.i64("anneal count"));
    const std::uint32_t history_len = r.u32("history length");
    for (std::uint32_t k = 0; k < history_len; ++k)
      agent.reward_history.push_back(r.f64("history entry"));
    const std::uint8_t has_params = r.u8("params flag");
    if (has_params) read_params_block(r, agent.id, out, agent);
    out.population.agents.push_back(std::move(agent));
  }

  const std::uint32_t rank_count = r.u32("ranking size");
  for (std::uint32_t i = 0; i < rank_count; ++i) {
    const std::string id = r.str("ranking id");
    auto& stats = out.ranking.ensure(id);
    stats.rating = r.f64("rating");
    stats.wins = r.i32("wins");
    stats.losses = r.i32("losses");
    stats.draws = r.i32("draws");
  }
  if (r.pos != bytes.size())
    throw ShapeError("checkpoint has " + std::to_string(bytes.size() - r.pos) +
                     " trailing bytes");
  return out;
}

void save_checkpoint(const std::string& path, const TrainState& state) {
  const std::vector<std::uint8_t> bytes = encode_checkpoint(state);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

TrainState load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace combat::orch
