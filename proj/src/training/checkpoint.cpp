// SPDX-License-Identifier: Apache-2.0

#include "midi/training/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>

namespace midi::training {

namespace {

constexpr char kMagic[4] = {'M', 'I', 'D', 'I'};

const std::array<uint32_t, 256>& crc_table() {
  static const std::array<uint32_t, 256> table = [] {
    std::array<uint32_t, 256> t{};
    for (uint32_t i = 0; i < 256; ++i) {
      uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  return table;
}

// Append-only little-endian byte writer.
struct Writer {
  std::vector<char> bytes;

  void raw(const void* p, size_t len) {
    const char* c = static_cast<const char*>(p);
    bytes.insert(bytes.end(), c, c + len);
  }
  void u32(uint32_t v) { raw(&v, 4); }
  void u64(uint64_t v) { raw(&v, 8); }
  void i64(int64_t v) { raw(&v, 8); }
  void str(const std::string& s) {
    u64(s.size());
    raw(s.data(), s.size());
  }
  void doubles(const std::vector<double>& v) {
    u64(v.size());
    raw(v.data(), v.size() * sizeof(double));
  }
};

struct Reader {
  const char* p;
  const char* end;

  void raw(void* out, size_t len) {
    if (static_cast<size_t>(end - p) < len) {
      throw CheckpointError("checkpoint truncated");
    }
    std::memcpy(out, p, len);
    p += len;
  }
  uint32_t u32() {
    uint32_t v;
    raw(&v, 4);
    return v;
  }
  uint64_t u64() {
    uint64_t v;
    raw(&v, 8);
    return v;
  }
  int64_t i64() {
    int64_t v;
    raw(&v, 8);
    return v;
  }
  std::string str() {
    uint64_t len = u64();
    if (static_cast<uint64_t>(end - p) < len) {
      throw CheckpointError("checkpoint truncated");
    }
    std::string s(p, p + len);
    p += len;
    return s;
  }
  std::vector<double> doubles() {
    uint64_t count = u64();
    if (static_cast<uint64_t>(end - p) < count * sizeof(double)) {
      throw CheckpointError("checkpoint truncated");
    }
    std::vector<double> v(count);
    raw(v.data(), count * sizeof(double));
    return v;
  }
};

void write_section(Writer& out, const char tag[4], const Writer& payload) {
  out.raw(tag, 4);
  out.u64(payload.bytes.size());
  out.raw(payload.bytes.data(), payload.bytes.size());
  out.u32(crc32(payload.bytes.data(), payload.bytes.size()));
}

// Validates tag and CRC, returns a reader over the payload.
Reader read_section(Reader& in, const char tag[4]) {
  char got[4];
  in.raw(got, 4);
  if (std::memcmp(got, tag, 4) != 0) {
    throw CheckpointError(std::string("expected section ") +
                          std::string(tag, 4) + ", found " +
                          std::string(got, 4));
  }
  uint64_t size = in.u64();
  if (static_cast<uint64_t>(in.end - in.p) < size + 4) {
    throw CheckpointError("checkpoint truncated");
  }
  const char* payload = in.p;
  in.p += size;
  uint32_t stored = in.u32();
  if (crc32(payload, size) != stored) {
    throw CheckpointError(std::string("section ") + std::string(tag, 4) +
                          " failed its CRC check");
  }
  return Reader{payload, payload + size};
}

}  // namespace

uint32_t crc32(const void* data, size_t len, uint32_t seed) {
  const auto& table = crc_table();
  uint32_t c = seed ^ 0xFFFFFFFFu;
  const auto* b = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) c = table[(c ^ b[i]) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  Writer out;
  out.raw(kMagic, 4);
  out.u32(kCheckpointVersion);

  Writer conf;
  conf.str(ck.config_text);
  write_section(out, "CONF", conf);

  Writer parm;
  parm.u64(ck.params.size());
  for (const auto& [name, values] : ck.params) {
    parm.str(name);
    parm.doubles(values);
  }
  write_section(out, "PARM", parm);

  Writer moms;
  moms.i64(ck.adam_steps);
  moms.u64(ck.adam_m.size());
  for (const auto& v : ck.adam_m) moms.doubles(v);
  moms.u64(ck.adam_v.size());
  for (const auto& v : ck.adam_v) moms.doubles(v);
  write_section(out, "MOMS", moms);

  Writer rngs;
  rngs.str(ck.rng_state);
  write_section(out, "RNGS", rngs);

  Writer step;
  step.i64(ck.global_step);
  write_section(out, "STEP", step);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw CheckpointError("cannot open " + path + " for writing");
  f.write(out.bytes.data(), static_cast<std::streamsize>(out.bytes.size()));
  if (!f) throw CheckpointError("short write to " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(f)),
                          std::istreambuf_iterator<char>());
  Reader in{bytes.data(), bytes.data() + bytes.size()};

  char magic[4];
  in.raw(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw CheckpointError(path + " is not a checkpoint (bad magic)");
  }
  uint32_t version = in.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) +
                          " is not supported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }

  Checkpoint ck;
  Reader conf = read_section(in, "CONF");
  ck.config_text = conf.str();

  Reader parm = read_section(in, "PARM");
  uint64_t n_params = parm.u64();
  for (uint64_t i = 0; i < n_params; ++i) {
    std::string name = parm.str();
    ck.params.emplace_back(std::move(name), parm.doubles());
  }

  Reader moms = read_section(in, "MOMS");
  ck.adam_steps = moms.i64();
  uint64_t nm = moms.u64();
  for (uint64_t i = 0; i < nm; ++i) ck.adam_m.push_back(moms.doubles());
  uint64_t nv = moms.u64();
  for (uint64_t i = 0; i < nv; ++i) ck.adam_v.push_back(moms.doubles());

  Reader rngs = read_section(in, "RNGS");
  ck.rng_state = rngs.str();

  Reader step = read_section(in, "STEP");
  ck.global_step = step.i64();
  return ck;
}

Checkpoint make_checkpoint(const std::string& config_text,
                           const denoiser::ParameterStore& params,
                           const Adam* optimizer, const std::string& rng_state,
                           int64_t global_step) {
  Checkpoint ck;
  ck.config_text = config_text;
  for (const auto& [name, t] : params.entries()) {
    ck.params.emplace_back(name,
                           std::vector<double>(t.data().begin(), t.data().end()));
  }
  if (optimizer) {
    ck.adam_m = optimizer->m();
    ck.adam_v = optimizer->v();
    ck.adam_steps = optimizer->step_count();
  }
  ck.rng_state = rng_state;
  ck.global_step = global_step;
  return ck;
}

void restore_checkpoint(const Checkpoint& ck, denoiser::ParameterStore& params,
                        Adam* optimizer) {
  const auto& entries = params.entries();
  if (ck.params.size() != entries.size()) {
    throw CheckpointError("checkpoint holds " +
                          std::to_string(ck.params.size()) +
                          " parameters, the model has " +
                          std::to_string(entries.size()));
  }
  for (size_t i = 0; i < entries.size(); ++i) {
    const auto& [name, values] = ck.params[i];
    if (name != entries[i].first) {
      throw CheckpointError("parameter order mismatch at " + name);
    }
    numkit::Tensor t = entries[i].second;
    if (values.size() != t.data().size()) {
      throw CheckpointError("parameter " + name + " has wrong size");
    }
    std::copy(values.begin(), values.end(), t.mutable_data().begin());
  }
  if (optimizer) {
    if (ck.adam_m.size() != entries.size() ||
        ck.adam_v.size() != entries.size()) {
      throw CheckpointError("optimizer moments do not match the model");
    }
    optimizer->m() = ck.adam_m;
    optimizer->v() = ck.adam_v;
    optimizer->set_step_count(ck.adam_steps);
  }
}

}  // namespace midi::training
