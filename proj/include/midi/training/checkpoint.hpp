// SPDX-License-Identifier: Apache-2.0
//
// Binary checkpoint format. Layout:
//
//   bytes 0-3   magic "MIDI"
//   bytes 4-7   format version (u32, little-endian)
//   sections    tag (4 bytes) | payload size (u64) | payload | crc32 (u32)
//
// Sections, in order: CONF (canonical run-config text), PARM (named
// parameter tensors), MOMS (optimizer moments and step counter), RNGS
// (serialized RNG state), STEP (global training step). Doubles are stored
// as raw little-endian bits, so a save/load round trip is bitwise exact.
// Loading validates the magic, the version, and every section CRC.

#ifndef MIDI_TRAINING_CHECKPOINT_HPP
#define MIDI_TRAINING_CHECKPOINT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "midi/denoiser/modules.hpp"
#include "midi/training/adam.hpp"

namespace midi::training {

inline constexpr uint32_t kCheckpointVersion = 1;

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  std::string config_text;  // canonical key=value lines
  std::vector<std::pair<std::string, std::vector<double>>> params;
  std::vector<std::vector<double>> adam_m, adam_v;
  int64_t adam_steps = 0;
  std::string rng_state;
  int64_t global_step = 0;
};

// CRC-32 (IEEE) over a byte range; used for the section checksums and
// reusable wherever a content fingerprint is needed.
uint32_t crc32(const void* data, size_t len, uint32_t seed = 0);

void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);  // throws CheckpointError

// Conveniences that snapshot / restore live training state.
Checkpoint make_checkpoint(const std::string& config_text,
                           const denoiser::ParameterStore& params,
                           const Adam* optimizer, const std::string& rng_state,
                           int64_t global_step);
// Parameter names and shapes must match the store; optimizer may be null to
// skip restoring moments.
void restore_checkpoint(const Checkpoint& ck, denoiser::ParameterStore& params,
                        Adam* optimizer);

}  // namespace midi::training

#endif
