// SPDX-License-Identifier: Apache-2.0
//
// Adam optimizer over a parameter store, with global gradient-norm clipping
// applied before the moment updates. Moments are stored per parameter in
// registration order so checkpoints can serialize them deterministically.

#ifndef MIDI_TRAINING_ADAM_HPP
#define MIDI_TRAINING_ADAM_HPP

#include <cstdint>
#include <vector>

#include "midi/denoiser/modules.hpp"

namespace midi::training {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 1.0;  // <= 0 disables clipping
};

class Adam {
 public:
  Adam(denoiser::ParameterStore& params, const AdamConfig& cfg);

  // Applies one update from the gradients currently stored on the
  // parameters (missing gradients count as zero), then clears them.
  // Returns the pre-clip global gradient norm.
  double step();

  void zero_grad();

  int64_t step_count() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

  // Checkpoint access: first and second moments in registration order,
  // flattened per parameter, plus the step counter.
  std::vector<std::vector<double>>& m() { return m_; }
  std::vector<std::vector<double>>& v() { return v_; }
  const std::vector<std::vector<double>>& m() const { return m_; }
  const std::vector<std::vector<double>>& v() const { return v_; }
  void set_step_count(int64_t t) { t_ = t; }

 private:
  denoiser::ParameterStore* params_;
  AdamConfig cfg_;
  int64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace midi::training

#endif
