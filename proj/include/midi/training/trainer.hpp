// SPDX-License-Identifier: Apache-2.0
//
// Optimization loop: each step draws molecules with replacement, corrupts
// each at an independent uniform timestep in {1..T}, and descends the
// batch-mean loss. All randomness flows from one seeded generator, so runs
// with equal seeds produce byte-identical logs.

#ifndef MIDI_TRAINING_TRAINER_HPP
#define MIDI_TRAINING_TRAINER_HPP

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "midi/denoiser/model.hpp"
#include "midi/noise/corrupt.hpp"
#include "midi/numkit/rng.hpp"
#include "midi/training/adam.hpp"
#include "midi/training/loss.hpp"

namespace midi::training {

struct TrainSettings {
  int batch_size = 8;
  int log_every = 20;  // CSV cadence; the first and last steps always log
  int val_every = 0;   // 0 disables validation rows
  uint64_t seed = 0;
  LossWeights weights;
  AdamConfig adam;
};

// Raised when the loss goes NaN/Inf; diagnostics() is a human-readable dump
// of the step state that produced it.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::string diagnostics)
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}
  const std::string& diagnostics() const { return diagnostics_; }

 private:
  std::string diagnostics_;
};

class Trainer {
 public:
  Trainer(denoiser::Denoiser& model, const noise::NoiseSchedule& schedule,
          const noise::TransitionSet& transitions,
          std::vector<moldata::OneHotGraph> train,
          std::vector<moldata::OneHotGraph> val, const TrainSettings& settings);

  // One optimizer step; returns the batch-mean loss (detached values only).
  LossBreakdown train_step();

  // Mean loss over the validation set with corruption noise derived from
  // the main seed and the current step (deterministic, no tape).
  LossBreakdown validation_loss();

  // Runs `steps` steps, appending CSV rows ("step,phase,total,...") to csv
  // when non-null. Throws DivergenceError if the loss stops being finite.
  void run(int steps, std::ostream* csv);

  static const char* csv_header();  // without trailing newline

  int64_t global_step() const { return global_step_; }
  void set_global_step(int64_t s) { global_step_ = s; }
  Adam& optimizer() { return adam_; }
  numkit::Rng& rng() { return rng_; }
  denoiser::Denoiser& model() { return *model_; }

 private:
  LossBreakdown batch_loss(bool update);

  denoiser::Denoiser* model_;
  const noise::NoiseSchedule* schedule_;
  const noise::TransitionSet* transitions_;
  std::vector<moldata::OneHotGraph> train_, val_;
  TrainSettings settings_;
  Adam adam_;
  numkit::Rng rng_;
  int64_t global_step_ = 0;
};

}  // namespace midi::training

#endif
