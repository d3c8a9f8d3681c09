// SPDX-License-Identifier: Apache-2.0
//
// Ancestral reverse-diffusion sampling. Each molecule starts from the prior
// (projected normal coordinates, marginal categoricals), walks t = T..1
// through the learned reverse kernels, and finishes deterministically:
// coordinates take the final clean-state prediction, categories take the
// argmax of the final reverse distribution. Molecules are independent; each
// uses an RNG stream derived from (seed, index).

#ifndef MIDI_SAMPLING_SAMPLER_HPP
#define MIDI_SAMPLING_SAMPLER_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "midi/denoiser/model.hpp"
#include "midi/noise/corrupt.hpp"
#include "midi/numkit/rng.hpp"

namespace midi::sampling {

// Sampling-facing view of the denoiser; tests substitute oracles.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual denoiser::DenoiserOutput predict(const moldata::OneHotGraph& g,
                                           int t) const = 0;
};

// Wraps a trained model; forward passes run without autodiff bookkeeping.
class DenoiserPredictor final : public Predictor {
 public:
  explicit DenoiserPredictor(const denoiser::Denoiser& model)
      : model_(&model) {}
  denoiser::DenoiserOutput predict(const moldata::OneHotGraph& g,
                                   int t) const override;

 private:
  const denoiser::Denoiser* model_;
};

class Sampler {
 public:
  // node_count_probs[k] is the probability of generating a k-atom molecule
  // (index 0 must carry no mass).
  Sampler(const Predictor& predictor, const noise::NoiseSchedule& schedule,
          const noise::TransitionSet& transitions,
          const moldata::Vocab& vocab, std::vector<double> node_count_probs);

  // One molecule, consuming the caller's RNG.
  moldata::Molecule sample_one(numkit::Rng& rng) const;

  // count molecules with per-molecule derived streams from the seed.
  std::vector<moldata::Molecule> sample(int count, uint64_t seed) const;

  // Test hook: called with (t, state) after every reverse step, t = T..0
  // (T is the freshly drawn prior state).
  std::function<void(int, const moldata::OneHotGraph&)> state_probe;

 private:
  const Predictor* predictor_;
  const noise::NoiseSchedule* schedule_;
  const noise::TransitionSet* transitions_;
  moldata::Vocab vocab_;
  std::vector<double> node_count_probs_;
};

}  // namespace midi::sampling

#endif
