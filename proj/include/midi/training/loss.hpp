// SPDX-License-Identifier: Apache-2.0
//
// Training objective: weighted sum of a squared coordinate error and
// cross-entropies on atom types, charges, and bonds, with each unordered
// bond pair counted once. All terms are sums over elements (no averaging),
// so the loss scales with molecule size.

#ifndef MIDI_TRAINING_LOSS_HPP
#define MIDI_TRAINING_LOSS_HPP

#include "midi/denoiser/model.hpp"
#include "midi/moldata/molecule.hpp"
#include "midi/numkit/tensor.hpp"

namespace midi::training {

struct LossWeights {
  double coord = 3.0;
  double atom = 0.4;
  double charge = 1.0;
  double bond = 2.0;
};

// total stays on the autodiff tape; the per-term values are unweighted.
struct LossBreakdown {
  numkit::Tensor total;
  double coord = 0.0;
  double atom = 0.0;
  double charge = 0.0;
  double bond = 0.0;
};

// prediction comes from the denoiser on the noisy graph; clean is the
// uncorrupted target. Shapes must agree.
LossBreakdown diffusion_loss(const denoiser::DenoiserOutput& prediction,
                             const moldata::OneHotGraph& clean,
                             const LossWeights& weights);

}  // namespace midi::training

#endif
