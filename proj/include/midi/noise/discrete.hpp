// SPDX-License-Identifier: Apache-2.0
//
// Sampling helpers for the discrete forward/reverse processes.

#ifndef MIDI_NOISE_DISCRETE_HPP
#define MIDI_NOISE_DISCRETE_HPP

#include "midi/noise/transition.hpp"
#include "midi/numkit/rng.hpp"

namespace midi::noise {

// z_t ~ C(x Qbar) for a clean class x; alpha_bar = 1 returns x itself.
int discrete_forward(const MarginalTransition& tr, int x, double alpha_bar,
                     numkit::Rng& rng);

// z_{t-1} ~ sum_x pred[x] q(z_{t-1} | z_t, x).
int discrete_reverse(const MarginalTransition& tr,
                     const std::vector<double>& pred, int z_t, double alpha_t,
                     double alpha_bar_prev, numkit::Rng& rng);

}  // namespace midi::noise

#endif
