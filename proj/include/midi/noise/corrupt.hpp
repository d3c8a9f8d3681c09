// SPDX-License-Identifier: Apache-2.0
//
// Whole-graph forward corruption: Gaussian noise on coordinates, marginal
// transitions on atom types, charges, and bonds. Each node and each
// unordered edge is corrupted independently; the bond matrix is sampled on
// the upper triangle and mirrored so it stays symmetric.

#ifndef MIDI_NOISE_CORRUPT_HPP
#define MIDI_NOISE_CORRUPT_HPP

#include "midi/moldata/dataset.hpp"
#include "midi/moldata/molecule.hpp"
#include "midi/noise/discrete.hpp"
#include "midi/noise/gaussian.hpp"
#include "midi/noise/schedule.hpp"
#include "midi/numkit/rng.hpp"

namespace midi::noise {

// One marginal transition per discrete component.
struct TransitionSet {
  MarginalTransition x, c, y;

  static TransitionSet from_marginals(const moldata::Marginals& m) {
    return TransitionSet{MarginalTransition(m.x), MarginalTransition(m.c),
                         MarginalTransition(m.y)};
  }
};

// t = 0 returns the input unchanged; otherwise samples G_t ~ q(G_t | G_0).
moldata::OneHotGraph corrupt(const moldata::OneHotGraph& clean,
                             const NoiseSchedule& sch,
                             const TransitionSet& transitions, int t,
                             numkit::Rng& rng);

}  // namespace midi::noise

#endif
