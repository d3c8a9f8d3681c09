// SPDX-License-Identifier: Apache-2.0

#include "midi/noise/discrete.hpp"

namespace midi::noise {

int discrete_forward(const MarginalTransition& tr, int x, double alpha_bar,
                     numkit::Rng& rng) {
  if (alpha_bar == 1.0) return x;
  std::vector<double> p = tr.forward_distribution(x, alpha_bar);
  return static_cast<int>(rng.categorical(p));
}

int discrete_reverse(const MarginalTransition& tr,
                     const std::vector<double>& pred, int z_t, double alpha_t,
                     double alpha_bar_prev, numkit::Rng& rng) {
  std::vector<double> p =
      tr.marginalized_reverse(pred, z_t, alpha_t, alpha_bar_prev);
  return static_cast<int>(rng.categorical(p));
}

}  // namespace midi::noise
