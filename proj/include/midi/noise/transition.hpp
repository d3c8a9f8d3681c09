// SPDX-License-Identifier: Apache-2.0
//
// Marginal discrete-diffusion transitions for one categorical component:
//   Q^t     = alpha^t I + beta^t 1 m'        (single step)
//   Qbar^t  = abar^t I + (1 - abar^t) 1 m'   (cumulative)
// where m is the training marginal (strictly positive). The stationary
// distribution of every Q^t is m itself.
//
// Methods take the scalar alpha / alpha_bar directly so closed forms can be
// exercised against brute-force oracles without a schedule.

#ifndef MIDI_NOISE_TRANSITION_HPP
#define MIDI_NOISE_TRANSITION_HPP

#include <vector>

namespace midi::noise {

class MarginalTransition {
 public:
  explicit MarginalTransition(std::vector<double> marginal);

  int dim() const { return static_cast<int>(m_.size()); }
  const std::vector<double>& marginal() const { return m_; }

  // Dense row-major d x d matrices.
  std::vector<double> q_matrix(double alpha) const;
  std::vector<double> q_bar_matrix(double alpha_bar) const;

  // Row x of Qbar: the forward distribution C(x Qbar^t) to sample z_t from.
  std::vector<double> forward_distribution(int x, double alpha_bar) const;

  // Posterior q(z_{t-1} | z_t, x) = normalize( z_t (Q^t)' (x) x Qbar^{t-1} ).
  std::vector<double> posterior(int z_t, int x, double alpha_t,
                                double alpha_bar_prev) const;

  // Reverse distribution marginalized over a prediction p(x):
  //   sum_x pred[x] * posterior(z_t, x).
  std::vector<double> marginalized_reverse(const std::vector<double>& pred,
                                           int z_t, double alpha_t,
                                           double alpha_bar_prev) const;

 private:
  std::vector<double> m_;
};

}  // namespace midi::noise

#endif
