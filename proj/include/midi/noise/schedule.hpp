// SPDX-License-Identifier: Apache-2.0
//
// Cosine noise schedules with a per-component rate exponent nu:
//   alpha_bar(t) = cos^2( (pi/2) * ((t/T + s)^nu) / (1 + s) )
// Higher nu keeps a component's signal cleaner for longer (coordinates and
// bonds get larger exponents than atom types/charges), which orders what
// the sampler resolves first.
//
// Table construction details:
//  - alpha_bar(0) := 1 exactly.
//  - The cosine argument is clamped to [0, pi/2] (for nu != 1 it can
//    overshoot at late t), then the value to [1e-4, 1 - 1e-4] for t >= 1.
//  - A final cascade enforces strict decrease:
//    alpha_bar(t) <= alpha_bar(t-1) * (1 - 1e-9).
//  - sigma_bar^2 is stored as 1 - alpha_bar^2, so the variance-preserving
//    identity alpha_bar(t)^2 + sigma_bar_sq(t) == 1 holds bitwise.

#ifndef MIDI_NOISE_SCHEDULE_HPP
#define MIDI_NOISE_SCHEDULE_HPP

#include <vector>

namespace midi::noise {

// Single-point evaluation (argument + value clamps, no cascade).
double alpha_bar_value(int t, int T, double nu, double s);

class ComponentSchedule {
 public:
  ComponentSchedule() = default;
  ComponentSchedule(int T, double nu, double s = 0.008);

  int T() const { return T_; }
  double nu() const { return nu_; }
  double s() const { return s_; }

  double alpha_bar(int t) const { return alpha_bar_.at(static_cast<size_t>(t)); }
  double sigma_bar_sq(int t) const {
    return sigma_bar_sq_.at(static_cast<size_t>(t));
  }
  double sigma_bar(int t) const;

  // Stepwise quantities, defined for t in [1, T].
  double alpha(int t) const { return alpha_.at(static_cast<size_t>(t)); }
  double beta(int t) const { return 1.0 - alpha(t); }

 private:
  int T_ = 0;
  double nu_ = 1.0;
  double s_ = 0.008;
  std::vector<double> alpha_bar_, sigma_bar_sq_, alpha_;
};

// One table per diffused component.
struct NoiseSchedule {
  ComponentSchedule r, x, c, y;
  int T = 0;

  static NoiseSchedule build(int T, double nu_r, double nu_x, double nu_c,
                             double nu_y, double s = 0.008);
};

// Gaussian reverse-step coefficients at step t:
//   R_{t-1} ~ N(mu * x_hat + nu * R_t, sigma^2 I) in the zero-CoM subspace.
// At t = 1 this degenerates to (1, 0, 0): the sample equals x_hat.
struct GaussianPosteriorCoeffs {
  double mu = 0.0;
  double nu = 0.0;
  double sigma = 0.0;
};

GaussianPosteriorCoeffs gaussian_posterior_coeffs(const ComponentSchedule& sch,
                                                  int t);

}  // namespace midi::noise

#endif
