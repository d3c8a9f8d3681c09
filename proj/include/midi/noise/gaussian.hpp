// SPDX-License-Identifier: Apache-2.0
//
// Zero-CoM Gaussian forward process and reverse-step sampling for the
// coordinates. All noise is drawn i.i.d. standard normal and projected onto
// the zero-CoM subspace before use, so every state stays centered.

#ifndef MIDI_NOISE_GAUSSIAN_HPP
#define MIDI_NOISE_GAUSSIAN_HPP

#include <span>
#include <vector>

#include "midi/noise/schedule.hpp"
#include "midi/numkit/rng.hpp"

namespace midi::noise {

// Subtracts the column mean of an n x 3 row-major array. Idempotent.
void com_project(std::span<double> R, int n);

bool is_centered(std::span<const double> R, int n, double tol = 1e-6);

// n x 3 standard normal projected to zero CoM.
std::vector<double> sample_projected_noise(int n, numkit::Rng& rng);

// R_t = abar * R0 + sbar * eps with eps already projected. Exposed so
// equivariance tests can reuse one eps draw across rotated inputs.
std::vector<double> gaussian_forward_with_noise(std::span<const double> R0,
                                                int n, double alpha_bar,
                                                double sigma_bar,
                                                std::span<const double> eps);

// Draws eps internally; throws if R0 is not centered (tolerance 1e-6).
std::vector<double> gaussian_forward(std::span<const double> R0, int n,
                                     const ComponentSchedule& sch, int t,
                                     numkit::Rng& rng);

// One reverse step: N(mu * x_hat + nu * R_t, sigma^2) in the zero-CoM
// subspace. At t=1 the coefficients degenerate and the result is x_hat.
std::vector<double> gaussian_posterior_sample(std::span<const double> x_hat,
                                              std::span<const double> R_t,
                                              int n,
                                              const ComponentSchedule& sch,
                                              int t, numkit::Rng& rng);

}  // namespace midi::noise

#endif
