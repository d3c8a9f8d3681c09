// SPDX-License-Identifier: Apache-2.0

#include "midi/noise/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace midi::noise {

void com_project(std::span<double> R, int n) {
  if (n <= 0) return;
  double mean[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) mean[k] += R[static_cast<size_t>(i) * 3 + k];
  for (double& m : mean) m /= n;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) R[static_cast<size_t>(i) * 3 + k] -= mean[k];
}

bool is_centered(std::span<const double> R, int n, double tol) {
  double mean[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) mean[k] += R[static_cast<size_t>(i) * 3 + k];
  double norm2 = 0.0;
  for (double m : mean) {
    m /= n;
    norm2 += m * m;
  }
  return std::sqrt(norm2) <= tol;
}

std::vector<double> sample_projected_noise(int n, numkit::Rng& rng) {
  std::vector<double> eps(static_cast<size_t>(n) * 3);
  rng.fill_normal(eps);
  com_project(eps, n);
  return eps;
}

std::vector<double> gaussian_forward_with_noise(std::span<const double> R0,
                                                int n, double alpha_bar,
                                                double sigma_bar,
                                                std::span<const double> eps) {
  std::vector<double> out(static_cast<size_t>(n) * 3);
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = alpha_bar * R0[i] + sigma_bar * eps[i];
  return out;
}

std::vector<double> gaussian_forward(std::span<const double> R0, int n,
                                     const ComponentSchedule& sch, int t,
                                     numkit::Rng& rng) {
  if (!is_centered(R0, n))
    throw std::invalid_argument(
        "coordinates must be centered before corruption");
  if (t == 0) return {R0.begin(), R0.end()};
  std::vector<double> eps = sample_projected_noise(n, rng);
  return gaussian_forward_with_noise(R0, n, sch.alpha_bar(t), sch.sigma_bar(t),
                                     eps);
}

std::vector<double> gaussian_posterior_sample(std::span<const double> x_hat,
                                              std::span<const double> R_t,
                                              int n,
                                              const ComponentSchedule& sch,
                                              int t, numkit::Rng& rng) {
  GaussianPosteriorCoeffs k = gaussian_posterior_coeffs(sch, t);
  std::vector<double> out(static_cast<size_t>(n) * 3);
  if (k.sigma == 0.0) {
    for (size_t i = 0; i < out.size(); ++i)
      out[i] = k.mu * x_hat[i] + k.nu * R_t[i];
    return out;
  }
  std::vector<double> eps = sample_projected_noise(n, rng);
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = k.mu * x_hat[i] + k.nu * R_t[i] + k.sigma * eps[i];
  return out;
}

}  // namespace midi::noise
