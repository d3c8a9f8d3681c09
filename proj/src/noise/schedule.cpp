// SPDX-License-Identifier: Apache-2.0

#include "midi/noise/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace midi::noise {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kClampLo = 1e-4;
constexpr double kClampHi = 1.0 - 1e-4;
}  // namespace

double alpha_bar_value(int t, int T, double nu, double s) {
  if (t < 0 || t > T) throw std::invalid_argument("timestep out of [0, T]");
  if (nu <= 0.0 || s <= 0.0 || T < 1)
    throw std::invalid_argument("schedule needs nu > 0, s > 0, T >= 1");
  if (t == 0) return 1.0;
  double u = static_cast<double>(t) / static_cast<double>(T) + s;
  double arg = (kPi / 2.0) * std::pow(u, nu) / (1.0 + s);
  arg = std::clamp(arg, 0.0, kPi / 2.0);
  double c = std::cos(arg);
  return std::clamp(c * c, kClampLo, kClampHi);
}

ComponentSchedule::ComponentSchedule(int T, double nu, double s)
    : T_(T), nu_(nu), s_(s) {
  alpha_bar_.resize(static_cast<size_t>(T) + 1);
  sigma_bar_sq_.resize(static_cast<size_t>(T) + 1);
  alpha_.resize(static_cast<size_t>(T) + 1);
  alpha_bar_[0] = 1.0;
  sigma_bar_sq_[0] = 0.0;
  alpha_[0] = 1.0;  // unused; t >= 1 is the valid range
  for (int t = 1; t <= T; ++t) {
    double v = alpha_bar_value(t, T, nu, s);
    v = std::min(v, alpha_bar_[static_cast<size_t>(t) - 1] * (1.0 - 1e-9));
    alpha_bar_[static_cast<size_t>(t)] = v;
    sigma_bar_sq_[static_cast<size_t>(t)] = 1.0 - v * v;
    alpha_[static_cast<size_t>(t)] = v / alpha_bar_[static_cast<size_t>(t) - 1];
  }
}

double ComponentSchedule::sigma_bar(int t) const {
  return std::sqrt(sigma_bar_sq(t));
}

NoiseSchedule NoiseSchedule::build(int T, double nu_r, double nu_x,
                                   double nu_c, double nu_y, double s) {
  NoiseSchedule sch;
  sch.T = T;
  sch.r = ComponentSchedule(T, nu_r, s);
  sch.x = ComponentSchedule(T, nu_x, s);
  sch.c = ComponentSchedule(T, nu_c, s);
  sch.y = ComponentSchedule(T, nu_y, s);
  return sch;
}

GaussianPosteriorCoeffs gaussian_posterior_coeffs(const ComponentSchedule& sch,
                                                  int t) {
  if (t < 1 || t > sch.T())
    throw std::invalid_argument("posterior coefficients need t in [1, T]");
  double a = sch.alpha(t);
  double sb_prev_sq = sch.sigma_bar_sq(t - 1);
  double sb_sq = sch.sigma_bar_sq(t);
  double shrink = 1.0 - a * a * sb_prev_sq / sb_sq;
  GaussianPosteriorCoeffs k;
  k.mu = sch.alpha_bar(t - 1) * shrink;
  k.nu = a * sb_prev_sq / sb_sq;
  k.sigma = std::sqrt(std::max(0.0, sb_prev_sq * shrink));
  return k;
}

}  // namespace midi::noise
