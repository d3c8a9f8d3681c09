// SPDX-License-Identifier: Apache-2.0

#include "midi/noise/transition.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace midi::noise {

MarginalTransition::MarginalTransition(std::vector<double> marginal)
    : m_(std::move(marginal)) {
  if (m_.empty()) throw std::invalid_argument("marginal must be non-empty");
  double total = 0.0;
  for (double v : m_) {
    if (!(v > 0.0))
      throw std::invalid_argument(
          "marginal entries must be strictly positive (smooth the counts)");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("marginal must sum to 1, got " +
                                std::to_string(total));
}

std::vector<double> MarginalTransition::q_matrix(double alpha) const {
  int d = dim();
  double beta = 1.0 - alpha;
  std::vector<double> q(static_cast<size_t>(d) * static_cast<size_t>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      q[static_cast<size_t>(i) * d + j] =
          beta * m_[static_cast<size_t>(j)] + (i == j ? alpha : 0.0);
  return q;
}

std::vector<double> MarginalTransition::q_bar_matrix(double alpha_bar) const {
  return q_matrix(alpha_bar);  // same affine form with cumulative weights
}

std::vector<double> MarginalTransition::forward_distribution(
    int x, double alpha_bar) const {
  int d = dim();
  std::vector<double> p(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j)
    p[static_cast<size_t>(j)] = (1.0 - alpha_bar) * m_[static_cast<size_t>(j)] +
                                (j == x ? alpha_bar : 0.0);
  return p;
}

std::vector<double> MarginalTransition::posterior(int z_t, int x,
                                                  double alpha_t,
                                                  double alpha_bar_prev) const {
  int d = dim();
  double beta_t = 1.0 - alpha_t;
  std::vector<double> p(static_cast<size_t>(d));
  double total = 0.0;
  for (int j = 0; j < d; ++j) {
    // Q^t[j, z_t]: probability of stepping from j to the observed z_t.
    double step = beta_t * m_[static_cast<size_t>(z_t)] +
                  (j == z_t ? alpha_t : 0.0);
    // (x Qbar^{t-1})[j]: prior mass on j given the clean class x.
    double prior = (1.0 - alpha_bar_prev) * m_[static_cast<size_t>(j)] +
                   (j == x ? alpha_bar_prev : 0.0);
    p[static_cast<size_t>(j)] = step * prior;
    total += p[static_cast<size_t>(j)];
  }
  if (!(total > 0.0))
    throw std::runtime_error(
        "degenerate discrete posterior (marginal must be strictly positive)");
  for (double& v : p) v /= total;
  return p;
}

std::vector<double> MarginalTransition::marginalized_reverse(
    const std::vector<double>& pred, int z_t, double alpha_t,
    double alpha_bar_prev) const {
  int d = dim();
  if (static_cast<int>(pred.size()) != d)
    throw std::invalid_argument("prediction size does not match class count");
  std::vector<double> out(static_cast<size_t>(d), 0.0);
  for (int x = 0; x < d; ++x) {
    if (pred[static_cast<size_t>(x)] == 0.0) continue;
    std::vector<double> post = posterior(z_t, x, alpha_t, alpha_bar_prev);
    for (int j = 0; j < d; ++j)
      out[static_cast<size_t>(j)] += pred[static_cast<size_t>(x)] *
                                     post[static_cast<size_t>(j)];
  }
  return out;
}

}  // namespace midi::noise
