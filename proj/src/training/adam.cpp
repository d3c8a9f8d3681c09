// SPDX-License-Identifier: Apache-2.0

#include "midi/training/adam.hpp"

#include <cmath>
#include <span>
#include <stdexcept>

namespace midi::training {

using numkit::Tensor;

Adam::Adam(denoiser::ParameterStore& params, const AdamConfig& cfg)
    : params_(&params), cfg_(cfg) {
  if (cfg.lr < 0 || cfg.beta1 < 0 || cfg.beta1 >= 1 || cfg.beta2 < 0 ||
      cfg.beta2 >= 1 || cfg.eps <= 0) {
    throw std::invalid_argument("invalid optimizer settings");
  }
  for (const auto& [name, t] : params.entries()) {
    m_.emplace_back(static_cast<size_t>(t.numel()), 0.0);
    v_.emplace_back(static_cast<size_t>(t.numel()), 0.0);
  }
}

double Adam::step() {
  double sq = 0.0;
  for (const auto& [name, t] : params_->entries()) {
    if (!t.has_grad()) continue;
    for (double g : t.grad()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  const double scale =
      (cfg_.clip_norm > 0 && norm > cfg_.clip_norm) ? cfg_.clip_norm / norm
                                                    : 1.0;

  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, double(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, double(t_));

  size_t pi = 0;
  for (auto& [name, t] : params_->entries()) {
    Tensor param = t;
    auto vals = param.mutable_data();
    std::vector<double>& m = m_[pi];
    std::vector<double>& v = v_[pi];
    auto grad = param.has_grad() ? param.grad() : std::span<const double>{};
    for (size_t i = 0; i < vals.size(); ++i) {
      const double g = (i < grad.size() ? grad[i] : 0.0) * scale;
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      vals[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
    ++pi;
  }
  zero_grad();
  return norm;
}

void Adam::zero_grad() {
  for (auto& [name, t] : params_->entries()) {
    Tensor param = t;
    if (param.has_grad()) param.zero_grad();
  }
}

}  // namespace midi::training
