// SPDX-License-Identifier: Apache-2.0

#include "midi/training/loss.hpp"

#include <stdexcept>

#include "midi/numkit/ops.hpp"

namespace midi::training {

using namespace midi::numkit;

namespace {

// -sum(target * log(p + eps)). The epsilon only guards 0 * log(0): it
// vanishes in rounding for any probability a softmax can produce, so a
// perfect prediction still scores exactly zero.
Tensor cross_entropy(const Tensor& target, const Tensor& p) {
  return -sum(target * log(p + 1e-30));
}

}  // namespace

LossBreakdown diffusion_loss(const denoiser::DenoiserOutput& prediction,
                             const moldata::OneHotGraph& clean,
                             const LossWeights& weights) {
  if (prediction.R_hat.shape() != clean.R.shape() ||
      prediction.pX.shape() != clean.X.shape() ||
      prediction.pC.shape() != clean.C.shape() ||
      prediction.pY.shape() != clean.Y.shape()) {
    throw std::invalid_argument("prediction and target shapes disagree");
  }
  const int n = clean.n();

  Tensor diff = prediction.R_hat - clean.R;
  Tensor coord = sum(diff * diff);
  Tensor atom = cross_entropy(clean.X, prediction.pX);
  Tensor charge = cross_entropy(clean.C, prediction.pC);

  // Each unordered pair enters once (upper triangle of the bond matrix).
  std::vector<double> m(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m[static_cast<size_t>(i) * n + j] = 1.0;
  Tensor mask = Tensor::from_data({n, n, 1}, std::move(m));
  Tensor bond = -sum(clean.Y * log(prediction.pY + 1e-30) * mask);

  LossBreakdown out;
  out.coord = coord.item();
  out.atom = atom.item();
  out.charge = charge.item();
  out.bond = bond.item();
  out.total = coord * weights.coord + atom * weights.atom +
              charge * weights.charge + bond * weights.bond;
  return out;
}

}  // namespace midi::training
