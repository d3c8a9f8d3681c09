// SPDX-License-Identifier: Apache-2.0

#include "midi/noise/corrupt.hpp"

#include <stdexcept>

namespace midi::noise {

using moldata::OneHotGraph;
using numkit::Tensor;

namespace {

// Class index of an exact one-hot row.
int onehot_index(std::span<const double> data, int64_t offset, int width) {
  for (int k = 0; k < width; ++k)
    if (data[static_cast<size_t>(offset + k)] == 1.0) return k;
  throw std::invalid_argument("row is not one-hot");
}

}  // namespace

OneHotGraph corrupt(const OneHotGraph& clean, const NoiseSchedule& sch,
                    const TransitionSet& transitions, int t,
                    numkit::Rng& rng) {
  if (t < 0 || t > sch.T)
    throw std::invalid_argument("corruption timestep out of [0, T]");
  int n = clean.n();
  int a = static_cast<int>(clean.X.dim(1));
  int c = static_cast<int>(clean.C.dim(1));
  int b = static_cast<int>(clean.Y.dim(2));
  if (t == 0) return clean;

  std::vector<double> X(static_cast<size_t>(n) * a, 0.0);
  std::vector<double> C(static_cast<size_t>(n) * c, 0.0);
  std::vector<double> Y(static_cast<size_t>(n) * n * b, 0.0);

  for (int i = 0; i < n; ++i) {
    int x0 = onehot_index(clean.X.data(), static_cast<int64_t>(i) * a, a);
    int xt = discrete_forward(transitions.x, x0, sch.x.alpha_bar(t), rng);
    X[static_cast<size_t>(i) * a + xt] = 1.0;

    int c0 = onehot_index(clean.C.data(), static_cast<int64_t>(i) * c, c);
    int ct = discrete_forward(transitions.c, c0, sch.c.alpha_bar(t), rng);
    C[static_cast<size_t>(i) * c + ct] = 1.0;
  }

  for (int i = 0; i < n; ++i) {
    // diagonal entries are structural "none", never diffused
    Y[(static_cast<size_t>(i) * n + i) * b] = 1.0;
    for (int j = i + 1; j < n; ++j) {
      int y0 = onehot_index(clean.Y.data(),
                            (static_cast<int64_t>(i) * n + j) * b, b);
      int yt = discrete_forward(transitions.y, y0, sch.y.alpha_bar(t), rng);
      Y[(static_cast<size_t>(i) * n + j) * b + yt] = 1.0;
      Y[(static_cast<size_t>(j) * n + i) * b + yt] = 1.0;
    }
  }

  std::vector<double> R = gaussian_forward(clean.R.data(), n, sch.r, t, rng);

  return OneHotGraph{
      Tensor::from_data({n, a}, std::move(X)),
      Tensor::from_data({n, c}, std::move(C)),
      Tensor::from_data({n, n, b}, std::move(Y)),
      Tensor::from_data({n, 3}, std::move(R)),
  };
}

}  // namespace midi::noise
