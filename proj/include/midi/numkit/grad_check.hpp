// SPDX-License-Identifier: Apache-2.0
//
// Central-difference gradient verification. Builds the tape once for the
// analytic gradients, then re-evaluates the function with each leaf
// element nudged by ±h (no tape) and compares.

#ifndef MIDI_NUMKIT_GRAD_CHECK_HPP
#define MIDI_NUMKIT_GRAD_CHECK_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "midi/numkit/rng.hpp"
#include "midi/numkit/tensor.hpp"

namespace midi::numkit {

// f rebuilds the scalar loss from the current leaf values on every call.
// Returns max over all leaf elements of
//   |analytic - numeric| / (|analytic| + |numeric| + reg).
// reg acts as an absolute-error floor: gradients whose magnitude sits below
// the finite-difference rounding noise would otherwise report errors of
// order one no matter how correct the analytic value is.
inline double grad_check(const std::function<Tensor()>& f,
                         std::vector<Tensor> leaves, double h = 1e-5,
                         double reg = 1e-12) {
  Tensor loss = f();
  if (loss.numel() != 1)
    throw std::invalid_argument("grad_check requires a scalar function");
  MapGradStore store = backward_collect(loss);

  double worst = 0.0;
  for (Tensor& leaf : leaves) {
    const std::vector<double>* analytic = store.find(leaf.node());
    auto vals = leaf.mutable_data();
    for (size_t i = 0; i < vals.size(); ++i) {
      double a = analytic ? (*analytic)[i] : 0.0;
      double keep = vals[i];
      double plus, minus;
      {
        NoGradGuard ng;
        vals[i] = keep + h;
        plus = f().item();
        vals[i] = keep - h;
        minus = f().item();
        vals[i] = keep;
      }
      double numeric = (plus - minus) / (2.0 * h);
      double err =
          std::abs(a - numeric) / (std::abs(a) + std::abs(numeric) + reg);
      worst = std::max(worst, err);
    }
  }
  return worst;
}

// Same comparison restricted to `per_leaf` randomly chosen elements of each
// leaf (all elements when a leaf is that small). Keeps the cost bearable for
// models where exhaustive checking would need millions of evaluations.
inline double grad_check_sampled(const std::function<Tensor()>& f,
                                 std::vector<Tensor> leaves, int per_leaf,
                                 Rng& rng, double h = 1e-5,
                                 double reg = 1e-12) {
  Tensor loss = f();
  if (loss.numel() != 1)
    throw std::invalid_argument("grad_check requires a scalar function");
  MapGradStore store = backward_collect(loss);

  double worst = 0.0;
  for (Tensor& leaf : leaves) {
    const std::vector<double>* analytic = store.find(leaf.node());
    auto vals = leaf.mutable_data();
    std::vector<size_t> picks;
    if (static_cast<int>(vals.size()) <= per_leaf) {
      for (size_t i = 0; i < vals.size(); ++i) picks.push_back(i);
    } else {
      for (int k = 0; k < per_leaf; ++k)
        picks.push_back(static_cast<size_t>(rng.uniform_int(vals.size())));
    }
    for (size_t i : picks) {
      double a = analytic ? (*analytic)[i] : 0.0;
      double keep = vals[i];
      double plus, minus;
      {
        NoGradGuard ng;
        vals[i] = keep + h;
        plus = f().item();
        vals[i] = keep - h;
        minus = f().item();
        vals[i] = keep;
      }
      double numeric = (plus - minus) / (2.0 * h);
      double err =
          std::abs(a - numeric) / (std::abs(a) + std::abs(numeric) + reg);
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace midi::numkit

#endif
