// SPDX-License-Identifier: Apache-2.0
//
// Building blocks of the denoiser: parameter registry, linear/MLP layers,
// rotation-invariant pair descriptors, coordinate normalization, gated
// coordinate MLP, and PNA pooling of pairwise features.
//
// Pairwise tensors are stored flattened as [n*n, d] with pair (i, j) at row
// i*n + j. Coordinates are [n, 3] and kept at zero CoM.

#ifndef MIDI_DENOISER_MODULES_HPP
#define MIDI_DENOISER_MODULES_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "midi/numkit/ops.hpp"
#include "midi/numkit/rng.hpp"
#include "midi/numkit/tensor.hpp"

namespace midi::denoiser {

using numkit::Shape;
using numkit::Tensor;

// Ordered, named registry of trainable tensors. Registration order is the
// canonical layout for optimizer moments and checkpoints.
class ParameterStore {
 public:
  explicit ParameterStore(uint64_t seed) : rng_(seed) {}

  Tensor add_uniform(const std::string& name, Shape shape, double limit);
  Tensor add_constant(const std::string& name, Shape shape, double value);

  const std::vector<std::pair<std::string, Tensor>>& entries() const {
    return params_;
  }
  Tensor& at(const std::string& name);
  int64_t total_elements() const;

 private:
  Tensor add(const std::string& name, Tensor t);

  numkit::Rng rng_;
  std::vector<std::pair<std::string, Tensor>> params_;
  std::unordered_map<std::string, size_t> index_;
};

class Linear {
 public:
  Linear() = default;
  // Weights U(-1/sqrt(in), 1/sqrt(in)); zero_init makes the layer the zero
  // map so the surrounding residual block starts as the identity.
  Linear(ParameterStore& ps, const std::string& name, int in, int out,
         bool zero_init = false);

  Tensor operator()(const Tensor& x) const;

 private:
  Tensor w_, b_;
};

// Linear stack with SiLU between layers (none after the last).
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParameterStore& ps, const std::string& name,
      const std::vector<int>& dims, bool zero_init_last = false);

  Tensor operator()(Tensor x) const;

 private:
  std::vector<Linear> layers_;
};

// Learnable scale/offset layer normalization over the last axis.
class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(ParameterStore& ps, const std::string& name, int dim);

  Tensor operator()(const Tensor& x) const;

 private:
  Tensor gamma_, beta_;
};

// Row index helpers for pairwise layouts.
std::vector<int64_t> pair_rows_i(int n);  // row i*n+j -> i
std::vector<int64_t> pair_rows_j(int n);  // row i*n+j -> j
std::vector<int64_t> pair_transpose(int n);  // row i*n+j -> j*n+i

// Differentiable zero-CoM projection: subtracts the column mean.
Tensor com_project_t(const Tensor& R);

// Rotation-invariant pair descriptors [n*n, 4]:
//   [ |r_i - r_j|, |r_i|, |r_j|, cos(r_i, r_j) ]
// Norms are sqrt(|.|^2 + delta^2) and the cosine denominator is guarded by
// +delta, so gradients stay finite at coincident or zero points.
Tensor pair_descriptors(const Tensor& R, double delta);

// R * gamma / (rms_norm + delta) with rms_norm = sqrt(mean_i |r_i|^2).
Tensor e3norm(const Tensor& R, const Tensor& gamma, double delta);

// Gated coordinate MLP: MLP(|r_i|^2) * r_i / (|r_i| + delta), re-centered.
// The gate's last layer is zero-initialized (zero map at init).
class PosMlp {
 public:
  PosMlp() = default;
  PosMlp(ParameterStore& ps, const std::string& name, int hidden);

  Tensor operator()(const Tensor& R, double delta) const;

 private:
  Mlp gate_;
};

// Pools pairwise features over j for each i: concat of [mean, min, max, std]
// along the feature axis, [n, 4d]. Std is the population convention and is
// exactly zero when n == 1.
Tensor pair_pool_stats(const Tensor& pairwise, int n);

// pair_pool_stats followed by a learned linear map to out_dim.
class PnaPool {
 public:
  PnaPool() = default;
  PnaPool(ParameterStore& ps, const std::string& name, int in_dim,
          int out_dim);

  Tensor operator()(const Tensor& pairwise, int n) const;

 private:
  Linear lin_;
  int in_dim_ = 0;
};

// Sinusoidal embedding of an integer timestep, shape [1, dim].
Tensor timestep_embedding(int t, int dim);

}  // namespace midi::denoiser

#endif
