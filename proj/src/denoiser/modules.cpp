// SPDX-License-Identifier: Apache-2.0

#include "midi/denoiser/modules.hpp"

#include <cmath>
#include <stdexcept>

namespace midi::denoiser {

using namespace midi::numkit;

Tensor ParameterStore::add(const std::string& name, Tensor t) {
  if (index_.count(name) != 0) {
    throw std::invalid_argument("duplicate parameter name: " + name);
  }
  index_[name] = params_.size();
  params_.emplace_back(name, t);
  return t;
}

Tensor ParameterStore::add_uniform(const std::string& name, Shape shape,
                                   double limit) {
  std::vector<double> v(static_cast<size_t>(shape_numel(shape)));
  for (double& x : v) x = rng_.uniform(-limit, limit);
  return add(name, Tensor::from_data(std::move(shape), std::move(v), true));
}

Tensor ParameterStore::add_constant(const std::string& name, Shape shape,
                                    double value) {
  return add(name, Tensor::full(std::move(shape), value, true));
}

Tensor& ParameterStore::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw std::invalid_argument("unknown parameter name: " + name);
  }
  return params_[it->second].second;
}

int64_t ParameterStore::total_elements() const {
  int64_t total = 0;
  for (const auto& [name, t] : params_) total += t.numel();
  return total;
}

Linear::Linear(ParameterStore& ps, const std::string& name, int in, int out,
               bool zero_init) {
  if (in <= 0 || out <= 0) {
    throw std::invalid_argument("linear layer dims must be positive");
  }
  const double limit = zero_init ? 0.0 : 1.0 / std::sqrt(double(in));
  w_ = ps.add_uniform(name + ".w", {in, out}, limit);
  b_ = ps.add_constant(name + ".b", {out}, 0.0);
}

Tensor Linear::operator()(const Tensor& x) const {
  return add(matmul(x, w_), b_);
}

Mlp::Mlp(ParameterStore& ps, const std::string& name,
         const std::vector<int>& dims, bool zero_init_last) {
  if (dims.size() < 2) {
    throw std::invalid_argument("mlp needs at least an input and output dim");
  }
  for (size_t i = 0; i + 1 < dims.size(); ++i) {
    const bool last = i + 2 == dims.size();
    layers_.emplace_back(ps, name + ".l" + std::to_string(i), dims[i],
                         dims[i + 1], last && zero_init_last);
  }
}

Tensor Mlp::operator()(Tensor x) const {
  for (size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i](x);
    if (i + 1 < layers_.size()) x = silu(x);
  }
  return x;
}

LayerNorm::LayerNorm(ParameterStore& ps, const std::string& name, int dim) {
  gamma_ = ps.add_constant(name + ".gamma", {dim}, 1.0);
  beta_ = ps.add_constant(name + ".beta", {dim}, 0.0);
}

Tensor LayerNorm::operator()(const Tensor& x) const {
  return layer_norm(x, gamma_, beta_);
}

std::vector<int64_t> pair_rows_i(int n) {
  std::vector<int64_t> out(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[static_cast<size_t>(i) * n + j] = i;
  return out;
}

std::vector<int64_t> pair_rows_j(int n) {
  std::vector<int64_t> out(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[static_cast<size_t>(i) * n + j] = j;
  return out;
}

std::vector<int64_t> pair_transpose(int n) {
  std::vector<int64_t> out(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out[static_cast<size_t>(i) * n + j] = static_cast<int64_t>(j) * n + i;
  return out;
}

Tensor com_project_t(const Tensor& R) { return sub(R, mean(R, 0, true)); }

Tensor pair_descriptors(const Tensor& R, double delta) {
  if (R.rank() != 2 || R.dim(1) != 3) {
    throw std::invalid_argument("pair_descriptors expects [n,3] coordinates");
  }
  const int n = static_cast<int>(R.dim(0));
  const double d2 = delta * delta;

  Tensor ri = permute_rows(R, pair_rows_i(n));  // [n^2, 3]
  Tensor rj = permute_rows(R, pair_rows_j(n));
  Tensor diff = ri - rj;
  Tensor dist = sqrt(sum(diff * diff, 1, true) + d2);  // [n^2, 1]

  Tensor norms = sqrt(sum(R * R, 1, true) + d2);  // [n, 1]
  Tensor ni = permute_rows(norms, pair_rows_i(n));
  Tensor nj = permute_rows(norms, pair_rows_j(n));

  Tensor dots = sum(ri * rj, 1, true);
  Tensor cos = dots / (ni * nj + delta);

  return concat({dist, ni, nj, cos}, 1);  // [n^2, 4]
}

Tensor e3norm(const Tensor& R, const Tensor& gamma, double delta) {
  Tensor ms = mean(sum(R * R, 1, true), 0, true);  // [1, 1]
  Tensor rms = sqrt(ms);
  return mul(R, gamma) / (rms + delta);
}

PosMlp::PosMlp(ParameterStore& ps, const std::string& name, int hidden) {
  gate_ = Mlp(ps, name + ".gate", {1, hidden, 1}, /*zero_init_last=*/true);
}

Tensor PosMlp::operator()(const Tensor& R, double delta) const {
  Tensor sq = sum(R * R, 1, true);          // [n, 1]
  Tensor norm = sqrt(sq + delta * delta);   // guarded at the origin
  Tensor dirs = R / (norm + delta);
  return com_project_t(gate_(sq) * dirs);
}

PnaPool::PnaPool(ParameterStore& ps, const std::string& name, int in_dim,
                 int out_dim)
    : lin_(ps, name + ".lin", 4 * in_dim, out_dim), in_dim_(in_dim) {}

Tensor pair_pool_stats(const Tensor& pairwise, int n) {
  if (pairwise.rank() != 2 || pairwise.dim(0) != int64_t(n) * n) {
    throw std::invalid_argument("pair pooling expects [n*n, d] features");
  }
  const int d = static_cast<int>(pairwise.dim(1));
  Tensor grid = reshape(pairwise, {n, n, d});
  Tensor m = mean(grid, 1);                   // [n, d]
  Tensor lo = min(grid, 1);
  Tensor hi = max(grid, 1);
  Tensor sd;
  if (n == 1) {
    // A single neighbor has zero spread identically, so the exact constant
    // (with its exactly-zero gradient) replaces the guarded formula.
    sd = Tensor::zeros({1, d});
  } else {
    Tensor var = mean(grid * grid, 1) - m * m;  // population variance
    sd = sqrt(relu(var) + 1e-10);               // keeps the gradient bounded
  }
  return concat({m, lo, hi, sd}, 1);
}

Tensor PnaPool::operator()(const Tensor& pairwise, int n) const {
  if (pairwise.dim(1) != in_dim_) {
    throw std::invalid_argument("pna pool feature width mismatch");
  }
  return lin_(pair_pool_stats(pairwise, n));
}

Tensor timestep_embedding(int t, int dim) {
  if (dim <= 0 || dim % 2 != 0) {
    throw std::invalid_argument("timestep embedding dim must be positive and even");
  }
  std::vector<double> v(static_cast<size_t>(dim));
  const int half = dim / 2;
  for (int k = 0; k < half; ++k) {
    const double freq = std::pow(10000.0, -double(k) / double(half));
    v[static_cast<size_t>(2 * k)] = std::sin(double(t) * freq);
    v[static_cast<size_t>(2 * k + 1)] = std::cos(double(t) * freq);
  }
  return Tensor::from_data({1, dim}, std::move(v));
}

}  // namespace midi::denoiser
