// SPDX-License-Identifier: Apache-2.0
//
// Differentiable tensor operations. Binary ops broadcast numpy-style;
// reductions and softmax take an axis (negative counts from the back).

#ifndef MIDI_NUMKIT_OPS_HPP
#define MIDI_NUMKIT_OPS_HPP

#include <vector>

#include "midi/numkit/tensor.hpp"

namespace midi::numkit {

Shape broadcast_shapes(const Shape& a, const Shape& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

// k * x + c, elementwise with scalar coefficients.
Tensor affine(const Tensor& x, double k, double c);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose2d(const Tensor& x);

Tensor relu(const Tensor& x);
Tensor silu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);   // negative input -> std::domain_error
Tensor sqrt(const Tensor& x);  // negative input -> std::domain_error

Tensor softmax(const Tensor& x, int axis);

Tensor sum(const Tensor& x);
Tensor sum(const Tensor& x, int axis, bool keepdims = false);
Tensor mean(const Tensor& x, int axis, bool keepdims = false);
Tensor max(const Tensor& x, int axis, bool keepdims = false);
Tensor min(const Tensor& x, int axis, bool keepdims = false);

Tensor reshape(const Tensor& x, Shape shape);
Tensor concat(const std::vector<Tensor>& xs, int axis);
Tensor slice(const Tensor& x, int axis, int64_t begin, int64_t end);
Tensor broadcast_to(const Tensor& x, Shape shape);

// Gathers rows of the first axis: out[i] = x[perm[i]]. perm need not be a
// permutation; repeated indices accumulate gradient.
Tensor permute_rows(const Tensor& x, std::vector<int64_t> perm);

// Composite helpers (built from the primitives above, so they stay on tape).

// Normalizes over the last axis; gamma and beta are [d] vectors.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps = 1e-5);

// sum(a*b, axis) / (|a| * |b| + delta), reducing over `axis`.
Tensor cosine_similarity(const Tensor& a, const Tensor& b, int axis,
                         double delta);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator+(const Tensor& a, double c) { return affine(a, 1.0, c); }
inline Tensor operator-(const Tensor& a, double c) { return affine(a, 1.0, -c); }
inline Tensor operator*(const Tensor& a, double k) { return affine(a, k, 0.0); }
inline Tensor operator*(double k, const Tensor& a) { return affine(a, k, 0.0); }
inline Tensor operator/(const Tensor& a, double k) { return affine(a, 1.0 / k, 0.0); }
inline Tensor operator-(const Tensor& a) { return affine(a, -1.0, 0.0); }

}  // namespace midi::numkit

#endif
