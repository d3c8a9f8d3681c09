// SPDX-License-Identifier: Apache-2.0

#include "midi/numkit/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace midi::numkit {

namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

int norm_axis(int axis, int rank) {
  int a = axis < 0 ? axis + rank : axis;
  if (a < 0 || a >= rank)
    throw std::invalid_argument("axis " + std::to_string(axis) +
                                " out of range for rank " +
                                std::to_string(rank));
  return a;
}

// Strides of `shape` aligned right against an out_rank-dim result, with
// stride 0 on broadcast (size-1 or missing) dims.
std::vector<int64_t> bcast_strides(const Shape& shape, const Shape& out) {
  int out_rank = static_cast<int>(out.size());
  int rank = static_cast<int>(shape.size());
  std::vector<int64_t> strides(static_cast<size_t>(out_rank), 0);
  int64_t s = 1;
  for (int i = rank - 1; i >= 0; --i) {
    int oi = i + (out_rank - rank);
    if (shape[static_cast<size_t>(i)] != 1) strides[static_cast<size_t>(oi)] = s;
    s *= shape[static_cast<size_t>(i)];
  }
  return strides;
}

// Visits every element of the broadcast result; f(out_i, a_i, b_i).
template <class F>
void for_each_bcast(const Shape& out, const Shape& ash, const Shape& bsh,
                    F&& f) {
  int rank = static_cast<int>(out.size());
  int64_t total = shape_numel(out);
  if (rank == 0) {
    f(0, 0, 0);
    return;
  }
  std::vector<int64_t> a_str = bcast_strides(ash, out);
  std::vector<int64_t> b_str = bcast_strides(bsh, out);
  std::vector<int64_t> idx(static_cast<size_t>(rank), 0);
  int64_t a_off = 0, b_off = 0;
  for (int64_t i = 0; i < total; ++i) {
    f(i, a_off, b_off);
    for (int d = rank - 1; d >= 0; --d) {
      auto du = static_cast<size_t>(d);
      idx[du]++;
      a_off += a_str[du];
      b_off += b_str[du];
      if (idx[du] < out[du]) break;
      a_off -= a_str[du] * out[du];
      b_off -= b_str[du] * out[du];
      idx[du] = 0;
    }
  }
}

enum class BinKind { Add, Sub, Mul, Div };

Tensor binary_op(const Tensor& a, const Tensor& b, BinKind kind) {
  Shape out_shape = broadcast_shapes(a.shape(), b.shape());
  int64_t n = shape_numel(out_shape);
  std::vector<double> out(static_cast<size_t>(n));
  auto av = a.data();
  auto bv = b.data();
  bool same = a.shape() == b.shape();
  if (same) {
    switch (kind) {
      case BinKind::Add:
        for (int64_t i = 0; i < n; ++i) out[i] = av[i] + bv[i];
        break;
      case BinKind::Sub:
        for (int64_t i = 0; i < n; ++i) out[i] = av[i] - bv[i];
        break;
      case BinKind::Mul:
        for (int64_t i = 0; i < n; ++i) out[i] = av[i] * bv[i];
        break;
      case BinKind::Div:
        for (int64_t i = 0; i < n; ++i) out[i] = av[i] / bv[i];
        break;
    }
  } else {
    for_each_bcast(out_shape, a.shape(), b.shape(),
                   [&](int64_t i, int64_t ia, int64_t ib) {
                     switch (kind) {
                       case BinKind::Add: out[i] = av[ia] + bv[ib]; break;
                       case BinKind::Sub: out[i] = av[ia] - bv[ib]; break;
                       case BinKind::Mul: out[i] = av[ia] * bv[ib]; break;
                       case BinKind::Div: out[i] = av[ia] / bv[ib]; break;
                     }
                   });
  }
  Shape ash = a.shape(), bsh = b.shape(), osh = out_shape;
  auto an = a.node_ptr();
  auto bn = b.node_ptr();
  return make_op(
      std::move(out_shape), std::move(out), {a, b},
      [kind, ash, bsh, osh, an, bn](Node& self, GradStore& store) {
        const std::vector<double>& g = store.grad(&self);
        std::vector<double>* ga =
            an->requires_grad ? &store.grad(an.get()) : nullptr;
        std::vector<double>* gb =
            bn->requires_grad ? &store.grad(bn.get()) : nullptr;
        const std::vector<double>& avv = an->value;
        const std::vector<double>& bvv = bn->value;
        for_each_bcast(osh, ash, bsh, [&](int64_t i, int64_t ia, int64_t ib) {
          switch (kind) {
            case BinKind::Add:
              if (ga) (*ga)[ia] += g[i];
              if (gb) (*gb)[ib] += g[i];
              break;
            case BinKind::Sub:
              if (ga) (*ga)[ia] += g[i];
              if (gb) (*gb)[ib] -= g[i];
              break;
            case BinKind::Mul:
              if (ga) (*ga)[ia] += g[i] * bvv[ib];
              if (gb) (*gb)[ib] += g[i] * avv[ia];
              break;
            case BinKind::Div: {
              double inv = 1.0 / bvv[ib];
              if (ga) (*ga)[ia] += g[i] * inv;
              if (gb) (*gb)[ib] -= g[i] * avv[ia] * inv * inv;
              break;
            }
          }
        });
      });
}

enum class UnKind { Relu, Silu, Sigmoid, Exp, Log, Sqrt };

Tensor unary_op(const Tensor& x, UnKind kind) {
  auto xv = x.data();
  int64_t n = x.numel();
  std::vector<double> out(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    double v = xv[i];
    switch (kind) {
      case UnKind::Relu: out[i] = v > 0 ? v : 0.0; break;
      case UnKind::Silu: out[i] = v / (1.0 + std::exp(-v)); break;
      case UnKind::Sigmoid: out[i] = 1.0 / (1.0 + std::exp(-v)); break;
      case UnKind::Exp: out[i] = std::exp(v); break;
      case UnKind::Log:
        if (v < 0) throw std::domain_error("log of negative value");
        out[i] = std::log(v);
        break;
      case UnKind::Sqrt:
        if (v < 0) throw std::domain_error("sqrt of negative value");
        out[i] = std::sqrt(v);
        break;
    }
  }
  auto xn = x.node_ptr();
  return make_op(x.shape(), std::move(out), {x},
                 [kind, xn](Node& self, GradStore& store) {
                   const std::vector<double>& g = store.grad(&self);
                   std::vector<double>& gx = store.grad(xn.get());
                   const std::vector<double>& xv = xn->value;
                   const std::vector<double>& yv = self.value;
                   for (size_t i = 0; i < g.size(); ++i) {
                     switch (kind) {
                       case UnKind::Relu:
                         gx[i] += xv[i] > 0 ? g[i] : 0.0;
                         break;
                       case UnKind::Silu: {
                         double s = 1.0 / (1.0 + std::exp(-xv[i]));
                         gx[i] += g[i] * s * (1.0 + xv[i] * (1.0 - s));
                         break;
                       }
                       case UnKind::Sigmoid:
                         gx[i] += g[i] * yv[i] * (1.0 - yv[i]);
                         break;
                       case UnKind::Exp:
                         gx[i] += g[i] * yv[i];
                         break;
                       case UnKind::Log:
                         gx[i] += g[i] / xv[i];
                         break;
                       case UnKind::Sqrt:
                         gx[i] += g[i] * 0.5 / yv[i];
                         break;
                     }
                   }
                 });
}

// outer/axis/inner decomposition for axis-wise ops.
struct AxisSplit {
  int64_t outer, n, inner;
};

AxisSplit axis_split(const Shape& s, int axis) {
  AxisSplit sp{1, s[static_cast<size_t>(axis)], 1};
  for (int i = 0; i < axis; ++i) sp.outer *= s[static_cast<size_t>(i)];
  for (size_t i = static_cast<size_t>(axis) + 1; i < s.size(); ++i)
    sp.inner *= s[i];
  return sp;
}

Shape reduced_shape(const Shape& s, int axis, bool keepdims) {
  Shape out;
  for (int i = 0; i < static_cast<int>(s.size()); ++i) {
    if (i == axis) {
      if (keepdims) out.push_back(1);
    } else {
      out.push_back(s[static_cast<size_t>(i)]);
    }
  }
  if (out.empty()) out.push_back(1);
  return out;
}

enum class RedKind { Sum, Mean, Max, Min };

Tensor reduce_op(const Tensor& x, int axis_in, bool keepdims, RedKind kind) {
  int axis = norm_axis(axis_in, x.rank());
  AxisSplit sp = axis_split(x.shape(), axis);
  Shape out_shape = reduced_shape(x.shape(), axis, keepdims);
  auto xv = x.data();
  std::vector<double> out(static_cast<size_t>(sp.outer * sp.inner));
  std::vector<int64_t> arg;  // winning input index for max/min
  bool extremum = kind == RedKind::Max || kind == RedKind::Min;
  if (extremum) arg.resize(out.size());
  for (int64_t o = 0; o < sp.outer; ++o) {
    for (int64_t in = 0; in < sp.inner; ++in) {
      int64_t oi = o * sp.inner + in;
      int64_t base = o * sp.n * sp.inner + in;
      if (extremum) {
        double best = xv[base];
        int64_t best_i = base;
        for (int64_t k = 1; k < sp.n; ++k) {
          double v = xv[base + k * sp.inner];
          bool better = kind == RedKind::Max ? v > best : v < best;
          if (better) {
            best = v;
            best_i = base + k * sp.inner;
          }
        }
        out[oi] = best;
        arg[oi] = best_i;
      } else {
        double acc = 0.0;
        for (int64_t k = 0; k < sp.n; ++k) acc += xv[base + k * sp.inner];
        out[oi] = kind == RedKind::Mean ? acc / static_cast<double>(sp.n) : acc;
      }
    }
  }
  auto xn = x.node_ptr();
  double scale = kind == RedKind::Mean ? 1.0 / static_cast<double>(sp.n) : 1.0;
  return make_op(
      std::move(out_shape), std::move(out), {x},
      [sp, xn, kind, scale, arg](Node& self, GradStore& store) {
        const std::vector<double>& g = store.grad(&self);
        std::vector<double>& gx = store.grad(xn.get());
        if (kind == RedKind::Max || kind == RedKind::Min) {
          for (size_t oi = 0; oi < g.size(); ++oi) gx[arg[oi]] += g[oi];
          return;
        }
        for (int64_t o = 0; o < sp.outer; ++o)
          for (int64_t in = 0; in < sp.inner; ++in) {
            double gv = g[o * sp.inner + in] * scale;
            int64_t base = o * sp.n * sp.inner + in;
            for (int64_t k = 0; k < sp.n; ++k) gx[base + k * sp.inner] += gv;
          }
      });
}

}  // namespace

Shape broadcast_shapes(const Shape& a, const Shape& b) {
  int rank = std::max(a.size(), b.size());
  Shape out(static_cast<size_t>(rank));
  for (int i = 0; i < rank; ++i) {
    int64_t da = i < rank - static_cast<int>(a.size())
                     ? 1
                     : a[static_cast<size_t>(i - (rank - a.size()))];
    int64_t db = i < rank - static_cast<int>(b.size())
                     ? 1
                     : b[static_cast<size_t>(i - (rank - b.size()))];
    if (da != db && da != 1 && db != 1)
      throw std::invalid_argument("shapes " + shape_str(a) + " and " +
                                  shape_str(b) + " are not broadcastable");
    out[static_cast<size_t>(i)] = std::max(da, db);
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) { return binary_op(a, b, BinKind::Add); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary_op(a, b, BinKind::Sub); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary_op(a, b, BinKind::Mul); }
Tensor div(const Tensor& a, const Tensor& b) { return binary_op(a, b, BinKind::Div); }

Tensor affine(const Tensor& x, double k, double c) {
  auto xv = x.data();
  std::vector<double> out(static_cast<size_t>(x.numel()));
  for (size_t i = 0; i < out.size(); ++i) out[i] = k * xv[i] + c;
  auto xn = x.node_ptr();
  return make_op(x.shape(), std::move(out), {x},
                 [k, xn](Node& self, GradStore& store) {
                   const std::vector<double>& g = store.grad(&self);
                   std::vector<double>& gx = store.grad(xn.get());
                   for (size_t i = 0; i < g.size(); ++i) gx[i] += k * g[i];
                 });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2)
    throw std::invalid_argument("matmul expects rank-2 tensors, got " +
                                shape_str(a.shape()) + " x " +
                                shape_str(b.shape()));
  int64_t m = a.dim(0), k = a.dim(1), k2 = b.dim(0), n = b.dim(1);
  if (k != k2)
    throw std::invalid_argument("matmul inner dimensions differ: " +
                                shape_str(a.shape()) + " x " +
                                shape_str(b.shape()));
  std::vector<double> out(static_cast<size_t>(m * n));
  {
    ConstMapMat A(a.data().data(), m, k);
    ConstMapMat B(b.data().data(), k, n);
    MapMat C(out.data(), m, n);
    C.noalias() = A * B;
  }
  auto an = a.node_ptr();
  auto bn = b.node_ptr();
  return make_op(
      {m, n}, std::move(out), {a, b},
      [m, k, n, an, bn](Node& self, GradStore& store) {
        const std::vector<double>& g = store.grad(&self);
        ConstMapMat G(g.data(), m, n);
        if (an->requires_grad) {
          ConstMapMat B(bn->value.data(), k, n);
          MapMat GA(store.grad(an.get()).data(), m, k);
          GA.noalias() += G * B.transpose();
        }
        if (bn->requires_grad) {
          ConstMapMat A(an->value.data(), m, k);
          MapMat GB(store.grad(bn.get()).data(), k, n);
          GB.noalias() += A.transpose() * G;
        }
      });
}

Tensor transpose2d(const Tensor& x) {
  if (x.rank() != 2)
    throw std::invalid_argument("transpose2d expects a rank-2 tensor");
  int64_t r = x.dim(0), c = x.dim(1);
  std::vector<double> out(static_cast<size_t>(r * c));
  auto xv = x.data();
  for (int64_t i = 0; i < r; ++i)
    for (int64_t j = 0; j < c; ++j) out[j * r + i] = xv[i * c + j];
  auto xn = x.node_ptr();
  return make_op({c, r}, std::move(out), {x},
                 [r, c, xn](Node& self, GradStore& store) {
                   const std::vector<double>& g = store.grad(&self);
                   std::vector<double>& gx = store.grad(xn.get());
                   for (int64_t j = 0; j < c; ++j)
                     for (int64_t i = 0; i < r; ++i)
                       gx[i * c + j] += g[j * r + i];
                 });
}

Tensor relu(const Tensor& x) { return unary_op(x, UnKind::Relu); }
Tensor silu(const Tensor& x) { return unary_op(x, UnKind::Silu); }
Tensor sigmoid(const Tensor& x) { return unary_op(x, UnKind::Sigmoid); }
Tensor exp(const Tensor& x) { return unary_op(x, UnKind::Exp); }
Tensor log(const Tensor& x) { return unary_op(x, UnKind::Log); }
Tensor sqrt(const Tensor& x) { return unary_op(x, UnKind::Sqrt); }

Tensor softmax(const Tensor& x, int axis_in) {
  int axis = norm_axis(axis_in, x.rank());
  AxisSplit sp = axis_split(x.shape(), axis);
  auto xv = x.data();
  std::vector<double> out(static_cast<size_t>(x.numel()));
  for (int64_t o = 0; o < sp.outer; ++o)
    for (int64_t in = 0; in < sp.inner; ++in) {
      int64_t base = o * sp.n * sp.inner + in;
      double mx = -std::numeric_limits<double>::infinity();
      for (int64_t k = 0; k < sp.n; ++k)
        mx = std::max(mx, xv[base + k * sp.inner]);
      double z = 0.0;
      for (int64_t k = 0; k < sp.n; ++k) {
        double e = std::exp(xv[base + k * sp.inner] - mx);
        out[base + k * sp.inner] = e;
        z += e;
      }
      for (int64_t k = 0; k < sp.n; ++k) out[base + k * sp.inner] /= z;
    }
  auto xn = x.node_ptr();
  return make_op(x.shape(), std::move(out), {x},
                 [sp, xn](Node& self, GradStore& store) {
                   const std::vector<double>& g = store.grad(&self);
                   std::vector<double>& gx = store.grad(xn.get());
                   const std::vector<double>& p = self.value;
                   for (int64_t o = 0; o < sp.outer; ++o)
                     for (int64_t in = 0; in < sp.inner; ++in) {
                       int64_t base = o * sp.n * sp.inner + in;
                       double dot = 0.0;
                       for (int64_t k = 0; k < sp.n; ++k) {
                         int64_t i = base + k * sp.inner;
                         dot += g[i] * p[i];
                       }
                       for (int64_t k = 0; k < sp.n; ++k) {
                         int64_t i = base + k * sp.inner;
                         gx[i] += p[i] * (g[i] - dot);
                       }
                     }
                 });
}

Tensor sum(const Tensor& x) {
  auto xv = x.data();
  double acc = 0.0;
  for (double v : xv) acc += v;
  auto xn = x.node_ptr();
  return make_op({1}, {acc}, {x}, [xn](Node& self, GradStore& store) {
    double g = store.grad(&self)[0];
    std::vector<double>& gx = store.grad(xn.get());
    for (double& v : gx) v += g;
  });
}

Tensor sum(const Tensor& x, int axis, bool keepdims) {
  return reduce_op(x, axis, keepdims, RedKind::Sum);
}
Tensor mean(const Tensor& x, int axis, bool keepdims) {
  return reduce_op(x, axis, keepdims, RedKind::Mean);
}
Tensor max(const Tensor& x, int axis, bool keepdims) {
  return reduce_op(x, axis, keepdims, RedKind::Max);
}
Tensor min(const Tensor& x, int axis, bool keepdims) {
  return reduce_op(x, axis, keepdims, RedKind::Min);
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel())
    throw std::invalid_argument("reshape to " + shape_str(shape) +
                                " changes element count of " +
                                shape_str(x.shape()));
  std::vector<double> out(x.data().begin(), x.data().end());
  auto xn = x.node_ptr();
  return make_op(std::move(shape), std::move(out), {x},
                 [xn](Node& self, GradStore& store) {
                   const std::vector<double>& g = store.grad(&self);
                   std::vector<double>& gx = store.grad(xn.get());
                   for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
                 });
}

Tensor concat(const std::vector<Tensor>& xs, int axis_in) {
  if (xs.empty()) throw std::invalid_argument("concat of zero tensors");
  int axis = norm_axis(axis_in, xs[0].rank());
  Shape out_shape = xs[0].shape();
  int64_t axis_total = 0;
  for (const Tensor& t : xs) {
    if (t.rank() != xs[0].rank())
      throw std::invalid_argument("concat rank mismatch");
    for (int d = 0; d < t.rank(); ++d)
      if (d != axis && t.dim(d) != xs[0].dim(d))
        throw std::invalid_argument("concat shape mismatch: " +
                                    shape_str(t.shape()) + " vs " +
                                    shape_str(xs[0].shape()));
    axis_total += t.dim(axis);
  }
  out_shape[static_cast<size_t>(axis)] = axis_total;
  AxisSplit osp = axis_split(out_shape, axis);
  std::vector<double> out(static_cast<size_t>(shape_numel(out_shape)));
  std::vector<int64_t> offsets;  // start of each input along the axis
  {
    int64_t off = 0;
    for (const Tensor& t : xs) {
      offsets.push_back(off);
      auto tv = t.data();
      int64_t tn = t.dim(axis);
      for (int64_t o = 0; o < osp.outer; ++o)
        for (int64_t k = 0; k < tn; ++k)
          for (int64_t in = 0; in < osp.inner; ++in)
            out[(o * osp.n + off + k) * osp.inner + in] =
                tv[(o * tn + k) * osp.inner + in];
      off += tn;
    }
  }
  std::vector<std::shared_ptr<Node>> nodes;
  std::vector<int64_t> axis_sizes;
  for (const Tensor& t : xs) {
    nodes.push_back(t.node_ptr());
    axis_sizes.push_back(t.dim(axis));
  }
  return make_op(
      std::move(out_shape), std::move(out), xs,
      [osp, nodes, offsets, axis_sizes](Node& self, GradStore& store) {
        const std::vector<double>& g = store.grad(&self);
        for (size_t p = 0; p < nodes.size(); ++p) {
          if (!nodes[p]->requires_grad) continue;
          std::vector<double>& gx = store.grad(nodes[p].get());
          int64_t tn = axis_sizes[p], off = offsets[p];
          for (int64_t o = 0; o < osp.outer; ++o)
            for (int64_t k = 0; k < tn; ++k)
              for (int64_t in = 0; in < osp.inner; ++in)
                gx[(o * tn + k) * osp.inner + in] +=
                    g[(o * osp.n + off + k) * osp.inner + in];
        }
      });
}

Tensor slice(const Tensor& x, int axis_in, int64_t begin, int64_t end) {
  int axis = norm_axis(axis_in, x.rank());
  int64_t n = x.dim(axis);
  if (begin < 0 || end > n || begin >= end)
    throw std::invalid_argument("slice [" + std::to_string(begin) + "," +
                                std::to_string(end) + ") out of range for axis size " +
                                std::to_string(n));
  AxisSplit sp = axis_split(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape[static_cast<size_t>(axis)] = end - begin;
  int64_t len = end - begin;
  std::vector<double> out(static_cast<size_t>(sp.outer * len * sp.inner));
  auto xv = x.data();
  for (int64_t o = 0; o < sp.outer; ++o)
    for (int64_t k = 0; k < len; ++k)
      for (int64_t in = 0; in < sp.inner; ++in)
        out[(o * len + k) * sp.inner + in] =
            xv[(o * sp.n + begin + k) * sp.inner + in];
  auto xn = x.node_ptr();
  return make_op(std::move(out_shape), std::move(out), {x},
                 [sp, len, begin, xn](Node& self, GradStore& store) {
                   const std::vector<double>& g = store.grad(&self);
                   std::vector<double>& gx = store.grad(xn.get());
                   for (int64_t o = 0; o < sp.outer; ++o)
                     for (int64_t k = 0; k < len; ++k)
                       for (int64_t in = 0; in < sp.inner; ++in)
                         gx[(o * sp.n + begin + k) * sp.inner + in] +=
                             g[(o * len + k) * sp.inner + in];
                 });
}

Tensor broadcast_to(const Tensor& x, Shape shape) {
  Shape check = broadcast_shapes(x.shape(), shape);
  if (check != shape)
    throw std::invalid_argument("cannot broadcast " + shape_str(x.shape()) +
                                " to " + shape_str(shape));
  int64_t n = shape_numel(shape);
  std::vector<double> out(static_cast<size_t>(n));
  auto xv = x.data();
  Shape xsh = x.shape();
  for_each_bcast(shape, xsh, xsh,
                 [&](int64_t i, int64_t ix, int64_t) { out[i] = xv[ix]; });
  auto xn = x.node_ptr();
  Shape osh = shape;
  return make_op(std::move(shape), std::move(out), {x},
                 [osh, xsh, xn](Node& self, GradStore& store) {
                   const std::vector<double>& g = store.grad(&self);
                   std::vector<double>& gx = store.grad(xn.get());
                   for_each_bcast(osh, xsh, xsh,
                                  [&](int64_t i, int64_t ix, int64_t) {
                                    gx[ix] += g[i];
                                  });
                 });
}

Tensor permute_rows(const Tensor& x, std::vector<int64_t> perm) {
  if (x.rank() < 1) throw std::invalid_argument("permute_rows needs rank >= 1");
  int64_t rows = x.dim(0);
  int64_t row_len = x.numel() / std::max<int64_t>(rows, 1);
  Shape out_shape = x.shape();
  out_shape[0] = static_cast<int64_t>(perm.size());
  std::vector<double> out(static_cast<size_t>(row_len) * perm.size());
  auto xv = x.data();
  for (size_t i = 0; i < perm.size(); ++i) {
    int64_t src = perm[i];
    if (src < 0 || src >= rows)
      throw std::invalid_argument("permute_rows index out of range");
    std::copy_n(xv.data() + src * row_len, row_len,
                out.data() + static_cast<int64_t>(i) * row_len);
  }
  auto xn = x.node_ptr();
  return make_op(std::move(out_shape), std::move(out), {x},
                 [perm = std::move(perm), row_len, xn](Node& self,
                                                       GradStore& store) {
                   const std::vector<double>& g = store.grad(&self);
                   std::vector<double>& gx = store.grad(xn.get());
                   for (size_t i = 0; i < perm.size(); ++i) {
                     const double* gs = g.data() + static_cast<int64_t>(i) * row_len;
                     double* gd = gx.data() + perm[i] * row_len;
                     for (int64_t j = 0; j < row_len; ++j) gd[j] += gs[j];
                   }
                 });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps) {
  Tensor mu = mean(x, -1, true);
  Tensor xc = sub(x, mu);
  Tensor var = mean(mul(xc, xc), -1, true);
  Tensor denom = sqrt(var + eps);
  return add(mul(div(xc, denom), gamma), beta);
}

Tensor cosine_similarity(const Tensor& a, const Tensor& b, int axis,
                         double delta) {
  Tensor dot = sum(mul(a, b), axis);
  Tensor na = sqrt(sum(mul(a, a), axis));
  Tensor nb = sqrt(sum(mul(b, b), axis));
  return div(dot, mul(na, nb) + delta);
}

}  // namespace midi::numkit
