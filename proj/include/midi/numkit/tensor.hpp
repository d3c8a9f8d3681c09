// SPDX-License-Identifier: Apache-2.0
//
// Dense double-precision tensors with define-by-run reverse-mode autodiff.
// Each operation builds a node holding its value and, when gradients are
// required, a closure that routes upstream gradients to its parents. The
// graph is a shared-ptr DAG; backward() walks it once in reverse
// topological order.

#ifndef MIDI_NUMKIT_TENSOR_HPP
#define MIDI_NUMKIT_TENSOR_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace midi::numkit {

using Shape = std::vector<int64_t>;

int64_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

class GradStore;

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // allocated on first use, kept across backward calls
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&, GradStore&)> backward_fn;
};

// Where backward() accumulates gradients. The default store writes into each
// node's own grad buffer; a map-backed store keeps everything local so that
// independent graphs sharing leaf nodes can run backward on separate threads.
class GradStore {
 public:
  virtual ~GradStore() = default;
  // Zero-initialized to the node's element count on first access.
  virtual std::vector<double>& grad(Node* n) = 0;
};

class NodeGradStore final : public GradStore {
 public:
  std::vector<double>& grad(Node* n) override;
};

class MapGradStore final : public GradStore {
 public:
  std::vector<double>& grad(Node* n) override;
  const std::vector<double>* find(const Node* n) const;
  std::unordered_map<const Node*, std::vector<double>>& map() { return grads_; }

 private:
  std::unordered_map<const Node*, std::vector<double>> grads_;
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double v, bool requires_grad = false);
  static Tensor from_data(Shape shape, std::vector<double> data,
                          bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int rank() const { return static_cast<int>(node_->shape.size()); }
  int64_t dim(int i) const { return node_->shape[static_cast<size_t>(i)]; }
  int64_t numel() const { return static_cast<int64_t>(node_->value.size()); }

  std::span<const double> data() const { return node_->value; }
  // Only valid for leaves between passes; mutating an interior node breaks
  // gradients of graphs already built on top of it.
  std::span<double> mutable_data() { return node_->value; }

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const double> grad() const;
  void zero_grad();

  double item() const;

  // True if any element is NaN or +/-Inf.
  bool has_nonfinite() const;

  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& node_ptr() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Reverse sweep from a scalar loss, accumulating into each node's grad
// buffer. Repeated calls without zero_grad accumulate (gradients add up).
void backward(const Tensor& loss);

// Same sweep, but all gradients land in the returned store instead of the
// nodes themselves. Safe to call concurrently on graphs that share leaves.
MapGradStore backward_collect(const Tensor& loss);

void backward_into(const Tensor& loss, GradStore& store);

// Thread-local switch: while disabled, ops compute values but record no
// graph, so forward passes allocate nothing for autodiff.
bool grad_enabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

// Shared op builder: computes requires_grad from inputs and the thread-local
// grad mode, and only wires parents/backward_fn when a tape is needed.
Tensor make_op(Shape shape, std::vector<double> value,
               const std::vector<Tensor>& inputs,
               std::function<void(Node&, GradStore&)> backward_fn);

}  // namespace midi::numkit

#endif
