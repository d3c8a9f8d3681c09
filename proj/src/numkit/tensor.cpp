// SPDX-License-Identifier: Apache-2.0

#include "midi/numkit/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace midi::numkit {

namespace {
thread_local bool g_grad_enabled = true;
}

int64_t shape_numel(const Shape& s) {
  int64_t n = 1;
  for (int64_t d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) os << ',';
    os << s[i];
  }
  os << ']';
  return os.str();
}

std::vector<double>& NodeGradStore::grad(Node* n) {
  if (n->grad.empty()) n->grad.assign(n->value.size(), 0.0);
  return n->grad;
}

std::vector<double>& MapGradStore::grad(Node* n) {
  auto [it, inserted] = grads_.try_emplace(n);
  if (inserted) it->second.assign(n->value.size(), 0.0);
  return it->second;
}

const std::vector<double>* MapGradStore::find(const Node* n) const {
  auto it = grads_.find(n);
  return it == grads_.end() ? nullptr : &it->second;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double v, bool requires_grad) {
  auto n = std::make_shared<Node>();
  int64_t count = shape_numel(shape);
  n->shape = std::move(shape);
  n->value.assign(static_cast<size_t>(count), v);
  n->requires_grad = requires_grad;
  return Tensor(std::move(n));
}

Tensor Tensor::from_data(Shape shape, std::vector<double> data,
                         bool requires_grad) {
  if (shape_numel(shape) != static_cast<int64_t>(data.size()))
    throw std::invalid_argument("tensor data length " +
                                std::to_string(data.size()) +
                                " does not match shape " + shape_str(shape));
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(data);
  n->requires_grad = requires_grad;
  return Tensor(std::move(n));
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  return from_data({1}, {v}, requires_grad);
}

std::span<const double> Tensor::grad() const {
  if (node_->grad.empty())
    throw std::logic_error("tensor has no gradient (backward not run?)");
  return node_->grad;
}

void Tensor::zero_grad() {
  if (!node_->grad.empty())
    std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

double Tensor::item() const {
  if (numel() != 1)
    throw std::invalid_argument("item() requires a 1-element tensor, got " +
                                shape_str(shape()));
  return node_->value[0];
}

bool Tensor::has_nonfinite() const {
  for (double v : node_->value)
    if (!std::isfinite(v)) return true;
  return false;
}

namespace {

// Iterative post-order DFS. Tapes for a full denoiser loss run to tens of
// thousands of nodes, so recursion is off the table.
std::vector<Node*> topo_order(Node* root) {
  std::vector<Node*> order;
  std::unordered_map<Node*, bool> state;  // false = discovered, true = emitted
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(root, 0);
  state[root] = false;
  while (!stack.empty()) {
    auto& [node, next_child] = stack.back();
    if (next_child < node->parents.size()) {
      Node* child = node->parents[next_child++].get();
      auto it = state.find(child);
      if (it == state.end()) {
        state[child] = false;
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      state[node] = true;
      stack.pop_back();
    }
  }
  return order;  // children before parents-of-graph == leaves first
}

}  // namespace

void backward_into(const Tensor& loss, GradStore& store) {
  if (loss.numel() != 1)
    throw std::invalid_argument("backward requires a scalar loss, got shape " +
                                shape_str(loss.shape()));
  Node* root = loss.node();
  store.grad(root).assign(1, 1.0);
  std::vector<Node*> order = topo_order(root);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward_fn) n->backward_fn(*n, store);
  }
}

void backward(const Tensor& loss) {
  NodeGradStore store;
  backward_into(loss, store);
}

MapGradStore backward_collect(const Tensor& loss) {
  MapGradStore store;
  backward_into(loss, store);
  return store;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

Tensor make_op(Shape shape, std::vector<double> value,
               const std::vector<Tensor>& inputs,
               std::function<void(Node&, GradStore&)> backward_fn) {
  if (shape_numel(shape) != static_cast<int64_t>(value.size()))
    throw std::logic_error("op result size mismatch for shape " +
                           shape_str(shape));
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  bool rg = false;
  if (g_grad_enabled)
    for (const Tensor& t : inputs)
      if (t.requires_grad()) rg = true;
  n->requires_grad = rg;
  if (rg) {
    n->parents.reserve(inputs.size());
    for (const Tensor& t : inputs) n->parents.push_back(t.node_ptr());
    n->backward_fn = std::move(backward_fn);
  }
  return Tensor(std::move(n));
}

}  // namespace midi::numkit
