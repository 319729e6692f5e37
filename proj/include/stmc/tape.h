// Copyright 2026 STMC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STMC_TAPE_H_
#define STMC_TAPE_H_

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "stmc/ndarray.h"

namespace stmc {

// Trainable array plus its persistent gradient accumulator. Owned by the
// model (via ParameterStore); tapes reference parameters across steps.
template <typename T>
struct Parameter {
  std::string name;
  NdArray<T> value;
  NdArray<T> grad;

  void zero_grad() { grad.zero(); }
};

template <typename T>
class Tape;

// Lightweight handle to a tape node.
template <typename T>
struct Var {
  Tape<T>* tape = nullptr;
  int id = -1;

  bool valid() const { return tape != nullptr && id >= 0; }
  const NdArray<T>& value() const;
  const NdArray<T>& grad() const;
  const std::vector<int>& shape() const { return value().shape(); }
};

// Reverse-mode tape. Records one node per primitive application in
// execution order, which is a topological order of the (acyclic) graph.
// backward() visits each record exactly once, newest first, summing
// gradients at fan-out.
template <typename T>
class Tape {
 public:
  // Receives the node id whose output gradient is ready; pushes gradient
  // contributions into parent nodes via add_grad().
  using BackwardFn = std::function<void(Tape<T>&, int)>;

  struct Node {
    NdArray<T> value;
    NdArray<T> grad;  // allocated on first contribution
    std::vector<int> parents;
    BackwardFn backward;
    const char* op = "";
    bool needs_grad = false;
    Parameter<T>* param = nullptr;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf bound to a model parameter; backward() accumulates into param.grad.
  Var<T> leaf(Parameter<T>& param) {
    Node node;
    node.value = param.value;
    node.op = "leaf";
    node.needs_grad = true;
    node.param = &param;
    return push(std::move(node));
  }

  // Leaf with no gradient (inputs, targets, fixed tables).
  Var<T> constant(NdArray<T> value) {
    Node node;
    node.value = std::move(value);
    node.op = "const";
    node.needs_grad = false;
    return push(std::move(node));
  }

  // Leaf that wants a gradient but is not a model parameter (tests, probes).
  Var<T> input(NdArray<T> value) {
    Node node;
    node.value = std::move(value);
    node.op = "input";
    node.needs_grad = true;
    return push(std::move(node));
  }

  Var<T> emplace(NdArray<T> value, std::vector<int> parents, BackwardFn backward,
                 const char* op) {
    Node node;
    node.value = std::move(value);
    node.parents = std::move(parents);
    node.backward = std::move(backward);
    node.op = op;
    for (int p : node.parents) {
      if (nodes_[static_cast<size_t>(p)].needs_grad) {
        node.needs_grad = true;
        break;
      }
    }
    return push(std::move(node));
  }

  Node& node(int id) { return nodes_[static_cast<size_t>(id)]; }
  const Node& node(int id) const { return nodes_[static_cast<size_t>(id)]; }
  NdArray<T>& value(int id) { return nodes_[static_cast<size_t>(id)].value; }
  int size() const { return static_cast<int>(nodes_.size()); }

  bool needs_grad(int id) const { return nodes_[static_cast<size_t>(id)].needs_grad; }

  // Gradient buffer of a node, allocated (zeroed) on demand.
  NdArray<T>& grad(int id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.grad.empty()) n.grad = NdArray<T>(n.value.shape());
    return n.grad;
  }

  bool has_grad(int id) const { return !nodes_[static_cast<size_t>(id)].grad.empty(); }

  // Adds a contribution to a parent's gradient if that parent needs one.
  void add_grad(int id, const NdArray<T>& g) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (!n.needs_grad) return;
    if (n.grad.empty()) {
      n.grad = g;
    } else {
      n.grad.add_inplace(g);
    }
  }

  // Reverse sweep from a scalar root. Parameter leaves accumulate into
  // their persistent Parameter::grad buffers (callers zero between steps).
  void backward(Var<T> root) {
    STMC_CHECK(root.valid() && root.tape == this, "backward: foreign or invalid root");
    Node& r = nodes_[static_cast<size_t>(root.id)];
    STMC_CHECK_SHAPE(r.value.size() == 1,
                     "backward: root must be scalar, got " << shape_string(r.value.shape()));
    STMC_CHECK(r.needs_grad, "backward: root does not depend on any differentiable leaf");
    grad(root.id)[0] += T(1);
    for (int id = root.id; id >= 0; --id) {
      Node& n = nodes_[static_cast<size_t>(id)];
      if (!n.needs_grad || n.grad.empty()) continue;
      if (n.backward) n.backward(*this, id);
      if (n.param != nullptr) {
        if (n.param->grad.empty()) n.param->grad = NdArray<T>(n.param->value.shape());
        n.param->grad.add_inplace(n.grad);
      }
    }
  }

 private:
  Var<T> push(Node&& node) {
    nodes_.push_back(std::move(node));
    return Var<T>{this, static_cast<int>(nodes_.size()) - 1};
  }

  std::deque<Node> nodes_;
};

template <typename T>
const NdArray<T>& Var<T>::value() const {
  return tape->node(id).value;
}

template <typename T>
const NdArray<T>& Var<T>::grad() const {
  return tape->node(id).grad;
}

}  // namespace stmc

#endif  // STMC_TAPE_H_
