#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "drugclip/error.hpp"
#include "drugclip/tensor.hpp"

namespace drugclip {

class Tape;

// Handle to a node on a tape. Cheap to copy; the tape owns all storage.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;
};

using BackwardFn = std::function<void(Tape&)>;

// Reverse-mode gradient tape. Ops append nodes in execution order; backward
// replays them in exact reverse order, accumulating gradients additively at
// fan-out. One tape per training step; not shared across threads.
class Tape {
 public:
  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool grad_enabled() const { return grad_enabled_; }
  std::size_t size() const { return nodes_.size(); }

  Var push(Tensor value) { return push(std::move(value), BackwardFn{}); }

  Var push(Tensor value, BackwardFn backward) {
    Node node;
    if (grad_enabled_) {
      node.grad = value.zeros_like();
      node.backward = std::move(backward);
    }
    node.value = std::move(value);
    nodes_.push_back(std::move(node));
    return Var{this, nodes_.size() - 1};
  }

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  const Tensor& grad(Var v) const { return nodes_[v.id].grad; }
  Tensor& grad_ref(std::size_t id) { return nodes_[id].grad; }

  // Seeds d(loss)/d(loss) = 1 and walks the tape backwards from `loss`.
  void backward(Var loss);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
  bool grad_enabled_;
};

// Differentiable op set. All ops validate shapes (ShapeMismatch) and reject
// non-finite forward results (NumericalError).
namespace ag {

Var constant(Tape& tape, Tensor value);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);              // elementwise
Var scale_const(Var a, double c);
Var scale(Var s, Var v);            // scalar node times tensor node

Var matvec(Var w, Var x);           // (m x n) . (n) -> (m)
Var linear(Var w, Var b, Var x);    // w . x + b

Var concat(std::span<const Var> parts);      // vectors/scalars -> vector
Var sum(std::span<const Var> terms);         // same-shape elementwise sum
Var mean(std::span<const Var> terms);

Var relu(Var x);
Var tanh(Var x);
Var sigmoid(Var x);
Var log(Var x);
Var softmax(Var x);                 // vector -> vector

Var dot(Var u, Var v);              // -> scalar
Var cosine(Var u, Var v);           // -> scalar, norms floored at 1e-12
Var sum_elements(Var x);            // -> scalar
Var element(Var v, std::size_t i);  // -> scalar
Var row(Var m, std::size_t r);      // matrix row -> vector
Var stack_rows(std::span<const Var> rows);   // vectors -> matrix

// Mean over all entries of -[y*log(sigmoid(s)) + (1-y)*log(1-sigmoid(s))],
// log arguments floored at 1e-12. y entries must be 0 or 1.
Var bce_mean(Var scores, const Tensor& labels);

}  // namespace ag
}  // namespace drugclip
