#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "orf/nn/tensor.hpp"

namespace orf::nn {

// A named parameter tensor with an accumulated gradient.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;

  Param() = default;
  Param(std::string n, size_t r, size_t c) : name(std::move(n)), value(r, c), grad(r, c) {}
  void zero_grad() { grad.fill(0.0); }
};

// Reverse-mode autodiff over a linear tape of tensor operations. One tape per
// forward pass; backward() accumulates into the grads of the Params touched by
// leaf(). All reductions run in a fixed order, so results are deterministic.
class Tape {
 public:
  using Var = int;

  Var leaf(Param& p);
  Var input(Tensor t);

  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var add(Var a, Var b);            // same shape
  Var sub(Var a, Var b);            // same shape
  Var mul(Var a, Var b);            // elementwise, same shape
  Var add_rowvec(Var a, Var bias);  // bias is 1 x n, broadcast over rows
  Var scale(Var a, double k);
  Var add_const(Var a, double c);
  Var relu(Var a);
  Var softmax_rows(Var a);
  Var mean_rows(Var a);                          // m x n -> 1 x n
  Var rows(Var table, std::vector<int> ids);     // V x e -> |ids| x e
  Var slice_cols(Var a, size_t c0, size_t c1);   // [c0, c1)
  Var concat_cols(const std::vector<Var>& parts);
  Var layer_norm_rows(Var a, Var gamma, Var beta);  // eps 1e-5
  Var pick(Var a, size_t r, size_t c);              // -> 1 x 1
  Var logsumexp_row(Var a);                          // 1 x n -> 1 x 1, max-shifted
  Var dot(Var a, Var b);   // flattened inner product -> 1 x 1
  Var norm(Var a);         // Frobenius norm -> 1 x 1
  Var div(Var a, Var b);   // elementwise, same shape
  Var add_many(const std::vector<Var>& vs);  // elementwise sum

  const Tensor& val(Var v) const { return nodes_[v].value; }
  const Tensor& grad_of(Var v) const { return nodes_[v].grad; }
  // Seeds d(out)/d(out) = 1 (out must be 1 x 1) and accumulates into Params.
  void backward(Var out);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(Tape&)> back;  // empty for leaves/inputs
    Param* param = nullptr;
  };

  Var push(Tensor value, std::function<void(Tape&)> back);
  Tensor& g(Var v) { return nodes_[v].grad; }

  std::vector<Node> nodes_;
  std::map<Param*, Var> leaves_;
  Var last_ = -1;  // node whose back() is currently running
};

}  // namespace orf::nn
