#ifndef COVPARSE_NN_GRAPH_H_
#define COVPARSE_NN_GRAPH_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "covparse/nn/tensor.h"

namespace covparse::nn {

// Handle to a vector-valued node of a Graph.
struct Var {
  std::uint32_t index = 0;
};

// Operation tape for reverse-mode differentiation. Every operation appends
// a node; backward() walks the tape in reverse and accumulates parameter
// gradients into the Gradients object given at construction (if any).
// A graph without Gradients is a pure forward evaluator and only reads the
// parameter store, so several graphs may share one store across threads.
class Graph {
 public:
  explicit Graph(const ParameterStore& store, Gradients* grads = nullptr);

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var input(std::vector<double> values);
  Var zeros(std::size_t n);
  // The whole parameter, flattened.
  Var param(ParamId id);
  // One row of a 2-d parameter.
  Var lookup(ParamId table, std::size_t row);

  // w * x + b
  Var affine(ParamId w, Var x, ParamId b);
  // w1 * x1 + w2 * x2 + b
  Var affine(ParamId w1, Var x1, ParamId w2, Var x2, ParamId b);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var add_scalar(Var a, double c);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var concat(std::span<const Var> parts);
  Var slice(Var a, std::size_t offset, std::size_t length);
  Var pick(Var a, std::size_t index);
  // Elementwise sum of equally sized nodes.
  Var sum(std::span<const Var> parts);
  Var sum_elements(Var a);

  std::span<const double> value(Var v) const { return nodes_[v.index].value; }
  double scalar(Var v) const { return nodes_[v.index].value.at(0); }
  std::size_t dim(Var v) const { return nodes_[v.index].value.size(); }
  // Gradient of the last backward() root with respect to `v` (empty when
  // `v` did not influence the root).
  std::span<const double> grad(Var v) const { return nodes_[v.index].grad; }

  // `root` must be a scalar node.
  void backward(Var root);

  std::size_t node_count() const { return nodes_.size(); }
  const ParameterStore& store() const { return store_; }

 private:
  struct Node {
    std::vector<double> value;
    std::vector<double> grad;
    std::function<void(Graph&, const Node&)> backward;
  };

  Var push(std::vector<double> value, std::function<void(Graph&, const Node&)> backward);
  std::vector<double>& grad_of(Var v);
  Tensor* param_grad(ParamId id);
  void check_same_dim(Var a, Var b, const char* op) const;

  const ParameterStore& store_;
  Gradients* grads_;
  std::vector<Node> nodes_;
};

}  // namespace covparse::nn

#endif  // COVPARSE_NN_GRAPH_H_
