#include "covparse/nn/graph.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "covparse/error.h"

namespace covparse::nn {
namespace {

double sigmoid_of(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Graph::Graph(const ParameterStore& store, Gradients* grads) : store_(store), grads_(grads) {
  if (grads_ != nullptr && grads_->size() != store_.size()) {
    throw InvalidArgument("gradients do not match the parameter store");
  }
}

Var Graph::push(std::vector<double> value, std::function<void(Graph&, const Node&)> backward) {
#ifndef NDEBUG
  for (double v : value) {
    if (!std::isfinite(v)) throw std::logic_error("non-finite value in computation graph");
  }
#endif
  nodes_.push_back(Node{std::move(value), {}, std::move(backward)});
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

std::vector<double>& Graph::grad_of(Var v) {
  Node& node = nodes_[v.index];
  if (node.grad.empty()) node.grad.assign(node.value.size(), 0.0);
  return node.grad;
}

Tensor* Graph::param_grad(ParamId id) {
  if (grads_ == nullptr || !store_[id].trainable) return nullptr;
  return &(*grads_)[id];
}

void Graph::check_same_dim(Var a, Var b, const char* op) const {
  if (dim(a) != dim(b)) {
    throw InvalidArgument(std::string(op) + ": dimension mismatch " + std::to_string(dim(a)) +
                          " vs " + std::to_string(dim(b)));
  }
}

Var Graph::input(std::vector<double> values) { return push(std::move(values), nullptr); }

Var Graph::zeros(std::size_t n) { return push(std::vector<double>(n, 0.0), nullptr); }

Var Graph::param(ParamId id) {
  return push(store_.value(id).values, [id](Graph& g, const Node& self) {
    if (Tensor* pg = g.param_grad(id)) {
      for (std::size_t k = 0; k < self.grad.size(); ++k) pg->values[k] += self.grad[k];
    }
  });
}

Var Graph::lookup(ParamId table, std::size_t row) {
  const Tensor& t = store_.value(table);
  if (row >= t.rows()) {
    throw InvalidArgument("lookup row " + std::to_string(row) + " out of range for '" +
                          store_[table].name + "'");
  }
  auto r = t.row(row);
  return push(std::vector<double>(r.begin(), r.end()), [table, row](Graph& g, const Node& self) {
    if (Tensor* pg = g.param_grad(table)) {
      auto dst = pg->row(row);
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += self.grad[k];
    }
  });
}

Var Graph::affine(ParamId w, Var x, ParamId b) {
  const Tensor& W = store_.value(w);
  const Tensor& B = store_.value(b);
  const std::size_t rows = W.rows(), cols = W.cols();
  if (dim(x) != cols || B.size() != rows) {
    throw InvalidArgument("affine: '" + store_[w].name + "' is " + std::to_string(rows) + "x" +
                          std::to_string(cols) + ", input has " + std::to_string(dim(x)));
  }
  std::vector<double> out(B.values);
  const double* xv = nodes_[x.index].value.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* wr = W.values.data() + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * xv[c];
    out[r] += acc;
  }
  return push(std::move(out), [w, x, b](Graph& g, const Node& self) {
    const Tensor& W = g.store_.value(w);
    const std::size_t rows = W.rows(), cols = W.cols();
    const std::vector<double>& xv = g.nodes_[x.index].value;
    if (Tensor* gb = g.param_grad(b)) {
      for (std::size_t r = 0; r < rows; ++r) gb->values[r] += self.grad[r];
    }
    if (Tensor* gw = g.param_grad(w)) {
      for (std::size_t r = 0; r < rows; ++r) {
        const double gr = self.grad[r];
        if (gr == 0.0) continue;
        double* dst = gw->values.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) dst[c] += gr * xv[c];
      }
    }
    std::vector<double>& gx = g.grad_of(x);
    for (std::size_t r = 0; r < rows; ++r) {
      const double gr = self.grad[r];
      if (gr == 0.0) continue;
      const double* wr = W.values.data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) gx[c] += gr * wr[c];
    }
  });
}

Var Graph::affine(ParamId w1, Var x1, ParamId w2, Var x2, ParamId b) {
  Var first = affine(w1, x1, b);
  const Tensor& W = store_.value(w2);
  const std::size_t rows = W.rows(), cols = W.cols();
  if (dim(x2) != cols || rows != dim(first)) {
    throw InvalidArgument("affine: '" + store_[w2].name + "' is " + std::to_string(rows) + "x" +
                          std::to_string(cols) + ", input has " + std::to_string(dim(x2)));
  }
  std::vector<double> out(nodes_[first.index].value);
  const double* xv = nodes_[x2.index].value.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* wr = W.values.data() + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * xv[c];
    out[r] += acc;
  }
  return push(std::move(out), [first, w2, x2](Graph& g, const Node& self) {
    const Tensor& W = g.store_.value(w2);
    const std::size_t rows = W.rows(), cols = W.cols();
    std::vector<double>& gf = g.grad_of(first);
    for (std::size_t r = 0; r < rows; ++r) gf[r] += self.grad[r];
    const std::vector<double>& xv = g.nodes_[x2.index].value;
    if (Tensor* gw = g.param_grad(w2)) {
      for (std::size_t r = 0; r < rows; ++r) {
        const double gr = self.grad[r];
        if (gr == 0.0) continue;
        double* dst = gw->values.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) dst[c] += gr * xv[c];
      }
    }
    std::vector<double>& gx = g.grad_of(x2);
    for (std::size_t r = 0; r < rows; ++r) {
      const double gr = self.grad[r];
      if (gr == 0.0) continue;
      const double* wr = W.values.data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) gx[c] += gr * wr[c];
    }
  });
}

Var Graph::add(Var a, Var b) {
  check_same_dim(a, b, "add");
  std::vector<double> out(nodes_[a.index].value);
  const auto& bv = nodes_[b.index].value;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += bv[k];
  return push(std::move(out), [a, b](Graph& g, const Node& self) {
    auto& ga = g.grad_of(a);
    for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += self.grad[k];
    auto& gb = g.grad_of(b);
    for (std::size_t k = 0; k < gb.size(); ++k) gb[k] += self.grad[k];
  });
}

Var Graph::sub(Var a, Var b) {
  check_same_dim(a, b, "sub");
  std::vector<double> out(nodes_[a.index].value);
  const auto& bv = nodes_[b.index].value;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= bv[k];
  return push(std::move(out), [a, b](Graph& g, const Node& self) {
    auto& ga = g.grad_of(a);
    for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += self.grad[k];
    auto& gb = g.grad_of(b);
    for (std::size_t k = 0; k < gb.size(); ++k) gb[k] -= self.grad[k];
  });
}

Var Graph::mul(Var a, Var b) {
  check_same_dim(a, b, "mul");
  std::vector<double> out(nodes_[a.index].value);
  const auto& bv = nodes_[b.index].value;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= bv[k];
  return push(std::move(out), [a, b](Graph& g, const Node& self) {
    const auto& av = g.nodes_[a.index].value;
    const auto& bv = g.nodes_[b.index].value;
    auto& ga = g.grad_of(a);
    for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += self.grad[k] * bv[k];
    auto& gb = g.grad_of(b);
    for (std::size_t k = 0; k < gb.size(); ++k) gb[k] += self.grad[k] * av[k];
  });
}

Var Graph::add_scalar(Var a, double c) {
  std::vector<double> out(nodes_[a.index].value);
  for (double& v : out) v += c;
  return push(std::move(out), [a](Graph& g, const Node& self) {
    auto& ga = g.grad_of(a);
    for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += self.grad[k];
  });
}

Var Graph::tanh(Var a) {
  std::vector<double> out(nodes_[a.index].value);
  for (double& v : out) v = std::tanh(v);
  return push(std::move(out), [a](Graph& g, const Node& self) {
    auto& ga = g.grad_of(a);
    for (std::size_t k = 0; k < ga.size(); ++k) {
      ga[k] += self.grad[k] * (1.0 - self.value[k] * self.value[k]);
    }
  });
}

Var Graph::sigmoid(Var a) {
  std::vector<double> out(nodes_[a.index].value);
  for (double& v : out) v = sigmoid_of(v);
  return push(std::move(out), [a](Graph& g, const Node& self) {
    auto& ga = g.grad_of(a);
    for (std::size_t k = 0; k < ga.size(); ++k) {
      ga[k] += self.grad[k] * self.value[k] * (1.0 - self.value[k]);
    }
  });
}

Var Graph::concat(std::span<const Var> parts) {
  std::vector<double> out;
  std::size_t total = 0;
  for (Var p : parts) total += dim(p);
  out.reserve(total);
  for (Var p : parts) {
    const auto& v = nodes_[p.index].value;
    out.insert(out.end(), v.begin(), v.end());
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return push(std::move(out), [inputs = std::move(inputs)](Graph& g, const Node& self) {
    std::size_t offset = 0;
    for (Var p : inputs) {
      auto& gp = g.grad_of(p);
      for (std::size_t k = 0; k < gp.size(); ++k) gp[k] += self.grad[offset + k];
      offset += gp.size();
    }
  });
}

Var Graph::slice(Var a, std::size_t offset, std::size_t length) {
  if (offset + length > dim(a)) throw InvalidArgument("slice out of range");
  const auto& av = nodes_[a.index].value;
  std::vector<double> out(av.begin() + offset, av.begin() + offset + length);
  return push(std::move(out), [a, offset](Graph& g, const Node& self) {
    auto& ga = g.grad_of(a);
    for (std::size_t k = 0; k < self.grad.size(); ++k) ga[offset + k] += self.grad[k];
  });
}

Var Graph::pick(Var a, std::size_t index) { return slice(a, index, 1); }

Var Graph::sum(std::span<const Var> parts) {
  if (parts.empty()) throw InvalidArgument("sum of nothing");
  std::vector<double> out(nodes_[parts[0].index].value);
  for (std::size_t p = 1; p < parts.size(); ++p) {
    check_same_dim(parts[0], parts[p], "sum");
    const auto& v = nodes_[parts[p].index].value;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += v[k];
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return push(std::move(out), [inputs = std::move(inputs)](Graph& g, const Node& self) {
    for (Var p : inputs) {
      auto& gp = g.grad_of(p);
      for (std::size_t k = 0; k < gp.size(); ++k) gp[k] += self.grad[k];
    }
  });
}

Var Graph::sum_elements(Var a) {
  double total = 0.0;
  for (double v : nodes_[a.index].value) total += v;
  return push({total}, [a](Graph& g, const Node& self) {
    auto& ga = g.grad_of(a);
    for (double& v : ga) v += self.grad[0];
  });
}

void Graph::backward(Var root) {
  if (dim(root) != 1) throw InvalidArgument("backward needs a scalar root");
  for (Node& node : nodes_) node.grad.clear();
  grad_of(root)[0] = 1.0;
  for (std::size_t k = root.index + 1; k-- > 0;) {
    const Node& node = nodes_[k];
    if (node.grad.empty() || !node.backward) continue;
    node.backward(*this, node);
  }
}

}  // namespace covparse::nn
