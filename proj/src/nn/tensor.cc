#include "covparse/nn/tensor.h"

#include <algorithm>
#include <cmath>

#include "covparse/error.h"

namespace covparse::nn {

std::size_t element_count(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return shape.empty() ? 0 : n;
}

Tensor::Tensor(std::vector<std::size_t> s) : shape(std::move(s)), values(element_count(shape)) {}

void Tensor::fill(double v) { std::fill(values.begin(), values.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

ParamId ParameterStore::add(std::string name, std::vector<std::size_t> shape, bool trainable) {
  for (const Parameter& p : params_) {
    if (p.name == name) throw InvalidArgument("duplicate parameter name '" + name + "'");
  }
  params_.push_back(Parameter{std::move(name), Tensor(std::move(shape)), trainable});
  return ParamId{params_.size() - 1};
}

ParamId ParameterStore::find(const std::string& name) const {
  for (std::size_t k = 0; k < params_.size(); ++k) {
    if (params_[k].name == name) return ParamId{k};
  }
  throw InvalidArgument("no parameter named '" + name + "'");
}

Gradients::Gradients(const ParameterStore& store) {
  grads_.reserve(store.size());
  for (const Parameter& p : store.params()) grads_.emplace_back(p.value.shape);
}

void Gradients::clear() {
  for (Tensor& g : grads_) g.fill(0.0);
}

void glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : t.values) v = dist(rng);
}

}  // namespace covparse::nn
