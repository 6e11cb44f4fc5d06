#ifndef COVPARSE_NN_TENSOR_H_
#define COVPARSE_NN_TENSOR_H_

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace covparse::nn {

// Dense row-major array of doubles.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);

  std::size_t size() const { return values.size(); }
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
  std::span<double> row(std::size_t r) { return {values.data() + r * cols(), cols()}; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols(), cols()};
  }
  void fill(double v);
  bool all_finite() const;

  bool operator==(const Tensor&) const = default;
};

std::size_t element_count(const std::vector<std::size_t>& shape);

struct ParamId {
  std::size_t index = 0;
  bool operator==(const ParamId&) const = default;
};

struct Parameter {
  std::string name;
  Tensor value;
  // Frozen parameters (external embeddings) never receive updates.
  bool trainable = true;
};

// Owns every learnable tensor of a model in registration order; ParamIds
// stay valid across copies of the store.
class ParameterStore {
 public:
  ParamId add(std::string name, std::vector<std::size_t> shape, bool trainable = true);

  Parameter& operator[](ParamId id) { return params_[id.index]; }
  const Parameter& operator[](ParamId id) const { return params_[id.index]; }
  Tensor& value(ParamId id) { return params_[id.index].value; }
  const Tensor& value(ParamId id) const { return params_[id.index].value; }

  std::size_t size() const { return params_.size(); }
  std::vector<Parameter>& params() { return params_; }
  const std::vector<Parameter>& params() const { return params_; }
  // Throws InvalidArgument when absent.
  ParamId find(const std::string& name) const;

 private:
  std::vector<Parameter> params_;
};

// Gradient accumulators parallel to a ParameterStore.
class Gradients {
 public:
  explicit Gradients(const ParameterStore& store);

  Tensor& operator[](ParamId id) { return grads_[id.index]; }
  const Tensor& operator[](ParamId id) const { return grads_[id.index]; }
  std::size_t size() const { return grads_.size(); }
  void clear();

 private:
  std::vector<Tensor> grads_;
};

// Uniform in +-sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng);

}  // namespace covparse::nn

#endif  // COVPARSE_NN_TENSOR_H_
