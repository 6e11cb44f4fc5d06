#include "covparse/nn/adam.h"

#include <cmath>

#include "covparse/error.h"

namespace covparse::nn {

Adam::Adam(const ParameterStore& store, AdamHyper hyper) : hyper_(hyper) {
  for (const Parameter& p : store.params()) {
    first_moment_.emplace_back(p.value.shape);
    second_moment_.emplace_back(p.value.shape);
  }
}

void Adam::step(ParameterStore& store, Gradients& grads) {
  if (store.size() != first_moment_.size() || grads.size() != store.size()) {
    throw InvalidArgument("optimizer state does not match the parameter store");
  }
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double correction1 = 1.0 - std::pow(hyper_.beta1, t);
  const double correction2 = 1.0 - std::pow(hyper_.beta2, t);
  for (std::size_t k = 0; k < store.size(); ++k) {
    Parameter& p = store.params()[k];
    if (!p.trainable) continue;
    std::vector<double>& w = p.value.values;
    const std::vector<double>& g = grads[ParamId{k}].values;
    std::vector<double>& m = first_moment_[k].values;
    std::vector<double>& v = second_moment_[k].values;
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = hyper_.beta1 * m[i] + (1.0 - hyper_.beta1) * g[i];
      v[i] = hyper_.beta2 * v[i] + (1.0 - hyper_.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      w[i] -= hyper_.learning_rate * m_hat / (std::sqrt(v_hat) + hyper_.epsilon);
    }
  }
  grads.clear();
}

}  // namespace covparse::nn
