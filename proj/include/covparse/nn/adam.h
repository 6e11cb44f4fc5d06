#ifndef COVPARSE_NN_ADAM_H_
#define COVPARSE_NN_ADAM_H_

#include <vector>

#include "covparse/nn/tensor.h"

namespace covparse::nn {

struct AdamHyper {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction over every trainable parameter of a store.
class Adam {
 public:
  Adam(const ParameterStore& store, AdamHyper hyper = {});

  // Applies one update from `grads` and clears them.
  void step(ParameterStore& store, Gradients& grads);

  long steps() const { return steps_; }
  const AdamHyper& hyper() const { return hyper_; }

 private:
  AdamHyper hyper_;
  std::vector<Tensor> first_moment_;
  std::vector<Tensor> second_moment_;
  long steps_ = 0;
};

}  // namespace covparse::nn

#endif  // COVPARSE_NN_ADAM_H_
