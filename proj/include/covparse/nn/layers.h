#ifndef COVPARSE_NN_LAYERS_H_
#define COVPARSE_NN_LAYERS_H_

#include <random>
#include <span>
#include <string>
#include <vector>

#include "covparse/nn/graph.h"
#include "covparse/nn/tensor.h"

namespace covparse::nn {

// One direction of one LSTM layer. The four gates are stacked row-wise in
// the order input, forget, output, candidate.
struct LstmParams {
  ParamId input_weights;      // [4H, I]
  ParamId recurrent_weights;  // [4H, H]
  ParamId bias;               // [4H]
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;

  // Registers "<prefix>.wx", "<prefix>.wh", "<prefix>.b". Weights are
  // Glorot-uniform, biases zero except the forget gate (+1).
  static LstmParams create(ParameterStore& store, const std::string& prefix,
                           std::size_t input_dim, std::size_t hidden_dim,
                           std::mt19937_64& rng);
  // Rebinds to parameters already present in `store` (after loading).
  static LstmParams bind(const ParameterStore& store, const std::string& prefix);
};

// Runs the recurrence from a zero state. With `reverse` the sequence is
// consumed right to left; outputs are always aligned with the inputs.
std::vector<Var> lstm_forward(Graph& g, const LstmParams& params, std::span<const Var> inputs,
                              bool reverse);

struct BiLstmLayer {
  LstmParams forward;
  LstmParams backward;
};

// Stacked BiLSTM: each layer concatenates its forward and backward outputs
// position-wise and feeds the result to the next layer. `output_dim` is the
// concatenated size, so each direction has output_dim / 2 units.
std::vector<BiLstmLayer> create_bilstm(ParameterStore& store, const std::string& prefix,
                                       std::size_t input_dim, std::size_t output_dim,
                                       std::size_t layers, std::mt19937_64& rng);
std::vector<BiLstmLayer> bind_bilstm(const ParameterStore& store, const std::string& prefix,
                                     std::size_t layers);

std::vector<Var> bilstm_encode(Graph& g, std::span<const BiLstmLayer> stack,
                               std::span<const Var> inputs);

// Multilayer perceptron with one tanh hidden layer and a linear output.
struct MlpParams {
  ParamId hidden_weights;  // W  [hidden, in]
  ParamId hidden_bias;     // b  [hidden]
  ParamId output_weights;  // W2 [out, hidden]
  ParamId output_bias;     // b2 [out]

  static MlpParams create(ParameterStore& store, const std::string& prefix, std::size_t input_dim,
                          std::size_t hidden_dim, std::size_t output_dim, std::mt19937_64& rng);
  static MlpParams bind(const ParameterStore& store, const std::string& prefix);
};

// W2 * tanh(W * h + b) + b2
Var mlp_forward(Graph& g, const MlpParams& params, Var h);

}  // namespace covparse::nn

#endif  // COVPARSE_NN_LAYERS_H_
