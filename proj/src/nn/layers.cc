#include "covparse/nn/layers.h"

#include "covparse/error.h"

namespace covparse::nn {

LstmParams LstmParams::create(ParameterStore& store, const std::string& prefix,
                              std::size_t input_dim, std::size_t hidden_dim,
                              std::mt19937_64& rng) {
  if (input_dim == 0 || hidden_dim == 0) throw InvalidArgument("LSTM dimensions must be positive");
  LstmParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.input_weights = store.add(prefix + ".wx", {4 * hidden_dim, input_dim});
  p.recurrent_weights = store.add(prefix + ".wh", {4 * hidden_dim, hidden_dim});
  p.bias = store.add(prefix + ".b", {4 * hidden_dim});
  glorot_uniform(store.value(p.input_weights), input_dim, hidden_dim, rng);
  glorot_uniform(store.value(p.recurrent_weights), hidden_dim, hidden_dim, rng);
  Tensor& bias = store.value(p.bias);
  for (std::size_t k = hidden_dim; k < 2 * hidden_dim; ++k) bias.values[k] = 1.0;
  return p;
}

LstmParams LstmParams::bind(const ParameterStore& store, const std::string& prefix) {
  LstmParams p;
  p.input_weights = store.find(prefix + ".wx");
  p.recurrent_weights = store.find(prefix + ".wh");
  p.bias = store.find(prefix + ".b");
  const Tensor& wx = store.value(p.input_weights);
  const Tensor& wh = store.value(p.recurrent_weights);
  p.hidden_dim = wh.cols();
  p.input_dim = wx.cols();
  if (wx.rows() != 4 * p.hidden_dim || wh.rows() != 4 * p.hidden_dim ||
      store.value(p.bias).size() != 4 * p.hidden_dim) {
    throw InvalidArgument("inconsistent LSTM parameter shapes under '" + prefix + "'");
  }
  return p;
}

std::vector<Var> lstm_forward(Graph& g, const LstmParams& params, std::span<const Var> inputs,
                              bool reverse) {
  const std::size_t H = params.hidden_dim;
  const std::size_t n = inputs.size();
  std::vector<Var> outputs(n);
  Var h = g.zeros(H);
  Var c = g.zeros(H);
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t pos = reverse ? n - 1 - step : step;
    if (g.dim(inputs[pos]) != params.input_dim) {
      throw InvalidArgument("LSTM input at position " + std::to_string(pos) + " has dimension " +
                            std::to_string(g.dim(inputs[pos])) + ", expected " +
                            std::to_string(params.input_dim));
    }
    Var z = g.affine(params.input_weights, inputs[pos], params.recurrent_weights, h, params.bias);
    Var in_gate = g.sigmoid(g.slice(z, 0, H));
    Var forget_gate = g.sigmoid(g.slice(z, H, H));
    Var out_gate = g.sigmoid(g.slice(z, 2 * H, H));
    Var candidate = g.tanh(g.slice(z, 3 * H, H));
    c = g.add(g.mul(forget_gate, c), g.mul(in_gate, candidate));
    h = g.mul(out_gate, g.tanh(c));
    outputs[pos] = h;
  }
  return outputs;
}

std::vector<BiLstmLayer> create_bilstm(ParameterStore& store, const std::string& prefix,
                                       std::size_t input_dim, std::size_t output_dim,
                                       std::size_t layers, std::mt19937_64& rng) {
  if (layers == 0) throw InvalidArgument("a BiLSTM needs at least one layer");
  if (output_dim < 2 || output_dim % 2 != 0) {
    throw InvalidArgument("BiLSTM output size must be even, got " + std::to_string(output_dim));
  }
  std::vector<BiLstmLayer> stack;
  std::size_t in = input_dim;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::string name = prefix + "." + std::to_string(l);
    BiLstmLayer layer;
    layer.forward = LstmParams::create(store, name + ".fwd", in, output_dim / 2, rng);
    layer.backward = LstmParams::create(store, name + ".bwd", in, output_dim / 2, rng);
    stack.push_back(layer);
    in = output_dim;
  }
  return stack;
}

std::vector<BiLstmLayer> bind_bilstm(const ParameterStore& store, const std::string& prefix,
                                     std::size_t layers) {
  std::vector<BiLstmLayer> stack;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::string name = prefix + "." + std::to_string(l);
    stack.push_back({LstmParams::bind(store, name + ".fwd"), LstmParams::bind(store, name + ".bwd")});
  }
  return stack;
}

std::vector<Var> bilstm_encode(Graph& g, std::span<const BiLstmLayer> stack,
                               std::span<const Var> inputs) {
  if (stack.empty()) throw InvalidArgument("a BiLSTM needs at least one layer");
  std::vector<Var> current(inputs.begin(), inputs.end());
  for (std::size_t l = 0; l < stack.size(); ++l) {
    const BiLstmLayer& layer = stack[l];
    if (l > 0 && layer.forward.input_dim != g.dim(current.front())) {
      throw InvalidArgument("BiLSTM layer " + std::to_string(l) + " expects input dimension " +
                            std::to_string(layer.forward.input_dim));
    }
    std::vector<Var> fwd = lstm_forward(g, layer.forward, current, false);
    std::vector<Var> bwd = lstm_forward(g, layer.backward, current, true);
    for (std::size_t k = 0; k < current.size(); ++k) {
      const Var pair[2] = {fwd[k], bwd[k]};
      current[k] = g.concat(pair);
    }
  }
  return current;
}

MlpParams MlpParams::create(ParameterStore& store, const std::string& prefix,
                            std::size_t input_dim, std::size_t hidden_dim,
                            std::size_t output_dim, std::mt19937_64& rng) {
  if (input_dim == 0 || hidden_dim == 0 || output_dim == 0) {
    throw InvalidArgument("MLP dimensions must be positive");
  }
  MlpParams p;
  p.hidden_weights = store.add(prefix + ".w", {hidden_dim, input_dim});
  p.hidden_bias = store.add(prefix + ".b", {hidden_dim});
  p.output_weights = store.add(prefix + ".w2", {output_dim, hidden_dim});
  p.output_bias = store.add(prefix + ".b2", {output_dim});
  glorot_uniform(store.value(p.hidden_weights), input_dim, hidden_dim, rng);
  glorot_uniform(store.value(p.output_weights), hidden_dim, output_dim, rng);
  return p;
}

MlpParams MlpParams::bind(const ParameterStore& store, const std::string& prefix) {
  MlpParams p;
  p.hidden_weights = store.find(prefix + ".w");
  p.hidden_bias = store.find(prefix + ".b");
  p.output_weights = store.find(prefix + ".w2");
  p.output_bias = store.find(prefix + ".b2");
  return p;
}

Var mlp_forward(Graph& g, const MlpParams& params, Var h) {
  Var hidden = g.tanh(g.affine(params.hidden_weights, h, params.hidden_bias));
  return g.affine(params.output_weights, hidden, params.output_bias);
}

}  // namespace covparse::nn
