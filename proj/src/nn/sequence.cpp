#include "rahp/nn/sequence.hpp"

#include <stdexcept>

#include "rahp/core/ops.hpp"

namespace rahp::nn {

using core::Tensor;

Mask::Mask(std::size_t length, std::size_t real) : length_(length), real_(real) {
  if (real > length) throw std::invalid_argument("mask: real length exceeds sequence length");
}

Mask Mask::from_flags(const std::vector<bool>& flags) {
  std::size_t real = 0;
  while (real < flags.size() && flags[real]) ++real;
  for (std::size_t i = real; i < flags.size(); ++i) {
    if (flags[i]) throw std::invalid_argument("mask: real positions must form a prefix");
  }
  return Mask(flags.size(), real);
}

std::vector<bool> Mask::flags() const {
  std::vector<bool> out(length_, false);
  for (std::size_t i = 0; i < real_; ++i) out[i] = true;
  return out;
}

namespace {

template <typename T>
LstmState<T> cell_from_preactivations(const Tensor<T>& gates, const Tensor<T>& previous_cell, std::size_t hidden) {
  const Tensor<T> input_gate = core::sigmoid(core::slice(gates, 0, hidden));
  const Tensor<T> forget_gate = core::sigmoid(core::slice(gates, hidden, hidden));
  const Tensor<T> candidate = core::tanh(core::slice(gates, 2 * hidden, hidden));
  const Tensor<T> output_gate = core::sigmoid(core::slice(gates, 3 * hidden, hidden));
  Tensor<T> cell = core::add(core::mul(forget_gate, previous_cell), core::mul(input_gate, candidate));
  Tensor<T> hidden_state = core::mul(output_gate, core::tanh(cell));
  return {std::move(hidden_state), std::move(cell)};
}

template <typename T>
void check_cell(const LstmCellParams<T>& params) {
  const std::size_t h = params.hidden();
  if (params.input_weights.dim(0) != 4 * h || params.hidden_weights.dim(0) != 4 * h || params.bias.dim(0) != 4 * h) {
    throw std::invalid_argument("lstm: gate parameters must have 4H rows");
  }
}

// Runs one direction over rows [0, real) of the pre-projected inputs.
template <typename T>
std::vector<Tensor<T>> run_direction(const Tensor<T>& projected, std::size_t real, const LstmCellParams<T>& params,
                                     bool reverse) {
  const std::size_t h = params.hidden();
  LstmState<T> state{Tensor<T>::zeros({h}), Tensor<T>::zeros({h})};
  std::vector<Tensor<T>> outputs(real);
  for (std::size_t step = 0; step < real; ++step) {
    const std::size_t t = reverse ? real - 1 - step : step;
    Tensor<T> gates = core::row(projected, t);
    if (step > 0) gates = core::add(gates, core::linear(state.hidden, params.hidden_weights, Tensor<T>()));
    state = cell_from_preactivations(gates, state.cell, h);
    outputs[t] = state.hidden;
  }
  return outputs;
}

}  // namespace

template <typename T>
LstmState<T> lstm_step(const Tensor<T>& input, const LstmState<T>& previous, const LstmCellParams<T>& params) {
  check_cell(params);
  const std::size_t h = params.hidden();
  if (previous.hidden.size() != h || previous.cell.size() != h) {
    throw std::invalid_argument("lstm_step: state size does not match hidden size");
  }
  const Tensor<T> gates = core::add(core::linear(input, params.input_weights, params.bias),
                                    core::linear(previous.hidden, params.hidden_weights, Tensor<T>()));
  return cell_from_preactivations(gates, previous.cell, h);
}

template <typename T>
Tensor<T> bilstm_encode(const Tensor<T>& sequence, const Mask& mask, const BiLstmParams<T>& params) {
  if (!sequence.defined() || sequence.rank() != 2) throw std::invalid_argument("bilstm_encode: expected [L, D] input");
  const std::size_t length = sequence.dim(0);
  if (length == 0 || mask.real() == 0) throw std::invalid_argument("bilstm_encode: empty sequence");
  if (mask.length() != length) throw std::invalid_argument("bilstm_encode: mask length does not match sequence");
  check_cell(params.forward);
  check_cell(params.backward);
  const std::size_t h = params.hidden();
  const std::size_t real = mask.real();

  // Input projections for every position at once; padded rows are never read.
  const Tensor<T> fwd_projected = core::linear(sequence, params.forward.input_weights, params.forward.bias);
  const Tensor<T> bwd_projected = core::linear(sequence, params.backward.input_weights, params.backward.bias);
  const auto fwd = run_direction(fwd_projected, real, params.forward, false);
  const auto bwd = run_direction(bwd_projected, real, params.backward, true);

  std::vector<Tensor<T>> rows;
  rows.reserve(length);
  for (std::size_t t = 0; t < real; ++t) rows.push_back(core::concat<T>({fwd[t], bwd[t]}));
  if (real < length) {
    const Tensor<T> zero_row = Tensor<T>::zeros({2 * h});
    for (std::size_t t = real; t < length; ++t) rows.push_back(zero_row);
  }
  return core::stack_rows(rows);
}

template <typename T>
Tensor<T> final_state(const Tensor<T>& hiddens, const Mask& mask) {
  if (!hiddens.defined() || hiddens.rank() != 2) throw std::invalid_argument("final_state: expected [L, 2H] input");
  if (mask.real() == 0) throw std::invalid_argument("final_state: no real positions");
  if (mask.length() != hiddens.dim(0)) throw std::invalid_argument("final_state: mask length does not match");
  const std::size_t width = hiddens.dim(1);
  if (width % 2 != 0) throw std::invalid_argument("final_state: width must be even");
  const std::size_t h = width / 2;
  return core::concat<T>(
      {core::slice(core::row(hiddens, mask.real() - 1), 0, h), core::slice(core::row(hiddens, 0), h, h)});
}

template <typename T>
void add_bilstm_params(core::ParamStore<T>& params, const std::string& prefix, std::size_t input_dim, std::size_t hidden,
                       core::Rng& rng) {
  for (const char* direction : {"fwd", "bwd"}) {
    const std::string base = prefix + "." + direction;
    params.add(base + ".w_ih", core::xavier_uniform<T>(input_dim, 4 * hidden, rng));
    params.add(base + ".w_hh", core::xavier_uniform<T>(hidden, 4 * hidden, rng));
    std::vector<T> bias(4 * hidden, T(0));
    for (std::size_t i = hidden; i < 2 * hidden; ++i) bias[i] = T(1);
    params.add(base + ".bias", Tensor<T>::from({4 * hidden}, std::move(bias), true));
  }
}

template <typename T>
BiLstmParams<T> bilstm_params(const core::ParamStore<T>& params, const std::string& prefix) {
  auto cell = [&](const std::string& direction) {
    const std::string base = prefix + "." + direction;
    return LstmCellParams<T>{params.get(base + ".w_ih"), params.get(base + ".w_hh"), params.get(base + ".bias")};
  };
  return {cell("fwd"), cell("bwd")};
}

template <typename T>
void add_mlp_params(core::ParamStore<T>& params, const std::string& prefix, std::size_t input_dim,
                    std::size_t hidden_dim, std::size_t output_dim, core::Rng& rng) {
  params.add(prefix + ".l1.weight", core::xavier_uniform<T>(input_dim, hidden_dim, rng));
  params.add(prefix + ".l1.bias", Tensor<T>::zeros({hidden_dim}, true));
  params.add(prefix + ".l2.weight", core::xavier_uniform<T>(hidden_dim, output_dim, rng));
  params.add(prefix + ".l2.bias", Tensor<T>::zeros({output_dim}, true));
}

template <typename T>
MlpParams<T> mlp_params(const core::ParamStore<T>& params, const std::string& prefix) {
  return {params.get(prefix + ".l1.weight"), params.get(prefix + ".l1.bias"), params.get(prefix + ".l2.weight"),
          params.get(prefix + ".l2.bias")};
}

template <typename T>
Tensor<T> mlp_forward(const Tensor<T>& input, const MlpParams<T>& params, double dropout, core::Rng* dropout_rng) {
  const bool drop = dropout > 0.0 && dropout_rng != nullptr;
  Tensor<T> x = drop ? core::dropout(input, dropout, *dropout_rng) : input;
  Tensor<T> hidden = core::relu(core::linear(x, params.hidden_weight, params.hidden_bias));
  if (drop) hidden = core::dropout(hidden, dropout, *dropout_rng);
  return core::linear(hidden, params.output_weight, params.output_bias);
}

#define RAHP_INSTANTIATE_SEQUENCE(T)                                                                          \
  template LstmState<T> lstm_step<T>(const Tensor<T>&, const LstmState<T>&, const LstmCellParams<T>&);         \
  template Tensor<T> bilstm_encode<T>(const Tensor<T>&, const Mask&, const BiLstmParams<T>&);                  \
  template Tensor<T> final_state<T>(const Tensor<T>&, const Mask&);                                             \
  template void add_bilstm_params<T>(core::ParamStore<T>&, const std::string&, std::size_t, std::size_t,        \
                                     core::Rng&);                                                               \
  template BiLstmParams<T> bilstm_params<T>(const core::ParamStore<T>&, const std::string&);                    \
  template void add_mlp_params<T>(core::ParamStore<T>&, const std::string&, std::size_t, std::size_t,           \
                                  std::size_t, core::Rng&);                                                     \
  template MlpParams<T> mlp_params<T>(const core::ParamStore<T>&, const std::string&);                          \
  template Tensor<T> mlp_forward<T>(const Tensor<T>&, const MlpParams<T>&, double, core::Rng*);

RAHP_INSTANTIATE_SEQUENCE(float)
RAHP_INSTANTIATE_SEQUENCE(double)

}  // namespace rahp::nn
