#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rahp/core/params.hpp"

namespace rahp::nn {

/// Right-padding mask: the first `real()` of `length()` positions are tokens.
class Mask {
 public:
  Mask() = default;
  explicit Mask(std::size_t length) : length_(length), real_(length) {}
  Mask(std::size_t length, std::size_t real);
  /// Throws std::invalid_argument unless the true entries form a prefix.
  static Mask from_flags(const std::vector<bool>& flags);

  std::size_t length() const { return length_; }
  std::size_t real() const { return real_; }
  bool operator[](std::size_t i) const { return i < real_; }
  std::vector<bool> flags() const;

 private:
  std::size_t length_ = 0;
  std::size_t real_ = 0;
};

/// Gate blocks are stacked in the order input, forget, candidate, output.
template <typename T>
struct LstmCellParams {
  core::Tensor<T> input_weights;   // [4H, D_in]
  core::Tensor<T> hidden_weights;  // [4H, H]
  core::Tensor<T> bias;            // [4H]

  std::size_t hidden() const { return hidden_weights.dim(1); }
};

template <typename T>
struct BiLstmParams {
  LstmCellParams<T> forward;
  LstmCellParams<T> backward;

  std::size_t hidden() const { return forward.hidden(); }
};

template <typename T>
struct LstmState {
  core::Tensor<T> hidden;
  core::Tensor<T> cell;
};

/// One gated update: i, f, o = sigmoid(.), g = tanh(.), c = f*c_prev + i*g, h = o*tanh(c).
template <typename T>
LstmState<T> lstm_step(const core::Tensor<T>& input, const LstmState<T>& previous, const LstmCellParams<T>& params);

/// [L, D_in] -> [L, 2H]; row t = [forward hidden at t; backward hidden at t].
/// Both directions run over the real positions only; padded rows are zero.
template <typename T>
core::Tensor<T> bilstm_encode(const core::Tensor<T>& sequence, const Mask& mask, const BiLstmParams<T>& params);

/// [forward hidden at the last real position; backward hidden at position 0].
template <typename T>
core::Tensor<T> final_state(const core::Tensor<T>& hiddens, const Mask& mask);

/// Registers `<prefix>.fwd.*` and `<prefix>.bwd.*` (Xavier weights, zero
/// biases except the forget block, which starts at 1).
template <typename T>
void add_bilstm_params(core::ParamStore<T>& params, const std::string& prefix, std::size_t input_dim, std::size_t hidden,
                       core::Rng& rng);
template <typename T>
BiLstmParams<T> bilstm_params(const core::ParamStore<T>& params, const std::string& prefix);

/// affine -> ReLU -> affine.
template <typename T>
struct MlpParams {
  core::Tensor<T> hidden_weight;
  core::Tensor<T> hidden_bias;
  core::Tensor<T> output_weight;
  core::Tensor<T> output_bias;
};

template <typename T>
void add_mlp_params(core::ParamStore<T>& params, const std::string& prefix, std::size_t input_dim,
                    std::size_t hidden_dim, std::size_t output_dim, core::Rng& rng);
template <typename T>
MlpParams<T> mlp_params(const core::ParamStore<T>& params, const std::string& prefix);

/// `dropout_rng` null or `dropout` 0 disables dropout on the input and hidden activations.
template <typename T>
core::Tensor<T> mlp_forward(const core::Tensor<T>& input, const MlpParams<T>& params, double dropout = 0.0,
                            core::Rng* dropout_rng = nullptr);

}  // namespace rahp::nn
