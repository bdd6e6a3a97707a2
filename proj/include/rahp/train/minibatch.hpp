#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "rahp/core/adam.hpp"
#include "rahp/core/ops.hpp"

namespace rahp::train {

/// Raised when a loss turns NaN or infinite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Backpropagates the mean of `loss_fn(i)` over `batch` and takes one Adam
/// step. Returns the summed (unscaled) loss. Gradients are zeroed first.
template <typename LossFn>
double minibatch_step(core::ParamStore<float>& params, core::Adam<float>& optimizer, std::span<const std::size_t> batch,
                      LossFn&& loss_fn) {
  params.zero_grad();
  const float scale = 1.0f / static_cast<float>(batch.size());
  double total = 0.0;
  for (std::size_t index : batch) {
    core::Tensor<float> loss = loss_fn(index);
    const double value = loss.item();
    if (!std::isfinite(value)) {
      throw DivergenceError("non-finite loss " + std::to_string(value) + " on instance " + std::to_string(index) +
                            " at optimizer step " + std::to_string(optimizer.steps() + 1));
    }
    total += value;
    core::scale(loss, scale).backward();
  }
  optimizer.step(params);
  return total;
}

}  // namespace rahp::train
