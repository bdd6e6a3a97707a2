#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rahp/core/params.hpp"

namespace rahp::core {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct MomentBuffers {
  std::vector<T> first;
  std::vector<T> second;
};

/// One bias-corrected Adam update of `param` in place. `step` is the
/// 1-based index of this update.
template <typename T>
void adam_update(std::span<T> param, std::span<const T> grad, MomentBuffers<T>& moments, std::int64_t step,
                 const AdamOptions& options);

/// Adam over a ParamStore. Parameters without requires_grad or without a
/// gradient buffer are skipped. Gradients are not cleared; callers zero them
/// explicitly between steps.
template <typename T>
class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  void step(ParamStore<T>& params);

  std::int64_t steps() const { return steps_; }
  const AdamOptions& options() const { return options_; }
  const std::map<std::string, MomentBuffers<T>>& moments() const { return moments_; }

 private:
  AdamOptions options_;
  std::int64_t steps_ = 0;
  std::map<std::string, MomentBuffers<T>> moments_;
};

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace rahp::core
