#include "rahp/core/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace rahp::core {

template <typename T>
void adam_update(std::span<T> param, std::span<const T> grad, MomentBuffers<T>& moments, std::int64_t step,
                 const AdamOptions& options) {
  if (param.size() != grad.size()) throw std::invalid_argument("adam_update: gradient size does not match parameter");
  if (step < 1) throw std::invalid_argument("adam_update: step must be at least 1");
  if (moments.first.empty()) moments.first.assign(param.size(), T(0));
  if (moments.second.empty()) moments.second.assign(param.size(), T(0));
  if (moments.first.size() != param.size() || moments.second.size() != param.size()) {
    throw std::invalid_argument("adam_update: moment buffers do not match parameter");
  }
  const double b1 = options.beta1;
  const double b2 = options.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step));
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    const double m = b1 * moments.first[i] + (1.0 - b1) * g;
    const double v = b2 * moments.second[i] + (1.0 - b2) * g * g;
    moments.first[i] = static_cast<T>(m);
    moments.second[i] = static_cast<T>(v);
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    param[i] = static_cast<T>(param[i] - options.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon));
  }
}

template <typename T>
void Adam<T>::step(ParamStore<T>& params) {
  ++steps_;
  for (auto& [name, tensor] : params) {
    if (!tensor.requires_grad() || !tensor.has_grad()) continue;
    std::span<const T> grad = tensor.grad();
    adam_update<T>(tensor.mutable_data(), grad, moments_[name], steps_, options_);
  }
}

template void adam_update<float>(std::span<float>, std::span<const float>, MomentBuffers<float>&, std::int64_t,
                                 const AdamOptions&);
template void adam_update<double>(std::span<double>, std::span<const double>, MomentBuffers<double>&, std::int64_t,
                                  const AdamOptions&);
template class Adam<float>;
template class Adam<double>;

}  // namespace rahp::core
