#include "rahp/core/params.hpp"

#include <cmath>
#include <stdexcept>

namespace rahp::core {

template <typename T>
Tensor<T>& ParamStore<T>::add(const std::string& name, Tensor<T> tensor) {
  if (!tensor.defined()) throw std::invalid_argument("parameter '" + name + "' is undefined");
  if (!tensor.is_leaf()) throw std::invalid_argument("parameter '" + name + "' must be a leaf tensor");
  auto [it, inserted] = tensors_.emplace(name, std::move(tensor));
  if (!inserted) throw std::invalid_argument("duplicate parameter '" + name + "'");
  return it->second;
}

template <typename T>
const Tensor<T>& ParamStore<T>::get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return it->second;
}

template <typename T>
Tensor<T>& ParamStore<T>::get(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return it->second;
}

template <typename T>
std::vector<std::string> ParamStore<T>::names() const {
  std::vector<std::string> out;
  out.reserve(tensors_.size());
  for (const auto& entry : tensors_) out.push_back(entry.first);
  return out;
}

template <typename T>
std::vector<std::string> ParamStore<T>::names_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (auto it = tensors_.lower_bound(prefix); it != tensors_.end() && it->first.rfind(prefix, 0) == 0; ++it) {
    out.push_back(it->first);
  }
  return out;
}

template <typename T>
std::size_t ParamStore<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& entry : tensors_) n += entry.second.size();
  return n;
}

template <typename T>
void ParamStore<T>::zero_grad() {
  for (auto& entry : tensors_) entry.second.zero_grad();
}

template <typename T>
Tensor<T> uniform_tensor(Shape shape, double bound, Rng& rng) {
  std::vector<T> values(numel(shape));
  for (auto& v : values) v = static_cast<T>(rng.uniform(-bound, bound));
  return Tensor<T>::from(std::move(shape), std::move(values), true);
}

template <typename T>
Tensor<T> xavier_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  if (fan_in == 0 || fan_out == 0) throw std::invalid_argument("xavier_uniform: fans must be positive");
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  return uniform_tensor<T>({fan_out, fan_in}, bound, rng);
}

template class ParamStore<float>;
template class ParamStore<double>;
template Tensor<float> uniform_tensor<float>(Shape, double, Rng&);
template Tensor<double> uniform_tensor<double>(Shape, double, Rng&);
template Tensor<float> xavier_uniform<float>(std::size_t, std::size_t, Rng&);
template Tensor<double> xavier_uniform<double>(std::size_t, std::size_t, Rng&);

}  // namespace rahp::core
