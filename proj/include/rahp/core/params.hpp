#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rahp/core/random.hpp"
#include "rahp/core/tensor.hpp"

namespace rahp::core {

/// Named trainable tensors. Iteration order is lexicographic by name, which
/// is also the checkpoint order.
template <typename T>
class ParamStore {
 public:
  Tensor<T>& add(const std::string& name, Tensor<T> tensor);
  const Tensor<T>& get(const std::string& name) const;
  Tensor<T>& get(const std::string& name);
  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }

  std::vector<std::string> names() const;
  std::vector<std::string> names_with_prefix(const std::string& prefix) const;
  std::size_t parameter_count() const;
  void zero_grad();

  auto begin() { return tensors_.begin(); }
  auto end() { return tensors_.end(); }
  auto begin() const { return tensors_.begin(); }
  auto end() const { return tensors_.end(); }
  std::size_t size() const { return tensors_.size(); }

  /// Deep copy into another precision; lineage and gradients are dropped.
  template <typename U>
  ParamStore<U> cast() const {
    ParamStore<U> result;
    for (const auto& [name, tensor] : tensors_) {
      std::vector<U> values(tensor.data().begin(), tensor.data().end());
      result.add(name, Tensor<U>::from(tensor.shape(), std::move(values), tensor.requires_grad()));
    }
    return result;
  }

 private:
  std::map<std::string, Tensor<T>> tensors_;
};

/// Uniform(-b, b) matrix of shape [fan_out, fan_in], b = sqrt(6 / (fan_in + fan_out)).
template <typename T>
Tensor<T> xavier_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

template <typename T>
Tensor<T> uniform_tensor(Shape shape, double bound, Rng& rng);

extern template class ParamStore<float>;
extern template class ParamStore<double>;

}  // namespace rahp::core
