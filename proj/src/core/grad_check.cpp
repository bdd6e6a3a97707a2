#include "rahp/core/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rahp/core/random.hpp"

namespace rahp::core {

namespace {

double evaluate(const std::function<Tensor<double>()>& f) {
  const double value = f().item();
  if (!std::isfinite(value)) throw std::domain_error("grad_check: function produced a non-finite value");
  return value;
}

}  // namespace

GradCheckResult grad_check(const std::function<Tensor<double>()>& f, std::vector<Tensor<double>> inputs,
                           const GradCheckOptions& options) {
  for (auto& input : inputs) {
    if (!input.defined() || !input.is_leaf() || !input.requires_grad()) {
      throw std::invalid_argument("grad_check: inputs must be leaf tensors with requires_grad");
    }
    input.zero_grad();
  }
  Tensor<double> root = f();
  if (!std::isfinite(root.item())) throw std::domain_error("grad_check: function produced a non-finite value");
  root.backward();
  root = Tensor<double>();

  std::vector<std::vector<double>> analytic;
  analytic.reserve(inputs.size());
  for (auto& input : inputs) {
    if (input.has_grad()) {
      analytic.emplace_back(input.grad().begin(), input.grad().end());
    } else {
      analytic.emplace_back(input.size(), 0.0);
    }
  }

  Rng rng(options.seed);
  GradCheckResult result;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    auto values = inputs[k].mutable_data();
    std::vector<std::size_t> entries(values.size());
    std::iota(entries.begin(), entries.end(), std::size_t{0});
    if (options.max_entries_per_input != 0 && entries.size() > options.max_entries_per_input) {
      rng.shuffle(entries);
      entries.resize(options.max_entries_per_input);
      std::sort(entries.begin(), entries.end());
    }
    for (std::size_t i : entries) {
      const double original = values[i];
      values[i] = original + options.step;
      const double plus = evaluate(f);
      values[i] = original - options.step;
      const double minus = evaluate(f);
      values[i] = original;
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double a = analytic[k][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double error = std::abs(a - numeric) / denom;
      ++result.entries_checked;
      if (error > result.max_relative_error || result.entries_checked == 1) {
        result.max_relative_error = std::max(result.max_relative_error, error);
        if (error >= result.max_relative_error) {
          result.worst_input = k;
          result.worst_entry = i;
          result.worst_analytic = a;
          result.worst_numeric = numeric;
        }
      }
    }
  }
  return result;
}

}  // namespace rahp::core
