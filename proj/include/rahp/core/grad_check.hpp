#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "rahp/core/tensor.hpp"

namespace rahp::core {

struct GradCheckOptions {
  double step = 1e-5;
  // When non-zero, only this many entries per input are probed, chosen with `seed`.
  std::size_t max_entries_per_input = 0;
  std::uint64_t seed = 17;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t entries_checked = 0;
  std::size_t worst_input = 0;
  std::size_t worst_entry = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compares reverse-mode gradients of the scalar `f()` with respect to each
/// leaf in `inputs` against central differences. `f` must read the inputs'
/// current values; the harness perturbs them in place and restores them.
/// Relative error per entry is |a - n| / max(|a|, |n|, 1e-8).
/// Throws std::domain_error when `f` produces a non-finite value.
GradCheckResult grad_check(const std::function<Tensor<double>()>& f, std::vector<Tensor<double>> inputs,
                           const GradCheckOptions& options = {});

}  // namespace rahp::core
