#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "rahp/core/random.hpp"
#include "rahp/core/tensor.hpp"

// Differentiable operations. Rank-1 tensors are vectors, rank-2 tensors are
// row-major matrices. Every op checks shapes and throws std::invalid_argument
// on mismatch.
namespace rahp::core {

template <typename T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> scale(const Tensor<T>& a, T factor);

template <typename T> Tensor<T> tanh(const Tensor<T>& a);
template <typename T> Tensor<T> sigmoid(const Tensor<T>& a);
template <typename T> Tensor<T> relu(const Tensor<T>& a);

/// Matrix product. A rank-1 left operand acts as a row vector and a rank-1
/// right operand as a column vector; the result drops that axis again.
template <typename T> Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> transpose(const Tensor<T>& a);

/// x W^T + b for x of shape [in] or [rows, in], W of shape [out, in].
/// `bias` may be an undefined tensor.
template <typename T> Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);

template <typename T> Tensor<T> sum(const Tensor<T>& a);
template <typename T> Tensor<T> dot(const Tensor<T>& a, const Tensor<T>& b);

/// Concatenates vectors end to end.
template <typename T> Tensor<T> concat(const std::vector<Tensor<T>>& parts);
/// Concatenates matrices with equal row counts along columns.
template <typename T> Tensor<T> concat_columns(const std::vector<Tensor<T>>& parts);
/// Stacks equal-length vectors into a [rows.size(), n] matrix.
template <typename T> Tensor<T> stack_rows(const std::vector<Tensor<T>>& rows);
template <typename T> Tensor<T> row(const Tensor<T>& matrix, std::size_t index);
template <typename T> Tensor<T> slice(const Tensor<T>& vector, std::size_t begin, std::size_t length);

/// Softmax restricted to positions where `mask` is true. Masked positions
/// are exactly zero. Throws std::domain_error("empty attention support")
/// when no position is unmasked.
template <typename T> Tensor<T> softmax_masked(const Tensor<T>& logits, const std::vector<bool>& mask);
/// Row-wise softmax_masked over a matrix, with one column mask shared by all rows.
template <typename T> Tensor<T> softmax_masked_rows(const Tensor<T>& logits, const std::vector<bool>& column_mask);
template <typename T> Tensor<T> softmax(const Tensor<T>& logits);

/// Gathers rows of `table`. Rows whose entry in `trainable_rows` is false
/// receive no gradient; a null pointer means every row is trainable.
template <typename T>
Tensor<T> embedding_lookup(const Tensor<T>& table, std::span<const std::size_t> ids,
                           std::shared_ptr<const std::vector<bool>> trainable_rows = nullptr);

/// Sliding windows of `width` consecutive rows, each flattened into one
/// row: [L, d] -> [L - width + 1, width * d].
template <typename T> Tensor<T> unfold_rows(const Tensor<T>& matrix, std::size_t width);
/// Column-wise maximum over rows: [m, n] -> [n]. Ties route the gradient to the first row.
template <typename T> Tensor<T> max_over_rows(const Tensor<T>& matrix);

/// Inverted dropout; identity when probability is 0.
template <typename T> Tensor<T> dropout(const Tensor<T>& a, double probability, Rng& rng);

/// Binary cross-entropy on a single logit. The logit is clamped to
/// [-clamp, clamp] for the loss value; the gradient sigmoid(z) - y is
/// evaluated at the clamped point and passed straight through.
template <typename T> Tensor<T> bce_with_logits(const Tensor<T>& logit, double label, double clamp = 15.0);
/// -log softmax(logits)[label].
template <typename T> Tensor<T> cross_entropy(const Tensor<T>& logits, std::size_t label);

}  // namespace rahp::core
