#pragma once

#include "rahp/nn/sequence.hpp"

namespace rahp::model {

template <typename T>
struct Alignment {
  core::Tensor<T> similarity;  // [Lq, La]
  core::Tensor<T> alpha_q;     // [Lq, La], rows over answer positions
  core::Tensor<T> alpha_a;     // [La, Lq], rows over question positions
};

template <typename T>
struct QaPrediction {
  core::Tensor<T> o_q;   // [2H]
  core::Tensor<T> o_a;   // [2H]
  core::Tensor<T> s_qa;  // [d1]
};

template <typename T>
struct QaParams {
  nn::BiLstmParams<T> encoder;
  nn::MlpParams<T> head;
};

/// S[j, k] = dot(c_q[j], c_a[k]).
template <typename T>
core::Tensor<T> similarity_matrix(const core::Tensor<T>& c_q, const core::Tensor<T>& c_a);

/// Row-wise masked softmax of S over answer positions and of S^T over
/// question positions.
template <typename T>
Alignment<T> dual_attention(const core::Tensor<T>& similarity, const nn::Mask& mask_q, const nn::Mask& mask_a);

/// Returns {n_aq = alpha_q c_a, n_qa = alpha_a c_q}.
template <typename T>
std::pair<core::Tensor<T>, core::Tensor<T>> attended_representations(const Alignment<T>& alignment,
                                                                     const core::Tensor<T>& c_q,
                                                                     const core::Tensor<T>& c_a);

/// One BiLSTM shared by both branches over [c; n], then the head on [o_q; o_a].
template <typename T>
QaPrediction<T> qa_encode_and_predict(const core::Tensor<T>& c_q, const core::Tensor<T>& n_aq,
                                      const core::Tensor<T>& c_a, const core::Tensor<T>& n_qa,
                                      const nn::Mask& mask_q, const nn::Mask& mask_a, const QaParams<T>& params,
                                      double dropout = 0.0, core::Rng* dropout_rng = nullptr);

/// Full QA branch from context encodings.
template <typename T>
QaPrediction<T> qa_interaction(const core::Tensor<T>& c_q, const core::Tensor<T>& c_a, const nn::Mask& mask_q,
                               const nn::Mask& mask_a, const QaParams<T>& params, double dropout = 0.0,
                               core::Rng* dropout_rng = nullptr, Alignment<T>* alignment_out = nullptr);

}  // namespace rahp::model
