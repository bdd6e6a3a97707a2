#pragma once

#include <string>
#include <vector>

#include "rahp/core/checkpoint.hpp"
#include "rahp/nn/sequence.hpp"

namespace rahp::model {

template <typename T>
struct QToRAttention {
  core::Tensor<T> beta;  // [Lr], zero on padded positions
  core::Tensor<T> v_r;   // [2H]
};

/// final_state of the RA encoder over one context-encoded sequence; used for
/// both the answer (m_a) and each review (o_r).
template <typename T>
core::Tensor<T> ra_encode(const core::Tensor<T>& context, const nn::Mask& mask, const nn::BiLstmParams<T>& encoder);

/// u = c_r o_q, beta = masked softmax(u), v_r = beta^T c_r.
template <typename T>
QToRAttention<T> q_to_r_attention(const core::Tensor<T>& o_q, const core::Tensor<T>& c_r, const nn::Mask& mask);

template <typename T>
core::Tensor<T> compose_review(const core::Tensor<T>& v_r, const core::Tensor<T>& o_r);

/// Head on [m_r; m_a]; raw logits.
template <typename T>
core::Tensor<T> ra_predict(const core::Tensor<T>& m_r, const core::Tensor<T>& m_a, const nn::MlpParams<T>& head,
                           double dropout = 0.0, core::Rng* dropout_rng = nullptr);

/// Parameter groups shared with the inference pre-training network.
inline const std::vector<std::string>& transfer_prefixes() {
  static const std::vector<std::string> prefixes = {"embedding.", "bilstm_c.", "bilstm_ra.", "mlp_ra."};
  return prefixes;
}

struct TransferRecord {
  std::vector<std::string> tensors;       // copied in full
  std::size_t embedding_rows_copied = 0;  // leading rows of embedding.word
  std::size_t embedding_rows_total = 0;
  std::string source;
};

/// Copies the transferable tensors of a pre-training checkpoint into
/// `params`. `embedding.word` may have fewer rows in the checkpoint than in
/// `params` when the checkpoint vocabulary (metadata "vocabulary") is a
/// prefix of `vocabulary`; those leading rows are copied. Everything is
/// validated first; on error nothing is written and the message lists every
/// missing or mismatched tensor.
template <typename T>
TransferRecord load_transferred(const core::Checkpoint& checkpoint, core::ParamStore<T>& params,
                                const std::vector<std::string>& vocabulary, bool include_embeddings = true);

}  // namespace rahp::model
