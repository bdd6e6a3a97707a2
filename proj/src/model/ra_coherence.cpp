#include "rahp/model/ra_coherence.hpp"

#include <algorithm>
#include <stdexcept>

#include "rahp/core/ops.hpp"

namespace rahp::model {

using core::Tensor;

template <typename T>
Tensor<T> ra_encode(const Tensor<T>& context, const nn::Mask& mask, const nn::BiLstmParams<T>& encoder) {
  return nn::final_state(nn::bilstm_encode(context, mask, encoder), mask);
}

template <typename T>
QToRAttention<T> q_to_r_attention(const Tensor<T>& o_q, const Tensor<T>& c_r, const nn::Mask& mask) {
  if (o_q.rank() != 1 || c_r.rank() != 2 || c_r.dim(1) != o_q.size() || c_r.dim(0) != mask.length()) {
    throw std::invalid_argument("q_to_r_attention: expected o_q [d] and c_r [Lr, d], got " +
                                core::shape_to_string(o_q.shape()) + " and " + core::shape_to_string(c_r.shape()));
  }
  QToRAttention<T> out;
  out.beta = core::softmax_masked(core::matmul(c_r, o_q), mask.flags());
  out.v_r = core::matmul(out.beta, c_r);
  return out;
}

template <typename T>
Tensor<T> compose_review(const Tensor<T>& v_r, const Tensor<T>& o_r) {
  if (v_r.shape() != o_r.shape()) throw std::invalid_argument("compose_review: dimension mismatch");
  return core::add(v_r, o_r);
}

template <typename T>
Tensor<T> ra_predict(const Tensor<T>& m_r, const Tensor<T>& m_a, const nn::MlpParams<T>& head, double dropout,
                     core::Rng* dropout_rng) {
  return nn::mlp_forward(core::concat<T>({m_r, m_a}), head, dropout, dropout_rng);
}

template <typename T>
TransferRecord load_transferred(const core::Checkpoint& checkpoint, core::ParamStore<T>& params,
                                const std::vector<std::string>& vocabulary, bool include_embeddings) {
  std::vector<std::string> problems;
  TransferRecord record;
  if (checkpoint.metadata.contains("source")) record.source = checkpoint.metadata["source"].get<std::string>();

  std::vector<std::string> wanted;
  for (const auto& prefix : transfer_prefixes()) {
    if (prefix == "embedding." && !include_embeddings) continue;
    for (auto& name : params.names_with_prefix(prefix)) wanted.push_back(std::move(name));
  }

  std::size_t word_rows = 0;
  for (const auto& name : wanted) {
    const core::CheckpointTensor* source = checkpoint.find(name);
    const auto& target = params.get(name);
    if (!source) {
      problems.push_back(name + ": missing from checkpoint");
      continue;
    }
    if (name == "embedding.word") {
      const bool shape_ok = source->shape.size() == 2 && source->shape[1] == target.dim(1) &&
                            source->shape[0] <= target.dim(0);
      if (!shape_ok) {
        problems.push_back(name + ": checkpoint " + core::shape_to_string(source->shape) + " vs model " +
                           core::shape_to_string(target.shape()));
        continue;
      }
      std::vector<std::string> source_vocab;
      if (checkpoint.metadata.contains("vocabulary")) {
        source_vocab = checkpoint.metadata["vocabulary"].get<std::vector<std::string>>();
      }
      const bool prefix_ok = source_vocab.size() == source->shape[0] && source_vocab.size() <= vocabulary.size() &&
                             std::equal(source_vocab.begin(), source_vocab.end(), vocabulary.begin());
      if (!prefix_ok) {
        problems.push_back(name + ": checkpoint vocabulary is not a prefix of the model vocabulary");
        continue;
      }
      word_rows = source->shape[0];
      continue;
    }
    if (source->shape != target.shape()) {
      problems.push_back(name + ": checkpoint " + core::shape_to_string(source->shape) + " vs model " +
                         core::shape_to_string(target.shape()));
    }
  }
  if (!problems.empty()) {
    std::string message = "cannot transfer parameters:";
    for (const auto& p : problems) message += "\n  " + p;
    throw std::runtime_error(message);
  }

  for (const auto& name : wanted) {
    const core::CheckpointTensor* source = checkpoint.find(name);
    auto data = params.get(name).mutable_data();
    std::transform(source->values.begin(), source->values.end(), data.begin(),
                   [](float v) { return static_cast<T>(v); });
    record.tensors.push_back(name);
    if (name == "embedding.word") {
      record.embedding_rows_copied = word_rows;
      record.embedding_rows_total = params.get(name).dim(0);
    }
  }
  return record;
}

#define RAHP_INSTANTIATE_RA(T)                                                                                     \
  template Tensor<T> ra_encode<T>(const Tensor<T>&, const nn::Mask&, const nn::BiLstmParams<T>&);                   \
  template QToRAttention<T> q_to_r_attention<T>(const Tensor<T>&, const Tensor<T>&, const nn::Mask&);               \
  template Tensor<T> compose_review<T>(const Tensor<T>&, const Tensor<T>&);                                         \
  template Tensor<T> ra_predict<T>(const Tensor<T>&, const Tensor<T>&, const nn::MlpParams<T>&, double,            \
                                   core::Rng*);                                                                     \
  template TransferRecord load_transferred<T>(const core::Checkpoint&, core::ParamStore<T>&,                       \
                                              const std::vector<std::string>&, bool);

RAHP_INSTANTIATE_RA(float)
RAHP_INSTANTIATE_RA(double)

}  // namespace rahp::model
