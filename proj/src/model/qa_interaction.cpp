#include "rahp/model/qa_interaction.hpp"

#include <stdexcept>

#include "rahp/core/ops.hpp"

namespace rahp::model {

using core::Tensor;

template <typename T>
Tensor<T> similarity_matrix(const Tensor<T>& c_q, const Tensor<T>& c_a) {
  if (c_q.rank() != 2 || c_a.rank() != 2 || c_q.dim(1) != c_a.dim(1)) {
    throw std::invalid_argument("similarity_matrix: expected [Lq, d] and [La, d], got " +
                                core::shape_to_string(c_q.shape()) + " and " + core::shape_to_string(c_a.shape()));
  }
  return core::matmul(c_q, core::transpose(c_a));
}

template <typename T>
Alignment<T> dual_attention(const Tensor<T>& similarity, const nn::Mask& mask_q, const nn::Mask& mask_a) {
  if (similarity.rank() != 2 || similarity.dim(0) != mask_q.length() || similarity.dim(1) != mask_a.length()) {
    throw std::invalid_argument("dual_attention: masks do not match the similarity matrix");
  }
  Alignment<T> out;
  out.similarity = similarity;
  out.alpha_q = core::softmax_masked_rows(similarity, mask_a.flags());
  out.alpha_a = core::softmax_masked_rows(core::transpose(similarity), mask_q.flags());
  return out;
}

template <typename T>
std::pair<Tensor<T>, Tensor<T>> attended_representations(const Alignment<T>& alignment, const Tensor<T>& c_q,
                                                         const Tensor<T>& c_a) {
  return {core::matmul(alignment.alpha_q, c_a), core::matmul(alignment.alpha_a, c_q)};
}

template <typename T>
QaPrediction<T> qa_encode_and_predict(const Tensor<T>& c_q, const Tensor<T>& n_aq, const Tensor<T>& c_a,
                                      const Tensor<T>& n_qa, const nn::Mask& mask_q, const nn::Mask& mask_a,
                                      const QaParams<T>& params, double dropout, core::Rng* dropout_rng) {
  QaPrediction<T> out;
  out.o_q = nn::final_state(nn::bilstm_encode(core::concat_columns<T>({c_q, n_aq}), mask_q, params.encoder), mask_q);
  out.o_a = nn::final_state(nn::bilstm_encode(core::concat_columns<T>({c_a, n_qa}), mask_a, params.encoder), mask_a);
  out.s_qa = nn::mlp_forward(core::concat<T>({out.o_q, out.o_a}), params.head, dropout, dropout_rng);
  return out;
}

template <typename T>
QaPrediction<T> qa_interaction(const Tensor<T>& c_q, const Tensor<T>& c_a, const nn::Mask& mask_q,
                               const nn::Mask& mask_a, const QaParams<T>& params, double dropout,
                               core::Rng* dropout_rng, Alignment<T>* alignment_out) {
  const Alignment<T> alignment = dual_attention(similarity_matrix(c_q, c_a), mask_q, mask_a);
  const auto [n_aq, n_qa] = attended_representations(alignment, c_q, c_a);
  if (alignment_out) *alignment_out = alignment;
  return qa_encode_and_predict(c_q, n_aq, c_a, n_qa, mask_q, mask_a, params, dropout, dropout_rng);
}

#define RAHP_INSTANTIATE_QA(T)                                                                                     \
  template Tensor<T> similarity_matrix<T>(const Tensor<T>&, const Tensor<T>&);                                      \
  template Alignment<T> dual_attention<T>(const Tensor<T>&, const nn::Mask&, const nn::Mask&);                      \
  template std::pair<Tensor<T>, Tensor<T>> attended_representations<T>(const Alignment<T>&, const Tensor<T>&,       \
                                                                       const Tensor<T>&);                           \
  template QaPrediction<T> qa_encode_and_predict<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,           \
                                                    const Tensor<T>&, const nn::Mask&, const nn::Mask&,             \
                                                    const QaParams<T>&, double, core::Rng*);                        \
  template QaPrediction<T> qa_interaction<T>(const Tensor<T>&, const Tensor<T>&, const nn::Mask&, const nn::Mask&,  \
                                             const QaParams<T>&, double, core::Rng*, Alignment<T>*);

RAHP_INSTANTIATE_QA(float)
RAHP_INSTANTIATE_QA(double)

}  // namespace rahp::model
