#include "rahp/model/rahp_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rahp/core/ops.hpp"
#include "rahp/text/tokenizer.hpp"

namespace rahp::model {

using core::Tensor;

namespace {

nn::Mask mask_of(const text::TokenSequence& sequence) { return nn::Mask(sequence.length(), sequence.real_length); }

}  // namespace

ModelInput encode_input(const std::string& question, const std::string& answer,
                        const std::vector<std::optional<std::string>>& reviews, const text::Vocabulary& vocab,
                        const RahpConfig& config) {
  ModelInput input;
  input.question = text::encode_tokens(text::tokenize(question), vocab, config.max_question_tokens);
  input.answer = text::encode_tokens(text::tokenize(answer), vocab, config.max_answer_tokens);
  if (input.question.length() == 0) throw std::invalid_argument("empty question");
  if (input.answer.length() == 0) throw std::invalid_argument("empty answer");
  input.reviews.resize(config.num_reviews);
  for (std::size_t k = 0; k < config.num_reviews && k < reviews.size(); ++k) {
    if (!reviews[k]) continue;
    auto tokens = text::tokenize(*reviews[k]);
    if (tokens.empty()) continue;
    input.reviews[k] = text::encode_tokens(tokens, vocab, config.max_review_tokens);
  }
  return input;
}

template <typename T>
RahpNetwork<T> make_network(const core::ParamStore<T>& params, const RahpConfig& config,
                            std::shared_ptr<const std::vector<bool>> trainable_rows) {
  RahpNetwork<T> network;
  network.config = config;
  network.embedding = text::embedding_tables(params, config, std::move(trainable_rows));
  network.context = nn::bilstm_params(params, "bilstm_c");
  network.qa = {nn::bilstm_params(params, "bilstm_qa"), nn::mlp_params(params, "mlp_qa")};
  network.ra_encoder = nn::bilstm_params(params, "bilstm_ra");
  network.ra_head = nn::mlp_params(params, "mlp_ra");
  network.classifier = nn::mlp_params(params, "mlp_p");
  return network;
}

template <typename T>
Tensor<T> encode_context(const RahpNetwork<T>& network, const text::TokenSequence& sequence,
                         text::CharEmbeddingCache<T>* cache) {
  return nn::bilstm_encode(text::embed_sequence(sequence, network.embedding, cache), mask_of(sequence),
                           network.context);
}

template <typename T>
RahpOutput<T> rahp_forward(const RahpNetwork<T>& network, const ModelInput& input, core::Rng* dropout_rng) {
  const RahpConfig& config = network.config;
  if (input.question.real_length == 0) throw std::invalid_argument("empty question");
  if (input.answer.real_length == 0) throw std::invalid_argument("empty answer");
  if (input.reviews.size() != config.num_reviews) {
    throw std::invalid_argument("expected " + std::to_string(config.num_reviews) + " review slots, got " +
                                std::to_string(input.reviews.size()));
  }
  const double dropout = dropout_rng ? config.dropout : 0.0;
  text::CharEmbeddingCache<T> cache;
  const nn::Mask mask_q = mask_of(input.question);
  const nn::Mask mask_a = mask_of(input.answer);
  const Tensor<T> c_q = encode_context(network, input.question, &cache);
  const Tensor<T> c_a = encode_context(network, input.answer, &cache);

  RahpOutput<T> out;
  out.qa = qa_interaction(c_q, c_a, mask_q, mask_a, network.qa, dropout, dropout_rng, &out.alignment);
  std::vector<Tensor<T>> parts = {out.qa.s_qa};

  if (!config.no_ra_coherence) {
    out.m_a = ra_encode(c_a, mask_a, network.ra_encoder);
    for (const auto& slot : input.reviews) {
      if (!slot || slot->real_length == 0) {
        out.s_ra.push_back(Tensor<T>::zeros({config.ra_dim}));
        out.betas.emplace_back();
        continue;
      }
      const nn::Mask mask_r = mask_of(*slot);
      const Tensor<T> c_r = encode_context(network, *slot, &cache);
      const Tensor<T> o_r = ra_encode(c_r, mask_r, network.ra_encoder);
      Tensor<T> m_r = o_r;
      if (!config.no_q_to_r_attention) {
        const QToRAttention<T> attention = q_to_r_attention(out.qa.o_q, c_r, mask_r);
        m_r = compose_review(attention.v_r, o_r);
        out.betas.push_back(attention.beta);
      } else {
        out.betas.emplace_back();
      }
      out.s_ra.push_back(ra_predict(m_r, out.m_a, network.ra_head, dropout, dropout_rng));
    }
    parts.insert(parts.end(), out.s_ra.begin(), out.s_ra.end());
  }
  out.features = core::concat(parts);
  out.logit = nn::mlp_forward(out.features, network.classifier, dropout, dropout_rng);
  out.probability = core::sigmoid(out.logit);
  return out;
}

template <typename T>
Tensor<T> rahp_loss(const RahpOutput<T>& output, double label) {
  return core::bce_with_logits(output.logit, label, kLogitClamp);
}

double binary_cross_entropy(double probability, double label) {
  const double bound = 1.0 / (1.0 + std::exp(kLogitClamp));
  const double p = std::clamp(probability, bound, 1.0 - bound);
  return -(label * std::log(p) + (1.0 - label) * std::log1p(-p));
}

template <typename T>
void add_rahp_params(core::ParamStore<T>& params, const RahpConfig& config, const text::WordEmbeddingTable& words,
                     core::Rng& rng) {
  config.validate();
  const std::size_t h = config.hidden;
  text::add_embedding_params(params, config, words, rng);
  nn::add_bilstm_params(params, "bilstm_c", config.embedding_dim(), h, rng);
  nn::add_bilstm_params(params, "bilstm_qa", 4 * h, h, rng);
  nn::add_mlp_params(params, "mlp_qa", 4 * h, config.mlp_hidden, config.qa_dim, rng);
  nn::add_bilstm_params(params, "bilstm_ra", 2 * h, h, rng);
  nn::add_mlp_params(params, "mlp_ra", 4 * h, config.mlp_hidden, config.ra_dim, rng);
  nn::add_mlp_params(params, "mlp_p", config.classifier_input_dim(), config.classifier_hidden, 1, rng);
}

RahpModel RahpModel::create(const RahpConfig& config, text::Vocabulary vocab, const text::WordVectors* vectors) {
  RahpModel model;
  model.config_ = config;
  vocab.freeze();
  model.vocab_ = std::move(vocab);
  core::Rng rng(config.seed);
  const auto table = text::build_embedding_table(model.vocab_, vectors, config.word_dim, rng);
  add_rahp_params(model.params_, config, table, rng);
  model.pretrained_rows_ = table.pretrained;
  model.trainable_rows_ = text::trainable_word_rows(table, config);
  model.coverage_ = table.coverage;
  return model;
}

ModelInput RahpModel::encode(const std::string& question, const std::string& answer,
                             const std::vector<std::optional<std::string>>& reviews) const {
  return encode_input(question, answer, reviews, vocab_, config_);
}

double RahpModel::predict(const ModelInput& input) const {
  core::NoGradGuard no_grad;
  return static_cast<double>(rahp_forward(network(), input).probability.item());
}

TransferRecord RahpModel::load_transferred(const core::Checkpoint& checkpoint) {
  TransferRecord record = model::load_transferred(checkpoint, params_, vocab_.words(), config_.transfer_embeddings);
  transfer_ = {{"source", record.source},
               {"tensors", record.tensors},
               {"embedding_rows_copied", record.embedding_rows_copied},
               {"embedding_rows_total", record.embedding_rows_total}};
  return record;
}

core::Checkpoint RahpModel::to_checkpoint(nlohmann::json extra_metadata) const {
  nlohmann::json metadata = std::move(extra_metadata);
  metadata["kind"] = "rahp";
  metadata["config"] = config_.to_map();
  metadata["architecture"] = config_.architecture_fingerprint();
  metadata["vocabulary"] = vocab_.words();
  std::vector<std::size_t> pretrained;
  for (std::size_t r = 0; r < pretrained_rows_.size(); ++r) {
    if (pretrained_rows_[r]) pretrained.push_back(r);
  }
  metadata["pretrained_rows"] = pretrained;
  metadata["coverage"] = coverage_;
  if (!transfer_.is_null()) metadata["transfer"] = transfer_;
  return core::checkpoint_from_params(params_, std::move(metadata));
}

void RahpModel::save(const std::filesystem::path& path, nlohmann::json extra_metadata) const {
  core::write_checkpoint(path, to_checkpoint(std::move(extra_metadata)));
}

RahpModel RahpModel::load(const std::filesystem::path& path, const RahpConfig* expected) {
  return from_checkpoint(core::read_checkpoint(path), expected);
}

RahpModel RahpModel::from_checkpoint(const core::Checkpoint& checkpoint, const RahpConfig* expected) {
  const auto& meta = checkpoint.metadata;
  if (meta.value("kind", "") != "rahp") throw std::runtime_error("not a RAHP model checkpoint");
  const RahpConfig stored = RahpConfig::from_map(meta.at("config").get<std::map<std::string, std::string>>());
  if (expected) {
    const auto differences = expected->architecture_differences(stored);
    if (!differences.empty()) {
      std::string message = "checkpoint architecture does not match the config (config vs checkpoint):";
      for (const auto& d : differences) message += "\n  " + d;
      throw std::runtime_error(message);
    }
  }
  RahpModel model;
  model.config_ = stored;
  model.vocab_ = text::Vocabulary::from_words(meta.at("vocabulary").get<std::vector<std::string>>());
  model.vocab_.freeze();

  text::WordEmbeddingTable table;
  table.rows = model.vocab_.size();
  table.dim = stored.word_dim;
  table.values.assign(table.rows * table.dim, 0.0f);
  table.pretrained.assign(table.rows, false);
  for (std::size_t r : meta.value("pretrained_rows", std::vector<std::size_t>{})) {
    if (r >= table.rows) throw std::runtime_error("checkpoint lists a pretrained row outside the vocabulary");
    table.pretrained[r] = true;
  }
  core::Rng rng(stored.seed);
  add_rahp_params(model.params_, stored, table, rng);
  core::load_params_from_checkpoint(checkpoint, model.params_, true);
  model.pretrained_rows_ = table.pretrained;
  model.trainable_rows_ = text::trainable_word_rows(table, stored);
  model.coverage_ = meta.value("coverage", 0.0);
  if (meta.contains("transfer")) model.transfer_ = meta["transfer"];
  return model;
}

#define RAHP_INSTANTIATE_MODEL(T)                                                                                   \
  template RahpNetwork<T> make_network<T>(const core::ParamStore<T>&, const RahpConfig&,                            \
                                          std::shared_ptr<const std::vector<bool>>);                                \
  template Tensor<T> encode_context<T>(const RahpNetwork<T>&, const text::TokenSequence&,                           \
                                       text::CharEmbeddingCache<T>*);                                               \
  template RahpOutput<T> rahp_forward<T>(const RahpNetwork<T>&, const ModelInput&, core::Rng*);                     \
  template Tensor<T> rahp_loss<T>(const RahpOutput<T>&, double);                                                    \
  template void add_rahp_params<T>(core::ParamStore<T>&, const RahpConfig&, const text::WordEmbeddingTable&,       \
                                   core::Rng&);

RAHP_INSTANTIATE_MODEL(float)
RAHP_INSTANTIATE_MODEL(double)

}  // namespace rahp::model
