#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rahp/config.hpp"
#include "rahp/core/checkpoint.hpp"
#include "rahp/model/qa_interaction.hpp"
#include "rahp/model/ra_coherence.hpp"
#include "rahp/text/embedding.hpp"

namespace rahp::model {

/// A tokenized instance. `reviews` has exactly K slots; nullopt is EMPTY.
struct ModelInput {
  text::TokenSequence question;
  text::TokenSequence answer;
  std::vector<std::optional<text::TokenSequence>> reviews;
};

/// Tokenizes and truncates the texts; EMPTY slots are nullopt, and slots past
/// the provided reviews are EMPTY. Throws on an empty question or answer.
ModelInput encode_input(const std::string& question, const std::string& answer,
                        const std::vector<std::optional<std::string>>& reviews, const text::Vocabulary& vocab,
                        const RahpConfig& config);

/// Views of every parameter group of the network.
template <typename T>
struct RahpNetwork {
  RahpConfig config;
  text::EmbeddingTables<T> embedding;
  nn::BiLstmParams<T> context;
  QaParams<T> qa;
  nn::BiLstmParams<T> ra_encoder;
  nn::MlpParams<T> ra_head;
  nn::MlpParams<T> classifier;
};

template <typename T>
RahpNetwork<T> make_network(const core::ParamStore<T>& params, const RahpConfig& config,
                            std::shared_ptr<const std::vector<bool>> trainable_rows);

template <typename T>
struct RahpOutput {
  core::Tensor<T> logit;        // [1]
  core::Tensor<T> probability;  // [1]
  QaPrediction<T> qa;
  Alignment<T> alignment;
  core::Tensor<T> m_a;                 // undefined under no_ra_coherence
  std::vector<core::Tensor<T>> s_ra;   // K entries, zeros for EMPTY slots
  std::vector<core::Tensor<T>> betas;  // undefined for EMPTY slots or without Q-to-R attention
  core::Tensor<T> features;            // classifier input
};

/// y = sigmoid(MLP_p([s_qa; s_ra_1; ...; s_ra_K])), honouring the ablation flags.
template <typename T>
RahpOutput<T> rahp_forward(const RahpNetwork<T>& network, const ModelInput& input, core::Rng* dropout_rng = nullptr);

/// Context encoding of one sequence: the shared BiLSTM over embedded tokens.
template <typename T>
core::Tensor<T> encode_context(const RahpNetwork<T>& network, const text::TokenSequence& sequence,
                               text::CharEmbeddingCache<T>* cache = nullptr);

/// BCE on the output logit (clamped for the value, straight-through gradient).
template <typename T>
core::Tensor<T> rahp_loss(const RahpOutput<T>& output, double label);

/// BCE evaluated from a probability, with the same clamp as rahp_loss.
double binary_cross_entropy(double probability, double label);

inline constexpr double kLogitClamp = 15.0;

/// Registers every parameter in a fixed order: embedding, bilstm_c, bilstm_qa,
/// mlp_qa, bilstm_ra, mlp_ra, mlp_p.
template <typename T>
void add_rahp_params(core::ParamStore<T>& params, const RahpConfig& config, const text::WordEmbeddingTable& words,
                     core::Rng& rng);

/// Trainable model: config, vocabulary and float parameters.
class RahpModel {
 public:
  /// Fresh initialization from `config.seed`. `vectors` may be null.
  static RahpModel create(const RahpConfig& config, text::Vocabulary vocab, const text::WordVectors* vectors);

  const RahpConfig& config() const { return config_; }
  const text::Vocabulary& vocabulary() const { return vocab_; }
  core::ParamStore<float>& params() { return params_; }
  const core::ParamStore<float>& params() const { return params_; }
  std::shared_ptr<const std::vector<bool>> trainable_rows() const { return trainable_rows_; }
  RahpNetwork<float> network() const { return make_network(params_, config_, trainable_rows_); }
  double coverage() const { return coverage_; }

  ModelInput encode(const std::string& question, const std::string& answer,
                    const std::vector<std::optional<std::string>>& reviews) const;
  /// Probability of Helpful, no graph recorded.
  double predict(const ModelInput& input) const;

  /// Adds `transfer` to the metadata of subsequent saves.
  TransferRecord load_transferred(const core::Checkpoint& checkpoint);

  core::Checkpoint to_checkpoint(nlohmann::json extra_metadata = nlohmann::json::object()) const;
  void save(const std::filesystem::path& path, nlohmann::json extra_metadata = nlohmann::json::object()) const;
  /// Rebuilds the model stored at `path`. When `expected` is given, its
  /// architecture must match the stored one; differences are listed in the error.
  static RahpModel load(const std::filesystem::path& path, const RahpConfig* expected = nullptr);
  static RahpModel from_checkpoint(const core::Checkpoint& checkpoint, const RahpConfig* expected = nullptr);

 private:
  RahpConfig config_;
  text::Vocabulary vocab_;
  core::ParamStore<float> params_;
  std::vector<bool> pretrained_rows_;
  std::shared_ptr<const std::vector<bool>> trainable_rows_;
  double coverage_ = 0.0;
  nlohmann::json transfer_ = nullptr;
};

}  // namespace rahp::model
