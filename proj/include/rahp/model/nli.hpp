#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rahp/config.hpp"
#include "rahp/core/checkpoint.hpp"
#include "rahp/nn/sequence.hpp"
#include "rahp/text/embedding.hpp"

namespace rahp::model {

enum class NliLabel { kEntailment = 0, kNeutral = 1, kContradiction = 2 };

inline constexpr std::size_t kNliClasses = 3;

/// "entailment" | "neutral" | "contradiction"; anything else (including "-") is nullopt.
std::optional<NliLabel> parse_nli_label(std::string_view text);
std::string nli_label_name(NliLabel label);

struct NliInstance {
  std::vector<std::string> premise;
  std::vector<std::string> hypothesis;
  NliLabel label = NliLabel::kNeutral;
};

struct NliCorpus {
  std::vector<NliInstance> instances;
  std::size_t records = 0;
  std::size_t skipped_label = 0;  // missing or undetermined gold label
  std::size_t skipped_empty = 0;  // a sentence tokenized to nothing
  std::vector<std::string> warnings;
};

/// Reads JSON lines with gold_label / sentence1 / sentence2, or tab-separated
/// lines. Tab-separated files may start with a header naming those columns;
/// otherwise the first three columns are label, premise, hypothesis.
NliCorpus parse_nli_corpus(const std::filesystem::path& path);

/// Embedding, context BiLSTM, RA BiLSTM and RA head; the same tensors RAHP uses.
template <typename T>
struct NliNetwork {
  RahpConfig config;
  text::EmbeddingTables<T> embedding;
  nn::BiLstmParams<T> context;
  nn::BiLstmParams<T> ra_encoder;
  nn::MlpParams<T> ra_head;
};

template <typename T>
NliNetwork<T> make_nli_network(const core::ParamStore<T>& params, const RahpConfig& config,
                               std::shared_ptr<const std::vector<bool>> trainable_rows);

/// Registers the pre-training parameters in the same order RAHP uses for them.
template <typename T>
void add_nli_params(core::ParamStore<T>& params, const RahpConfig& config, const text::WordEmbeddingTable& words,
                    core::Rng& rng);

/// Logits over {entailment, neutral, contradiction} from MLP_ra([o_p; o_h]).
template <typename T>
core::Tensor<T> nli_logits(const NliNetwork<T>& network, const text::TokenSequence& premise,
                           const text::TokenSequence& hypothesis, core::Rng* dropout_rng = nullptr);

/// softmax(nli_logits(...)).
template <typename T>
core::Tensor<T> nli_forward(const NliNetwork<T>& network, const text::TokenSequence& premise,
                            const text::TokenSequence& hypothesis);

/// Vocabulary of all tokens of `corpus` in first-seen order.
text::Vocabulary build_nli_vocabulary(const NliCorpus& corpus);

struct PretrainEpoch {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
  double valid_accuracy = 0.0;  // train accuracy when no validation corpus is given
};

struct PretrainResult {
  core::Checkpoint checkpoint;  // transferable tensors of the best epoch
  std::vector<PretrainEpoch> history;
  std::size_t best_epoch = 0;
  text::Vocabulary vocabulary;
};

struct PretrainOptions {
  std::size_t max_epochs = 10;
  std::size_t batch_size = 64;
  std::size_t patience = 3;
  /// Stop once training accuracy reaches this value; above 1 disables the check.
  double stop_at_train_accuracy = 2.0;
  std::string source = "nli-pretrain";
  std::ostream* log = nullptr;
};

/// Cross-entropy training with Adam; early stopping on validation accuracy.
/// Throws train::DivergenceError on a non-finite loss.
PretrainResult pretrain(const NliCorpus& train, const NliCorpus* valid, const RahpConfig& config,
                        const text::WordVectors* vectors, const PretrainOptions& options);

/// Accuracy of the float network on `corpus`.
double nli_accuracy(const NliNetwork<float>& network, const text::Vocabulary& vocab, const NliCorpus& corpus,
                    const RahpConfig& config);

}  // namespace rahp::model
