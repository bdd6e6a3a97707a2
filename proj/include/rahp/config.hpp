#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rahp {

/// Every tunable of the model, training loop and data pipeline.
/// Serialized as flat `key=value` text; unknown keys are rejected.
struct RahpConfig {
  // Embeddings.
  std::size_t word_dim = 300;
  std::size_t char_dim = 16;
  std::size_t char_filters = 50;
  std::vector<std::size_t> char_widths = {2, 3, 4, 5};
  std::size_t max_word_length = 40;
  bool freeze_pretrained_words = false;

  // Encoders. Sequences longer than the limits are truncated.
  std::size_t hidden = 128;
  std::size_t max_question_tokens = 40;
  std::size_t max_answer_tokens = 60;
  std::size_t max_review_tokens = 50;

  // Prediction heads.
  std::size_t mlp_hidden = 256;        // hidden width of the QA and RA heads
  std::size_t qa_dim = 128;            // width of the QA prediction vector
  std::size_t ra_dim = 3;              // width of each per-review prediction vector
  std::size_t classifier_hidden = 128;
  std::size_t num_reviews = 5;
  double dropout = 0.0;

  // Ablations.
  bool no_ra_coherence = false;
  bool no_q_to_r_attention = false;
  bool no_char_embedding = false;

  // Training.
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 30;
  std::size_t patience = 5;
  std::uint64_t seed = 13;

  // Pre-training.
  std::size_t pretrain_batch_size = 64;
  std::size_t pretrain_max_epochs = 10;
  std::size_t pretrain_patience = 3;
  bool transfer_embeddings = true;

  // Data pipeline: "question" or "question_answer".
  std::string retrieval_query = "question";

  std::size_t char_output_dim() const { return no_char_embedding ? 0 : char_filters * char_widths.size(); }
  std::size_t embedding_dim() const { return word_dim + char_output_dim(); }
  std::size_t classifier_input_dim() const { return qa_dim + (no_ra_coherence ? 0 : num_reviews * ra_dim); }

  /// Throws std::invalid_argument naming the first offending key.
  void validate() const;

  std::map<std::string, std::string> to_map() const;
  /// Sorted `key=value` lines.
  std::string to_text() const;
  /// Applies one override; throws on unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);

  static RahpConfig from_map(const std::map<std::string, std::string>& values);
  static RahpConfig parse(const std::string& text);
  static RahpConfig load(const std::filesystem::path& path);

  /// Hash of all keys.
  std::string fingerprint() const;
  /// Hash of the keys that determine parameter shapes and forward semantics.
  std::string architecture_fingerprint() const;
  /// "key: this vs other" for every architecture key that differs.
  std::vector<std::string> architecture_differences(const RahpConfig& other) const;
};

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace rahp
