#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rahp/config.hpp"
#include "rahp/core/params.hpp"
#include "rahp/text/vocabulary.hpp"
#include "rahp/text/word_vectors.hpp"

namespace rahp::text {

// Character inventory: PAD, UNK, then printable ASCII 0x20..0x7e.
inline constexpr std::size_t kCharPad = 0;
inline constexpr std::size_t kCharUnk = 1;
inline constexpr std::size_t kCharVocabSize = 2 + (0x7e - 0x20 + 1);

std::size_t char_id(char c);

/// Character ids of `word`, clamped to `max_length` characters and right-padded
/// with kCharPad up to `min_length`.
std::vector<std::size_t> char_ids(std::string_view word, std::size_t min_length, std::size_t max_length);

/// Token sequence ready for embedding. Entries past `real_length` are padding
/// (empty token, id Vocabulary::kPad).
struct TokenSequence {
  std::vector<std::string> tokens;
  std::vector<std::size_t> ids;
  std::size_t real_length = 0;

  std::size_t length() const { return ids.size(); }
};

/// Looks tokens up in `vocab` after truncating to `max_tokens`.
TokenSequence encode_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab, std::size_t max_tokens);
/// Right-pads with PAD entries to `length` (no-op when already that long).
TokenSequence pad_sequence(TokenSequence sequence, std::size_t length);

template <typename T>
struct CharConvParams {
  core::Tensor<T> table;                  // [kCharVocabSize, char_dim]
  std::vector<std::size_t> widths;
  std::vector<core::Tensor<T>> weights;   // per width: [filters, width * char_dim]
  std::vector<core::Tensor<T>> biases;    // per width: [filters]
  std::size_t max_word_length = 40;

  std::size_t output_dim() const;
  std::size_t max_width() const;
};

/// Convolution over the character embeddings of `word` for every filter
/// width, max-pooled over time, blocks concatenated in width order.
template <typename T>
core::Tensor<T> char_embed_word(std::string_view word, const CharConvParams<T>& params);

/// Everything needed to embed token sequences.
template <typename T>
struct EmbeddingTables {
  core::Tensor<T> words;                               // [vocab, word_dim]
  std::shared_ptr<const std::vector<bool>> trainable_rows;
  bool use_chars = true;
  CharConvParams<T> chars;
};

/// Per-forward memo of character embeddings, keyed by token.
template <typename T>
using CharEmbeddingCache = std::unordered_map<std::string, core::Tensor<T>>;

/// Row t = [char_embed_word(token_t); word_vector(token_t)]. Throws
/// std::invalid_argument("empty sequence") on an empty sequence.
template <typename T>
core::Tensor<T> embed_sequence(const TokenSequence& sequence, const EmbeddingTables<T>& tables,
                               CharEmbeddingCache<T>* cache = nullptr);

/// Registers `embedding.word`, `embedding.char` and `embedding.char_conv.*`.
template <typename T>
void add_embedding_params(core::ParamStore<T>& params, const RahpConfig& config, const WordEmbeddingTable& words,
                          core::Rng& rng);

/// Views the registered embedding parameters. `trainable_rows` may be null.
template <typename T>
EmbeddingTables<T> embedding_tables(const core::ParamStore<T>& params, const RahpConfig& config,
                                    std::shared_ptr<const std::vector<bool>> trainable_rows);

/// Row mask for `embedding_lookup`: PAD never trains; pre-trained rows are
/// frozen when the config asks for it.
std::shared_ptr<const std::vector<bool>> trainable_word_rows(const WordEmbeddingTable& table, const RahpConfig& config);

}  // namespace rahp::text
