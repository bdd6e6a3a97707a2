#include "rahp/text/embedding.hpp"

#include <algorithm>
#include <stdexcept>

#include "rahp/core/ops.hpp"

namespace rahp::text {

using core::Tensor;

std::size_t char_id(char c) {
  const auto u = static_cast<unsigned char>(c);
  if (u >= 0x20 && u <= 0x7e) return 2 + (u - 0x20);
  return kCharUnk;
}

std::vector<std::size_t> char_ids(std::string_view word, std::size_t min_length, std::size_t max_length) {
  const std::size_t n = std::min(word.size(), max_length);
  std::vector<std::size_t> ids;
  ids.reserve(std::max(n, min_length));
  for (std::size_t i = 0; i < n; ++i) ids.push_back(char_id(word[i]));
  while (ids.size() < min_length) ids.push_back(kCharPad);
  return ids;
}

TokenSequence encode_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab, std::size_t max_tokens) {
  TokenSequence sequence;
  const std::size_t n = std::min(tokens.size(), max_tokens);
  sequence.tokens.assign(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(n));
  sequence.ids.reserve(n);
  for (const auto& token : sequence.tokens) sequence.ids.push_back(vocab.index(token));
  sequence.real_length = n;
  return sequence;
}

TokenSequence pad_sequence(TokenSequence sequence, std::size_t length) {
  while (sequence.ids.size() < length) {
    sequence.tokens.emplace_back();
    sequence.ids.push_back(Vocabulary::kPad);
  }
  return sequence;
}

template <typename T>
std::size_t CharConvParams<T>::output_dim() const {
  std::size_t total = 0;
  for (const auto& b : biases) total += b.size();
  return total;
}

template <typename T>
std::size_t CharConvParams<T>::max_width() const {
  return widths.empty() ? 1 : *std::max_element(widths.begin(), widths.end());
}

template <typename T>
Tensor<T> char_embed_word(std::string_view word, const CharConvParams<T>& params) {
  const auto ids = char_ids(word, params.max_width(), params.max_word_length);
  const Tensor<T> chars = core::embedding_lookup<T>(params.table, ids);
  std::vector<Tensor<T>> blocks;
  blocks.reserve(params.widths.size());
  for (std::size_t k = 0; k < params.widths.size(); ++k) {
    const Tensor<T> windows = core::unfold_rows(chars, params.widths[k]);
    blocks.push_back(core::max_over_rows(core::linear(windows, params.weights[k], params.biases[k])));
  }
  return core::concat(blocks);
}

template <typename T>
Tensor<T> embed_sequence(const TokenSequence& sequence, const EmbeddingTables<T>& tables, CharEmbeddingCache<T>* cache) {
  if (sequence.length() == 0) throw std::invalid_argument("empty sequence");
  if (sequence.tokens.size() != sequence.ids.size()) throw std::invalid_argument("token/id length mismatch");
  const Tensor<T> word_part = core::embedding_lookup<T>(tables.words, sequence.ids, tables.trainable_rows);
  if (!tables.use_chars) return word_part;

  std::vector<Tensor<T>> char_rows;
  char_rows.reserve(sequence.length());
  CharEmbeddingCache<T> local;
  CharEmbeddingCache<T>& memo = cache ? *cache : local;
  for (const auto& token : sequence.tokens) {
    auto it = memo.find(token);
    if (it == memo.end()) it = memo.emplace(token, char_embed_word<T>(token, tables.chars)).first;
    char_rows.push_back(it->second);
  }
  return core::concat_columns<T>({core::stack_rows(char_rows), word_part});
}

template <typename T>
void add_embedding_params(core::ParamStore<T>& params, const RahpConfig& config, const WordEmbeddingTable& words,
                          core::Rng& rng) {
  if (words.dim != config.word_dim) {
    throw std::invalid_argument("word table dimension " + std::to_string(words.dim) + " does not match word_dim " +
                                std::to_string(config.word_dim));
  }
  std::vector<T> word_values(words.values.begin(), words.values.end());
  params.add("embedding.word", Tensor<T>::from({words.rows, words.dim}, std::move(word_values), true));
  if (config.no_char_embedding) return;
  params.add("embedding.char", core::uniform_tensor<T>({kCharVocabSize, config.char_dim}, kWordInitBound, rng));
  for (std::size_t width : config.char_widths) {
    const std::string prefix = "embedding.char_conv.w" + std::to_string(width);
    params.add(prefix + ".weight", core::xavier_uniform<T>(width * config.char_dim, config.char_filters, rng));
    params.add(prefix + ".bias", Tensor<T>::zeros({config.char_filters}, true));
  }
}

template <typename T>
EmbeddingTables<T> embedding_tables(const core::ParamStore<T>& params, const RahpConfig& config,
                                    std::shared_ptr<const std::vector<bool>> trainable_rows) {
  EmbeddingTables<T> tables;
  tables.words = params.get("embedding.word");
  tables.trainable_rows = std::move(trainable_rows);
  tables.use_chars = !config.no_char_embedding;
  if (!tables.use_chars) return tables;
  tables.chars.table = params.get("embedding.char");
  tables.chars.widths = config.char_widths;
  tables.chars.max_word_length = config.max_word_length;
  for (std::size_t width : config.char_widths) {
    const std::string prefix = "embedding.char_conv.w" + std::to_string(width);
    tables.chars.weights.push_back(params.get(prefix + ".weight"));
    tables.chars.biases.push_back(params.get(prefix + ".bias"));
  }
  return tables;
}

std::shared_ptr<const std::vector<bool>> trainable_word_rows(const WordEmbeddingTable& table, const RahpConfig& config) {
  auto rows = std::make_shared<std::vector<bool>>(table.rows, true);
  (*rows)[Vocabulary::kPad] = false;
  if (config.freeze_pretrained_words) {
    for (std::size_t r = 0; r < table.rows; ++r) {
      if (table.pretrained[r]) (*rows)[r] = false;
    }
  }
  return rows;
}

#define RAHP_INSTANTIATE_EMBEDDING(T)                                                                               \
  template struct CharConvParams<T>;                                                                                \
  template Tensor<T> char_embed_word<T>(std::string_view, const CharConvParams<T>&);                                \
  template Tensor<T> embed_sequence<T>(const TokenSequence&, const EmbeddingTables<T>&, CharEmbeddingCache<T>*);    \
  template void add_embedding_params<T>(core::ParamStore<T>&, const RahpConfig&, const WordEmbeddingTable&,        \
                                        core::Rng&);                                                                \
  template EmbeddingTables<T> embedding_tables<T>(const core::ParamStore<T>&, const RahpConfig&,                   \
                                                  std::shared_ptr<const std::vector<bool>>);

RAHP_INSTANTIATE_EMBEDDING(float)
RAHP_INSTANTIATE_EMBEDDING(double)

}  // namespace rahp::text
