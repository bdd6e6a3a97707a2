#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rahp/data/records.hpp"
#include "rahp/text/word_vectors.hpp"

namespace rahp::data {

/// Sum of the token vectors and how many were summed; the embedding is
/// sum / count. Scores divide once at the end, so equal exact scores round
/// to equal doubles and the text tie-break stays well defined.
struct SentenceEmbedding {
  std::vector<double> sum;
  double count = 1.0;

  std::vector<double> mean() const;
};

struct IndexedSentence {
  ReviewSentence sentence;
  SentenceEmbedding embedding;
};

/// Per-product review sentences with word-vector-average embeddings.
class RetrievalIndex {
 public:
  RetrievalIndex() = default;
  RetrievalIndex(std::shared_ptr<const text::WordVectors> vectors);

  /// Splits every review into sentences and indexes them.
  static RetrievalIndex build(const std::vector<ReviewRecord>& reviews,
                              std::shared_ptr<const text::WordVectors> vectors);

  void add(ReviewSentence sentence);

  /// Mean of the vectors of the tokens that have one; the unknown-word vector
  /// when none does (including empty text).
  std::vector<double> embed(const std::string& text) const { return embed_sum(text).mean(); }
  SentenceEmbedding embed_sum(const std::string& text) const;

  /// Null for an unknown product.
  const std::vector<IndexedSentence>* product(const std::string& product_id) const;
  std::size_t dim() const { return vectors_ ? vectors_->dim() : 0; }
  std::size_t product_count() const { return products_.size(); }
  std::size_t sentence_count() const;

 private:
  std::shared_ptr<const text::WordVectors> vectors_;
  std::map<std::string, std::vector<IndexedSentence>> products_;
};

/// mean(a) . mean(b)
double embedding_score(const SentenceEmbedding& a, const SentenceEmbedding& b);

struct RetrievalResult {
  std::vector<std::optional<ReviewSlot>> slots;  // exactly K
  bool unknown_product = false;
};

/// Top-K sentences of `product_id` by dot product with the query embedding,
/// descending, ties broken by sentence text; EMPTY slots pad to K.
RetrievalResult retrieve_top_k(const std::string& query, const std::string& product_id, const RetrievalIndex& index,
                               std::size_t k);

}  // namespace rahp::data
