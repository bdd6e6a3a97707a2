#include "rahp/data/retrieval.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "rahp/text/tokenizer.hpp"

namespace rahp::data {

RetrievalIndex::RetrievalIndex(std::shared_ptr<const text::WordVectors> vectors) : vectors_(std::move(vectors)) {
  if (!vectors_) throw std::invalid_argument("retrieval index needs word vectors");
}

RetrievalIndex RetrievalIndex::build(const std::vector<ReviewRecord>& reviews,
                                     std::shared_ptr<const text::WordVectors> vectors) {
  RetrievalIndex index(std::move(vectors));
  for (const auto& review : reviews) {
    const auto sentences = split_review_sentences(review.text);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      index.add({review.product_id, sentences[i], review.review_id, i});
    }
  }
  return index;
}

std::vector<double> SentenceEmbedding::mean() const {
  std::vector<double> out(sum);
  for (auto& v : out) v /= count;
  return out;
}

double embedding_score(const SentenceEmbedding& a, const SentenceEmbedding& b) {
  return std::inner_product(a.sum.begin(), a.sum.end(), b.sum.begin(), 0.0) / (a.count * b.count);
}

void RetrievalIndex::add(ReviewSentence sentence) {
  SentenceEmbedding embedding = embed_sum(sentence.text);
  products_[sentence.product_id].push_back({std::move(sentence), std::move(embedding)});
}

SentenceEmbedding RetrievalIndex::embed_sum(const std::string& text) const {
  if (!vectors_) throw std::logic_error("retrieval index has no word vectors");
  const std::size_t d = vectors_->dim();
  SentenceEmbedding e{std::vector<double>(d, 0.0), 0.0};
  for (const auto& token : text::tokenize(text)) {
    const float* v = vectors_->find(token);
    if (!v) continue;
    for (std::size_t c = 0; c < d; ++c) e.sum[c] += v[c];
    e.count += 1.0;
  }
  if (e.count == 0.0) {
    const auto unknown = vectors_->unknown_vector();
    e.sum.assign(unknown.begin(), unknown.end());
    e.count = 1.0;
  }
  return e;
}

const std::vector<IndexedSentence>* RetrievalIndex::product(const std::string& product_id) const {
  const auto it = products_.find(product_id);
  return it == products_.end() ? nullptr : &it->second;
}

std::size_t RetrievalIndex::sentence_count() const {
  std::size_t n = 0;
  for (const auto& [id, sentences] : products_) n += sentences.size();
  return n;
}

RetrievalResult retrieve_top_k(const std::string& query, const std::string& product_id, const RetrievalIndex& index,
                               std::size_t k) {
  if (k == 0) throw std::invalid_argument("retrieve_top_k: K must be positive");
  RetrievalResult result;
  result.slots.assign(k, std::nullopt);
  const auto* sentences = index.product(product_id);
  if (!sentences) {
    result.unknown_product = true;
    return result;
  }
  const SentenceEmbedding q = index.embed_sum(query);
  std::vector<std::pair<double, const IndexedSentence*>> scored;
  scored.reserve(sentences->size());
  for (const auto& s : *sentences) {
    scored.emplace_back(embedding_score(q, s.embedding), &s);
  }
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                    [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      const auto& x = a.second->sentence;
                      const auto& y = b.second->sentence;
                      if (x.text != y.text) return x.text < y.text;
                      if (x.review_id != y.review_id) return x.review_id < y.review_id;
                      return x.sentence_index < y.sentence_index;
                    });
  for (std::size_t i = 0; i < take; ++i) result.slots[i] = ReviewSlot{scored[i].second->sentence.text, scored[i].first};
  return result;
}

}  // namespace rahp::data
