#pragma once

// Exhaustive retrieval oracle shared by the unit and acceptance tests. It
// recomputes every embedding from the raw word vectors in long double and
// sorts the whole product list, independent of the index internals.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rahp/core/random.hpp"
#include "rahp/data/retrieval.hpp"
#include "rahp/text/tokenizer.hpp"

namespace rahp::toy {

struct RetrievalCase {
  std::map<std::string, std::vector<float>> table;
  std::vector<float> unknown;
  std::shared_ptr<const rahp::text::WordVectors> vectors;
  std::vector<std::pair<std::string, std::string>> sentences;  // (product, text)
};

inline RetrievalCase random_retrieval_case(rahp::core::Rng& rng, std::size_t max_sentences, std::size_t dim = 6) {
  RetrievalCase c;
  const std::size_t words = 5 + rng.index(30);
  std::vector<std::pair<std::string, std::vector<float>>> entries;
  for (std::size_t w = 0; w < words; ++w) {
    std::vector<float> v(dim);
    // Coarse values make exact score ties between different sentences common.
    for (auto& x : v) x = static_cast<float>(static_cast<int>(rng.index(5)) - 2) * 0.5f;
    c.table["w" + std::to_string(w)] = v;
    entries.emplace_back("w" + std::to_string(w), v);
  }
  c.vectors = std::make_shared<rahp::text::WordVectors>(rahp::text::WordVectors::from_entries(dim, entries));
  const auto u = c.vectors->unknown_vector();
  c.unknown.assign(u.begin(), u.end());
  const std::size_t n = 1 + rng.index(max_sentences);
  const std::size_t products = 1 + rng.index(4);
  for (std::size_t s = 0; s < n; ++s) {
    std::string text;
    const std::size_t len = 1 + rng.index(6);
    for (std::size_t t = 0; t < len; ++t) {
      if (!text.empty()) text += " ";
      // Some out-of-vocabulary tokens, occasionally a whole OOV sentence.
      text += rng.index(6) == 0 ? "oov" + std::to_string(rng.index(3)) : "w" + std::to_string(rng.index(words));
    }
    c.sentences.emplace_back("p" + std::to_string(rng.index(products)), text);
  }
  return c;
}

// Unnormalized sum and count, so the score divides once.
inline std::pair<std::vector<long double>, long double> oracle_embed(const RetrievalCase& c, const std::string& text) {
  std::vector<long double> sum(c.unknown.size(), 0.0L);
  long double found = 0;
  for (const auto& token : rahp::text::tokenize(text)) {
    const auto it = c.table.find(token);
    if (it == c.table.end()) continue;
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += it->second[d];
    found += 1;
  }
  if (found == 0) return {{c.unknown.begin(), c.unknown.end()}, 1.0L};
  return {sum, found};
}

struct OracleHit {
  std::string text;
  long double score;
};

inline std::vector<OracleHit> oracle_top_k(const RetrievalCase& c, const std::string& query, const std::string& product,
                                           std::size_t k) {
  const auto q = oracle_embed(c, query);
  std::vector<OracleHit> all;
  for (const auto& [p, text] : c.sentences) {
    if (p != product) continue;
    const auto v = oracle_embed(c, text);
    long double score = 0.0L;
    for (std::size_t d = 0; d < q.first.size(); ++d) score += q.first[d] * v.first[d];
    all.push_back({text, score / (q.second * v.second)});
  }
  std::stable_sort(all.begin(), all.end(), [](const OracleHit& a, const OracleHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.text < b.text;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

/// Empty string when the index result matches the oracle, else a description.
inline std::string compare_with_oracle(const RetrievalCase& c, const rahp::data::RetrievalIndex& index,
                                       const std::string& query, const std::string& product, std::size_t k) {
  const auto got = rahp::data::retrieve_top_k(query, product, index, k);
  const auto want = oracle_top_k(c, query, product, k);
  if (got.slots.size() != k) return "wrong slot count";
  for (std::size_t i = 0; i < k; ++i) {
    if (i >= want.size()) {
      if (got.slots[i]) return "slot " + std::to_string(i) + " should be EMPTY";
      continue;
    }
    if (!got.slots[i]) return "slot " + std::to_string(i) + " unexpectedly EMPTY";
    if (std::fabs(static_cast<double>(want[i].score) - got.slots[i]->score) > 1e-9) {
      return "slot " + std::to_string(i) + " score " + std::to_string(got.slots[i]->score) + " vs oracle " +
             std::to_string(static_cast<double>(want[i].score));
    }
    if (got.slots[i]->text != want[i].text) {
      return "slot " + std::to_string(i) + " text '" + got.slots[i]->text + "' vs oracle '" + want[i].text + "'";
    }
  }
  return "";
}

}  // namespace rahp::toy
