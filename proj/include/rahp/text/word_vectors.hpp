#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rahp/core/random.hpp"
#include "rahp/text/vocabulary.hpp"

namespace rahp::text {

/// Pre-trained vectors read from whitespace-separated text, one
/// "word v1 ... vD" entry per line.
class WordVectors {
 public:
  /// `expected_dim` 0 takes the dimension from the first line. A line with
  /// the wrong number of values is an error naming that line; a line whose
  /// values do not parse as numbers is skipped and counted.
  static WordVectors load(const std::filesystem::path& path, std::size_t expected_dim = 0);
  static WordVectors from_entries(std::size_t dim, const std::vector<std::pair<std::string, std::vector<float>>>& entries);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return index_.size(); }
  std::size_t malformed_lines() const { return malformed_lines_; }

  /// Null when the word has no vector.
  const float* find(std::string_view word) const;
  /// Mean of all vectors; stands in for out-of-vocabulary words.
  std::span<const float> unknown_vector() const { return unknown_; }

 private:
  void finalize();

  std::size_t dim_ = 0;
  std::vector<float> values_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> unknown_;
  std::size_t malformed_lines_ = 0;
};

/// Word embedding matrix aligned with a vocabulary.
struct WordEmbeddingTable {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<float> values;       // rows x dim, row-major
  std::vector<bool> pretrained;    // row copied verbatim from the vector file
  double coverage = 0.0;           // fraction of non-special vocabulary rows found
  std::size_t malformed_lines = 0;

  std::span<const float> row(std::size_t index) const { return {values.data() + index * dim, dim}; }
};

inline constexpr double kWordInitBound = 0.1;

/// Rows of words found in `vectors` are copied verbatim; other rows are
/// drawn from U(-0.1, 0.1). The PAD row is zero. `vectors` may be null.
WordEmbeddingTable build_embedding_table(const Vocabulary& vocab, const WordVectors* vectors, std::size_t dim,
                                         core::Rng& rng);

WordEmbeddingTable load_pretrained_vectors(const std::filesystem::path& path, const Vocabulary& vocab, std::size_t dim,
                                           core::Rng& rng);

}  // namespace rahp::text
