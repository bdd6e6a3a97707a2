#include "rahp/text/word_vectors.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rahp::text {

namespace {

bool parse_float(const std::string& token, float& out) {
  errno = 0;
  char* end = nullptr;
  out = std::strtof(token.c_str(), &end);
  return end == token.c_str() + token.size() && !token.empty() && errno == 0;
}

}  // namespace

WordVectors WordVectors::load(const std::filesystem::path& path, std::size_t expected_dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read word vectors " + path.string());
  WordVectors vectors;
  vectors.dim_ = expected_dim;
  std::string line;
  std::size_t line_number = 0;
  std::vector<std::string> fields;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream stream(line);
    fields.clear();
    for (std::string field; stream >> field;) fields.push_back(std::move(field));
    if (fields.empty()) continue;
    const std::size_t count = fields.size() - 1;
    if (vectors.dim_ == 0) vectors.dim_ = count;
    if (count != vectors.dim_) {
      throw std::runtime_error("word vectors " + path.string() + " line " + std::to_string(line_number) +
                               ": expected " + std::to_string(vectors.dim_) + " values, found " + std::to_string(count));
    }
    std::vector<float> row(count);
    bool ok = true;
    for (std::size_t i = 0; i < count && ok; ++i) ok = parse_float(fields[i + 1], row[i]);
    if (!ok) {
      ++vectors.malformed_lines_;
      continue;
    }
    if (vectors.index_.count(fields[0])) continue;  // first occurrence wins
    vectors.index_.emplace(fields[0], vectors.values_.size() / vectors.dim_);
    vectors.values_.insert(vectors.values_.end(), row.begin(), row.end());
  }
  vectors.finalize();
  return vectors;
}

WordVectors WordVectors::from_entries(std::size_t dim,
                                      const std::vector<std::pair<std::string, std::vector<float>>>& entries) {
  WordVectors vectors;
  vectors.dim_ = dim;
  for (const auto& [word, row] : entries) {
    if (row.size() != dim) throw std::invalid_argument("word vector for '" + word + "' has the wrong dimension");
    if (vectors.index_.count(word)) continue;
    vectors.index_.emplace(word, vectors.values_.size() / dim);
    vectors.values_.insert(vectors.values_.end(), row.begin(), row.end());
  }
  vectors.finalize();
  return vectors;
}

void WordVectors::finalize() {
  unknown_.assign(dim_, 0.0f);
  const std::size_t n = index_.size();
  if (n == 0) return;
  std::vector<double> total(dim_, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) total[c] += values_[r * dim_ + c];
  }
  for (std::size_t c = 0; c < dim_; ++c) unknown_[c] = static_cast<float>(total[c] / static_cast<double>(n));
}

const float* WordVectors::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? nullptr : values_.data() + it->second * dim_;
}

WordEmbeddingTable build_embedding_table(const Vocabulary& vocab, const WordVectors* vectors, std::size_t dim,
                                         core::Rng& rng) {
  if (vectors && vectors->size() > 0 && vectors->dim() != dim) {
    throw std::invalid_argument("word vectors have dimension " + std::to_string(vectors->dim()) +
                                ", model expects " + std::to_string(dim));
  }
  WordEmbeddingTable table;
  table.rows = vocab.size();
  table.dim = dim;
  table.values.assign(table.rows * dim, 0.0f);
  table.pretrained.assign(table.rows, false);
  if (vectors) table.malformed_lines = vectors->malformed_lines();
  std::size_t found = 0;
  for (std::size_t r = 0; r < table.rows; ++r) {
    float* row = table.values.data() + r * dim;
    // Draw for every row so the random stream does not depend on coverage.
    for (std::size_t c = 0; c < dim; ++c) row[c] = static_cast<float>(rng.uniform(-kWordInitBound, kWordInitBound));
    if (r == Vocabulary::kPad) {
      std::fill(row, row + dim, 0.0f);
      continue;
    }
    if (r == Vocabulary::kUnk || !vectors) continue;
    if (const float* source = vectors->find(vocab.word(r))) {
      std::copy(source, source + dim, row);
      table.pretrained[r] = true;
      ++found;
    }
  }
  const std::size_t regular = table.rows > 2 ? table.rows - 2 : 0;
  table.coverage = regular ? static_cast<double>(found) / static_cast<double>(regular) : 0.0;
  return table;
}

WordEmbeddingTable load_pretrained_vectors(const std::filesystem::path& path, const Vocabulary& vocab, std::size_t dim,
                                           core::Rng& rng) {
  const WordVectors vectors = WordVectors::load(path, dim);
  return build_embedding_table(vocab, &vectors, dim, rng);
}

}  // namespace rahp::text
