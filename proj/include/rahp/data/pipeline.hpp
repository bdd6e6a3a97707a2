#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "rahp/config.hpp"
#include "rahp/data/records.hpp"
#include "rahp/data/retrieval.hpp"

namespace rahp::data {

struct DatasetSplit {
  std::vector<LabeledQAInstance> train;
  std::vector<LabeledQAInstance> valid;
  std::vector<LabeledQAInstance> test;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t valid = 0;
  std::size_t test = 0;
};

/// valid = test = round(n / 10) with halves rounded up; train takes the rest.
SplitSizes split_sizes(std::size_t n);

/// Seeded shuffle, then contiguous train | valid | test cut. Needs >= 10 instances.
DatasetSplit make_splits(std::vector<LabeledQAInstance> instances, std::uint64_t seed);

/// Token types of all texts after tokenize.
std::set<std::string> corpus_vocabulary(const std::vector<std::string>& texts);

/// |Va ∩ Vb| / |Va|. Throws when either corpus has no tokens.
double vocab_overlap(const std::vector<std::string>& corpus_a, const std::vector<std::string>& corpus_b);

struct PrepareReport {
  std::size_t answers_read = 0;
  std::size_t answers_skipped = 0;
  std::size_t reviews_read = 0;
  std::size_t review_sentences = 0;
  std::size_t helpful = 0;
  std::size_t unhelpful = 0;
  std::size_t discarded = 0;
  std::size_t unknown_products = 0;
  SplitSizes sizes;
  std::vector<std::string> warnings;
};

/// Labels answers, drops Discard, attaches the top-K review sentences and
/// splits. Instance ids are "<product_id>:<record index>".
DatasetSplit prepare_dataset(const std::vector<RawAnswerRecord>& answers, const RetrievalIndex& index,
                             const RahpConfig& config, PrepareReport& report);

/// train.jsonl, valid.jsonl, test.jsonl under `dir`.
void write_split(const std::filesystem::path& dir, const DatasetSplit& split);

}  // namespace rahp::data
