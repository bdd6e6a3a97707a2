#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rahp::data {

enum class Label { kHelpful, kUnhelpful, kDiscard };

/// Helpful iff Y >= 2 and X = Y; Unhelpful iff (Y >= 2 and X < Y) or [0, 1];
/// Discard for [0, 0] and [1, 1]. Throws std::invalid_argument unless 0 <= X <= Y.
Label derive_label(std::int64_t x, std::int64_t y);
std::string label_name(Label label);

struct RawAnswerRecord {
  std::string product_id;
  std::string question;
  std::string answer;
  std::int64_t vote_x = 0;
  std::int64_t vote_y = 0;
};

struct ReviewRecord {
  std::string product_id;
  std::string review_id;
  std::string text;
};

struct ReviewSentence {
  std::string product_id;
  std::string text;
  std::string review_id;
  std::size_t sentence_index = 0;
};

/// One retrieved review sentence; slots without a sentence are EMPTY.
struct ReviewSlot {
  std::string text;
  double score = 0.0;
};

struct LabeledQAInstance {
  std::string id;
  std::string product_id;
  std::string question;
  std::string answer;
  std::int64_t vote_x = 0;
  std::int64_t vote_y = 0;
  bool helpful = false;
  std::vector<std::optional<ReviewSlot>> reviews;  // K slots, EMPTY = nullopt

  std::vector<std::optional<std::string>> review_texts() const;
};

struct ReadStats {
  std::size_t lines = 0;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

/// JSON lines with product_id, question, answer, vote_x, vote_y. Records with
/// invalid votes or blank texts are skipped and counted.
std::vector<RawAnswerRecord> read_answers(const std::filesystem::path& path, ReadStats* stats = nullptr);
/// JSON lines with product_id, review_text and optional review_id (defaults to
/// the line number).
std::vector<ReviewRecord> read_reviews(const std::filesystem::path& path, ReadStats* stats = nullptr);

/// Shard records: id, product_id, question, answer, votes [X, Y], label
/// (1 = Helpful), reviews (K entries of {text, score} or null).
void write_shard(const std::filesystem::path& path, const std::vector<LabeledQAInstance>& instances);
std::vector<LabeledQAInstance> read_shard(const std::filesystem::path& path);

/// Rule-based split on . ! ? followed by whitespace or end of text. Known
/// abbreviations (see `sentence_abbreviations`) never end a sentence.
std::vector<std::string> split_review_sentences(const std::string& review_text);
const std::vector<std::string>& sentence_abbreviations();

}  // namespace rahp::data
