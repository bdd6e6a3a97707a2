#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rahp::text {

/// Dense word index with PAD = 0 and UNK = 1 reserved.
class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();
  /// Rebuilds a vocabulary from an index-ordered word list; the first two
  /// entries must be the PAD and UNK tokens.
  static Vocabulary from_words(const std::vector<std::string>& words);

  /// Returns the index of `word`, inserting it if new. Throws std::logic_error once frozen.
  std::size_t add(const std::string& word);
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  /// Index of `word`, or kUnk when absent.
  std::size_t index(std::string_view word) const;
  bool contains(std::string_view word) const;
  const std::string& word(std::size_t index) const { return words_.at(index); }
  const std::vector<std::string>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }

  /// One "word<TAB>index" line per entry.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  bool frozen_ = false;
};

}  // namespace rahp::text
