#include "rahp/text/vocabulary.hpp"

#include <fstream>
#include <stdexcept>

namespace rahp::text {

Vocabulary::Vocabulary() {
  add(std::string(kPadToken));
  add(std::string(kUnkToken));
}

Vocabulary Vocabulary::from_words(const std::vector<std::string>& words) {
  if (words.size() < 2 || words[0] != kPadToken || words[1] != kUnkToken) {
    throw std::invalid_argument("vocabulary must start with " + std::string(kPadToken) + " and " +
                                std::string(kUnkToken));
  }
  Vocabulary vocab;
  for (std::size_t i = 2; i < words.size(); ++i) {
    if (vocab.contains(words[i])) throw std::invalid_argument("duplicate vocabulary entry '" + words[i] + "'");
    vocab.add(words[i]);
  }
  return vocab;
}

std::size_t Vocabulary::add(const std::string& word) {
  if (auto it = index_.find(word); it != index_.end()) return it->second;
  if (frozen_) throw std::logic_error("cannot add '" + word + "' to a frozen vocabulary");
  const std::size_t id = words_.size();
  words_.push_back(word);
  index_.emplace(word, id);
  return id;
}

std::size_t Vocabulary::index(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view word) const { return index_.count(std::string(word)) != 0; }

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write vocabulary " + path.string());
  for (std::size_t i = 0; i < words_.size(); ++i) out << words_[i] << '\t' << i << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read vocabulary " + path.string());
  std::vector<std::string> words;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error(path.string() + " line " + std::to_string(line_number) + ": expected word<TAB>index");
    }
    const std::size_t index = std::stoul(line.substr(tab + 1));
    if (index != words.size()) {
      throw std::runtime_error(path.string() + " line " + std::to_string(line_number) + ": indices must be dense");
    }
    words.push_back(line.substr(0, tab));
  }
  Vocabulary vocab = from_words(words);
  vocab.freeze();
  return vocab;
}

}  // namespace rahp::text
