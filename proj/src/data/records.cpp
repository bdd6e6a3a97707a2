#include "rahp/data/records.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace rahp::data {

using nlohmann::json;

Label derive_label(std::int64_t x, std::int64_t y) {
  if (x < 0 || y < 0 || x > y) {
    throw std::invalid_argument("invalid votes [" + std::to_string(x) + ", " + std::to_string(y) + "]");
  }
  if (y >= 2) return x == y ? Label::kHelpful : Label::kUnhelpful;
  if (x == 0 && y == 1) return Label::kUnhelpful;
  return Label::kDiscard;
}

std::string label_name(Label label) {
  switch (label) {
    case Label::kHelpful: return "helpful";
    case Label::kUnhelpful: return "unhelpful";
    case Label::kDiscard: return "discard";
  }
  return "unknown";
}

std::vector<std::optional<std::string>> LabeledQAInstance::review_texts() const {
  std::vector<std::optional<std::string>> out;
  out.reserve(reviews.size());
  for (const auto& slot : reviews) {
    if (slot) {
      out.emplace_back(slot->text);
    } else {
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

namespace {

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

// Calls `fn(record, line_number)` for every non-blank line; malformed JSON is
// counted and skipped.
template <typename Fn>
void for_each_json_line(const std::filesystem::path& path, ReadStats& stats, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (blank(line)) continue;
    ++stats.lines;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception&) {
      ++stats.skipped;
      stats.warnings.push_back(path.filename().string() + " line " + std::to_string(line_number) + ": invalid JSON");
      continue;
    }
    if (!record.is_object()) {
      ++stats.skipped;
      continue;
    }
    try {
      if (!fn(record, line_number)) ++stats.skipped;
    } catch (const json::exception& e) {
      ++stats.skipped;
      stats.warnings.push_back(path.filename().string() + " line " + std::to_string(line_number) + ": " + e.what());
    }
  }
}

}  // namespace

std::vector<RawAnswerRecord> read_answers(const std::filesystem::path& path, ReadStats* stats) {
  ReadStats local;
  ReadStats& s = stats ? *stats : local;
  std::vector<RawAnswerRecord> out;
  for_each_json_line(path, s, [&](const json& r, std::size_t) {
    RawAnswerRecord rec;
    rec.product_id = r.at("product_id").get<std::string>();
    rec.question = r.at("question").get<std::string>();
    rec.answer = r.at("answer").get<std::string>();
    rec.vote_x = r.at("vote_x").get<std::int64_t>();
    rec.vote_y = r.at("vote_y").get<std::int64_t>();
    if (rec.vote_x < 0 || rec.vote_y < 0 || rec.vote_x > rec.vote_y) return false;
    if (blank(rec.question) || blank(rec.answer)) return false;
    out.push_back(std::move(rec));
    return true;
  });
  return out;
}

std::vector<ReviewRecord> read_reviews(const std::filesystem::path& path, ReadStats* stats) {
  ReadStats local;
  ReadStats& s = stats ? *stats : local;
  std::vector<ReviewRecord> out;
  for_each_json_line(path, s, [&](const json& r, std::size_t line_number) {
    ReviewRecord rec;
    rec.product_id = r.at("product_id").get<std::string>();
    rec.text = r.at("review_text").get<std::string>();
    rec.review_id = r.contains("review_id") ? r["review_id"].get<std::string>() : "line" + std::to_string(line_number);
    out.push_back(std::move(rec));
    return true;
  });
  return out;
}

void write_shard(const std::filesystem::path& path, const std::vector<LabeledQAInstance>& instances) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& inst : instances) {
    json reviews = json::array();
    for (const auto& slot : inst.reviews) {
      reviews.push_back(slot ? json{{"text", slot->text}, {"score", slot->score}} : json(nullptr));
    }
    const json record = {{"id", inst.id},
                         {"product_id", inst.product_id},
                         {"question", inst.question},
                         {"answer", inst.answer},
                         {"votes", {inst.vote_x, inst.vote_y}},
                         {"label", inst.helpful ? 1 : 0},
                         {"reviews", reviews}};
    out << record.dump() << "\n";
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<LabeledQAInstance> read_shard(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read shard " + path.string());
  std::vector<LabeledQAInstance> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (blank(line)) continue;
    try {
      const json r = json::parse(line);
      LabeledQAInstance inst;
      inst.id = r.at("id").get<std::string>();
      inst.product_id = r.at("product_id").get<std::string>();
      inst.question = r.at("question").get<std::string>();
      inst.answer = r.at("answer").get<std::string>();
      inst.vote_x = r.at("votes").at(0).get<std::int64_t>();
      inst.vote_y = r.at("votes").at(1).get<std::int64_t>();
      inst.helpful = r.at("label").get<int>() == 1;
      for (const auto& slot : r.at("reviews")) {
        if (slot.is_null()) {
          inst.reviews.emplace_back(std::nullopt);
        } else {
          inst.reviews.emplace_back(ReviewSlot{slot.at("text").get<std::string>(), slot.at("score").get<double>()});
        }
      }
      out.push_back(std::move(inst));
    } catch (const json::exception& e) {
      throw std::runtime_error("shard " + path.string() + " line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return out;
}

const std::vector<std::string>& sentence_abbreviations() {
  // Lowercased, without the final period. Versioned with the splitter.
  static const std::vector<std::string> list = {"mr",  "mrs", "ms",  "dr",     "prof", "sr",  "jr",  "st",
                                                "vs",  "etc", "e.g", "i.e",    "approx", "no", "inc", "ltd",
                                                "co",  "u.s", "fig", "min",    "max",  "oz",  "lbs", "ft"};
  return list;
}

namespace {

bool is_abbreviation(const std::string& text, std::size_t period) {
  std::size_t start = period;
  while (start > 0 && !std::isspace(static_cast<unsigned char>(text[start - 1]))) --start;
  std::string word;
  for (std::size_t i = start; i < period; ++i) word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
  while (!word.empty() && (word.front() == '(' || word.front() == '"' || word.front() == '\'')) word.erase(0, 1);
  const auto& list = sentence_abbreviations();
  return std::find(list.begin(), list.end(), word) != list.end();
}

std::string trimmed(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> split_review_sentences(const std::string& review_text) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  const std::size_t n = review_text.size();
  for (std::size_t i = 0; i < n; ++i) {
    const char c = review_text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t end = i;
    while (end + 1 < n && (review_text[end + 1] == '.' || review_text[end + 1] == '!' || review_text[end + 1] == '?')) {
      ++end;
    }
    const bool at_boundary = end + 1 == n || std::isspace(static_cast<unsigned char>(review_text[end + 1]));
    if (!at_boundary) {
      i = end;
      continue;
    }
    if (c == '.' && end == i && is_abbreviation(review_text, i)) continue;
    std::string sentence = trimmed(review_text.substr(begin, end + 1 - begin));
    if (!sentence.empty()) out.push_back(std::move(sentence));
    begin = end + 1;
    i = end;
  }
  std::string tail = trimmed(review_text.substr(std::min(begin, n)));
  if (!tail.empty()) out.push_back(std::move(tail));
  return out;
}

}  // namespace rahp::data
