#include "rahp/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rahp {

namespace {

const std::set<std::string> kArchitectureKeys = {
    "word_dim",    "char_dim",          "char_filters",   "char_widths",       "hidden",
    "mlp_hidden",  "qa_dim",            "ra_dim",         "classifier_hidden", "num_reviews",
    "no_ra_coherence", "no_q_to_r_attention", "no_char_embedding", "max_word_length",
    "max_question_tokens", "max_answer_tokens", "max_review_tokens"};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  unsigned long long parsed = 0;
  try {
    parsed = std::stoull(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != value.size() || value.front() == '-') {
    throw std::invalid_argument("config key '" + key + "': expected a non-negative integer, got '" + value + "'");
  }
  return static_cast<std::size_t>(parsed);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double parsed = 0;
  try {
    parsed = std::stod(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != value.size()) {
    throw std::invalid_argument("config key '" + key + "': expected a number, got '" + value + "'");
  }
  return parsed;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config key '" + key + "': expected true/false, got '" + value + "'");
}

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

std::string format_bool(bool v) { return v ? "true" : "false"; }

std::string format_sizes(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& key, const std::string& value) {
  std::vector<std::size_t> out;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) out.push_back(parse_size(key, trim(item)));
  if (out.empty()) throw std::invalid_argument("config key '" + key + "': expected a comma-separated list");
  return out;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

void RahpConfig::validate() const {
  auto positive = [](std::size_t v, const char* key) {
    if (v == 0) throw std::invalid_argument(std::string("config key '") + key + "' must be positive");
  };
  positive(word_dim, "word_dim");
  positive(char_dim, "char_dim");
  positive(char_filters, "char_filters");
  positive(max_word_length, "max_word_length");
  positive(hidden, "hidden");
  positive(max_question_tokens, "max_question_tokens");
  positive(max_answer_tokens, "max_answer_tokens");
  positive(max_review_tokens, "max_review_tokens");
  positive(mlp_hidden, "mlp_hidden");
  positive(qa_dim, "qa_dim");
  positive(ra_dim, "ra_dim");
  positive(classifier_hidden, "classifier_hidden");
  positive(num_reviews, "num_reviews");
  positive(batch_size, "batch_size");
  positive(max_epochs, "max_epochs");
  positive(pretrain_batch_size, "pretrain_batch_size");
  positive(pretrain_max_epochs, "pretrain_max_epochs");
  if (char_widths.empty()) throw std::invalid_argument("config key 'char_widths' must not be empty");
  for (std::size_t w : char_widths) positive(w, "char_widths");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("config key 'learning_rate' must be non-negative");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("config key 'dropout' must be in [0, 1)");
  if (retrieval_query != "question" && retrieval_query != "question_answer") {
    throw std::invalid_argument("config key 'retrieval_query' must be 'question' or 'question_answer'");
  }
}

std::map<std::string, std::string> RahpConfig::to_map() const {
  return {
      {"word_dim", std::to_string(word_dim)},
      {"char_dim", std::to_string(char_dim)},
      {"char_filters", std::to_string(char_filters)},
      {"char_widths", format_sizes(char_widths)},
      {"max_word_length", std::to_string(max_word_length)},
      {"freeze_pretrained_words", format_bool(freeze_pretrained_words)},
      {"hidden", std::to_string(hidden)},
      {"max_question_tokens", std::to_string(max_question_tokens)},
      {"max_answer_tokens", std::to_string(max_answer_tokens)},
      {"max_review_tokens", std::to_string(max_review_tokens)},
      {"mlp_hidden", std::to_string(mlp_hidden)},
      {"qa_dim", std::to_string(qa_dim)},
      {"ra_dim", std::to_string(ra_dim)},
      {"classifier_hidden", std::to_string(classifier_hidden)},
      {"num_reviews", std::to_string(num_reviews)},
      {"dropout", format_double(dropout)},
      {"no_ra_coherence", format_bool(no_ra_coherence)},
      {"no_q_to_r_attention", format_bool(no_q_to_r_attention)},
      {"no_char_embedding", format_bool(no_char_embedding)},
      {"learning_rate", format_double(learning_rate)},
      {"batch_size", std::to_string(batch_size)},
      {"max_epochs", std::to_string(max_epochs)},
      {"patience", std::to_string(patience)},
      {"seed", std::to_string(seed)},
      {"pretrain_batch_size", std::to_string(pretrain_batch_size)},
      {"pretrain_max_epochs", std::to_string(pretrain_max_epochs)},
      {"pretrain_patience", std::to_string(pretrain_patience)},
      {"transfer_embeddings", format_bool(transfer_embeddings)},
      {"retrieval_query", retrieval_query},
  };
}

std::string RahpConfig::to_text() const {
  std::string out;
  for (const auto& [key, value] : to_map()) out += key + "=" + value + "\n";
  return out;
}

void RahpConfig::set(const std::string& key, const std::string& raw_value) {
  const std::string value = trim(raw_value);
  if (key == "word_dim") word_dim = parse_size(key, value);
  else if (key == "char_dim") char_dim = parse_size(key, value);
  else if (key == "char_filters") char_filters = parse_size(key, value);
  else if (key == "char_widths") char_widths = parse_sizes(key, value);
  else if (key == "max_word_length") max_word_length = parse_size(key, value);
  else if (key == "freeze_pretrained_words") freeze_pretrained_words = parse_bool(key, value);
  else if (key == "hidden") hidden = parse_size(key, value);
  else if (key == "max_question_tokens") max_question_tokens = parse_size(key, value);
  else if (key == "max_answer_tokens") max_answer_tokens = parse_size(key, value);
  else if (key == "max_review_tokens") max_review_tokens = parse_size(key, value);
  else if (key == "mlp_hidden") mlp_hidden = parse_size(key, value);
  else if (key == "qa_dim") qa_dim = parse_size(key, value);
  else if (key == "ra_dim") ra_dim = parse_size(key, value);
  else if (key == "classifier_hidden") classifier_hidden = parse_size(key, value);
  else if (key == "num_reviews") num_reviews = parse_size(key, value);
  else if (key == "dropout") dropout = parse_double(key, value);
  else if (key == "no_ra_coherence") no_ra_coherence = parse_bool(key, value);
  else if (key == "no_q_to_r_attention") no_q_to_r_attention = parse_bool(key, value);
  else if (key == "no_char_embedding") no_char_embedding = parse_bool(key, value);
  else if (key == "learning_rate") learning_rate = parse_double(key, value);
  else if (key == "batch_size") batch_size = parse_size(key, value);
  else if (key == "max_epochs") max_epochs = parse_size(key, value);
  else if (key == "patience") patience = parse_size(key, value);
  else if (key == "seed") seed = parse_size(key, value);
  else if (key == "pretrain_batch_size") pretrain_batch_size = parse_size(key, value);
  else if (key == "pretrain_max_epochs") pretrain_max_epochs = parse_size(key, value);
  else if (key == "pretrain_patience") pretrain_patience = parse_size(key, value);
  else if (key == "transfer_embeddings") transfer_embeddings = parse_bool(key, value);
  else if (key == "retrieval_query") retrieval_query = value;
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

RahpConfig RahpConfig::from_map(const std::map<std::string, std::string>& values) {
  RahpConfig config;
  for (const auto& [key, value] : values) config.set(key, value);
  config.validate();
  return config;
}

RahpConfig RahpConfig::parse(const std::string& text) {
  RahpConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_number) + ": expected key=value");
    }
    config.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  config.validate();
  return config;
}

RahpConfig RahpConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string RahpConfig::fingerprint() const { return fnv1a_hex(to_text()); }

std::string RahpConfig::architecture_fingerprint() const {
  std::string text;
  for (const auto& [key, value] : to_map()) {
    if (kArchitectureKeys.count(key)) text += key + "=" + value + "\n";
  }
  return fnv1a_hex(text);
}

std::vector<std::string> RahpConfig::architecture_differences(const RahpConfig& other) const {
  const auto mine = to_map();
  const auto theirs = other.to_map();
  std::vector<std::string> out;
  for (const auto& key : kArchitectureKeys) {
    if (mine.at(key) != theirs.at(key)) out.push_back(key + ": " + mine.at(key) + " vs " + theirs.at(key));
  }
  return out;
}

}  // namespace rahp
