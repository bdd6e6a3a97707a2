#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "rahp/core/grad_check.hpp"
#include "rahp/core/ops.hpp"
#include "rahp/text/embedding.hpp"
#include "rahp/text/tokenizer.hpp"

using namespace rahp;
using namespace rahp::text;
using core::Tensor;
using Td = Tensor<double>;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "rahp_text_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

RahpConfig small_config() {
  RahpConfig config;
  config.word_dim = 4;
  config.char_dim = 3;
  config.char_filters = 2;
  return config;
}

}  // namespace

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("Does it work?"), (std::vector<std::string>{"does", "it", "work", "?"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize("   \t\n").empty());
  EXPECT_EQ(tokenize("glare-free Kindle"), (std::vector<std::string>{"glare", "-", "free", "kindle"}));
  EXPECT_EQ(tokenize("$5.99!!"), (std::vector<std::string>{"$", "5", ".", "99", "!", "!"}));
}

TEST(Vocabulary, ReservedIndicesAndFreeze) {
  Vocabulary vocab;
  EXPECT_EQ(vocab.size(), 2u);
  EXPECT_EQ(vocab.word(Vocabulary::kPad), "<pad>");
  EXPECT_EQ(vocab.add("kindle"), 2u);
  EXPECT_EQ(vocab.add("kindle"), 2u);
  vocab.freeze();
  EXPECT_THROW(vocab.add("nook"), std::logic_error);
  EXPECT_EQ(vocab.index("nook"), Vocabulary::kUnk);
  EXPECT_EQ(vocab.index("kindle"), 2u);
}

TEST(Vocabulary, SaveLoadRoundTrip) {
  Vocabulary vocab;
  for (const char* w : {"a", "b", "c"}) vocab.add(w);
  const auto path = temp_path("vocab.tsv");
  vocab.save(path);
  const auto loaded = Vocabulary::load(path);
  EXPECT_EQ(loaded.words(), vocab.words());
  EXPECT_TRUE(loaded.frozen());
}

TEST(WordVectors, VerbatimRowsAndFallback) {
  const auto path = temp_path("vectors.txt");
  write_file(path, "screen 0.25 -1.5 3\nbattery 1e-3 2 -0.125\nbad x y z\n");
  Vocabulary vocab;
  vocab.add("screen");
  vocab.add("missing");
  core::Rng rng(7);
  const auto table = load_pretrained_vectors(path, vocab, 3, rng);
  EXPECT_EQ(table.malformed_lines, 1u);
  EXPECT_DOUBLE_EQ(table.coverage, 0.5);
  const auto screen = table.row(vocab.index("screen"));
  EXPECT_EQ(screen[0], 0.25f);
  EXPECT_EQ(screen[1], -1.5f);
  EXPECT_EQ(screen[2], 3.0f);
  EXPECT_TRUE(table.pretrained[vocab.index("screen")]);
  EXPECT_FALSE(table.pretrained[vocab.index("missing")]);
  for (float v : table.row(vocab.index("missing"))) {
    EXPECT_LE(std::abs(v), kWordInitBound);
    EXPECT_NE(v, 0.0f);
  }
  for (float v : table.row(Vocabulary::kPad)) EXPECT_EQ(v, 0.0f);

  RahpConfig config;
  const auto rows = trainable_word_rows(table, config);
  EXPECT_FALSE((*rows)[Vocabulary::kPad]);
  EXPECT_TRUE((*rows)[vocab.index("screen")]);
  config.freeze_pretrained_words = true;
  EXPECT_FALSE((*trainable_word_rows(table, config))[vocab.index("screen")]);
}

TEST(WordVectors, DimensionMismatchNamesLine) {
  const auto path = temp_path("short.txt");
  write_file(path, "a 1 2 3\nb 1 2\n");
  try {
    WordVectors::load(path, 3);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(WordVectors::load(temp_path("does_not_exist.txt"), 3), std::runtime_error);
}

TEST(WordVectors, UnknownVectorIsMean) {
  const auto vectors = WordVectors::from_entries(2, {{"a", {1.0f, 2.0f}}, {"b", {3.0f, -2.0f}}});
  EXPECT_EQ(vectors.unknown_vector()[0], 2.0f);
  EXPECT_EQ(vectors.unknown_vector()[1], 0.0f);
  EXPECT_EQ(vectors.find("c"), nullptr);
}

TEST(CharIds, PaddingAndClamp) {
  EXPECT_EQ(char_ids("a", 5, 40).size(), 5u);
  EXPECT_EQ(char_ids("a", 5, 40)[1], kCharPad);
  EXPECT_EQ(char_ids(std::string(60, 'x'), 5, 40).size(), 40u);
  EXPECT_EQ(char_id('\x01'), kCharUnk);
}

namespace {

CharConvParams<double> char_params(std::size_t char_dim, std::size_t filters, std::vector<std::size_t> widths,
                                   core::Rng& rng) {
  CharConvParams<double> p;
  p.table = core::uniform_tensor<double>({kCharVocabSize, char_dim}, 0.5, rng);
  p.widths = widths;
  for (std::size_t w : widths) {
    p.weights.push_back(core::uniform_tensor<double>({filters, w * char_dim}, 0.5, rng));
    p.biases.push_back(core::uniform_tensor<double>({filters}, 0.5, rng));
  }
  return p;
}

}  // namespace

TEST(CharEmbed, ZeroWeightsGiveBias) {
  core::Rng rng(3);
  auto p = char_params(4, 3, {2, 3, 4, 5}, rng);
  for (auto& w : p.weights) std::fill(w.mutable_data().begin(), w.mutable_data().end(), 0.0);
  const auto out = char_embed_word<double>("abc", p);
  ASSERT_EQ(out.size(), 12u);
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t f = 0; f < 3; ++f) EXPECT_EQ(out.at(k * 3 + f), p.biases[k].at(f));
  }
}

TEST(CharEmbed, SingleCharacterIsPadded) {
  core::Rng rng(4);
  const auto p = char_params(4, 3, {2, 3, 4, 5}, rng);
  const auto out = char_embed_word<double>("x", p);
  EXPECT_EQ(out.size(), 12u);
  for (double v : out.data()) EXPECT_TRUE(std::isfinite(v));
}

TEST(CharEmbed, HandComputedConvolution) {
  // Two characters, char_dim 2; widths {2, 3} so "ab" is padded to three positions.
  CharConvParams<double> p;
  std::vector<double> table(kCharVocabSize * 2, 0.0);
  const std::size_t a = char_id('a'), b = char_id('b');
  table[a * 2] = 1.0;
  table[a * 2 + 1] = 2.0;
  table[b * 2] = -1.0;
  table[b * 2 + 1] = 0.5;
  p.table = Td::from({kCharVocabSize, 2}, table);
  p.widths = {2, 3};
  p.weights = {Td::from({1, 4}, {1.0, -1.0, 2.0, 0.5}), Td::from({1, 6}, {1, 1, 1, 1, 1, 1})};
  p.biases = {Td::vector({0.1}), Td::vector({0.0})};
  const auto out = char_embed_word<double>("ab", p);
  // width 2 windows: [a b] -> 1 - 2 - 2 + 0.25 = -2.75, [b pad] -> -1 - 0.5 = -1.5; max + 0.1.
  EXPECT_NEAR(out.at(0), -1.4, 1e-15);
  // width 3 window: [a b pad] -> 1 + 2 - 1 + 0.5 = 2.5.
  EXPECT_NEAR(out.at(1), 2.5, 1e-15);
}

TEST(CharEmbed, OutputDimensionForAllLengths) {
  core::Rng rng(5);
  const auto p = char_params(16, 50, {2, 3, 4, 5}, rng);
  for (std::size_t len = 1; len <= 40; ++len) {
    std::string word;
    for (std::size_t i = 0; i < len; ++i) word.push_back(static_cast<char>('a' + rng.index(26)));
    EXPECT_EQ(char_embed_word<double>(word, p).size(), 200u) << word;
  }
}

TEST(EmbedSequence, RowsPadAndPurity) {
  RahpConfig config;  // default widths: 200 char + 300 word
  Vocabulary vocab;
  vocab.add("good");
  core::Rng rng(11);
  const auto table = build_embedding_table(vocab, nullptr, config.word_dim, rng);
  core::ParamStore<double> params;
  add_embedding_params(params, config, table, rng);
  const auto tables = embedding_tables(params, config, trainable_word_rows(table, config));

  auto seq = pad_sequence(encode_tokens({"good", "good"}, vocab, 40), 3);
  const auto out = embed_sequence(seq, tables);
  ASSERT_EQ(out.dim(0), 3u);
  ASSERT_EQ(out.dim(1), 500u);
  for (std::size_t c = 0; c < 500; ++c) EXPECT_EQ(out.at(0, c), out.at(1, c));
  for (std::size_t c = 200; c < 500; ++c) EXPECT_EQ(out.at(2, c), 0.0);

  EXPECT_THROW(embed_sequence(TokenSequence{}, tables), std::invalid_argument);

  config.no_char_embedding = true;
  core::ParamStore<double> word_only;
  add_embedding_params(word_only, config, table, rng);
  EXPECT_FALSE(word_only.contains("embedding.char"));
  EXPECT_EQ(embed_sequence(seq, embedding_tables(word_only, config, nullptr)).dim(1), 300u);
}

TEST(EmbedSequence, GradientsReachAllTables) {
  RahpConfig config = small_config();
  Vocabulary vocab;
  vocab.add("ok");
  vocab.add("great");
  const auto vectors = WordVectors::from_entries(4, {{"great", {0.1f, 0.2f, 0.3f, 0.4f}}});
  core::Rng rng(12);
  const auto table = build_embedding_table(vocab, &vectors, config.word_dim, rng);
  config.freeze_pretrained_words = true;
  core::ParamStore<double> params;
  add_embedding_params(params, config, table, rng);
  const auto tables = embedding_tables(params, config, trainable_word_rows(table, config));
  const auto seq = pad_sequence(encode_tokens({"ok", "great", "ok!"}, vocab, 40), 4);

  core::Rng probe_rng(13);
  const auto probe = core::uniform_tensor<double>({4, config.embedding_dim()}, 1.0, probe_rng).detach();
  auto loss_with = [&](const EmbeddingTables<double>& t) {
    return core::sum(core::mul(core::tanh(embed_sequence(seq, t)), probe));
  };
  auto loss = [&] { return loss_with(tables); };

  // Finite differences see every row, so check against an all-trainable view.
  const auto open_tables = embedding_tables<double>(params, config, nullptr);
  std::vector<Td> inputs;
  for (const auto& name : params.names()) inputs.push_back(params.get(name));
  const auto result = core::grad_check([&] { return loss_with(open_tables); }, inputs);
  EXPECT_LT(result.max_relative_error, 1e-4);

  for (const auto& name : params.names()) params.get(name).zero_grad();
  loss().backward();
  const auto& word = params.get("embedding.word");
  auto row_norm = [&](std::size_t r) {
    double total = 0;
    for (std::size_t c = 0; c < 4; ++c) total += std::abs(word.grad()[r * 4 + c]);
    return total;
  };
  EXPECT_GT(row_norm(vocab.index("ok")), 0.0);
  EXPECT_EQ(row_norm(vocab.index("great")), 0.0);  // pretrained and frozen
  EXPECT_EQ(row_norm(Vocabulary::kPad), 0.0);
  EXPECT_GT(row_norm(Vocabulary::kUnk), 0.0);  // "ok!" is not in the vocabulary
  for (const auto& name : params.names_with_prefix("embedding.char")) {
    double total = 0;
    for (double g : params.get(name).grad()) total += std::abs(g);
    EXPECT_GT(total, 0.0) << name;
  }
}
