#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <cstring>
#include <fstream>
#include <set>

#include "../support/toy.hpp"
#include "rahp/core/grad_check.hpp"
#include "rahp/core/ops.hpp"
#include "rahp/model/nli.hpp"
#include "rahp/model/rahp_model.hpp"

using namespace rahp;
using namespace rahp::model;
using core::Tensor;
using Td = Tensor<double>;
using nn::Mask;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "rahp_model_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

Td random_matrix(std::size_t rows, std::size_t cols, core::Rng& rng) {
  return core::uniform_tensor<double>({rows, cols}, 1.0, rng);
}

double row_sum(const Td& m, std::size_t r) {
  double s = 0;
  for (std::size_t c = 0; c < m.dim(1); ++c) s += m.at(r, c);
  return s;
}

text::Vocabulary toy_vocab() {
  text::Vocabulary vocab;
  for (const char* w : {"does", "it", "fit", "yes", "no", "great", "case", "bad", "?", "."}) vocab.add(w);
  return vocab;
}

struct DoubleModel {
  RahpConfig config;
  text::Vocabulary vocab;
  core::ParamStore<double> params;
  RahpNetwork<double> network;
};

DoubleModel double_model(const RahpConfig& config) {
  DoubleModel m{config, toy_vocab(), {}, {}};
  const auto model = RahpModel::create(config, m.vocab, nullptr);
  m.params = model.params().cast<double>();
  m.network = make_network<double>(m.params, config, nullptr);
  return m;
}

}  // namespace

TEST(Similarity, OrthogonalUnitAndOracle) {
  const auto s0 = similarity_matrix(Td::from({1, 2}, {1, 0}), Td::from({2, 2}, {0, 1, 0, -3}));
  for (double v : s0.data()) EXPECT_EQ(v, 0.0);
  const auto unit = Td::from({2, 2}, {0.6, 0.8, -1, 0});
  const auto s1 = similarity_matrix(unit, unit);
  EXPECT_NEAR(s1.at(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(s1.at(1, 1), 1.0, 1e-15);

  core::Rng rng(31);
  const auto q = random_matrix(3, 4, rng), a = random_matrix(2, 4, rng);
  const auto s = similarity_matrix(q, a);
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = 0; k < 2; ++k) {
      long double acc = 0;
      for (std::size_t d = 0; d < 4; ++d) acc += static_cast<long double>(q.at(j, d)) * a.at(k, d);
      EXPECT_NEAR(s.at(j, k), static_cast<double>(acc), 1e-15);
    }
  }
  EXPECT_THROW(similarity_matrix(q, random_matrix(2, 3, rng)), std::invalid_argument);
}

TEST(DualAttention, UniformSingletonAndOracle) {
  const auto zero = dual_attention(Td::zeros({2, 3}), Mask(2), Mask(3, 2));
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_DOUBLE_EQ(zero.alpha_q.at(j, 0), 0.5);
    EXPECT_DOUBLE_EQ(zero.alpha_q.at(j, 1), 0.5);
    EXPECT_EQ(zero.alpha_q.at(j, 2), 0.0);
  }
  const auto single = dual_attention(Td::from({3, 1}, {4, -2, 7}), Mask(3), Mask(1));
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(single.alpha_q.at(j, 0), 1.0);

  const auto known = dual_attention(Td::from({2, 3}, {1, 2, 3, 0, -1, 0.5}), Mask(2), Mask(3));
  const std::vector<std::vector<double>> s = {{1, 2, 3}, {0, -1, 0.5}};
  for (std::size_t j = 0; j < 2; ++j) {
    long double z = 0;
    for (double v : s[j]) z += std::exp(static_cast<long double>(v));
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_NEAR(known.alpha_q.at(j, k), static_cast<double>(std::exp(static_cast<long double>(s[j][k])) / z), 1e-15);
    }
  }
  for (std::size_t k = 0; k < 3; ++k) {
    const long double z = std::exp(static_cast<long double>(s[0][k])) + std::exp(static_cast<long double>(s[1][k]));
    EXPECT_NEAR(known.alpha_a.at(k, 0), static_cast<double>(std::exp(static_cast<long double>(s[0][k])) / z), 1e-15);
  }
  EXPECT_THROW(dual_attention(Td::zeros({2, 3}), Mask(2), Mask(3, 0)), std::domain_error);
  EXPECT_THROW(dual_attention(Td::zeros({2, 3}), Mask(3), Mask(3)), std::invalid_argument);
}

TEST(DualAttention, RowsAreDistributionsAndSwapSymmetric) {
  core::Rng rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t lq = 1 + rng.index(6), la = 1 + rng.index(6), d = 1 + rng.index(4);
    const Mask mq(lq, 1 + rng.index(lq)), ma(la, 1 + rng.index(la));
    const auto q = random_matrix(lq, d, rng), a = random_matrix(la, d, rng);
    const auto al = dual_attention(similarity_matrix(q, a), mq, ma);
    for (std::size_t j = 0; j < lq; ++j) {
      EXPECT_NEAR(row_sum(al.alpha_q, j), 1.0, 1e-12);
      for (std::size_t k = ma.real(); k < la; ++k) EXPECT_EQ(al.alpha_q.at(j, k), 0.0);
    }
    for (std::size_t k = 0; k < la; ++k) EXPECT_NEAR(row_sum(al.alpha_a, k), 1.0, 1e-12);

    const auto swapped = dual_attention(similarity_matrix(a, q), ma, mq);
    for (std::size_t j = 0; j < lq; ++j) {
      for (std::size_t k = 0; k < la; ++k) {
        EXPECT_EQ(swapped.similarity.at(k, j), al.similarity.at(j, k));
        EXPECT_EQ(swapped.alpha_a.at(j, k), al.alpha_q.at(j, k));
        EXPECT_EQ(swapped.alpha_q.at(k, j), al.alpha_a.at(k, j));
      }
    }
    const auto [n_aq, n_qa] = attended_representations(al, q, a);
    const auto [s_aq, s_qa] = attended_representations(swapped, a, q);
    for (std::size_t i = 0; i < n_aq.size(); ++i) EXPECT_EQ(n_aq.data()[i], s_qa.data()[i]);
    for (std::size_t i = 0; i < n_qa.size(); ++i) EXPECT_EQ(n_qa.data()[i], s_aq.data()[i]);
  }
}

TEST(AttendedRepresentations, SelectionMeanAndOracle) {
  core::Rng rng(33);
  const auto q = random_matrix(2, 3, rng), a = random_matrix(3, 3, rng);
  Alignment<double> al;
  al.alpha_q = Td::from({2, 3}, {0, 1, 0, 0.5, 0, 0.5});
  al.alpha_a = random_matrix(3, 2, rng);
  const auto [n_aq, n_qa] = attended_representations(al, q, a);
  for (std::size_t d = 0; d < 3; ++d) {
    EXPECT_EQ(n_aq.at(0, d), a.at(1, d));
    EXPECT_NEAR(n_aq.at(1, d), 0.5 * (a.at(0, d) + a.at(2, d)), 1e-15);
    for (std::size_t k = 0; k < 3; ++k) {
      const double expect = al.alpha_a.at(k, 0) * q.at(0, d) + al.alpha_a.at(k, 1) * q.at(1, d);
      EXPECT_NEAR(n_qa.at(k, d), expect, 1e-15);
    }
  }
}

TEST(QaInteraction, DimensionsDeterminismAndGradients) {
  const RahpConfig config = toy::tiny_config();
  core::Rng rng(34);
  core::ParamStore<double> store;
  nn::add_bilstm_params(store, "bilstm_qa", 4 * config.hidden, config.hidden, rng);
  nn::add_mlp_params(store, "mlp_qa", 4 * config.hidden, config.mlp_hidden, config.qa_dim, rng);
  const QaParams<double> params{nn::bilstm_params(store, "bilstm_qa"), nn::mlp_params(store, "mlp_qa")};
  const auto c_q = random_matrix(3, 2 * config.hidden, rng), c_a = random_matrix(4, 2 * config.hidden, rng);
  const Mask mq(3, 2), ma(4);
  const auto first = qa_interaction(c_q, c_a, mq, ma, params);
  const auto second = qa_interaction(c_q, c_a, mq, ma, params);
  ASSERT_EQ(first.s_qa.size(), config.qa_dim);
  EXPECT_EQ(first.o_q.size(), 2 * config.hidden);
  for (std::size_t i = 0; i < config.qa_dim; ++i) EXPECT_EQ(first.s_qa.at(i), second.s_qa.at(i));

  const auto probe = core::uniform_tensor<double>({config.qa_dim}, 1.0, rng).detach();
  std::vector<Td> inputs = {c_q, c_a};
  for (const auto& name : store.names()) inputs.push_back(store.get(name));
  const auto result =
      core::grad_check([&] { return core::dot(qa_interaction(c_q, c_a, mq, ma, params).s_qa, probe); }, inputs);
  EXPECT_LT(result.max_relative_error, 1e-4);
}

TEST(QToRAttention, ZeroQuerySaturationAndOracle) {
  core::Rng rng(35);
  const auto c_r = random_matrix(3, 4, rng);
  const auto zero = q_to_r_attention(Td::zeros({4}), c_r, Mask(3));
  for (std::size_t l = 0; l < 3; ++l) EXPECT_NEAR(zero.beta.at(l), 1.0 / 3.0, 1e-15);
  for (std::size_t d = 0; d < 4; ++d) {
    EXPECT_NEAR(zero.v_r.at(d), (c_r.at(0, d) + c_r.at(1, d) + c_r.at(2, d)) / 3.0, 1e-15);
  }

  // u = {+50, -50}: beta is one-hot up to e^-100.
  const auto sat = q_to_r_attention(Td::vector({1, 0}), Td::from({2, 2}, {50, 0.3, -50, 0.7}), Mask(2));
  EXPECT_NEAR(sat.v_r.at(0), 50.0, 1e-12);
  EXPECT_NEAR(sat.v_r.at(1), 0.3, 1e-12);

  // Hand oracle: o_q = [1, 2], rows [1, 0], [0, 1], [1, 1] -> u = [1, 2, 3].
  const auto hand = q_to_r_attention(Td::vector({1, 2}), Td::from({3, 2}, {1, 0, 0, 1, 1, 1}), Mask(3));
  const long double z = std::exp(1.0L) + std::exp(2.0L) + std::exp(3.0L);
  const long double b0 = std::exp(1.0L) / z, b1 = std::exp(2.0L) / z, b2 = std::exp(3.0L) / z;
  EXPECT_NEAR(hand.v_r.at(0), static_cast<double>(b0 + b2), 1e-15);
  EXPECT_NEAR(hand.v_r.at(1), static_cast<double>(b1 + b2), 1e-15);

  const auto masked = q_to_r_attention(Td::vector({1, 2}), Td::from({3, 2}, {1, 0, 0, 1, 1, 1}), Mask(3, 2));
  EXPECT_EQ(masked.beta.at(2), 0.0);
  EXPECT_THROW(q_to_r_attention(Td::vector({1, 2}), Td::zeros({2, 2}), Mask(2, 0)), std::domain_error);
}

TEST(ComposeReview, Sums) {
  const auto o = Td::vector({1, -2, 3});
  EXPECT_EQ(compose_review(Td::zeros({3}), o).at(1), -2.0);
  const auto cancelled = compose_review(core::scale(o, -1.0), o);
  for (double v : cancelled.data()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(compose_review(Td::zeros({2}), o), std::invalid_argument);
}

TEST(RahpForward, RangeWidthAndEmptySlots) {
  auto m = double_model(toy::tiny_config());
  const auto input = encode_input("does it fit?", "yes great", {std::string("great case ."), std::nullopt}, m.vocab,
                                  m.config);
  const auto out = rahp_forward(m.network, input);
  const double p = out.probability.item();
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 1.0);
  EXPECT_EQ(out.features.size(), m.config.qa_dim + 2 * m.config.ra_dim);
  for (double v : out.s_ra[1].data()) EXPECT_EQ(v, 0.0);
  double beta_total = 0;
  for (double v : out.betas[0].data()) beta_total += v;
  EXPECT_NEAR(beta_total, 1.0, 1e-12);
  EXPECT_THROW(encode_input("?", "", {}, m.vocab, m.config), std::invalid_argument);
  EXPECT_THROW(encode_input("", "yes", {}, m.vocab, m.config), std::invalid_argument);

  RahpConfig defaults;
  EXPECT_EQ(defaults.classifier_input_dim(), 143u);
}

TEST(RahpForward, DefaultConfigFeatureWidth) {
  RahpConfig config;
  const auto model = RahpModel::create(config, toy_vocab(), nullptr);
  const auto input = model.encode("does it fit", "yes", {std::string("great case")});
  core::NoGradGuard guard;
  const auto out = rahp_forward(model.network(), input);
  EXPECT_EQ(out.features.size(), 143u);
  EXPECT_EQ(out.qa.o_q.size(), 256u);
}

TEST(RahpForward, SlotPermutationPermutesScores) {
  auto m = double_model(toy::tiny_config());
  const auto a = encode_input("does it fit", "yes", {std::string("great case"), std::string("bad fit")}, m.vocab,
                              m.config);
  const auto b = encode_input("does it fit", "yes", {std::string("bad fit"), std::string("great case")}, m.vocab,
                              m.config);
  const auto oa = rahp_forward(m.network, a), ob = rahp_forward(m.network, b);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(oa.s_ra[0].at(i), ob.s_ra[1].at(i));
    EXPECT_EQ(oa.s_ra[1].at(i), ob.s_ra[0].at(i));
  }
}

TEST(RahpForward, NoRaCoherenceIgnoresReviews) {
  RahpConfig config = toy::tiny_config();
  config.no_ra_coherence = true;
  auto m = double_model(config);
  EXPECT_FALSE(m.params.get("mlp_p.l1.weight").dim(1) != config.qa_dim);
  const auto a = encode_input("does it fit", "yes", {std::string("great case"), std::nullopt}, m.vocab, config);
  const auto b = encode_input("does it fit", "yes", {std::string("bad bad no"), std::string("case")}, m.vocab, config);
  EXPECT_EQ(rahp_forward(m.network, a).probability.item(), rahp_forward(m.network, b).probability.item());
}

TEST(RahpForward, NoQToRAttentionUsesReviewState) {
  RahpConfig config = toy::tiny_config();
  config.no_q_to_r_attention = true;
  auto m = double_model(config);
  const auto a = encode_input("does it fit", "yes", {std::string("great case")}, m.vocab, config);
  const auto b = encode_input("no no no", "yes", {std::string("great case")}, m.vocab, config);
  // The review scores no longer depend on the question.
  const auto sa = rahp_forward(m.network, a).s_ra[0], sb = rahp_forward(m.network, b).s_ra[0];
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(sa.at(i), sb.at(i));
}

TEST(RahpForward, PaddingInvariance) {
  auto m = double_model(toy::tiny_config());
  const auto input = encode_input("does it fit?", "yes great", {std::string("great case ."), std::string("bad")},
                                  m.vocab, m.config);
  ModelInput padded = input;
  padded.question = text::pad_sequence(padded.question, input.question.length() + 3);
  padded.answer = text::pad_sequence(padded.answer, input.answer.length() + 2);
  padded.reviews[0] = text::pad_sequence(*padded.reviews[0], input.reviews[0]->length() + 4);
  EXPECT_NEAR(rahp_forward(m.network, input).probability.item(), rahp_forward(m.network, padded).probability.item(),
              1e-12);
}

TEST(RahpForward, FullModelGradCheck) {
  auto m = double_model(toy::tiny_config());
  toy::randomize(m.params, 101);
  const auto input = encode_input("fit ?", "yes no", {std::string("great case"), std::nullopt}, m.vocab, m.config);
  std::vector<Td> inputs;
  for (const auto& name : m.params.names()) inputs.push_back(m.params.get(name));
  const auto result = core::grad_check([&] { return rahp_loss(rahp_forward(m.network, input), 1.0); }, inputs);
  EXPECT_LT(result.max_relative_error, 1e-4) << m.params.names()[result.worst_input] << " " << result.worst_entry << " " << result.worst_analytic << " "
      << result.worst_numeric;
}

TEST(Loss, Examples) {
  EXPECT_NEAR(binary_cross_entropy(0.999, 1.0), -std::log(0.999), 1e-15);
  EXPECT_NEAR(binary_cross_entropy(0.5, 0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(binary_cross_entropy(0.5, 1.0), std::log(2.0), 1e-15);
  for (double p : {0.1, 0.3, 0.77}) EXPECT_NEAR(binary_cross_entropy(p, 1.0), binary_cross_entropy(1 - p, 0.0), 1e-15);
  EXPECT_TRUE(std::isfinite(binary_cross_entropy(0.0, 1.0)));

  RahpOutput<double> out;
  out.logit = Td::vector({0.0});
  EXPECT_NEAR(rahp_loss(out, 1.0).item(), std::log(2.0), 1e-15);
}

TEST(RahpCheckpoint, RoundTripAndValidation) {
  const RahpConfig config = toy::tiny_config();
  const auto model = RahpModel::create(config, toy_vocab(), nullptr);
  const auto path = temp_path("model.ckpt");
  model.save(path);
  const auto loaded = RahpModel::load(path, &config);
  for (const auto& name : model.params().names()) {
    const auto a = model.params().get(name).data(), b = loaded.params().get(name).data();
    ASSERT_EQ(a.size(), b.size());
    EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)), 0) << name;
  }
  EXPECT_EQ(loaded.vocabulary().words(), model.vocabulary().words());

  RahpConfig four = config;
  four.num_reviews = 4;
  try {
    RahpModel::load(path, &four);
    FAIL() << "expected an architecture error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("num_reviews"), std::string::npos) << e.what();
  }

  const auto bytes = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, bytes - 7);
  EXPECT_THROW(RahpModel::load(path, &config), std::runtime_error);
}

TEST(Transfer, LoadsPrefixesAndValidates) {
  const RahpConfig config = toy::tiny_config();
  const auto corpus = toy::synthetic_nli_corpus(9, 5);
  PretrainOptions options;
  options.max_epochs = 1;
  const auto pre = pretrain(corpus, nullptr, config, nullptr, options);
  std::set<std::string> prefixes;
  for (const auto& t : pre.checkpoint.tensors) prefixes.insert(t.name.substr(0, t.name.find('.') + 1));
  EXPECT_EQ(prefixes, (std::set<std::string>{"embedding.", "bilstm_c.", "bilstm_ra.", "mlp_ra."}));

  // Round trip through disk is exact.
  const auto path = temp_path("pre.ckpt");
  core::write_checkpoint(path, pre.checkpoint);
  const auto reread = core::read_checkpoint(path);

  text::Vocabulary vocab = text::Vocabulary::from_words(pre.vocabulary.words());
  vocab.add("extra");
  auto model = RahpModel::create(config, vocab, nullptr);
  const auto record = model.load_transferred(reread);
  EXPECT_EQ(record.embedding_rows_copied, pre.vocabulary.size());
  EXPECT_EQ(record.embedding_rows_total, pre.vocabulary.size() + 1);
  for (const auto& t : pre.checkpoint.tensors) {
    const auto data = model.params().get(t.name).data();
    for (std::size_t i = 0; i < t.values.size(); ++i) ASSERT_EQ(data[i], t.values[i]) << t.name;
  }
  // Manifest diff: every transferable model tensor is in the checkpoint and vice versa.
  std::set<std::string> expected, exported;
  for (const auto& prefix : transfer_prefixes()) {
    for (const auto& name : model.params().names_with_prefix(prefix)) expected.insert(name);
  }
  for (const auto& t : pre.checkpoint.tensors) exported.insert(t.name);
  EXPECT_EQ(expected, exported);

  RahpConfig wide = config;
  wide.hidden = 4;
  auto other = RahpModel::create(wide, vocab, nullptr);
  const auto before = other.params().get("bilstm_qa.fwd.w_ih").at(0);
  try {
    other.load_transferred(reread);
    FAIL() << "expected a shape error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("bilstm_ra.fwd.w_ih"), std::string::npos) << e.what();
  }
  EXPECT_EQ(other.params().get("bilstm_qa.fwd.w_ih").at(0), before);

  auto missing = reread;
  missing.tensors.erase(missing.tensors.begin());
  auto fresh = RahpModel::create(config, vocab, nullptr);
  EXPECT_THROW(fresh.load_transferred(missing), std::runtime_error);

  text::Vocabulary shuffled;
  shuffled.add("extra");
  for (std::size_t i = 2; i < pre.vocabulary.size(); ++i) shuffled.add(pre.vocabulary.word(i));
  auto not_prefix = RahpModel::create(config, shuffled, nullptr);
  EXPECT_THROW(not_prefix.load_transferred(reread), std::runtime_error);
}

TEST(Transfer, RaPathwayReproducesNliLogits) {
  RahpConfig config = toy::tiny_config();
  const auto corpus = toy::synthetic_nli_corpus(12, 6);
  PretrainOptions options;
  options.max_epochs = 2;
  const auto pre = pretrain(corpus, nullptr, config, nullptr, options);

  config.no_q_to_r_attention = true;
  auto model = RahpModel::create(config, text::Vocabulary::from_words(pre.vocabulary.words()), nullptr);
  model.load_transferred(pre.checkpoint);

  core::ParamStore<float> nli_params;
  core::Rng rng(1);
  text::WordEmbeddingTable table = text::build_embedding_table(pre.vocabulary, nullptr, config.word_dim, rng);
  add_nli_params(nli_params, config, table, rng);
  core::load_params_from_checkpoint(pre.checkpoint, nli_params);
  const auto nli = make_nli_network<float>(nli_params, config, nullptr);

  core::NoGradGuard guard;
  for (const auto& inst : corpus.instances) {
    const auto premise = text::encode_tokens(inst.premise, model.vocabulary(), config.max_review_tokens);
    const auto hypothesis = text::encode_tokens(inst.hypothesis, model.vocabulary(), config.max_answer_tokens);
    ModelInput input{text::encode_tokens({"x"}, model.vocabulary(), 40), hypothesis, {premise, std::nullopt}};
    const auto s_ra = rahp_forward(model.network(), input).s_ra[0];
    const auto logits = nli_logits(nli, premise, hypothesis);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(s_ra.at(i), logits.at(i), 1e-6);
    double total = 0;
    const auto probabilities = nli_forward(nli, premise, hypothesis);
    for (float p : probabilities.data()) total += p;
    EXPECT_NEAR(total, 1.0, 1e-6);
  }
}

TEST(Pretrain, DeterministicUnderSeed) {
  const RahpConfig config = toy::tiny_config();
  const auto corpus = toy::synthetic_nli_corpus(9, 7);
  PretrainOptions options;
  options.max_epochs = 2;
  const auto a = pretrain(corpus, nullptr, config, nullptr, options);
  const auto b = pretrain(corpus, nullptr, config, nullptr, options);
  ASSERT_EQ(a.checkpoint.tensors.size(), b.checkpoint.tensors.size());
  for (std::size_t i = 0; i < a.checkpoint.tensors.size(); ++i) {
    EXPECT_EQ(a.checkpoint.tensors[i].values, b.checkpoint.tensors[i].values);
  }
  EXPECT_EQ(a.checkpoint.metadata.dump(), b.checkpoint.metadata.dump());
}

TEST(NliCorpus, ParsesJsonAndTsv) {
  const auto json_path = temp_path("snli.jsonl");
  {
    std::ofstream out(json_path);
    out << R"({"gold_label": "entailment", "sentence1": "A man sleeps.", "sentence2": "A man rests."})" << "\n";
    out << R"({"gold_label": "-", "sentence1": "A dog.", "sentence2": "A cat."})" << "\n";
    out << R"({"gold_label": "contradiction", "sentence1": "It is red.", "sentence2": "It is blue."})" << "\n";
  }
  const auto corpus = parse_nli_corpus(json_path);
  ASSERT_EQ(corpus.instances.size(), 2u);
  EXPECT_EQ(corpus.instances[0].label, NliLabel::kEntailment);
  EXPECT_EQ(corpus.instances[0].premise.back(), ".");
  EXPECT_EQ(corpus.skipped_label, 1u);
  EXPECT_EQ(corpus.records, 3u);

  const auto tsv_path = temp_path("snli.txt");
  {
    std::ofstream out(tsv_path);
    out << "gold_label\tsentence1_binary_parse\tsentence1\tsentence2\n";
    out << "neutral\t( x )\tA man walks.\tA man walks home.\n";
    out << "-\t( y )\tA.\tB.\n";
  }
  const auto tsv = parse_nli_corpus(tsv_path);
  ASSERT_EQ(tsv.instances.size(), 1u);
  EXPECT_EQ(tsv.instances[0].label, NliLabel::kNeutral);
  EXPECT_EQ(tsv.instances[0].hypothesis.size(), 5u);

  const auto empty_path = temp_path("empty.jsonl");
  { std::ofstream out(empty_path); }
  const auto empty = parse_nli_corpus(empty_path);
  EXPECT_TRUE(empty.instances.empty());
  EXPECT_FALSE(empty.warnings.empty());
  EXPECT_THROW(parse_nli_corpus(temp_path("missing.jsonl")), std::runtime_error);
}
