#include "rahp/model/nli.hpp"

#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rahp/core/adam.hpp"
#include "rahp/core/ops.hpp"
#include "rahp/model/ra_coherence.hpp"
#include "rahp/text/tokenizer.hpp"
#include "rahp/train/minibatch.hpp"

namespace rahp::model {

using core::Tensor;

std::optional<NliLabel> parse_nli_label(std::string_view text) {
  if (text == "entailment") return NliLabel::kEntailment;
  if (text == "neutral") return NliLabel::kNeutral;
  if (text == "contradiction") return NliLabel::kContradiction;
  return std::nullopt;
}

std::string nli_label_name(NliLabel label) {
  switch (label) {
    case NliLabel::kEntailment: return "entailment";
    case NliLabel::kNeutral: return "neutral";
    case NliLabel::kContradiction: return "contradiction";
  }
  return "unknown";
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

void add_record(NliCorpus& corpus, const std::string& label, const std::string& premise,
                const std::string& hypothesis) {
  ++corpus.records;
  const auto parsed = parse_nli_label(label);
  if (!parsed) {
    ++corpus.skipped_label;
    return;
  }
  NliInstance instance{text::tokenize(premise), text::tokenize(hypothesis), *parsed};
  if (instance.premise.empty() || instance.hypothesis.empty()) {
    ++corpus.skipped_empty;
    return;
  }
  corpus.instances.push_back(std::move(instance));
}

}  // namespace

NliCorpus parse_nli_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read NLI corpus " + path.string());
  NliCorpus corpus;
  std::string line;
  std::size_t line_number = 0;
  std::size_t label_col = 0, premise_col = 1, hypothesis_col = 2;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == '{') {
      first_content_line = false;
      nlohmann::json record;
      try {
        record = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception&) {
        corpus.warnings.push_back("line " + std::to_string(line_number) + ": invalid JSON record skipped");
        ++corpus.records;
        ++corpus.skipped_label;
        continue;
      }
      add_record(corpus, record.value("gold_label", ""), record.value("sentence1", ""),
                 record.value("sentence2", ""));
      continue;
    }
    const auto fields = split_tabs(line);
    if (first_content_line) {
      first_content_line = false;
      bool header = false;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == "gold_label") label_col = i, header = true;
        if (fields[i] == "sentence1") premise_col = i, header = true;
        if (fields[i] == "sentence2") hypothesis_col = i, header = true;
      }
      if (header) continue;
    }
    const std::size_t needed = std::max({label_col, premise_col, hypothesis_col});
    if (fields.size() <= needed) {
      corpus.warnings.push_back("line " + std::to_string(line_number) + ": too few columns, skipped");
      ++corpus.records;
      ++corpus.skipped_label;
      continue;
    }
    add_record(corpus, fields[label_col], fields[premise_col], fields[hypothesis_col]);
  }
  if (corpus.instances.empty()) corpus.warnings.push_back("no usable NLI records in " + path.string());
  return corpus;
}

template <typename T>
NliNetwork<T> make_nli_network(const core::ParamStore<T>& params, const RahpConfig& config,
                               std::shared_ptr<const std::vector<bool>> trainable_rows) {
  NliNetwork<T> network;
  network.config = config;
  network.embedding = text::embedding_tables(params, config, std::move(trainable_rows));
  network.context = nn::bilstm_params(params, "bilstm_c");
  network.ra_encoder = nn::bilstm_params(params, "bilstm_ra");
  network.ra_head = nn::mlp_params(params, "mlp_ra");
  return network;
}

template <typename T>
void add_nli_params(core::ParamStore<T>& params, const RahpConfig& config, const text::WordEmbeddingTable& words,
                    core::Rng& rng) {
  config.validate();
  if (config.ra_dim != kNliClasses) {
    throw std::invalid_argument("pre-training needs ra_dim = 3, got " + std::to_string(config.ra_dim));
  }
  const std::size_t h = config.hidden;
  text::add_embedding_params(params, config, words, rng);
  nn::add_bilstm_params(params, "bilstm_c", config.embedding_dim(), h, rng);
  nn::add_bilstm_params(params, "bilstm_ra", 2 * h, h, rng);
  nn::add_mlp_params(params, "mlp_ra", 4 * h, config.mlp_hidden, config.ra_dim, rng);
}

template <typename T>
Tensor<T> nli_logits(const NliNetwork<T>& network, const text::TokenSequence& premise,
                     const text::TokenSequence& hypothesis, core::Rng* dropout_rng) {
  if (premise.real_length == 0 || hypothesis.real_length == 0) throw std::invalid_argument("empty sequence");
  text::CharEmbeddingCache<T> cache;
  auto encode = [&](const text::TokenSequence& sequence) {
    const nn::Mask mask(sequence.length(), sequence.real_length);
    const Tensor<T> context =
        nn::bilstm_encode(text::embed_sequence(sequence, network.embedding, &cache), mask, network.context);
    return ra_encode(context, mask, network.ra_encoder);
  };
  const Tensor<T> o_p = encode(premise);
  const Tensor<T> o_h = encode(hypothesis);
  const double dropout = dropout_rng ? network.config.dropout : 0.0;
  return ra_predict(o_p, o_h, network.ra_head, dropout, dropout_rng);
}

template <typename T>
Tensor<T> nli_forward(const NliNetwork<T>& network, const text::TokenSequence& premise,
                      const text::TokenSequence& hypothesis) {
  return core::softmax(nli_logits(network, premise, hypothesis));
}

text::Vocabulary build_nli_vocabulary(const NliCorpus& corpus) {
  text::Vocabulary vocab;
  for (const auto& instance : corpus.instances) {
    for (const auto& token : instance.premise) vocab.add(token);
    for (const auto& token : instance.hypothesis) vocab.add(token);
  }
  vocab.freeze();
  return vocab;
}

namespace {

struct EncodedPair {
  text::TokenSequence premise;
  text::TokenSequence hypothesis;
  std::size_t label;
};

std::vector<EncodedPair> encode_corpus(const NliCorpus& corpus, const text::Vocabulary& vocab,
                                       const RahpConfig& config) {
  std::vector<EncodedPair> out;
  out.reserve(corpus.instances.size());
  for (const auto& instance : corpus.instances) {
    out.push_back({text::encode_tokens(instance.premise, vocab, config.max_review_tokens),
                   text::encode_tokens(instance.hypothesis, vocab, config.max_answer_tokens),
                   static_cast<std::size_t>(instance.label)});
  }
  return out;
}

std::size_t argmax(const Tensor<float>& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values.at(i) > values.at(best)) best = i;
  }
  return best;
}

double accuracy(const NliNetwork<float>& network, const std::vector<EncodedPair>& pairs) {
  if (pairs.empty()) return 0.0;
  core::NoGradGuard no_grad;
  std::size_t correct = 0;
  for (const auto& pair : pairs) {
    if (argmax(nli_logits(network, pair.premise, pair.hypothesis)) == pair.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

}  // namespace

double nli_accuracy(const NliNetwork<float>& network, const text::Vocabulary& vocab, const NliCorpus& corpus,
                    const RahpConfig& config) {
  return accuracy(network, encode_corpus(corpus, vocab, config));
}

PretrainResult pretrain(const NliCorpus& train, const NliCorpus* valid, const RahpConfig& config,
                        const text::WordVectors* vectors, const PretrainOptions& options) {
  if (train.instances.empty()) throw std::invalid_argument("pre-training corpus is empty");
  if (options.batch_size == 0) throw std::invalid_argument("batch size must be positive");
  PretrainResult result;
  result.vocabulary = build_nli_vocabulary(train);

  core::Rng rng(config.seed);
  const auto table = text::build_embedding_table(result.vocabulary, vectors, config.word_dim, rng);
  core::ParamStore<float> params;
  add_nli_params(params, config, table, rng);
  const auto trainable = text::trainable_word_rows(table, config);
  const NliNetwork<float> network = make_nli_network(params, config, trainable);

  const auto train_pairs = encode_corpus(train, result.vocabulary, config);
  const auto valid_pairs = valid ? encode_corpus(*valid, result.vocabulary, config) : std::vector<EncodedPair>{};
  const bool use_valid = !valid_pairs.empty();

  core::Adam<float> optimizer(core::AdamOptions{config.learning_rate});
  core::Rng order_rng = rng.fork();
  core::Rng dropout_rng = rng.fork();
  std::vector<std::size_t> order(train_pairs.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<std::string> prefixes = transfer_prefixes();
  if (!config.transfer_embeddings) prefixes.erase(prefixes.begin());
  nlohmann::json metadata = {{"kind", "nli-pretrain"},
                             {"source", options.source},
                             {"config", config.to_map()},
                             {"vocabulary", result.vocabulary.words()},
                             {"coverage", table.coverage}};

  double best = -1.0;
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= options.max_epochs; ++epoch) {
    order_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      loss_sum += train::minibatch_step(
          params, optimizer, std::span<const std::size_t>(order.data() + start, end - start), [&](std::size_t i) {
            const auto& pair = train_pairs[i];
            return core::cross_entropy(nli_logits(network, pair.premise, pair.hypothesis, &dropout_rng), pair.label);
          });
    }
    PretrainEpoch record;
    record.epoch = epoch;
    record.mean_loss = loss_sum / static_cast<double>(train_pairs.size());
    record.train_accuracy = accuracy(network, train_pairs);
    record.valid_accuracy = use_valid ? accuracy(network, valid_pairs) : record.train_accuracy;
    result.history.push_back(record);
    if (options.log) {
      *options.log << "pretrain epoch " << epoch << " loss " << record.mean_loss << " train_acc "
                   << record.train_accuracy << " valid_acc " << record.valid_accuracy << "\n";
    }
    if (record.valid_accuracy > best) {
      best = record.valid_accuracy;
      since_best = 0;
      result.best_epoch = epoch;
      nlohmann::json snapshot_meta = metadata;
      snapshot_meta["best_epoch"] = epoch;
      snapshot_meta["valid_accuracy"] = record.valid_accuracy;
      result.checkpoint = core::checkpoint_from_params(params, snapshot_meta, prefixes);
    } else if (++since_best >= options.patience) {
      break;
    }
    if (record.train_accuracy >= options.stop_at_train_accuracy) break;
  }
  nlohmann::json history = nlohmann::json::array();
  for (const auto& e : result.history) {
    history.push_back({{"epoch", e.epoch},
                       {"mean_loss", e.mean_loss},
                       {"train_accuracy", e.train_accuracy},
                       {"valid_accuracy", e.valid_accuracy}});
  }
  result.checkpoint.metadata["history"] = history;
  return result;
}

#define RAHP_INSTANTIATE_NLI(T)                                                                                    \
  template NliNetwork<T> make_nli_network<T>(const core::ParamStore<T>&, const RahpConfig&,                        \
                                             std::shared_ptr<const std::vector<bool>>);                            \
  template void add_nli_params<T>(core::ParamStore<T>&, const RahpConfig&, const text::WordEmbeddingTable&,        \
                                  core::Rng&);                                                                     \
  template Tensor<T> nli_logits<T>(const NliNetwork<T>&, const text::TokenSequence&, const text::TokenSequence&,  \
                                   core::Rng*);                                                                    \
  template Tensor<T> nli_forward<T>(const NliNetwork<T>&, const text::TokenSequence&, const text::TokenSequence&);

RAHP_INSTANTIATE_NLI(float)
RAHP_INSTANTIATE_NLI(double)

}  // namespace rahp::model
