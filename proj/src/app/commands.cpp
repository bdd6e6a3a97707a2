#include "rahp/app/commands.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rahp/text/tokenizer.hpp"

namespace rahp::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string git_blob_sha1(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string header = "blob " + std::to_string(contents.size()) + std::string(1, '\0');
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (!ctx || !EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) ||
      !EVP_DigestUpdate(ctx.get(), header.data(), header.size()) ||
      !EVP_DigestUpdate(ctx.get(), contents.data(), contents.size()) ||
      !EVP_DigestFinal_ex(ctx.get(), digest, &length)) {
    throw std::runtime_error("SHA-1 failed for " + path.string());
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

ordered_json run_metadata(const std::string& command, const RahpConfig& config, const std::vector<fs::path>& inputs) {
  ordered_json meta;
  meta["command"] = command;
  meta["seed"] = config.seed;
  meta["config_fingerprint"] = config.fingerprint();
  meta["config"] = config.to_map();
  ordered_json hashes = ordered_json::object();
  for (const auto& p : inputs) {
    if (!p.empty()) hashes[p.filename().string()] = git_blob_sha1(p);
  }
  meta["inputs"] = hashes;
  return meta;
}

void write_json(const fs::path& path, const ordered_json& value) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << value.dump(2) << "\n";
}

fs::path run_record_path(const fs::path& output) { return fs::path(output.string() + ".run.json"); }

namespace {

std::shared_ptr<const text::WordVectors> load_vectors(const fs::path& path, std::size_t dim, std::ostream& log) {
  if (path.empty()) return nullptr;
  auto vectors = std::make_shared<text::WordVectors>(text::WordVectors::load(path, dim));
  log << "word vectors: " << vectors->size() << " x " << vectors->dim();
  if (vectors->malformed_lines()) log << " (" << vectors->malformed_lines() << " malformed lines skipped)";
  log << "\n";
  return vectors;
}

void add_words(text::Vocabulary& vocab, const std::string& text) {
  for (const auto& token : text::tokenize(text)) vocab.add(token);
}

}  // namespace

data::PrepareReport run_prepare(const PrepareArgs& args, std::ostream& log) {
  args.config.validate();
  data::ReadStats answer_stats, review_stats;
  const auto answers = data::read_answers(args.answers, &answer_stats);
  const auto reviews = data::read_reviews(args.reviews, &review_stats);
  if (args.vectors.empty()) throw std::invalid_argument("prepare needs word vectors for retrieval");
  const auto vectors = load_vectors(args.vectors, 0, log);
  const auto index = data::RetrievalIndex::build(reviews, vectors);

  data::PrepareReport report;
  report.answers_read = answers.size();
  report.answers_skipped = answer_stats.skipped;
  report.reviews_read = reviews.size();
  report.review_sentences = index.sentence_count();
  report.warnings = answer_stats.warnings;
  report.warnings.insert(report.warnings.end(), review_stats.warnings.begin(), review_stats.warnings.end());
  const auto split = data::prepare_dataset(answers, index, args.config, report);
  data::write_split(args.out_dir, split);

  for (const auto& w : report.warnings) log << "warning: " << w << "\n";
  log << "answers " << report.answers_read << " (skipped " << report.answers_skipped << "), helpful "
      << report.helpful << ", unhelpful " << report.unhelpful << ", discarded " << report.discarded << "\n"
      << "review sentences " << report.review_sentences << " from " << report.reviews_read << " reviews\n"
      << "split " << report.sizes.train << "/" << report.sizes.valid << "/" << report.sizes.test << "\n";

  auto meta = run_metadata("prepare", args.config, {args.answers, args.reviews, args.vectors});
  meta["counts"] = {{"answers", report.answers_read},
                    {"answers_skipped", report.answers_skipped},
                    {"reviews", report.reviews_read},
                    {"review_sentences", report.review_sentences},
                    {"helpful", report.helpful},
                    {"unhelpful", report.unhelpful},
                    {"discarded", report.discarded},
                    {"unknown_products", report.unknown_products},
                    {"train", report.sizes.train},
                    {"valid", report.sizes.valid},
                    {"test", report.sizes.test}};
  meta["warnings"] = report.warnings;
  write_json(args.out_dir / "prepare.run.json", meta);
  return report;
}

model::PretrainResult run_pretrain(const PretrainArgs& args, std::ostream& log) {
  args.config.validate();
  const auto train = model::parse_nli_corpus(args.train);
  for (const auto& w : train.warnings) log << "warning: " << w << "\n";
  model::NliCorpus valid;
  if (!args.valid.empty()) {
    valid = model::parse_nli_corpus(args.valid);
    for (const auto& w : valid.warnings) log << "warning: " << w << "\n";
  }
  log << "pre-training pairs " << train.instances.size() << " (skipped " << train.skipped_label
      << " without a gold label, " << train.skipped_empty << " empty)\n";
  const auto vectors = load_vectors(args.vectors, args.config.word_dim, log);

  model::PretrainOptions options;
  options.max_epochs = args.config.pretrain_max_epochs;
  options.batch_size = args.config.pretrain_batch_size;
  options.patience = args.config.pretrain_patience;
  options.stop_at_train_accuracy = args.stop_at_train_accuracy;
  // Content hash rather than a path, so identical runs write identical bytes.
  options.source = args.train.filename().string() + "@" + git_blob_sha1(args.train);
  options.log = &log;
  auto result = model::pretrain(train, args.valid.empty() ? nullptr : &valid, args.config, vectors.get(), options);
  core::write_checkpoint(args.output, result.checkpoint);
  log << "best epoch " << result.best_epoch << ", checkpoint " << args.output.string() << "\n";

  auto meta = run_metadata("pretrain", args.config, {args.train, args.valid, args.vectors});
  meta["best_epoch"] = result.best_epoch;
  meta["history"] = result.checkpoint.metadata.at("history");
  write_json(run_record_path(args.output), meta);
  return result;
}

train::TrainResult run_train(const TrainArgs& args, std::ostream& log) {
  args.config.validate();
  const auto train_shard = data::read_shard(args.data_dir / "train.jsonl");
  const auto valid_path = args.data_dir / "valid.jsonl";
  const auto valid_shard = fs::exists(valid_path) ? data::read_shard(valid_path) : std::vector<data::LabeledQAInstance>{};
  if (train_shard.empty()) throw std::invalid_argument("training shard " + (args.data_dir / "train.jsonl").string() + " is empty");

  core::Checkpoint pretrained;
  text::Vocabulary vocab;
  if (!args.pretrained.empty()) {
    pretrained = core::read_checkpoint(args.pretrained);
    if (!pretrained.metadata.contains("vocabulary")) {
      throw std::runtime_error(args.pretrained.string() + " has no vocabulary in its metadata");
    }
    vocab = text::Vocabulary::from_words(pretrained.metadata.at("vocabulary").get<std::vector<std::string>>());
  }
  for (const auto& inst : train_shard) {
    add_words(vocab, inst.question);
    add_words(vocab, inst.answer);
    for (const auto& slot : inst.reviews) {
      if (slot) add_words(vocab, slot->text);
    }
  }
  vocab.freeze();
  const auto vectors = load_vectors(args.vectors, args.config.word_dim, log);
  auto model = model::RahpModel::create(args.config, vocab, vectors.get());
  if (!args.pretrained.empty()) {
    const auto record = model.load_transferred(pretrained);
    log << "transferred " << record.tensors.size() << " tensors, " << record.embedding_rows_copied << " of "
        << record.embedding_rows_total << " word rows from " << args.pretrained.filename().string() << "\n";
  }
  log << "vocabulary " << vocab.size() << ", train " << train_shard.size() << ", valid " << valid_shard.size()
      << "\n";

  const auto train_inputs = train::encode_shard(train_shard, model);
  const auto valid_inputs = train::encode_shard(valid_shard, model);
  train::TrainOptions options;
  options.log = &log;
  auto result = train::train_model(model, train_inputs, valid_inputs, options);
  core::write_checkpoint(args.output, result.best);
  log << "best epoch " << result.best_epoch << ", checkpoint " << args.output.string() << "\n";

  auto meta = run_metadata("train", args.config,
                           {args.data_dir / "train.jsonl", fs::exists(valid_path) ? valid_path : fs::path(),
                            args.vectors, args.pretrained});
  meta["best_epoch"] = result.best_epoch;
  meta["history"] = result.best.metadata.at("history");
  if (result.diverged) meta["divergence"] = result.divergence;
  write_json(run_record_path(args.output), meta);
  return result;
}

eval::EvalReport run_evaluate(const EvaluateArgs& args, std::ostream& out) {
  const auto model = model::RahpModel::load(args.checkpoint, args.expected);
  const auto shard = data::read_shard(args.shard);
  if (shard.empty()) throw std::invalid_argument("shard " + args.shard.string() + " is empty");
  const auto inputs = train::encode_shard(shard, model);
  std::vector<double> scores;
  const auto report = train::evaluate_model(model, inputs, &scores);
  if (!report.auroc) out << "warning: AUROC undefined, the shard has a single class\n";
  out << report.to_table();
  if (!args.report.empty()) write_json(args.report, report.to_json());
  if (!args.scores_csv.empty()) {
    std::ofstream csv(args.scores_csv, std::ios::binary | std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + args.scores_csv.string());
    csv << "instance_id,score,label\n";
    char buf[64];
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", scores[i]);
      csv << inputs[i].id << "," << buf << "," << (inputs[i].helpful ? 1 : 0) << "\n";
    }
  }
  return report;
}

Prediction run_predict(const PredictArgs& args, std::ostream& out) {
  const auto model = model::RahpModel::load(args.checkpoint);
  const auto reviews = data::read_reviews(args.reviews);
  auto vectors = std::make_shared<text::WordVectors>(text::WordVectors::load(args.vectors));
  const auto index = data::RetrievalIndex::build(reviews, vectors);
  const std::string query =
      model.config().retrieval_query == "question_answer" ? args.question + " " + args.answer : args.question;

  Prediction p;
  p.evidence = data::retrieve_top_k(query, args.product_id, index, model.config().num_reviews);
  if (p.evidence.unknown_product) {
    out << "warning: no reviews for product " << args.product_id << "; review slots left EMPTY\n";
  }
  std::vector<std::optional<std::string>> texts;
  for (const auto& slot : p.evidence.slots) texts.push_back(slot ? std::optional(slot->text) : std::nullopt);
  p.probability = model.predict(model.encode(args.question, args.answer, texts));
  p.helpful = p.probability >= eval::kDecisionThreshold;

  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", p.probability);
  out << "probability " << buf << "\nlabel " << (p.helpful ? "helpful" : "unhelpful") << "\n";
  for (std::size_t k = 0; k < p.evidence.slots.size(); ++k) {
    const auto& slot = p.evidence.slots[k];
    if (slot) {
      std::snprintf(buf, sizeof buf, "%.4f", slot->score);
      out << "review " << k + 1 << " [" << buf << "] " << slot->text << "\n";
    } else {
      out << "review " << k + 1 << " EMPTY\n";
    }
  }
  return p;
}

std::vector<std::pair<std::string, double>> run_overlap(const OverlapArgs& args, std::ostream& out) {
  const auto reference = model::parse_nli_corpus(args.reference);
  std::vector<std::string> reference_texts;
  for (const auto& inst : reference.instances) {
    std::string s;
    for (const auto& t : inst.premise) s += t + " ";
    for (const auto& t : inst.hypothesis) s += t + " ";
    reference_texts.push_back(std::move(s));
  }
  std::vector<std::pair<std::string, double>> rows;
  for (const auto& [name, path] : args.categories) {
    std::vector<std::string> texts;
    for (const auto& a : data::read_answers(path)) {
      texts.push_back(a.question);
      texts.push_back(a.answer);
    }
    if (texts.empty()) throw std::invalid_argument("category " + name + " has no usable records in " + path.string());
    rows.emplace_back(name, data::vocab_overlap(texts, reference_texts));
  }
  std::ostringstream csv;
  csv << "category,ratio\n";
  char buf[32];
  for (const auto& [name, ratio] : rows) {
    std::snprintf(buf, sizeof buf, "%.6f", ratio);
    csv << name << "," << buf << "\n";
  }
  out << csv.str();
  if (!args.output.empty()) {
    std::ofstream file(args.output, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write " + args.output.string());
    file << csv.str();
  }
  return rows;
}

}  // namespace rahp::app
