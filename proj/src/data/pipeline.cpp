#include "rahp/data/pipeline.hpp"

#include <stdexcept>

#include "rahp/core/random.hpp"
#include "rahp/text/tokenizer.hpp"

namespace rahp::data {

SplitSizes split_sizes(std::size_t n) {
  SplitSizes s;
  s.valid = (n + 5) / 10;
  s.test = s.valid;
  s.train = n - s.valid - s.test;
  return s;
}

DatasetSplit make_splits(std::vector<LabeledQAInstance> instances, std::uint64_t seed) {
  if (instances.size() < 10) {
    throw std::invalid_argument("need at least 10 instances to split, got " + std::to_string(instances.size()));
  }
  core::Rng rng(seed);
  rng.shuffle(instances);
  const SplitSizes sizes = split_sizes(instances.size());
  DatasetSplit split;
  auto it = std::make_move_iterator(instances.begin());
  split.train.assign(it, it + static_cast<std::ptrdiff_t>(sizes.train));
  it += static_cast<std::ptrdiff_t>(sizes.train);
  split.valid.assign(it, it + static_cast<std::ptrdiff_t>(sizes.valid));
  it += static_cast<std::ptrdiff_t>(sizes.valid);
  split.test.assign(it, std::make_move_iterator(instances.end()));
  return split;
}

std::set<std::string> corpus_vocabulary(const std::vector<std::string>& texts) {
  std::set<std::string> vocab;
  for (const auto& t : texts) {
    for (auto& token : text::tokenize(t)) vocab.insert(std::move(token));
  }
  return vocab;
}

double vocab_overlap(const std::vector<std::string>& corpus_a, const std::vector<std::string>& corpus_b) {
  const auto va = corpus_vocabulary(corpus_a);
  const auto vb = corpus_vocabulary(corpus_b);
  if (va.empty() || vb.empty()) throw std::invalid_argument("vocab_overlap: empty corpus");
  std::size_t shared = 0;
  for (const auto& w : va) shared += vb.count(w);
  return static_cast<double>(shared) / static_cast<double>(va.size());
}

DatasetSplit prepare_dataset(const std::vector<RawAnswerRecord>& answers, const RetrievalIndex& index,
                             const RahpConfig& config, PrepareReport& report) {
  std::vector<LabeledQAInstance> kept;
  std::set<std::string> warned_products;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    const auto& a = answers[i];
    const Label label = derive_label(a.vote_x, a.vote_y);
    if (label == Label::kDiscard) {
      ++report.discarded;
      continue;
    }
    (label == Label::kHelpful ? report.helpful : report.unhelpful) += 1;
    LabeledQAInstance inst;
    inst.id = a.product_id + ":" + std::to_string(i);
    inst.product_id = a.product_id;
    inst.question = a.question;
    inst.answer = a.answer;
    inst.vote_x = a.vote_x;
    inst.vote_y = a.vote_y;
    inst.helpful = label == Label::kHelpful;
    const std::string query = config.retrieval_query == "question_answer" ? a.question + " " + a.answer : a.question;
    auto retrieved = retrieve_top_k(query, a.product_id, index, config.num_reviews);
    if (retrieved.unknown_product) {
      ++report.unknown_products;
      if (warned_products.insert(a.product_id).second) {
        report.warnings.push_back("no reviews for product " + a.product_id + "; review slots left EMPTY");
      }
    }
    inst.reviews = std::move(retrieved.slots);
    kept.push_back(std::move(inst));
  }
  DatasetSplit split = make_splits(std::move(kept), config.seed);
  report.sizes = {split.train.size(), split.valid.size(), split.test.size()};
  return split;
}

void write_split(const std::filesystem::path& dir, const DatasetSplit& split) {
  std::filesystem::create_directories(dir);
  write_shard(dir / "train.jsonl", split.train);
  write_shard(dir / "valid.jsonl", split.valid);
  write_shard(dir / "test.jsonl", split.test);
}

}  // namespace rahp::data
