#pragma once

// Small configurations and synthetic corpora shared by the unit and acceptance tests.

#include <string>
#include <vector>

#include "rahp/config.hpp"
#include "rahp/core/params.hpp"
#include "rahp/core/random.hpp"
#include "rahp/model/nli.hpp"

namespace rahp::toy {

inline RahpConfig tiny_config() {
  RahpConfig c;
  c.word_dim = 4;
  c.char_dim = 3;
  c.char_filters = 2;
  c.char_widths = {2, 3};
  c.hidden = 3;
  c.mlp_hidden = 5;
  c.qa_dim = 4;
  c.classifier_hidden = 4;
  c.num_reviews = 2;
  return c;
}

// Large enough to learn the synthetic tasks quickly on one core.
inline RahpConfig desk_config() {
  RahpConfig c;
  c.word_dim = 16;
  c.char_dim = 8;
  c.char_filters = 8;
  c.hidden = 16;
  c.mlp_hidden = 32;
  c.qa_dim = 16;
  c.classifier_hidden = 16;
  c.num_reviews = 3;
  c.learning_rate = 5e-3;
  c.batch_size = 16;
  return c;
}

// Redraws every parameter from U(-bound, bound). Gradient checks use this so
// that no entry sits in the range where finite-difference roundoff dominates.
template <typename T>
void randomize(core::ParamStore<T>& params, std::uint64_t seed, double bound = 1.0) {
  core::Rng rng(seed);
  for (const auto& name : params.names()) {
    for (auto& v : params.get(name).mutable_data()) v = static_cast<T>(rng.uniform(-bound, bound));
  }
}

inline std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
  return out;
}

// Entailment: the hypothesis is a contiguous piece of the premise.
// Contradiction: the hypothesis shares no word with the premise.
// Neutral: the hypothesis mixes one premise word with unseen ones.
inline model::NliCorpus synthetic_nli_corpus(std::size_t n, std::uint64_t seed) {
  core::Rng rng(seed);
  std::vector<std::string> pool_a, pool_b;
  for (int i = 0; i < 24; ++i) pool_a.push_back("p" + std::to_string(i));
  for (int i = 0; i < 24; ++i) pool_b.push_back("q" + std::to_string(i));
  model::NliCorpus corpus;
  for (std::size_t k = 0; k < n; ++k) {
    model::NliInstance inst;
    const std::size_t len = 5 + rng.index(3);
    for (std::size_t i = 0; i < len; ++i) inst.premise.push_back(pool_a[rng.index(pool_a.size())]);
    const auto label = static_cast<model::NliLabel>(k % 3);
    inst.label = label;
    if (label == model::NliLabel::kEntailment) {
      const std::size_t take = 2 + rng.index(2);
      const std::size_t start = rng.index(len - take + 1);
      inst.hypothesis.assign(inst.premise.begin() + static_cast<long>(start),
                             inst.premise.begin() + static_cast<long>(start + take));
    } else if (label == model::NliLabel::kContradiction) {
      const std::size_t take = 2 + rng.index(2);
      for (std::size_t i = 0; i < take; ++i) inst.hypothesis.push_back(pool_b[rng.index(pool_b.size())]);
    } else {
      inst.hypothesis.push_back(inst.premise[rng.index(len)]);
      inst.hypothesis.push_back(pool_b[rng.index(pool_b.size())]);
      inst.hypothesis.push_back(pool_a[rng.index(pool_a.size())]);
    }
    corpus.instances.push_back(std::move(inst));
    ++corpus.records;
  }
  return corpus;
}

}  // namespace rahp::toy
