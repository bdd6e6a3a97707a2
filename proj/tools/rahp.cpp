// rahp: prepare data, pre-train, train, evaluate, predict and run the
// vocabulary-overlap analysis.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rahp/app/commands.hpp"

namespace {

struct ConfigFlags {
  std::string file;
  std::vector<std::string> overrides;
  bool no_ra_coherence = false;
  bool no_q_to_r_attention = false;
  bool no_char_embedding = false;
};

rahp::RahpConfig resolve(const ConfigFlags& flags) {
  rahp::RahpConfig config = flags.file.empty() ? rahp::RahpConfig{} : rahp::RahpConfig::load(flags.file);
  for (const auto& kv : flags.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (flags.no_ra_coherence) config.no_ra_coherence = true;
  if (flags.no_q_to_r_attention) config.no_q_to_r_attention = true;
  if (flags.no_char_embedding) config.no_char_embedding = true;
  config.validate();
  return config;
}

void add_config_options(CLI::App* cmd, ConfigFlags& flags, bool ablations) {
  cmd->add_option("--config", flags.file, "key=value config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", flags.overrides, "override one config key (key=value), repeatable");
  if (ablations) {
    cmd->add_flag("--no-ra-coherence", flags.no_ra_coherence, "drop the review-answer coherence pathway");
    cmd->add_flag("--no-q-to-r-attention", flags.no_q_to_r_attention, "encode reviews without question attention");
    cmd->add_flag("--no-char-embedding", flags.no_char_embedding, "word vectors only");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Review-aware answer helpfulness prediction"};
  app.require_subcommand(1);

  ConfigFlags prepare_flags;
  rahp::app::PrepareArgs prepare;
  auto* prepare_cmd = app.add_subcommand("prepare", "label answers, retrieve review sentences, write shards");
  add_config_options(prepare_cmd, prepare_flags, false);
  prepare_cmd->add_option("--answers", prepare.answers, "answers JSONL")->required()->check(CLI::ExistingFile);
  prepare_cmd->add_option("--reviews", prepare.reviews, "reviews JSONL")->required()->check(CLI::ExistingFile);
  prepare_cmd->add_option("--vectors", prepare.vectors, "word vectors for retrieval")->required()->check(CLI::ExistingFile);
  prepare_cmd->add_option("--out", prepare.out_dir, "output directory")->required();

  ConfigFlags pretrain_flags;
  rahp::app::PretrainArgs pretrain;
  auto* pretrain_cmd = app.add_subcommand("pretrain", "pre-train the review-answer pathway on NLI pairs");
  add_config_options(pretrain_cmd, pretrain_flags, false);
  pretrain_cmd->add_option("--train", pretrain.train, "NLI corpus (JSONL or TSV)")->required()->check(CLI::ExistingFile);
  pretrain_cmd->add_option("--valid", pretrain.valid, "validation NLI corpus")->check(CLI::ExistingFile);
  pretrain_cmd->add_option("--vectors", pretrain.vectors, "pre-trained word vectors")->check(CLI::ExistingFile);
  pretrain_cmd->add_option("--out", pretrain.output, "checkpoint path")->required();

  ConfigFlags train_flags;
  rahp::app::TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train the helpfulness model");
  add_config_options(train_cmd, train_flags, true);
  train_cmd->add_option("--data", train.data_dir, "directory with train.jsonl and valid.jsonl")
      ->required()
      ->check(CLI::ExistingDirectory);
  train_cmd->add_option("--vectors", train.vectors, "pre-trained word vectors")->check(CLI::ExistingFile);
  train_cmd->add_option("--pretrained", train.pretrained, "NLI checkpoint to initialize from")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train.output, "checkpoint path")->required();

  ConfigFlags eval_flags;
  rahp::app::EvaluateArgs evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "F1 and AUROC of a checkpoint on a shard");
  eval_cmd->add_option("--config", eval_flags.file, "check the checkpoint against this config")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--checkpoint", evaluate.checkpoint, "model checkpoint")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--shard", evaluate.shard, "shard JSONL")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--report", evaluate.report, "write the report as JSON");
  eval_cmd->add_option("--scores", evaluate.scores_csv, "write instance_id,score,label CSV");

  rahp::app::PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "score one answer with retrieved review evidence");
  predict_cmd->add_option("--checkpoint", predict.checkpoint, "model checkpoint")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--reviews", predict.reviews, "reviews JSONL")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--vectors", predict.vectors, "word vectors for retrieval")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--question", predict.question)->required();
  predict_cmd->add_option("--answer", predict.answer)->required();
  predict_cmd->add_option("--product", predict.product_id)->required();

  rahp::app::OverlapArgs overlap;
  std::vector<std::string> categories;
  auto* overlap_cmd = app.add_subcommand("overlap", "vocabulary overlap of answer corpora with an NLI corpus");
  overlap_cmd->add_option("--reference", overlap.reference, "NLI corpus")->required()->check(CLI::ExistingFile);
  overlap_cmd->add_option("--category", categories, "name=answers.jsonl, repeatable")->required();
  overlap_cmd->add_option("--out", overlap.output, "CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prepare_cmd) {
      prepare.config = resolve(prepare_flags);
      rahp::app::run_prepare(prepare, std::cout);
    } else if (*pretrain_cmd) {
      pretrain.config = resolve(pretrain_flags);
      rahp::app::run_pretrain(pretrain, std::cout);
    } else if (*train_cmd) {
      train.config = resolve(train_flags);
      const auto result = rahp::app::run_train(train, std::cout);
      if (result.diverged) {
        std::cerr << "error: training diverged (" << result.divergence << "); kept the last good checkpoint\n";
        return 3;
      }
    } else if (*eval_cmd) {
      std::optional<rahp::RahpConfig> expected;
      if (!eval_flags.file.empty()) expected = rahp::RahpConfig::load(eval_flags.file);
      evaluate.expected = expected ? &*expected : nullptr;
      rahp::app::run_evaluate(evaluate, std::cout);
    } else if (*predict_cmd) {
      rahp::app::run_predict(predict, std::cout);
    } else if (*overlap_cmd) {
      for (const auto& c : categories) {
        const auto eq = c.find('=');
        if (eq == std::string::npos || eq == 0) throw std::invalid_argument("--category expects name=path, got '" + c + "'");
        overlap.categories.emplace_back(c.substr(0, eq), c.substr(eq + 1));
      }
      rahp::app::run_overlap(overlap, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
