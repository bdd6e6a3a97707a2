#pragma once

// Library side of the `rahp` subcommands, so tests can drive the full
// pipeline in-process.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rahp/config.hpp"
#include "rahp/data/pipeline.hpp"
#include "rahp/eval/metrics.hpp"
#include "rahp/model/nli.hpp"
#include "rahp/train/trainer.hpp"

namespace rahp::app {

/// Hex SHA-1 of "blob <size>\0<contents>", as git hashes file contents.
std::string git_blob_sha1(const std::filesystem::path& path);

/// {command, seed, config, config_fingerprint, inputs: {file name: sha1}}.
nlohmann::ordered_json run_metadata(const std::string& command, const RahpConfig& config,
                                    const std::vector<std::filesystem::path>& inputs);

/// Pretty-printed JSON plus a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& value);

/// Sidecar for run metadata: "<output>.run.json".
std::filesystem::path run_record_path(const std::filesystem::path& output);

struct PrepareArgs {
  RahpConfig config;
  std::filesystem::path answers;
  std::filesystem::path reviews;
  std::filesystem::path vectors;
  std::filesystem::path out_dir;
};

/// Writes train/valid/test shards and prepare.run.json into `out_dir`.
data::PrepareReport run_prepare(const PrepareArgs& args, std::ostream& log);

struct PretrainArgs {
  RahpConfig config;
  std::filesystem::path train;
  std::filesystem::path valid;    // optional
  std::filesystem::path vectors;  // optional
  std::filesystem::path output;
  double stop_at_train_accuracy = 2.0;
};

model::PretrainResult run_pretrain(const PretrainArgs& args, std::ostream& log);

struct TrainArgs {
  RahpConfig config;
  std::filesystem::path data_dir;    // train.jsonl and valid.jsonl
  std::filesystem::path vectors;     // optional
  std::filesystem::path pretrained;  // optional NLI checkpoint
  std::filesystem::path output;
};

/// Vocabulary: the pre-training vocabulary (if any) followed by the new words
/// of the training shard in first-seen order. Writes the best checkpoint even
/// when training diverged; check `diverged` on the result.
train::TrainResult run_train(const TrainArgs& args, std::ostream& log);

struct EvaluateArgs {
  std::filesystem::path checkpoint;
  std::filesystem::path shard;
  std::filesystem::path report;      // optional JSON report
  std::filesystem::path scores_csv;  // optional instance_id,score,label dump
  const RahpConfig* expected = nullptr;
};

eval::EvalReport run_evaluate(const EvaluateArgs& args, std::ostream& out);

struct PredictArgs {
  std::filesystem::path checkpoint;
  std::filesystem::path reviews;
  std::filesystem::path vectors;
  std::string question;
  std::string answer;
  std::string product_id;
};

struct Prediction {
  double probability = 0.0;
  bool helpful = false;
  data::RetrievalResult evidence;
};

/// Retrieves evidence from `reviews`, scores the pair and prints the result.
Prediction run_predict(const PredictArgs& args, std::ostream& out);

struct OverlapArgs {
  std::filesystem::path reference;  // NLI corpus
  std::vector<std::pair<std::string, std::filesystem::path>> categories;  // answers files
  std::filesystem::path output;     // optional CSV
};

/// category,ratio rows: share of each category's question and answer
/// vocabulary that also occurs in the reference corpus.
std::vector<std::pair<std::string, double>> run_overlap(const OverlapArgs& args, std::ostream& out);

}  // namespace rahp::app
