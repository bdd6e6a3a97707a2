#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rahp/core/checkpoint.hpp"
#include "rahp/data/records.hpp"
#include "rahp/eval/metrics.hpp"
#include "rahp/model/rahp_model.hpp"

namespace rahp::train {

struct LabeledInput {
  std::string id;
  model::ModelInput input;
  bool helpful = false;
};

/// Tokenizes a shard with the model's vocabulary. Throws if an instance has
/// more review slots than the model's K.
std::vector<LabeledInput> encode_shard(const std::vector<data::LabeledQAInstance>& shard,
                                       const model::RahpModel& model);

/// Scores every instance without recording a graph. `scores` receives the
/// per-instance probabilities when non-null.
eval::EvalReport evaluate_model(const model::RahpModel& model, const std::vector<LabeledInput>& instances,
                                std::vector<double>* scores = nullptr);

struct TrainEpoch {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  std::optional<double> train_accuracy;
  eval::EvalReport valid;
};

struct TrainOptions {
  /// Evaluate the training set after every epoch (costs one forward pass).
  bool track_train_accuracy = true;
  /// Stop once training accuracy reaches this; above 1 never triggers.
  double stop_at_train_accuracy = 2.0;
  std::ostream* log = nullptr;
};

struct TrainResult {
  core::Checkpoint best;  // highest validation AUROC so far
  std::size_t best_epoch = 0;
  double best_selection = -1.0;
  std::vector<TrainEpoch> history;
  bool diverged = false;
  std::string divergence;
};

/// Mini-batch Adam with early stopping on validation AUROC (`config.patience`
/// epochs without improvement). Validation accuracy stands in when the
/// validation labels have a single class, and the training set is used for
/// selection when `valid` is empty. A non-finite loss stops training; `best`
/// then holds the last checkpoint that was selected, or the initial weights.
/// The model ends holding its final weights, not the best ones.
TrainResult train_model(model::RahpModel& model, const std::vector<LabeledInput>& train,
                        const std::vector<LabeledInput>& valid, const TrainOptions& options = {});

}  // namespace rahp::train
