#include "rahp/train/trainer.hpp"

#include <numeric>
#include <ostream>
#include <stdexcept>

#include "rahp/core/adam.hpp"
#include "rahp/train/minibatch.hpp"

namespace rahp::train {

std::vector<LabeledInput> encode_shard(const std::vector<data::LabeledQAInstance>& shard,
                                       const model::RahpModel& model) {
  std::vector<LabeledInput> out;
  out.reserve(shard.size());
  for (const auto& inst : shard) {
    if (inst.reviews.size() > model.config().num_reviews) {
      throw std::invalid_argument("instance " + inst.id + " has " + std::to_string(inst.reviews.size()) +
                                  " review slots but the model takes " +
                                  std::to_string(model.config().num_reviews));
    }
    try {
      out.push_back({inst.id, model.encode(inst.question, inst.answer, inst.review_texts()), inst.helpful});
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("instance " + inst.id + ": " + e.what());
    }
  }
  return out;
}

eval::EvalReport evaluate_model(const model::RahpModel& model, const std::vector<LabeledInput>& instances,
                                std::vector<double>* scores) {
  if (instances.empty()) throw std::invalid_argument("cannot evaluate an empty shard");
  core::NoGradGuard no_grad;
  const auto network = model.network();
  std::vector<double> probs;
  probs.reserve(instances.size());
  std::unique_ptr<bool[]> labels(new bool[instances.size()]);
  double loss = 0.0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const double p = static_cast<double>(model::rahp_forward(network, instances[i].input).probability.item());
    probs.push_back(p);
    labels[i] = instances[i].helpful;
    loss += model::binary_cross_entropy(p, instances[i].helpful ? 1.0 : 0.0);
  }
  auto report = eval::make_report(probs, std::span<const bool>(labels.get(), instances.size()));
  report.mean_loss = loss / static_cast<double>(instances.size());
  report.config_fingerprint = model.config().fingerprint();
  if (scores) *scores = std::move(probs);
  return report;
}

namespace {

double selection_score(const eval::EvalReport& report) { return report.auroc ? *report.auroc : report.accuracy; }

nlohmann::json history_json(const std::vector<TrainEpoch>& history) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : history) {
    out.push_back({{"epoch", e.epoch},
                   {"mean_loss", e.mean_loss},
                   {"train_accuracy", e.train_accuracy ? nlohmann::json(*e.train_accuracy) : nlohmann::json(nullptr)},
                   {"valid", e.valid.to_json()}});
  }
  return out;
}

}  // namespace

TrainResult train_model(model::RahpModel& model, const std::vector<LabeledInput>& train,
                        const std::vector<LabeledInput>& valid, const TrainOptions& options) {
  if (train.empty()) throw std::invalid_argument("training shard is empty");
  const RahpConfig& config = model.config();
  if (config.batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  const auto& selection_set = valid.empty() ? train : valid;

  core::Rng rng(config.seed ^ 0x5eedULL);
  core::Rng order_rng = rng.fork();
  core::Rng dropout_rng = rng.fork();
  core::Adam<float> optimizer(core::AdamOptions{config.learning_rate});
  const auto network = model.network();
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  result.best = model.to_checkpoint({{"best_epoch", 0}});
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    order_rng.shuffle(order);
    double loss_sum = 0.0;
    try {
      for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
        const std::size_t end = std::min(order.size(), start + config.batch_size);
        loss_sum += minibatch_step(model.params(), optimizer,
                                   std::span<const std::size_t>(order.data() + start, end - start),
                                   [&](std::size_t i) {
                                     const auto out = model::rahp_forward(network, train[i].input, &dropout_rng);
                                     return model::rahp_loss(out, train[i].helpful ? 1.0 : 0.0);
                                   });
      }
    } catch (const DivergenceError& e) {
      result.diverged = true;
      result.divergence = "epoch " + std::to_string(epoch) + ": " + e.what();
      if (options.log) *options.log << "training aborted, " << result.divergence << "\n";
      break;
    }
    TrainEpoch record;
    record.epoch = epoch;
    record.mean_loss = loss_sum / static_cast<double>(train.size());
    if (options.track_train_accuracy) record.train_accuracy = evaluate_model(model, train).accuracy;
    record.valid = evaluate_model(model, selection_set);
    result.history.push_back(record);
    if (options.log) {
      *options.log << "epoch " << epoch << " loss " << record.mean_loss;
      if (record.train_accuracy) *options.log << " train_acc " << *record.train_accuracy;
      *options.log << " valid_auroc "
                   << (record.valid.auroc ? std::to_string(*record.valid.auroc) : std::string("undefined"))
                   << " valid_f1 " << record.valid.f1 << "\n";
    }
    const double score = selection_score(record.valid);
    if (score > result.best_selection) {
      result.best_selection = score;
      result.best_epoch = epoch;
      since_best = 0;
      result.best = model.to_checkpoint({{"best_epoch", epoch}, {"valid", record.valid.to_json()}});
    } else if (++since_best >= config.patience) {
      break;
    }
    if (record.train_accuracy && *record.train_accuracy >= options.stop_at_train_accuracy) break;
  }
  result.best.metadata["history"] = history_json(result.history);
  if (result.diverged) result.best.metadata["divergence"] = result.divergence;
  return result;
}

}  // namespace rahp::train
