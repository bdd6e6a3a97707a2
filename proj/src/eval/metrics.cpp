#include "rahp/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace rahp::eval {

double Confusion::precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }

double Confusion::recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }

double Confusion::f1() const {
  // 2TP / (2TP + FP + FN) is the harmonic mean without the intermediate rounding.
  return tp == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

Confusion confusion(std::span<const bool> predictions, std::span<const bool> labels) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("predictions and labels differ in length (" + std::to_string(predictions.size()) +
                                " vs " + std::to_string(labels.size()) + ")");
  }
  if (labels.empty()) throw std::invalid_argument("no instances to score");
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i]) {
      (labels[i] ? c.tp : c.fp) += 1;
    } else {
      (labels[i] ? c.fn : c.tn) += 1;
    }
  }
  return c;
}

double f1_score(std::span<const bool> predictions, std::span<const bool> labels) {
  return confusion(predictions, labels).f1();
}

namespace {

struct RankedGroup {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

// Instances grouped by equal score, highest score first.
std::vector<RankedGroup> ranked_groups(std::span<const double> scores, std::span<const bool> labels,
                                       std::size_t& positives, std::size_t& negatives) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
  for (double s : scores) {
    if (std::isnan(s)) throw std::invalid_argument("NaN score");
  }
  positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument("AUROC undefined: labels contain only one class");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<RankedGroup> groups;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || scores[order[i]] != scores[order[i - 1]]) groups.emplace_back();
    (labels[order[i]] ? groups.back().positives : groups.back().negatives) += 1;
  }
  return groups;
}

}  // namespace

double auroc_pairwise(std::span<const double> scores, std::span<const bool> labels) {
  std::size_t p = 0, n = 0;
  const auto groups = ranked_groups(scores, labels, p, n);
  // Twice the number of winning pairs: each positive beats every negative in
  // a lower group and ties with negatives in its own group. Exact in integers.
  unsigned __int128 twice_wins = 0;
  std::size_t negatives_below = n;
  for (const auto& g : groups) {
    negatives_below -= g.negatives;
    twice_wins += static_cast<unsigned __int128>(g.positives) * (2 * negatives_below + g.negatives);
  }
  return static_cast<double>(static_cast<long double>(twice_wins) / (2.0L * p * n));
}

double auroc_trapezoid(std::span<const double> scores, std::span<const bool> labels) {
  std::size_t p = 0, n = 0;
  const auto groups = ranked_groups(scores, labels, p, n);
  double area = 0.0, tpr = 0.0, fpr = 0.0;
  std::size_t tp = 0, fp = 0;
  for (const auto& g : groups) {
    tp += g.positives;
    fp += g.negatives;
    const double next_tpr = static_cast<double>(tp) / static_cast<double>(p);
    const double next_fpr = static_cast<double>(fp) / static_cast<double>(n);
    area += (next_fpr - fpr) * (tpr + next_tpr) / 2.0;
    tpr = next_tpr;
    fpr = next_fpr;
  }
  return area;
}

double auroc(std::span<const double> scores, std::span<const bool> labels) {
  const double pairwise = auroc_pairwise(scores, labels);
  const double trapezoid = auroc_trapezoid(scores, labels);
  if (std::fabs(pairwise - trapezoid) > 1e-9) {
    throw std::logic_error("AUROC estimates disagree: pairwise " + std::to_string(pairwise) + ", trapezoid " +
                           std::to_string(trapezoid));
  }
  return pairwise;
}

EvalReport make_report(std::span<const double> scores, std::span<const bool> labels, double threshold) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
  std::unique_ptr<bool[]> raw(new bool[scores.size()]);
  for (std::size_t i = 0; i < scores.size(); ++i) raw[i] = scores[i] >= threshold;
  const std::span<const bool> predictions(raw.get(), scores.size());
  EvalReport r;
  r.confusion = confusion(predictions, labels);
  r.count = labels.size();
  r.precision = r.confusion.precision();
  r.recall = r.confusion.recall();
  r.f1 = r.confusion.f1();
  r.accuracy = static_cast<double>(r.confusion.tp + r.confusion.tn) / static_cast<double>(r.count);
  const bool both = std::find(labels.begin(), labels.end(), true) != labels.end() &&
                    std::find(labels.begin(), labels.end(), false) != labels.end();
  if (both) r.auroc = auroc(scores, labels);
  return r;
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["count"] = count;
  j["f1"] = f1;
  j["auroc"] = auroc ? nlohmann::ordered_json(*auroc) : nlohmann::ordered_json(nullptr);
  j["precision"] = precision;
  j["recall"] = recall;
  j["accuracy"] = accuracy;
  j["mean_loss"] = mean_loss;
  j["confusion"] = {{"tp", confusion.tp}, {"fp", confusion.fp}, {"tn", confusion.tn}, {"fn", confusion.fn}};
  j["config_fingerprint"] = config_fingerprint;
  return j;
}

std::string EvalReport::to_table() const {
  char auc[32] = "undefined";
  if (auroc) std::snprintf(auc, sizeof auc, "%.4f", *auroc);
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "instances  %zu\nF1         %.4f\nAUROC      %s\nprecision  %.4f\nrecall     %.4f\naccuracy   %.4f\n"
                "confusion  tp=%zu fp=%zu tn=%zu fn=%zu\n",
                count, f1, auc, precision, recall, accuracy, confusion.tp, confusion.fp, confusion.tn, confusion.fn);
  return buf;
}

}  // namespace rahp::eval
