#include "intent/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "intent/error.hpp"

namespace intent {

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorKind::Data, "scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1 .. j share the midrank.
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        pos_rank_sum += midrank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error(ErrorKind::Data, "AUC needs both positive and negative labels");
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

void summarize(ExperimentResult& r) {
  const auto& v = r.auc_values;
  if (v.empty()) {
    r.mean = r.std = 0.0;
    return;
  }
  r.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() < 2) {
    r.std = 0.0;
    return;
  }
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
}

ExperimentResult run_experiment(Experiment exp, double window_s, const Ensemble& ensemble,
                                std::span<const WindowTensor> test_positives, const NegativeDraw& draw_negatives,
                                std::size_t repetitions) {
  if (test_positives.empty()) {
    throw Error(ErrorKind::Data, fmt::format("no test positives for experiment '{}' at {} s",
                                             experiment_key(exp), window_s));
  }
  ExperimentResult r;
  r.experiment = exp;
  r.window_s = window_s;
  const auto pos_scores = predict(ensemble, test_positives);
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    const auto negatives = draw_negatives(rep);
    const auto neg_scores = predict(ensemble, negatives);
    std::vector<double> scores = pos_scores;
    scores.insert(scores.end(), neg_scores.begin(), neg_scores.end());
    std::vector<int> labels(pos_scores.size(), 1);
    labels.resize(scores.size(), 0);
    r.auc_values.push_back(roc_auc(scores, labels));
  }
  summarize(r);
  return r;
}

Split classify_window(const Interval& window, const Interval& test_interval) {
  if (window.end <= test_interval.start || window.start >= test_interval.end) return Split::Train;
  if (test_interval.contains(window)) return Split::Test;
  return Split::Excluded;
}

HoldoutSplit<CaseWindow> holdout_split(std::span<const CaseWindow> windows, const Interval& test_interval) {
  if (!(test_interval.end > test_interval.start)) throw Error(ErrorKind::Config, "empty test interval");
  HoldoutSplit<CaseWindow> out;
  for (const auto& w : windows) {
    switch (classify_window(w.span, test_interval)) {
      case Split::Train: out.train.push_back(w); break;
      case Split::Test: out.test.push_back(w); break;
      case Split::Excluded: break;
    }
  }
  if (out.train.empty()) throw Error(ErrorKind::Data, "holdout split left the training partition empty");
  if (out.test.empty()) throw Error(ErrorKind::Data, "holdout split left the test partition empty");
  return out;
}

}  // namespace intent
