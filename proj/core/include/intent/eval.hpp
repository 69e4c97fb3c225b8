#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "intent/intervals.hpp"
#include "intent/model.hpp"
#include "intent/sampling.hpp"
#include "intent/signal.hpp"

namespace intent {

/// Tie-adjusted ROC AUC via midranks: P(pos > neg) + 0.5 P(pos == neg).
/// Throws Error(Data) when either class is missing.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct ExperimentResult {
  Experiment experiment = Experiment::All;
  double window_s = 1.0;
  std::vector<double> auc_values;
  double mean = 0.0;
  double std = 0.0;  // divisor n - 1
};

/// Mean and n-1 standard deviation; std is 0 for a single value.
void summarize(ExperimentResult& r);

/// Draws the negatives for repetition `rep`.
using NegativeDraw = std::function<std::vector<WindowTensor>(std::size_t rep)>;

/// Scores the fixed test positives once and, per repetition, a fresh negative
/// draw; one AUC per repetition.
ExperimentResult run_experiment(Experiment exp, double window_s, const Ensemble& ensemble,
                                std::span<const WindowTensor> test_positives, const NegativeDraw& draw_negatives,
                                std::size_t repetitions = 100);

enum class Split { Train, Test, Excluded };

/// Train if the window ends by test.start or begins at/after test.end; Test if
/// it lies inside; windows straddling a boundary are excluded.
Split classify_window(const Interval& window, const Interval& test_interval);

template <class W>
struct HoldoutSplit {
  std::vector<W> train;
  std::vector<W> test;
};

/// Throws Error(Data) when either side would be empty.
HoldoutSplit<CaseWindow> holdout_split(std::span<const CaseWindow> windows, const Interval& test_interval);

}  // namespace intent
