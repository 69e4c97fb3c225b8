#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "intent/annotation.hpp"
#include "intent/eval.hpp"
#include "intent/model.hpp"
#include "intent/report.hpp"
#include "intent/sampling.hpp"
#include "intent/signal.hpp"
#include "intent/vad.hpp"

namespace intent {

struct RunConfig {
  std::filesystem::path data_dir;
  std::filesystem::path out_dir = "results";
  std::vector<double> windows_s{1.0, 2.0, 3.0, 4.0};
  std::vector<Experiment> experiments{kAllExperiments.begin(), kAllExperiments.end()};
  std::size_t repetitions = 100;
  Interval test_interval{3600.0, 4200.0};
  double alpha = 0.001;
  std::uint64_t seed = 42;
  double pause_threshold_s = kDefaultPauseThreshold_s;
  double turn_threshold_s = kDefaultTurnThreshold_s;
  double max_gap_s = kDefaultMaxGap_s;
  double neg_ratio = 1.0;
  bool exclude_speech_negatives = false;
  bool retrain_per_rep = false;
  bool save_checkpoints = true;
  TrainConfig train;

  void validate() const;
  /// Sorted key=value lines; used in the run manifest.
  std::string describe() const;
};

/// Everything loaded for one participant.
struct ParticipantData {
  std::string id;
  VadTrack raw_vad;
  VadTrack vad;  // cleaned
  AccelSeries accel;
  std::optional<AnnotationDocument> annotations;
  AxisStats norm;
  std::vector<std::filesystem::path> sources;
};

struct Dataset {
  std::vector<ParticipantData> participants;
};

/// Reads `<dir>/vad/*.vad`, the matching `<dir>/accel/<id>.acc`, and optional
/// `<dir>/annotations/<id>.eaf` (or `.txt`). Cleans VAD with the given thresholds
/// and computes normalization stats outside `test_interval`.
Dataset load_dataset(const std::filesystem::path& dir, const RunConfig& cfg);

/// Per-participant windows for one window size.
struct ParticipantWindows {
  std::vector<CaseWindow> successful;
  std::vector<CaseWindow> annotated;  // both labels
};

ParticipantWindows case_windows(const ParticipantData& p, double window_s);

struct RunOutputs {
  std::vector<ExperimentResult> results;
  report::AucTable table;
  report::StatsReport stats;
  std::vector<TrainResult> training;  // one per window (first repetition's when retraining)
  std::vector<std::filesystem::path> written;
};

/// The full protocol: train one ensemble per window on the training region,
/// evaluate every experiment on the test interval with resampled negatives,
/// then run the statistics and write every report under cfg.out_dir.
RunOutputs run_pipeline(const RunConfig& cfg);

struct StatsFromTableOutputs {
  report::AucTable table;
  report::StatsReport stats;
  std::string text;  // concatenated report
};

StatsFromTableOutputs stats_from_table(const std::filesystem::path& table_path, int n, double alpha,
                                       const std::optional<std::filesystem::path>& out_dir = std::nullopt);

struct OverlapRow {
  std::string participant_id;
  Experiment experiment = Experiment::All;
  OverlapReport report;
};

/// Negatives drawn as in evaluation (test interval, one draw) and their overlap
/// with the participant's cleaned speech.
std::vector<OverlapRow> inspect_samples(const RunConfig& cfg, double window_s);
std::string format_overlap_rows(const std::vector<OverlapRow>& rows);

}  // namespace intent
