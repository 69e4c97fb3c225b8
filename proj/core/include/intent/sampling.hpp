#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "intent/intervals.hpp"
#include "intent/signal.hpp"
#include "intent/vad.hpp"

namespace intent {

/// The five evaluation settings, in reporting order.
enum class Experiment { All, Successful, Unsuccessful, UnsuccessfulStart, UnsuccessfulContinue };

inline constexpr std::array<Experiment, 5> kAllExperiments = {
    Experiment::All, Experiment::Successful, Experiment::Unsuccessful, Experiment::UnsuccessfulStart,
    Experiment::UnsuccessfulContinue};

/// Short machine name ("all", "successful", "unsuccessful", "unsuccessful_start", ...).
std::string_view experiment_key(Experiment e);
/// Row title used in report tables ("All intentions to speak", "Successful", ...).
std::string_view experiment_title(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view s);

bool is_unsuccessful_family(Experiment e);

/// Positives for one participant. Annotated windows that touch a speaking
/// frame of `cleaned_vad` are dropped; successful windows are kept as is.
std::vector<CaseWindow> build_positives(Experiment exp, std::span<const CaseWindow> successful,
                                        std::span<const CaseWindow> annotated, const VadTrack& cleaned_vad);

/// Windows a negative must not intersect. For the unsuccessful family this is
/// the experiment's positives plus every successful and annotated window.
IntervalSet exclusion_set(Experiment exp, std::span<const CaseWindow> positives,
                          std::span<const CaseWindow> successful, std::span<const CaseWindow> annotated);

struct NegativeRequest {
  std::string participant_id;
  std::size_t count = 0;
  Interval extent;          // negatives lie fully inside
  double window_s = 1.0;
  double grid_step_s = 0.0;  // > 0 quantizes start times to extent.start + k * step
  std::uint64_t seed = 0;
  std::size_t max_attempts = 10'000;  // per window
};

/// Extra acceptance test for a candidate window (e.g. data availability or
/// speech exclusion). Returning false rejects the draw.
using WindowFilter = std::function<bool(const Interval&)>;

/// Uniform rejection sampling of non-overlapping-with-exclusions windows.
/// Throws Error(InfeasibleSampling) when a window cannot be placed.
std::vector<CaseWindow> build_negatives(const NegativeRequest& req, const IntervalSet& exclusions,
                                        const WindowFilter& accept = {});

struct OverlapReport {
  double speech_fraction = 0.0;
  double silence_fraction = 0.0;
  std::size_t total = 0;
};

/// Share of negatives touching at least one speaking frame, and its complement.
OverlapReport overlap_report(std::span<const CaseWindow> negatives, const VadTrack& vad);

/// One manifest row: `participant,experiment,label,start_s,end_s,kind`.
struct ManifestRow {
  std::string participant_id;
  Experiment experiment = Experiment::All;
  std::string label;
  Interval span;
  bool positive = false;
};

std::string format_manifest(std::span<const ManifestRow> rows);
std::vector<ManifestRow> parse_manifest(std::string_view text, const std::string& source = "<manifest>");

}  // namespace intent
