#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "intent/intervals.hpp"

namespace intent {

/// Fixed-rate binary speaking status for one participant.
/// Frame i covers [t0_s + i/rate_hz, t0_s + (i+1)/rate_hz).
struct VadTrack {
  std::string participant_id;
  double rate_hz = 1.0;
  double t0_s = 0.0;
  std::vector<std::uint8_t> frames;

  double duration_s() const { return static_cast<double>(frames.size()) / rate_hz; }
  double end_s() const { return t0_s + duration_s(); }
  Interval extent() const { return {t0_s, end_s()}; }
  double frame_time(std::size_t i) const { return t0_s + static_cast<double>(i) / rate_hz; }
};

struct Onset {
  double time_s = 0.0;
};

/// Origin of a window. Negative marks sampled background windows.
enum class CaseLabel { Successful, IntsStart, IntsContinue, Negative };

std::string_view to_string(CaseLabel label);

struct CaseWindow {
  std::string participant_id;
  Interval span;
  CaseLabel label = CaseLabel::Successful;

  double start_s() const { return span.start; }
  double end_s() const { return span.end; }
};

VadTrack parse_vad(std::string_view text, const std::string& source = "<vad>");
VadTrack load_vad(const std::filesystem::path& path);
std::string format_vad(const VadTrack& track);
void save_vad(const VadTrack& track, const std::filesystem::path& path);

inline constexpr double kDefaultPauseThreshold_s = 1.5;
inline constexpr double kDefaultTurnThreshold_s = 1.5;

/// Fills interior silences shorter than the threshold. Leading and trailing
/// silences are left alone.
VadTrack merge_short_pauses(const VadTrack& track, double threshold_s = kDefaultPauseThreshold_s);

/// Removes speaking runs shorter than the threshold, including a run at frame 0.
VadTrack drop_short_turns(const VadTrack& track, double threshold_s = kDefaultTurnThreshold_s);

/// merge_short_pauses followed by drop_short_turns. The order matters.
VadTrack clean_track(const VadTrack& track, double pause_threshold_s = kDefaultPauseThreshold_s,
                     double turn_threshold_s = kDefaultTurnThreshold_s);

/// One onset per 0->1 transition. A track starting in speech has no onset at frame 0.
std::vector<Onset> extract_onsets(const VadTrack& track);

/// [t - window_s, t) for each onset t; onsets with too little history are dropped.
std::vector<CaseWindow> successful_case_windows(std::string_view participant_id,
                                                std::span<const Onset> onsets, double window_s,
                                                double t0_s = 0.0);

/// Maximal speaking runs as time intervals.
std::vector<Interval> speaking_intervals(const VadTrack& track);

/// True if any speaking frame of the track intersects `iv`.
bool overlaps_speech(const VadTrack& track, const Interval& iv);

}  // namespace intent
