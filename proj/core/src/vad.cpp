#include "intent/vad.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "intent/error.hpp"
#include "intent/text_io.hpp"

namespace intent {

namespace {

constexpr double kTimeEps = 1e-9;

struct Run {
  std::size_t begin;
  std::size_t end;  // exclusive
  std::uint8_t value;
};

std::vector<Run> runs_of(const std::vector<std::uint8_t>& frames) {
  std::vector<Run> runs;
  std::size_t i = 0;
  while (i < frames.size()) {
    std::size_t j = i;
    while (j < frames.size() && frames[j] == frames[i]) ++j;
    runs.push_back({i, j, frames[i]});
    i = j;
  }
  return runs;
}

bool is_short(const Run& r, double rate_hz, double threshold_s) {
  return static_cast<double>(r.end - r.begin) / rate_hz < threshold_s;
}

}  // namespace

std::string_view to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::Successful: return "SUCCESSFUL";
    case CaseLabel::IntsStart: return "INTS_START";
    case CaseLabel::IntsContinue: return "INTS_CONTINUE";
    case CaseLabel::Negative: return "NEGATIVE";
  }
  return "?";
}

VadTrack parse_vad(std::string_view text, const std::string& source) {
  const auto lines = text::split_lines(text);
  if (lines.empty() || text::trim(lines.front()).empty()) {
    throw ParseError(source, 1, "empty file");
  }
  std::map<std::string, std::string> hdr;
  if (!text::parse_header(lines.front(), hdr) || !hdr.contains("rate_hz")) {
    throw ParseError(source, 1, "malformed header (expected '# participant=<id> rate_hz=<f> t0_s=<f>')");
  }
  VadTrack track;
  track.participant_id = hdr.contains("participant") ? hdr["participant"] : std::string{};
  if (!text::parse_double(hdr["rate_hz"], track.rate_hz) || !(track.rate_hz > 0.0) ||
      !std::isfinite(track.rate_hz)) {
    throw ParseError(source, 1, "malformed header: rate_hz must be a positive number");
  }
  if (hdr.contains("t0_s") && (!text::parse_double(hdr["t0_s"], track.t0_s) || !std::isfinite(track.t0_s))) {
    throw ParseError(source, 1, "malformed header: bad t0_s");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto body = text::trim(lines[i]);
    if (body.empty()) continue;
    // Frames may be given one per line or comma-separated.
    for (auto tok : text::split(body, ',')) {
      tok = text::trim(tok);
      if (tok == "0") {
        track.frames.push_back(0);
      } else if (tok == "1") {
        track.frames.push_back(1);
      } else {
        throw ParseError(source, i + 1, "non-binary frame '" + std::string(tok) + "'");
      }
    }
  }
  if (track.frames.empty()) throw ParseError(source, lines.size(), "empty track");
  return track;
}

VadTrack load_vad(const std::filesystem::path& path) {
  return parse_vad(text::read_file(path), path.string());
}

std::string format_vad(const VadTrack& track) {
  std::string out = "# participant=" + track.participant_id + " rate_hz=" +
                    text::format_double(track.rate_hz) + " t0_s=" + text::format_double(track.t0_s) + "\n";
  out.reserve(out.size() + 2 * track.frames.size());
  for (auto f : track.frames) {
    out.push_back(f ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

void save_vad(const VadTrack& track, const std::filesystem::path& path) {
  text::write_file(path, format_vad(track));
}

VadTrack merge_short_pauses(const VadTrack& track, double threshold_s) {
  VadTrack out = track;
  const auto runs = runs_of(track.frames);
  for (std::size_t r = 1; r + 1 < runs.size(); ++r) {
    const auto& run = runs[r];
    // Interior by construction: runs alternate, so neighbours are speech.
    if (run.value == 0 && is_short(run, track.rate_hz, threshold_s)) {
      std::fill(out.frames.begin() + run.begin, out.frames.begin() + run.end, 1);
    }
  }
  return out;
}

VadTrack drop_short_turns(const VadTrack& track, double threshold_s) {
  VadTrack out = track;
  for (const auto& run : runs_of(track.frames)) {
    if (run.value == 1 && is_short(run, track.rate_hz, threshold_s)) {
      std::fill(out.frames.begin() + run.begin, out.frames.begin() + run.end, 0);
    }
  }
  return out;
}

VadTrack clean_track(const VadTrack& track, double pause_threshold_s, double turn_threshold_s) {
  return drop_short_turns(merge_short_pauses(track, pause_threshold_s), turn_threshold_s);
}

std::vector<Onset> extract_onsets(const VadTrack& track) {
  std::vector<Onset> onsets;
  for (std::size_t i = 1; i < track.frames.size(); ++i) {
    if (track.frames[i - 1] == 0 && track.frames[i] == 1) onsets.push_back({track.frame_time(i)});
  }
  return onsets;
}

std::vector<CaseWindow> successful_case_windows(std::string_view participant_id,
                                                std::span<const Onset> onsets, double window_s,
                                                double t0_s) {
  if (!(window_s > 0.0)) throw Error(ErrorKind::Config, "window length must be positive");
  std::vector<CaseWindow> out;
  for (const auto& on : onsets) {
    const double start = on.time_s - window_s;
    if (start < t0_s - kTimeEps) continue;
    out.push_back({std::string(participant_id), {start, on.time_s}, CaseLabel::Successful});
  }
  return out;
}

std::vector<Interval> speaking_intervals(const VadTrack& track) {
  std::vector<Interval> out;
  for (const auto& run : runs_of(track.frames)) {
    if (run.value == 1) out.push_back({track.frame_time(run.begin), track.frame_time(run.end)});
  }
  return out;
}

bool overlaps_speech(const VadTrack& track, const Interval& iv) {
  if (track.frames.empty() || !(iv.end > iv.start)) return false;
  const double lo = (iv.start - track.t0_s) * track.rate_hz;
  const double hi = (iv.end - track.t0_s) * track.rate_hz;
  // Frame i overlaps iff i > lo - 1 and i < hi.
  const long long first = std::max(0LL, static_cast<long long>(std::floor(lo + kTimeEps)));
  const long long last = std::min(static_cast<long long>(track.frames.size()) - 1,
                                  static_cast<long long>(std::ceil(hi - kTimeEps)) - 1);
  for (long long i = first; i <= last; ++i) {
    if (track.frames[static_cast<std::size_t>(i)]) return true;
  }
  return false;
}

}  // namespace intent
