#include "intent/sampling.hpp"

#include <cmath>

#include <fmt/format.h>

#include "intent/error.hpp"
#include "intent/rng.hpp"
#include "intent/text_io.hpp"

namespace intent {

std::string_view experiment_key(Experiment e) {
  switch (e) {
    case Experiment::All: return "all";
    case Experiment::Successful: return "successful";
    case Experiment::Unsuccessful: return "unsuccessful";
    case Experiment::UnsuccessfulStart: return "unsuccessful_start";
    case Experiment::UnsuccessfulContinue: return "unsuccessful_continue";
  }
  return "?";
}

std::string_view experiment_title(Experiment e) {
  switch (e) {
    case Experiment::All: return "All intentions to speak";
    case Experiment::Successful: return "Successful";
    case Experiment::Unsuccessful: return "Unsuccessful";
    case Experiment::UnsuccessfulStart: return "Unsuccessful (Start)";
    case Experiment::UnsuccessfulContinue: return "Unsuccessful (Continue)";
  }
  return "?";
}

std::optional<Experiment> parse_experiment(std::string_view s) {
  s = text::trim(s);
  for (auto e : kAllExperiments) {
    if (s == experiment_key(e) || s == experiment_title(e)) return e;
  }
  if (s == "start") return Experiment::UnsuccessfulStart;
  if (s == "continue") return Experiment::UnsuccessfulContinue;
  return std::nullopt;
}

bool is_unsuccessful_family(Experiment e) {
  return e == Experiment::Unsuccessful || e == Experiment::UnsuccessfulStart ||
         e == Experiment::UnsuccessfulContinue;
}

std::vector<CaseWindow> build_positives(Experiment exp, std::span<const CaseWindow> successful,
                                        std::span<const CaseWindow> annotated, const VadTrack& cleaned_vad) {
  std::vector<CaseWindow> out;
  if (exp == Experiment::All || exp == Experiment::Successful) {
    out.insert(out.end(), successful.begin(), successful.end());
  }
  if (exp == Experiment::Successful) return out;
  for (const auto& w : annotated) {
    const bool wanted = exp == Experiment::All || exp == Experiment::Unsuccessful ||
                        (exp == Experiment::UnsuccessfulStart && w.label == CaseLabel::IntsStart) ||
                        (exp == Experiment::UnsuccessfulContinue && w.label == CaseLabel::IntsContinue);
    if (wanted && !overlaps_speech(cleaned_vad, w.span)) out.push_back(w);
  }
  return out;
}

IntervalSet exclusion_set(Experiment exp, std::span<const CaseWindow> positives,
                          std::span<const CaseWindow> successful, std::span<const CaseWindow> annotated) {
  std::vector<Interval> spans;
  for (const auto& w : positives) spans.push_back(w.span);
  if (is_unsuccessful_family(exp)) {
    for (const auto& w : successful) spans.push_back(w.span);
    for (const auto& w : annotated) spans.push_back(w.span);
  }
  return IntervalSet(spans);
}

std::vector<CaseWindow> build_negatives(const NegativeRequest& req, const IntervalSet& exclusions,
                                        const WindowFilter& accept) {
  std::vector<CaseWindow> out;
  if (req.count == 0) return out;
  if (!(req.window_s > 0.0)) throw Error(ErrorKind::Config, "window length must be positive");
  const double span = req.extent.length() - req.window_s;
  if (span < 0.0) {
    throw Error(ErrorKind::InfeasibleSampling,
                fmt::format("extent of participant '{}' shorter than the window", req.participant_id));
  }
  Rng rng(req.seed);
  std::uint64_t grid_slots = 0;
  if (req.grid_step_s > 0.0) grid_slots = static_cast<std::uint64_t>(std::floor(span / req.grid_step_s + 1e-9)) + 1;

  out.reserve(req.count);
  for (std::size_t i = 0; i < req.count; ++i) {
    bool placed = false;
    for (std::size_t attempt = 0; attempt < req.max_attempts; ++attempt) {
      const double start = grid_slots > 0
                               ? req.extent.start + static_cast<double>(rng.below(grid_slots)) * req.grid_step_s
                               : req.extent.start + rng.uniform() * span;
      const Interval iv{start, start + req.window_s};
      if (exclusions.intersects(iv)) continue;
      if (accept && !accept(iv)) continue;
      out.push_back({req.participant_id, iv, CaseLabel::Negative});
      placed = true;
      break;
    }
    if (!placed) {
      throw Error(ErrorKind::InfeasibleSampling,
                  fmt::format("negative sampling infeasible for participant '{}': placed {} of {} windows "
                              "after {} attempts",
                              req.participant_id, out.size(), req.count, req.max_attempts));
    }
  }
  return out;
}

OverlapReport overlap_report(std::span<const CaseWindow> negatives, const VadTrack& vad) {
  if (negatives.empty()) throw Error(ErrorKind::Data, "overlap report needs at least one negative window");
  std::size_t speech = 0;
  for (const auto& w : negatives) {
    if (overlaps_speech(vad, w.span)) ++speech;
  }
  OverlapReport r;
  r.total = negatives.size();
  r.speech_fraction = static_cast<double>(speech) / static_cast<double>(r.total);
  r.silence_fraction = static_cast<double>(r.total - speech) / static_cast<double>(r.total);
  return r;
}

std::string format_manifest(std::span<const ManifestRow> rows) {
  std::string out = "participant,experiment,label,start_s,end_s,kind\n";
  for (const auto& r : rows) {
    fmt::format_to(std::back_inserter(out), "{},{},{},{:.4f},{:.4f},{}\n", r.participant_id,
                   experiment_key(r.experiment), r.label, r.span.start, r.span.end, r.positive ? "pos" : "neg");
  }
  return out;
}

std::vector<ManifestRow> parse_manifest(std::string_view text, const std::string& source) {
  std::vector<ManifestRow> rows;
  const auto lines = text::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i]);
    if (line.empty() || (i == 0 && line.starts_with("participant,"))) continue;
    const auto f = text::split(line, ',');
    if (f.size() != 6) throw ParseError(source, i + 1, "expected 6 fields");
    ManifestRow r;
    r.participant_id = std::string(f[0]);
    const auto e = parse_experiment(f[1]);
    if (!e) throw ParseError(source, i + 1, "unknown experiment");
    r.experiment = *e;
    r.label = std::string(f[2]);
    if (!text::parse_double(f[3], r.span.start) || !text::parse_double(f[4], r.span.end)) {
      throw ParseError(source, i + 1, "bad time");
    }
    if (f[5] != "pos" && f[5] != "neg") throw ParseError(source, i + 1, "kind must be pos or neg");
    r.positive = f[5] == "pos";
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace intent
