#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "intent/vad.hpp"

namespace intent {

inline constexpr std::string_view kTierIntsStart = "INTS_start";
inline constexpr std::string_view kTierIntsContinue = "INTS_continue";
inline constexpr std::string_view kTierCues = "cues";

/// The cue labels used when annotating perceived intentions.
inline constexpr std::string_view kCanonicalCues[] = {
    "posture change", "audible smack/tongue click", "filler", "first word of utterance",
    "audible deep breath"};

struct AnnotatedInterval {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string label;

  bool operator==(const AnnotatedInterval&) const = default;
};

struct AnnotationTier {
  std::string name;
  std::vector<AnnotatedInterval> intervals;  // sorted by start_s

  bool operator==(const AnnotationTier&) const = default;
};

struct AnnotationDocument {
  std::string participant_id;
  std::map<std::string, AnnotationTier> tiers;

  bool has_tier(std::string_view name) const { return tiers.contains(std::string(name)); }
  const AnnotationTier& tier(std::string_view name) const;
};

/// Parses the EAF subset: TIME_ORDER/TIME_SLOT, TIER, ALIGNABLE_ANNOTATION,
/// ANNOTATION_VALUE. Times are integer milliseconds; results are in seconds.
/// If no TIER carries a PARTICIPANT attribute, `fallback_participant` is used.
AnnotationDocument parse_eaf_string(std::string_view xml, const std::string& source = "<eaf>",
                                    const std::string& fallback_participant = "");
AnnotationDocument parse_eaf(const std::filesystem::path& path);

/// Minimal EAF writer covering the same subset.
std::string format_eaf(const AnnotationDocument& doc);

/// Line format: optional `# participant=<id>` header, then `tier,start_ms,end_ms,label`.
/// A bare `tier` line declares an empty tier.
AnnotationDocument parse_annotation_lines(std::string_view text, const std::string& source = "<ann>");
std::string format_annotation_lines(const AnnotationDocument& doc);

/// Dispatches on extension: `.eaf` is XML, anything else is the line format.
AnnotationDocument load_annotations(const std::filesystem::path& path);

/// [e - window_s, e) for each interval end e in the tier that matches `label`.
/// Windows starting before `recording_start_s` are dropped. Throws on unknown tier.
std::vector<CaseWindow> intention_windows(const AnnotationDocument& doc, CaseLabel label,
                                          double window_s, double recording_start_s = 0.0);

std::string_view tier_name_for(CaseLabel label);

/// Count per cue label on the cue tier; non-canonical labels are pooled under "other".
std::map<std::string, int> cue_summary(const AnnotationDocument& doc);

}  // namespace intent
