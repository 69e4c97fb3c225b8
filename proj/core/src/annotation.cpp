#include "intent/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>

#include "intent/error.hpp"
#include "intent/text_io.hpp"

namespace intent {

namespace pt = boost::property_tree;

namespace {

void sort_tier(AnnotationTier& tier) {
  std::stable_sort(tier.intervals.begin(), tier.intervals.end(),
                   [](const AnnotatedInterval& a, const AnnotatedInterval& b) {
                     return a.start_s < b.start_s;
                   });
}

long long to_ms(double s) { return std::llround(s * 1000.0); }

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

const AnnotationTier& AnnotationDocument::tier(std::string_view name) const {
  auto it = tiers.find(std::string(name));
  if (it == tiers.end()) throw Error(ErrorKind::Data, fmt::format("unknown tier '{}'", name));
  return it->second;
}

AnnotationDocument parse_eaf_string(std::string_view xml, const std::string& source,
                                    const std::string& fallback_participant) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(source, e.line(), "malformed XML: " + e.message());
  }
  const auto root = tree.get_child_optional("ANNOTATION_DOCUMENT");
  if (!root) throw ParseError(source, 0, "malformed XML: missing ANNOTATION_DOCUMENT root");

  std::map<std::string, long long> slots;
  if (auto order = root->get_child_optional("TIME_ORDER")) {
    for (const auto& [tag, node] : *order) {
      if (tag != "TIME_SLOT") continue;
      const auto id = node.get<std::string>("<xmlattr>.TIME_SLOT_ID", "");
      if (id.empty()) throw ParseError(source, 0, "TIME_SLOT without TIME_SLOT_ID");
      const auto value = node.get_optional<std::string>("<xmlattr>.TIME_VALUE");
      if (!value) throw ParseError(source, 0, fmt::format("missing time value for slot '{}'", id));
      long long ms = 0;
      if (!text::parse_int64(*value, ms)) {
        throw ParseError(source, 0, fmt::format("bad time value '{}' for slot '{}'", *value, id));
      }
      slots[id] = ms;
    }
  }

  AnnotationDocument doc;
  for (const auto& [tag, node] : *root) {
    if (tag != "TIER") continue;
    AnnotationTier tier;
    tier.name = node.get<std::string>("<xmlattr>.TIER_ID", "");
    if (tier.name.empty()) throw ParseError(source, 0, "TIER without TIER_ID");
    if (doc.participant_id.empty()) {
      doc.participant_id = node.get<std::string>("<xmlattr>.PARTICIPANT", "");
    }
    for (const auto& [atag, ann] : node) {
      if (atag != "ANNOTATION") continue;
      for (const auto& [kind, aa] : ann) {
        if (kind != "ALIGNABLE_ANNOTATION") continue;
        const auto aid = aa.get<std::string>("<xmlattr>.ANNOTATION_ID", "?");
        const auto where = fmt::format("tier '{}', annotation '{}'", tier.name, aid);
        auto resolve = [&](const char* attr) {
          const auto ref = aa.get<std::string>(std::string("<xmlattr>.") + attr, "");
          auto it = slots.find(ref);
          if (it == slots.end()) {
            throw ParseError(source, 0, fmt::format("unresolved time slot '{}' in {}", ref, where));
          }
          return it->second;
        };
        const long long t1 = resolve("TIME_SLOT_REF1");
        const long long t2 = resolve("TIME_SLOT_REF2");
        if (t2 <= t1) throw ParseError(source, 0, fmt::format("non-positive duration in {}", where));
        tier.intervals.push_back({static_cast<double>(t1) / 1000.0, static_cast<double>(t2) / 1000.0,
                                  aa.get<std::string>("ANNOTATION_VALUE", "")});
      }
    }
    sort_tier(tier);
    doc.tiers[tier.name] = std::move(tier);
  }
  if (doc.participant_id.empty()) doc.participant_id = fallback_participant;
  return doc;
}

AnnotationDocument parse_eaf(const std::filesystem::path& path) {
  return parse_eaf_string(text::read_file(path), path.string(), path.stem().string());
}

std::string format_eaf(const AnnotationDocument& doc) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<ANNOTATION_DOCUMENT FORMAT=\"3.0\" VERSION=\"3.0\">\n";
  out += "  <HEADER MEDIA_FILE=\"\" TIME_UNITS=\"milliseconds\"/>\n";
  out += "  <TIME_ORDER>\n";
  std::size_t slot = 0;
  std::vector<std::pair<std::size_t, std::size_t>> refs;
  std::string tiers_xml;
  std::size_t ann_id = 0;
  std::string slots_xml;
  for (const auto& [name, tier] : doc.tiers) {
    tiers_xml += fmt::format("  <TIER LINGUISTIC_TYPE_REF=\"default\" PARTICIPANT=\"{}\" TIER_ID=\"{}\">\n",
                             xml_escape(doc.participant_id), xml_escape(name));
    for (const auto& iv : tier.intervals) {
      const auto s1 = ++slot;
      const auto s2 = ++slot;
      slots_xml += fmt::format("    <TIME_SLOT TIME_SLOT_ID=\"ts{}\" TIME_VALUE=\"{}\"/>\n", s1, to_ms(iv.start_s));
      slots_xml += fmt::format("    <TIME_SLOT TIME_SLOT_ID=\"ts{}\" TIME_VALUE=\"{}\"/>\n", s2, to_ms(iv.end_s));
      tiers_xml += fmt::format(
          "    <ANNOTATION>\n      <ALIGNABLE_ANNOTATION ANNOTATION_ID=\"a{}\" TIME_SLOT_REF1=\"ts{}\" "
          "TIME_SLOT_REF2=\"ts{}\">\n        <ANNOTATION_VALUE>{}</ANNOTATION_VALUE>\n"
          "      </ALIGNABLE_ANNOTATION>\n    </ANNOTATION>\n",
          ++ann_id, s1, s2, xml_escape(iv.label));
    }
    tiers_xml += "  </TIER>\n";
  }
  out += slots_xml;
  out += "  </TIME_ORDER>\n";
  out += tiers_xml;
  out += "  <LINGUISTIC_TYPE LINGUISTIC_TYPE_ID=\"default\" TIME_ALIGNABLE=\"true\"/>\n";
  out += "</ANNOTATION_DOCUMENT>\n";
  return out;
}

AnnotationDocument parse_annotation_lines(std::string_view text, const std::string& source) {
  AnnotationDocument doc;
  const auto lines = text::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i]);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::map<std::string, std::string> hdr;
      if (text::parse_header(line, hdr) && hdr.contains("participant")) {
        doc.participant_id = hdr["participant"];
      }
      continue;
    }
    // The label is everything after the third comma so it may contain commas.
    const auto c1 = line.find(',');
    if (c1 == std::string_view::npos) {
      auto& tier = doc.tiers[std::string(line)];
      tier.name = std::string(line);
      continue;
    }
    const auto c2 = line.find(',', c1 + 1);
    const auto c3 = c2 == std::string_view::npos ? c2 : line.find(',', c2 + 1);
    if (c3 == std::string_view::npos) {
      throw ParseError(source, i + 1, "expected 'tier,start_ms,end_ms,label'");
    }
    long long t1 = 0;
    long long t2 = 0;
    if (!text::parse_int64(line.substr(c1 + 1, c2 - c1 - 1), t1) ||
        !text::parse_int64(line.substr(c2 + 1, c3 - c2 - 1), t2)) {
      throw ParseError(source, i + 1, "times must be integer milliseconds");
    }
    if (t2 <= t1) throw ParseError(source, i + 1, "end time must exceed start time");
    const std::string name(line.substr(0, c1));
    auto& tier = doc.tiers[name];
    tier.name = name;
    tier.intervals.push_back({static_cast<double>(t1) / 1000.0, static_cast<double>(t2) / 1000.0,
                              std::string(line.substr(c3 + 1))});
  }
  for (auto& [name, tier] : doc.tiers) sort_tier(tier);
  return doc;
}

std::string format_annotation_lines(const AnnotationDocument& doc) {
  std::string out = "# participant=" + doc.participant_id + "\n";
  for (const auto& [name, tier] : doc.tiers) {
    if (tier.intervals.empty()) out += name + "\n";
    for (const auto& iv : tier.intervals) {
      out += fmt::format("{},{},{},{}\n", name, to_ms(iv.start_s), to_ms(iv.end_s), iv.label);
    }
  }
  return out;
}

AnnotationDocument load_annotations(const std::filesystem::path& path) {
  if (path.extension() == ".eaf") return parse_eaf(path);
  auto doc = parse_annotation_lines(text::read_file(path), path.string());
  if (doc.participant_id.empty()) doc.participant_id = path.stem().string();
  return doc;
}

std::string_view tier_name_for(CaseLabel label) {
  switch (label) {
    case CaseLabel::IntsStart: return kTierIntsStart;
    case CaseLabel::IntsContinue: return kTierIntsContinue;
    case CaseLabel::Successful:
    case CaseLabel::Negative: break;
  }
  throw Error(ErrorKind::Config, "only INTS_START and INTS_CONTINUE come from annotations");
}

std::vector<CaseWindow> intention_windows(const AnnotationDocument& doc, CaseLabel label,
                                          double window_s, double recording_start_s) {
  if (!(window_s > 0.0)) throw Error(ErrorKind::Config, "window length must be positive");
  const auto& tier = doc.tier(tier_name_for(label));
  std::vector<CaseWindow> out;
  for (const auto& iv : tier.intervals) {
    const double start = iv.end_s - window_s;
    if (start < recording_start_s - 1e-9) continue;
    out.push_back({doc.participant_id, {start, iv.end_s}, label});
  }
  return out;
}

std::map<std::string, int> cue_summary(const AnnotationDocument& doc) {
  std::map<std::string, int> counts;
  auto it = doc.tiers.find(std::string(kTierCues));
  if (it == doc.tiers.end()) return counts;
  for (const auto& iv : it->second.intervals) {
    const bool canonical = std::find(std::begin(kCanonicalCues), std::end(kCanonicalCues),
                                     iv.label) != std::end(kCanonicalCues);
    ++counts[canonical ? iv.label : std::string("other")];
  }
  return counts;
}

}  // namespace intent
