#include "intent/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "intent/error.hpp"
#include "intent/rng.hpp"
#include "intent/text_io.hpp"

namespace intent::synth {

namespace {

struct Turn {
  std::size_t begin;  // frame index of onset
  std::size_t end;    // exclusive
};

struct Burst {
  double start_s;
  std::size_t axis;
  double sign;
};

std::size_t frames_for(double seconds, double rate) {
  return static_cast<std::size_t>(std::max(1.0, std::round(seconds * rate)));
}

std::vector<Turn> draw_turns(const ScenarioConfig& cfg, Rng& rng, std::size_t total_frames) {
  const double mean_cycle = 60.0 / cfg.turn_rate_per_min;
  const double mean_gap = mean_cycle - cfg.mean_turn_s;
  const auto min_gap = static_cast<std::size_t>(std::ceil(cfg.min_gap_s * cfg.vad_rate_hz));
  const auto min_turn = static_cast<std::size_t>(std::ceil(cfg.min_turn_s * cfg.vad_rate_hz));
  std::vector<Turn> turns;
  std::size_t cursor = 0;
  while (true) {
    const double gap_s = cfg.min_gap_s + rng.exponential(mean_gap - cfg.min_gap_s);
    const double turn_s = cfg.min_turn_s + rng.exponential(std::max(cfg.mean_turn_s - cfg.min_turn_s, 1e-9));
    const std::size_t begin = cursor + std::max(min_gap, frames_for(gap_s, cfg.vad_rate_hz));
    const std::size_t end = begin + std::max(min_turn, frames_for(turn_s, cfg.vad_rate_hz));
    // Turns are never truncated, so every generated onset survives cleaning.
    if (end > total_frames) break;
    turns.push_back({begin, end});
    cursor = end;
  }
  return turns;
}

// Silence runs between turns, in frames, including the leading one.
std::vector<Turn> gaps_between(const std::vector<Turn>& turns) {
  std::vector<Turn> gaps;
  std::size_t prev_end = 0;
  for (const auto& t : turns) {
    if (t.begin > prev_end) gaps.push_back({prev_end, t.begin});
    prev_end = t.end;
  }
  return gaps;
}

void add_burst(AccelSeries& s, const Burst& b, double amplitude, double duration_s) {
  if (amplitude == 0.0) return;
  const double rate = s.rate_hz;
  const auto first = static_cast<std::size_t>(std::max(0.0, std::ceil((b.start_s - s.t0_s) * rate - 1e-9)));
  for (std::size_t i = first; i < s.size(); ++i) {
    const double u = (s.times_s[i] - b.start_s) / duration_s;
    if (u >= 1.0) break;
    if (u < 0.0) continue;
    s.samples[i][b.axis] += b.sign * amplitude * std::sin(std::numbers::pi * u);
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  auto bad = [](const std::string& m) { return Error(ErrorKind::Config, "invalid scenario: " + m); };
  if (participants < 1) throw bad("participants must be >= 1");
  if (!(duration_s > 0) || !(vad_rate_hz > 0) || !(accel_rate_hz > 0)) throw bad("rates and duration must be positive");
  if (!(turn_rate_per_min > 0) || !(mean_turn_s > 0)) throw bad("turn rate and mean turn must be positive");
  if (!(effect_strength >= 0)) throw bad("effect_strength must be >= 0");
  if (!(effect_lead_s >= burst_s) || !(burst_s > 0)) throw bad("need 0 < burst_s <= effect_lead_s");
  if (!(noise_std > 0)) throw bad("noise_std must be positive");
  if (unsuccessful_rate_per_min < 0) throw bad("unsuccessful rate must be >= 0");
  if (mean_turn_s < min_turn_s) throw bad("mean_turn_s must be >= min_turn_s");
  if (60.0 / turn_rate_per_min - mean_turn_s <= min_gap_s) {
    throw bad(fmt::format("infeasible density: {} turns/min of mean {} s leave no room for {} s pauses",
                          turn_rate_per_min, mean_turn_s, min_gap_s));
  }
  if (min_gap_s < effect_lead_s) throw bad("min_gap_s must cover effect_lead_s");
}

Scenario generate_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  Scenario sc;
  const auto total_frames = static_cast<std::size_t>(std::llround(cfg.duration_s * cfg.vad_rate_hz));
  const auto total_samples = static_cast<std::size_t>(std::llround(cfg.duration_s * cfg.accel_rate_hz));
  const double amplitude = cfg.effect_strength * cfg.noise_std;
  const double ann_minutes =
      std::max(0.0, std::min(cfg.annotated.end, cfg.duration_s) - std::max(cfg.annotated.start, 0.0)) / 60.0;

  for (int p = 0; p < cfg.participants; ++p) {
    const std::string pid = fmt::format("P{:02d}", p + 1);
    Rng rng(derive_seed(cfg.seed, {"participant", pid}));
    ParticipantTruth truth;
    truth.participant_id = pid;

    // Speaking status.
    VadTrack vad;
    vad.participant_id = pid;
    vad.rate_hz = cfg.vad_rate_hz;
    vad.frames.assign(total_frames, 0);
    const auto turns = draw_turns(cfg, rng, total_frames);
    for (const auto& t : turns) {
      std::fill(vad.frames.begin() + static_cast<std::ptrdiff_t>(t.begin),
                vad.frames.begin() + static_cast<std::ptrdiff_t>(t.end), 1);
      truth.onsets_s.push_back(vad.frame_time(t.begin));
    }

    // Unsuccessful intentions inside the annotated interval.
    AnnotationDocument doc;
    doc.participant_id = pid;
    auto& start_tier = doc.tiers[std::string(kTierIntsStart)];
    start_tier.name = kTierIntsStart;
    auto& cont_tier = doc.tiers[std::string(kTierIntsContinue)];
    cont_tier.name = kTierIntsContinue;
    auto& cue_tier = doc.tiers[std::string(kTierCues)];
    cue_tier.name = kTierCues;

    const double per_label_mean = 0.5 * cfg.unsuccessful_rate_per_min * ann_minutes;
    const auto gaps = gaps_between(turns);
    auto in_annotated = [&](double a, double b) { return a >= cfg.annotated.start && b <= cfg.annotated.end; };

    std::vector<std::size_t> start_candidates;
    std::vector<std::size_t> cont_candidates;
    for (std::size_t g = 0; g < gaps.size(); ++g) {
      const double gs = vad.frame_time(gaps[g].begin);
      const double ge = vad.frame_time(gaps[g].end);
      // Room for a 4 s window plus a margin on both sides.
      if (ge - gs >= 7.0 && in_annotated(gs, ge)) start_candidates.push_back(g);
      if (gaps[g].begin > 0 && ge - gs >= 3.0 && in_annotated(gs, ge)) cont_candidates.push_back(g);
    }
    rng.shuffle(start_candidates.begin(), start_candidates.end());
    rng.shuffle(cont_candidates.begin(), cont_candidates.end());
    const auto n_start = std::min<std::size_t>(rng.poisson(per_label_mean), start_candidates.size());
    const auto n_cont = std::min<std::size_t>(rng.poisson(per_label_mean), cont_candidates.size());

    std::vector<double> bursts_before;  // event times that get a planted burst
    for (auto t : truth.onsets_s) bursts_before.push_back(t);

    auto plant = [&](AnnotationTier& tier, std::vector<double>& ends, double end_s, double len_s) {
      const double e = std::round(end_s * 1000.0) / 1000.0;
      const double s = std::round((e - len_s) * 1000.0) / 1000.0;
      tier.intervals.push_back({s, e, ""});
      ends.push_back(e);
      bursts_before.push_back(e);
      const auto cue_idx = rng.below(std::size(kCanonicalCues));
      const std::string cue(kCanonicalCues[cue_idx]);
      if (cue == kCanonicalCues[1]) ++truth.smack_cues;
      cue_tier.intervals.push_back({s, e, cue});
    };
    for (std::size_t i = 0; i < n_start; ++i) {
      const auto& g = gaps[start_candidates[i]];
      const double gs = vad.frame_time(g.begin);
      const double ge = vad.frame_time(g.end);
      plant(start_tier, truth.start_ends_s, rng.uniform(gs + 5.0, ge - 2.0), rng.uniform(0.5, 2.0));
    }
    for (std::size_t i = 0; i < n_cont; ++i) {
      // Shortly after the same participant's previous turn ended.
      const auto& g = gaps[cont_candidates[i]];
      const double gs = vad.frame_time(g.begin);
      const double ge = vad.frame_time(g.end);
      const double delay = rng.uniform(1.0, std::min(6.0, ge - gs - 1.0));
      plant(cont_tier, truth.continue_ends_s, gs + delay, rng.uniform(0.5, std::min(1.0, delay)));
    }
    for (auto* tier : {&start_tier, &cont_tier, &cue_tier}) {
      std::sort(tier->intervals.begin(), tier->intervals.end(),
                [](const auto& a, const auto& b) { return a.start_s < b.start_s; });
    }

    // Accelerometer: tilted gravity + slow drift + white noise + planted bursts.
    AccelSeries acc;
    acc.participant_id = pid;
    acc.rate_hz = cfg.accel_rate_hz;
    acc.times_s.resize(total_samples);
    acc.samples.resize(total_samples);
    Sample3 gravity{rng.normal() * 0.8, rng.normal() * 0.8, 0.0};
    gravity[2] = std::sqrt(std::max(0.0, 9.81 * 9.81 - gravity[0] * gravity[0] - gravity[1] * gravity[1]));
    Sample3 drift_period{};
    Sample3 drift_phase{};
    for (std::size_t a = 0; a < kAxes; ++a) {
      drift_period[a] = rng.uniform(200.0, 600.0);
      drift_phase[a] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    for (std::size_t i = 0; i < total_samples; ++i) {
      const double t = static_cast<double>(i) / cfg.accel_rate_hz;
      acc.times_s[i] = t;
      for (std::size_t a = 0; a < kAxes; ++a) {
        acc.samples[i][a] = gravity[a] +
                            cfg.drift_amplitude * std::sin(2.0 * std::numbers::pi * t / drift_period[a] + drift_phase[a]) +
                            cfg.noise_std * rng.normal();
      }
    }
    std::sort(bursts_before.begin(), bursts_before.end());
    for (double t : bursts_before) {
      const double lo = t - cfg.effect_lead_s;
      if (lo < 0.0) continue;
      const Burst b{rng.uniform(lo, t - cfg.burst_s), static_cast<std::size_t>(rng.below(kAxes)),
                    rng.bernoulli(0.5) ? 1.0 : -1.0};
      add_burst(acc, b, amplitude, cfg.burst_s);
    }

    sc.manifest.onsets += truth.onsets_s.size();
    sc.manifest.ints_start += truth.start_ends_s.size();
    sc.manifest.ints_continue += truth.continue_ends_s.size();
    if (truth.smack_cues > 0) ++sc.manifest.participants_with_smack;
    sc.manifest.per_participant.push_back(std::move(truth));
    sc.vad.push_back(std::move(vad));
    sc.accel.push_back(std::move(acc));
    sc.annotations.push_back(std::move(doc));
  }
  return sc;
}

ScenarioManifest scenario_manifest(const ScenarioConfig& cfg) { return generate_scenario(cfg).manifest; }

std::string format_manifest(const ScenarioManifest& m, const ScenarioConfig& cfg) {
  std::string out;
  fmt::format_to(std::back_inserter(out),
                 "seed={}\nparticipants={}\nduration_s={}\nvad_rate_hz={}\naccel_rate_hz={}\n"
                 "turn_rate_per_min={}\nmean_turn_s={}\neffect_strength={}\neffect_lead_s={}\n"
                 "unsuccessful_rate_per_min={}\nannotated={},{}\n",
                 cfg.seed, cfg.participants, cfg.duration_s, cfg.vad_rate_hz, cfg.accel_rate_hz,
                 cfg.turn_rate_per_min, cfg.mean_turn_s, cfg.effect_strength, cfg.effect_lead_s,
                 cfg.unsuccessful_rate_per_min, cfg.annotated.start, cfg.annotated.end);
  fmt::format_to(std::back_inserter(out), "onsets={}\nints_start={}\nints_continue={}\nparticipants_with_smack={}\n",
                 m.onsets, m.ints_start, m.ints_continue, m.participants_with_smack);
  for (const auto& p : m.per_participant) {
    fmt::format_to(std::back_inserter(out), "participant {} onsets={} ints_start={} ints_continue={}\n",
                   p.participant_id, p.onsets_s.size(), p.start_ends_s.size(), p.continue_ends_s.size());
  }
  return out;
}

void write_scenario(const Scenario& sc, const ScenarioConfig& cfg, const std::filesystem::path& dir) {
  for (std::size_t i = 0; i < sc.vad.size(); ++i) {
    const auto& pid = sc.vad[i].participant_id;
    save_vad(sc.vad[i], dir / "vad" / (pid + ".vad"));
    save_accel(sc.accel[i], dir / "accel" / (pid + ".acc"));
    text::write_file(dir / "annotations" / (pid + ".eaf"), format_eaf(sc.annotations[i]));
  }
  text::write_file(dir / "manifest.txt", format_manifest(sc.manifest, cfg));
}

}  // namespace intent::synth
