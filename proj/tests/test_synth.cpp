#include <doctest.h>

#include "intent/annotation.hpp"
#include "intent/error.hpp"
#include "intent/signal.hpp"
#include "intent/synth.hpp"
#include "intent/text_io.hpp"
#include "intent/vad.hpp"
#include "support.hpp"

using namespace intent;

namespace {

synth::ScenarioConfig small(std::uint64_t seed = 3) {
  synth::ScenarioConfig cfg;
  cfg.participants = 3;
  cfg.duration_s = 900;
  cfg.annotated = {600, 900};
  cfg.unsuccessful_rate_per_min = 1.0;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("files round-trip through the readers") {
  const auto cfg = small();
  const auto sc = synth::generate_scenario(cfg);
  const auto dir = testing::scratch_dir("synth");
  synth::write_scenario(sc, cfg, dir);
  std::size_t onsets = 0;
  std::size_t starts = 0;
  std::size_t conts = 0;
  for (const auto& truth : sc.manifest.per_participant) {
    const auto vad = load_vad(dir / "vad" / (truth.participant_id + ".vad"));
    const auto acc = load_accel(dir / "accel" / (truth.participant_id + ".acc"));
    const auto ann = load_annotations(dir / "annotations" / (truth.participant_id + ".eaf"));
    CHECK(vad.participant_id == truth.participant_id);
    CHECK(acc.size() == static_cast<std::size_t>(cfg.duration_s * cfg.accel_rate_hz));
    const auto found = extract_onsets(clean_track(vad));
    CHECK(found.size() == truth.onsets_s.size());
    for (std::size_t i = 0; i < std::min(found.size(), truth.onsets_s.size()); ++i) {
      CHECK(found[i].time_s == doctest::Approx(truth.onsets_s[i]));
    }
    onsets += found.size();
    starts += ann.tier(kTierIntsStart).intervals.size();
    conts += ann.tier(kTierIntsContinue).intervals.size();
    // Planted unsuccessful intentions never overlap speech and lie in the annotated span.
    for (auto label : {CaseLabel::IntsStart, CaseLabel::IntsContinue}) {
      for (const auto& iv : ann.tier(tier_name_for(label)).intervals) {
        CHECK_FALSE(overlaps_speech(vad, {iv.start_s, iv.end_s}));
        CHECK(iv.start_s >= cfg.annotated.start);
        CHECK(iv.end_s <= cfg.annotated.end);
      }
    }
  }
  CHECK(onsets == sc.manifest.onsets);
  CHECK(starts == sc.manifest.ints_start);
  CHECK(conts == sc.manifest.ints_continue);
  CHECK(starts > 0);
  CHECK(conts > 0);
  const auto m = synth::scenario_manifest(cfg);
  CHECK(m.onsets == sc.manifest.onsets);
  CHECK(m.ints_start == sc.manifest.ints_start);
}

TEST_CASE("same seed, identical files") {
  const auto cfg = small(11);
  const auto a = testing::scratch_dir("synth_a");
  const auto b = testing::scratch_dir("synth_b");
  synth::write_scenario(synth::generate_scenario(cfg), cfg, a);
  synth::write_scenario(synth::generate_scenario(cfg), cfg, b);
  for (const char* rel : {"vad/P01.vad", "accel/P02.acc", "annotations/P03.eaf", "manifest.txt"}) {
    CHECK(text::read_file(a / rel) == text::read_file(b / rel));
  }
  auto other = cfg;
  other.seed = 12;
  CHECK(text::read_file(a / "vad/P01.vad") != format_vad(synth::generate_scenario(other).vad[0]));
}

TEST_CASE("turn bookkeeping") {
  synth::ScenarioConfig cfg;
  cfg.participants = 1;
  cfg.duration_s = 600;
  cfg.annotated = {0, 600};
  cfg.unsuccessful_rate_per_min = 0.0;
  const auto m = synth::scenario_manifest(cfg);
  CHECK(m.onsets >= 8);
  CHECK(m.onsets <= 32);
  CHECK(m.ints_start == 0);
  CHECK(m.ints_continue == 0);
}

TEST_CASE("bursts sit in the lead before each onset") {
  auto cfg = small(5);
  cfg.participants = 1;
  cfg.drift_amplitude = 0.0;
  cfg.noise_std = 0.01;
  cfg.effect_strength = 50.0;
  const auto sc = synth::generate_scenario(cfg);
  const auto& acc = sc.accel[0];
  const auto& truth = sc.manifest.per_participant[0];
  const auto baseline = compute_axis_stats(acc, {0, 5});
  auto energy = [&](double a, double b) {
    double e = 0.0;
    for (std::size_t i = 0; i < acc.size(); ++i) {
      if (acc.times_s[i] < a || acc.times_s[i] >= b) continue;
      for (std::size_t k = 0; k < kAxes; ++k) {
        const double d = acc.samples[i][k] - baseline.mean[k];
        e = std::max(e, std::abs(d));
      }
    }
    return e;
  };
  for (double t : truth.onsets_s) {
    if (t < cfg.effect_lead_s + 5) continue;
    CHECK(energy(t - cfg.effect_lead_s, t) > 0.2);
  }
}

TEST_CASE("invalid configs") {
  auto cfg = small();
  cfg.effect_strength = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small();
  cfg.accel_rate_hz = 0;
  CHECK_THROWS_AS(synth::generate_scenario(cfg), Error);
  cfg = small();
  cfg.turn_rate_per_min = 30;
  cfg.mean_turn_s = 10;
  CHECK_THROWS_WITH_AS(synth::generate_scenario(cfg), doctest::Contains("infeasible"), Error);
}
