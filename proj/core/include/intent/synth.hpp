#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "intent/annotation.hpp"
#include "intent/intervals.hpp"
#include "intent/signal.hpp"
#include "intent/vad.hpp"

namespace intent::synth {

struct ScenarioConfig {
  int participants = 13;
  double duration_s = 4200.0;
  double vad_rate_hz = 1.0;
  double accel_rate_hz = 20.0;
  double turn_rate_per_min = 2.0;
  double mean_turn_s = 4.0;
  double min_turn_s = 2.0;
  double min_gap_s = 2.0;
  double effect_strength = 5.0;  // burst amplitude in units of noise_std
  double effect_lead_s = 1.0;    // bursts end before the onset, within this lead
  double burst_s = 0.4;
  double noise_std = 0.5;
  double drift_amplitude = 0.3;
  double unsuccessful_rate_per_min = 0.4;  // split evenly between start and continue
  Interval annotated{3600.0, 4200.0};
  std::uint64_t seed = 1;

  void validate() const;
};

struct ParticipantTruth {
  std::string participant_id;
  std::vector<double> onsets_s;
  std::vector<double> start_ends_s;     // planted INTS_start annotation end times
  std::vector<double> continue_ends_s;  // planted INTS_continue annotation end times
  int smack_cues = 0;
};

struct ScenarioManifest {
  std::size_t onsets = 0;
  std::size_t ints_start = 0;
  std::size_t ints_continue = 0;
  std::size_t participants_with_smack = 0;
  std::vector<ParticipantTruth> per_participant;
};

struct Scenario {
  std::vector<VadTrack> vad;
  std::vector<AccelSeries> accel;
  std::vector<AnnotationDocument> annotations;
  ScenarioManifest manifest;
};

/// Deterministic in cfg.seed. Throws Error(Config) for infeasible densities.
Scenario generate_scenario(const ScenarioConfig& cfg);

/// Ground-truth counts without materializing files.
ScenarioManifest scenario_manifest(const ScenarioConfig& cfg);

/// Writes vad/<id>.vad, accel/<id>.acc, annotations/<id>.eaf and manifest.txt.
void write_scenario(const Scenario& scenario, const ScenarioConfig& cfg, const std::filesystem::path& dir);

std::string format_manifest(const ScenarioManifest& m, const ScenarioConfig& cfg);

}  // namespace intent::synth
