#include <doctest.h>

#include "intent/error.hpp"
#include "intent/pipeline.hpp"
#include "intent/synth.hpp"
#include "intent/text_io.hpp"
#include "support.hpp"

using namespace intent;

namespace {

synth::ScenarioConfig scenario_config() {
  synth::ScenarioConfig cfg;
  cfg.participants = 3;
  cfg.duration_s = 900;
  cfg.annotated = {600, 900};
  cfg.unsuccessful_rate_per_min = 1.5;
  cfg.seed = 21;
  return cfg;
}

std::filesystem::path scenario_dir() {
  static const auto dir = [] {
    const auto d = testing::scratch_dir("pipeline_data");
    const auto cfg = scenario_config();
    synth::write_scenario(synth::generate_scenario(cfg), cfg, d);
    return d;
  }();
  return dir;
}

RunConfig run_config(const std::string& out) {
  RunConfig cfg;
  cfg.data_dir = scenario_dir();
  cfg.out_dir = testing::scratch_dir(out);
  cfg.windows_s = {1.0, 2.0};
  cfg.repetitions = 4;
  cfg.test_interval = {600, 900};
  cfg.train.epochs = 2;
  return cfg;
}

}  // namespace

TEST_CASE("loading a dataset") {
  const auto ds = load_dataset(scenario_dir(), run_config("pipeline_load"));
  REQUIRE(ds.participants.size() == 3);
  CHECK(ds.participants[0].id == "P01");
  CHECK(ds.participants[0].annotations.has_value());
  CHECK(ds.participants[0].sources.size() == 3);
  const auto w = case_windows(ds.participants[0], 2.0);
  CHECK_FALSE(w.successful.empty());
  for (const auto& c : w.successful) CHECK(c.span.length() == doctest::Approx(2.0));
}

TEST_CASE("normalization ignores the test interval") {
  auto cfg = run_config("pipeline_norm");
  const auto a = load_dataset(scenario_dir(), cfg);
  const auto copy = testing::scratch_dir("pipeline_norm_data");
  std::filesystem::copy(scenario_dir(), copy, std::filesystem::copy_options::recursive);
  auto acc = load_accel(copy / "accel" / "P01.acc");
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (acc.times_s[i] >= 600) acc.samples[i][0] += 1000.0;
  }
  save_accel(acc, copy / "accel" / "P01.acc");
  const auto b = load_dataset(copy, cfg);
  for (std::size_t k = 0; k < kAxes; ++k) {
    CHECK(a.participants[0].norm.mean[k] == doctest::Approx(b.participants[0].norm.mean[k]).epsilon(1e-4));
    CHECK(a.participants[0].norm.std[k] == doctest::Approx(b.participants[0].norm.std[k]).epsilon(1e-4));
  }
}

TEST_CASE("full run writes every report and respects the hold-out") {
  const auto cfg = run_config("pipeline_run");
  const auto out = run_pipeline(cfg);
  CHECK(out.results.size() == 10);
  REQUIRE(out.table.rows.size() == 5);
  for (const auto& row : out.table.rows) CHECK(row.cells.size() == 2);
  for (const char* f : {"auc_table.txt", "auc_raw.csv", "pvalues.txt", "regression.txt", "welch.txt", "stats.csv",
                        "training.txt", "samples.csv", "manifest.txt", "models/window_1s_fold0.ckpt"}) {
    CHECK(std::filesystem::exists(cfg.out_dir / f));
  }
  for (const auto& r : out.results) {
    CHECK(r.auc_values.size() == 4);
    for (double a : r.auc_values) CHECK((a >= 0.0 && a <= 1.0));
  }

  // Training rows lie outside the test interval, evaluation rows inside.
  const auto rows = parse_manifest(text::read_file(cfg.out_dir / "samples.csv"));
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  for (const auto& row : rows) {
    const bool inside = cfg.test_interval.contains(row.span);
    const bool outside = !overlaps(row.span, cfg.test_interval);
    CHECK((inside || outside));
    inside ? ++test_rows : ++train_rows;
  }
  CHECK(train_rows > 0);
  CHECK(test_rows > 0);
  const auto manifest = text::read_file(cfg.out_dir / "manifest.txt");
  CHECK(manifest.find("seed = 42") != std::string::npos);
  CHECK(manifest.find("input vad/P01.vad fnv1a64=") != std::string::npos);

  SUBCASE("byte-identical rerun") {
    auto again = cfg;
    again.out_dir = testing::scratch_dir("pipeline_run_again");
    run_pipeline(again);
    for (const char* f : {"auc_table.txt", "auc_raw.csv", "pvalues.txt", "stats.csv", "training.txt", "samples.csv",
                          "models/window_2s_fold2.ckpt"}) {
      CHECK(text::read_file(cfg.out_dir / f) == text::read_file(again.out_dir / f));
    }
  }
}

TEST_CASE("single cell run and retraining per repetition") {
  auto cfg = run_config("pipeline_single");
  cfg.windows_s = {1.0};
  cfg.experiments = {Experiment::Successful};
  cfg.retrain_per_rep = true;
  cfg.repetitions = 2;
  cfg.train.epochs = 1;
  const auto out = run_pipeline(cfg);
  REQUIRE(out.table.rows.size() == 1);
  CHECK(out.table.rows[0].cells.size() == 1);
  CHECK(out.results[0].auc_values.size() == 2);
}

TEST_CASE("errors carry their context") {
  auto cfg = run_config("pipeline_err");
  cfg.test_interval = {2000, 2600};  // beyond the recording: no test positives
  cfg.windows_s = {1.0};
  try {
    run_pipeline(cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("window 1 s") != std::string::npos);
  }
  cfg = run_config("pipeline_err2");
  cfg.data_dir = testing::scratch_dir("pipeline_empty");
  try {
    run_pipeline(cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Data);
  }
  cfg = run_config("pipeline_err3");
  cfg.windows_s = {};
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("overlap inspection on a silent track") {
  const auto dir = testing::scratch_dir("pipeline_silent");
  VadTrack vad;
  vad.participant_id = "S01";
  vad.frames.assign(900, 0);
  save_vad(vad, dir / "vad" / "S01.vad");
  AccelSeries acc;
  acc.participant_id = "S01";
  for (int i = 0; i < 900 * 20; ++i) {
    acc.times_s.push_back(i / 20.0);
    acc.samples.push_back({0.1 * (i % 7), 0.0, 9.81});
  }
  save_accel(acc, dir / "accel" / "S01.acc");
  text::write_file(dir / "annotations" / "S01.txt",
                   "# participant=S01\nINTS_start,700000,702000,\nINTS_continue,800000,801000,\n");
  auto cfg = run_config("pipeline_silent_out");
  cfg.data_dir = dir;
  cfg.experiments = {Experiment::Unsuccessful, Experiment::UnsuccessfulStart};
  const auto rows = inspect_samples(cfg, 1.0);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.report.speech_fraction == 0.0);
    CHECK(r.report.silence_fraction == 1.0);
  }
  CHECK(format_overlap_rows(rows).find("S01,unsuccessful,2,0.0000,1.0000") != std::string::npos);
}
