#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "intent/annotation.hpp"
#include "intent/audio.hpp"
#include "intent/error.hpp"
#include "intent/pipeline.hpp"
#include "intent/synth.hpp"
#include "intent/text_io.hpp"
#include "intent/vad.hpp"

namespace intent::cli {

namespace fs = std::filesystem;

namespace {

Error config_error(const std::string& msg) { return Error(ErrorKind::Config, msg); }

std::vector<double> parse_double_list(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  for (auto part : text::split(s, ',')) {
    double v = 0.0;
    if (!text::parse_double(text::trim(part), v)) throw config_error("--" + flag + ": bad number '" + std::string(part) + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<Experiment> parse_experiment_list(const std::string& s) {
  std::vector<Experiment> out;
  for (auto part : text::split(s, ',')) {
    const auto e = parse_experiment(part);
    if (!e) throw config_error("--experiments: unknown experiment '" + std::string(text::trim(part)) + "'");
    out.push_back(*e);
  }
  return out;
}

/// String-valued options for RunConfig; parsed after CLI11 so that config-file
/// and command-line values go through the same conversion.
struct RunFlags {
  std::string data_dir;
  std::string out_dir = "results";
  std::string windows = "1,2,3,4";
  std::string experiments = "all,successful,unsuccessful,unsuccessful_start,unsuccessful_continue";
  std::size_t reps = 100;
  std::uint64_t seed = 42;
  double alpha = 0.001;
  std::string test_interval = "3600,4200";
  bool exclude_speech_negatives = false;
  bool retrain_per_rep = false;
  bool save_checkpoints = true;
  bool parallel_folds = false;
  std::size_t epochs = 10;
  std::size_t folds = 3;
  std::size_t batch_size = 32;
  std::size_t channels = 32;
  double learning_rate = 1e-3;
  double neg_ratio = 1.0;
  double pause_threshold = kDefaultPauseThreshold_s;
  double turn_threshold = kDefaultTurnThreshold_s;
  double max_gap = kDefaultMaxGap_s;

  void add_to(CLI::App& app) {
    auto last = [](CLI::Option* o) { return o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); };
    last(app.add_option("--data", data_dir, "Dataset directory (vad/, accel/, annotations/)"));
    last(app.add_option("--out", out_dir, "Output directory"));
    last(app.add_option("--windows", windows, "Comma-separated window sizes in seconds"));
    last(app.add_option("--experiments", experiments, "Comma-separated experiments"));
    last(app.add_option("--reps", reps, "Evaluation repetitions"));
    last(app.add_option("--seed", seed, "Master seed"));
    last(app.add_option("--alpha", alpha, "Significance level"));
    last(app.add_option("--test-interval", test_interval, "Test interval start,end in seconds"));
    last(app.add_flag("--exclude-speech-negatives", exclude_speech_negatives, "Reject negatives overlapping speech"));
    last(app.add_flag("--retrain-per-rep", retrain_per_rep, "Retrain the ensemble for every repetition"));
    last(app.add_flag("--save-checkpoints", save_checkpoints, "Write model checkpoints"));
    last(app.add_flag("--parallel-folds", parallel_folds, "Train folds on separate threads"));
    last(app.add_option("--epochs", epochs, "Training epochs"));
    last(app.add_option("--folds", folds, "Cross-validation folds (ensemble size)"));
    last(app.add_option("--batch-size", batch_size, "Mini-batch size"));
    last(app.add_option("--channels", channels, "Convolution channels"));
    last(app.add_option("--learning-rate", learning_rate, "Adam learning rate"));
    last(app.add_option("--neg-ratio", neg_ratio, "Negatives per positive"));
    last(app.add_option("--pause-threshold", pause_threshold, "Merge pauses shorter than this (s)"));
    last(app.add_option("--turn-threshold", turn_threshold, "Drop turns shorter than this (s)"));
    last(app.add_option("--max-gap", max_gap, "Largest tolerated accelerometer gap beyond one period (s)"));
  }

  RunConfig to_config() const {
    RunConfig cfg;
    if (data_dir.empty()) throw config_error("--data is required");
    cfg.data_dir = data_dir;
    cfg.out_dir = out_dir;
    cfg.windows_s = parse_double_list(windows, "windows");
    cfg.experiments = parse_experiment_list(experiments);
    cfg.repetitions = reps;
    cfg.seed = seed;
    cfg.alpha = alpha;
    const auto ti = parse_double_list(test_interval, "test-interval");
    if (ti.size() != 2) throw config_error("--test-interval expects start,end");
    cfg.test_interval = {ti[0], ti[1]};
    cfg.exclude_speech_negatives = exclude_speech_negatives;
    cfg.retrain_per_rep = retrain_per_rep;
    cfg.save_checkpoints = save_checkpoints;
    cfg.train.parallel_folds = parallel_folds;
    cfg.train.epochs = epochs;
    cfg.train.folds = folds;
    cfg.train.batch_size = batch_size;
    cfg.train.channels = channels;
    cfg.train.learning_rate = learning_rate;
    cfg.neg_ratio = neg_ratio;
    cfg.pause_threshold_s = pause_threshold;
    cfg.turn_threshold_s = turn_threshold;
    cfg.max_gap_s = max_gap;
    cfg.validate();
    return cfg;
  }
};

struct SynthFlags {
  std::string out_dir = "synthetic";
  synth::ScenarioConfig cfg;
  double annotated_start = 3600.0;
  double annotated_end = 4200.0;

  void add_to(CLI::App& app) {
    auto last = [](CLI::Option* o) { return o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); };
    last(app.add_option("--out", out_dir, "Output directory"));
    last(app.add_option("--participants", cfg.participants));
    last(app.add_option("--duration", cfg.duration_s, "Recording length (s)"));
    last(app.add_option("--vad-rate", cfg.vad_rate_hz));
    last(app.add_option("--accel-rate", cfg.accel_rate_hz));
    last(app.add_option("--turn-rate", cfg.turn_rate_per_min, "Turns per minute"));
    last(app.add_option("--mean-turn", cfg.mean_turn_s));
    last(app.add_option("--min-turn", cfg.min_turn_s));
    last(app.add_option("--min-gap", cfg.min_gap_s));
    last(app.add_option("--effect-strength", cfg.effect_strength, "Burst amplitude in noise standard deviations"));
    last(app.add_option("--effect-lead", cfg.effect_lead_s));
    last(app.add_option("--burst", cfg.burst_s, "Burst duration (s)"));
    last(app.add_option("--noise-std", cfg.noise_std));
    last(app.add_option("--drift", cfg.drift_amplitude));
    last(app.add_option("--unsuccessful-rate", cfg.unsuccessful_rate_per_min, "Unsuccessful intentions per minute"));
    last(app.add_option("--annotated-start", annotated_start));
    last(app.add_option("--annotated-end", annotated_end));
    last(app.add_option("--seed", cfg.seed));
  }
};

int exit_for(const std::exception& e, std::ostream& err) {
  if (const auto* ie = dynamic_cast<const Error*>(&e)) {
    err << "error: " << ie->what() << "\n";
    return ie->exit_code();
  }
  if (dynamic_cast<const fs::filesystem_error*>(&e)) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::Data);
  }
  err << "error: " << e.what() << "\n";
  return 1;
}

}  // namespace

std::vector<std::string> config_file_args(const std::string& path) {
  const auto body = text::read_file(path);
  std::vector<std::string> out;
  const auto lines = text::split_lines(body);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(path, i + 1, "expected key = value");
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(path, i + 1, "empty key");
    out.push_back(fmt::format("--{}={}", key, value));
  }
  return out;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  std::vector<std::string> rest;
  std::vector<std::string> from_file;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const auto& a = args[i];
    std::string path;
    if (a == "--config") {
      if (i + 1 >= args.size()) throw config_error("--config requires a path");
      path = args[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
    } else {
      rest.push_back(a);
      continue;
    }
    try {
      auto more = config_file_args(path);
      from_file.insert(from_file.end(), more.begin(), more.end());
    } catch (const ParseError& e) {
      throw config_error(e.what());
    } catch (const Error& e) {
      throw config_error(std::string("cannot read config: ") + e.what());
    }
  }
  std::vector<std::string> out{args.front()};
  out.insert(out.end(), from_file.begin(), from_file.end());
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Infer intentions to speak from wearable accelerometer data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "intent 0.1.0");
  std::string config_path;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Flat key = value file; flags override its entries");
  };

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Train, evaluate and write all reports");
  run_flags.add_to(*run_cmd);
  add_config(run_cmd);

  std::string table_path;
  std::string stats_out;
  std::size_t stats_n = 100;
  double stats_alpha = 0.001;
  auto* stats_cmd = app.add_subcommand("stats-from-table", "Recompute significance tables from an AUC table");
  stats_cmd->add_option("table", table_path, "AUC table (mean (std) cells)")->required();
  stats_cmd->add_option("--out", stats_out, "Write report files here")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  stats_cmd->add_option("--reps", stats_n, "Repetitions behind each cell")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  stats_cmd->add_option("--alpha", stats_alpha)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_config(stats_cmd);

  SynthFlags synth_flags;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scenario");
  synth_flags.add_to(*synth_cmd);
  add_config(synth_cmd);

  std::string audio_in;
  std::string audio_out;
  double cutoff = 1500.0;
  double gain = 1.0;
  std::string probes;
  auto* audio_cmd = app.add_subcommand("filter-audio", "High-pass filter and amplify a WAV clip");
  audio_cmd->add_option("input", audio_in)->required();
  audio_cmd->add_option("output", audio_out)->required();
  audio_cmd->add_option("--cutoff", cutoff, "Cutoff frequency (Hz)")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  audio_cmd->add_option("--gain", gain, "Linear gain applied after filtering")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  audio_cmd->add_option("--probe", probes, "Comma-separated frequencies to report band power for")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_config(audio_cmd);

  RunFlags inspect_flags;
  double inspect_window = 1.0;
  auto* inspect_cmd = app.add_subcommand("inspect-samples", "Report speech overlap of sampled negatives");
  inspect_flags.add_to(*inspect_cmd);
  inspect_cmd->add_option("--window", inspect_window, "Window size (s)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_config(inspect_cmd);

  std::string vad_in;
  std::string vad_out;
  double pause = kDefaultPauseThreshold_s;
  double turn = kDefaultTurnThreshold_s;
  auto* vad_cmd = app.add_subcommand("preprocess-vad", "Clean a VAD track and list onsets");
  vad_cmd->add_option("input", vad_in)->required();
  vad_cmd->add_option("output", vad_out, "Cleaned track destination");
  vad_cmd->add_option("--pause-threshold", pause)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  vad_cmd->add_option("--turn-threshold", turn)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_config(vad_cmd);

  std::string eaf_in;
  std::string eaf_out;
  auto* eaf_cmd = app.add_subcommand("parse-eaf", "Convert an ELAN file to the line format");
  eaf_cmd->add_option("input", eaf_in)->required();
  eaf_cmd->add_option("output", eaf_out, "Line-format destination (default: stdout)");
  add_config(eaf_cmd);

  try {
    auto args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? e.what() : app.help()) << "\n";
      if (!dynamic_cast<const CLI::CallForVersion*>(&e)) {
        for (auto* sub : app.get_subcommands()) out << sub->help() << "\n";
      }
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::Config);
  } catch (const std::exception& e) {
    return exit_for(e, err);
  }

  try {
    if (run_cmd->parsed()) {
      const auto cfg = run_flags.to_config();
      const auto res = run_pipeline(cfg);
      out << report::format_auc_table(res.table) << "\n" << report::format_pvalue_table(res.stats) << "\n"
          << report::format_regression_table(res.stats) << "\n" << report::format_welch_table(res.stats);
      out << fmt::format("wrote {} files to {}\n", res.written.size(), cfg.out_dir.string());
    } else if (stats_cmd->parsed()) {
      if (stats_n < 2) throw config_error("--reps must be >= 2");
      if (!(stats_alpha > 0.0 && stats_alpha < 1.0)) throw config_error("--alpha must lie in (0, 1)");
      std::optional<fs::path> dir;
      if (!stats_out.empty()) dir = stats_out;
      const auto res = stats_from_table(table_path, static_cast<int>(stats_n), stats_alpha, dir);
      out << res.text;
    } else if (synth_cmd->parsed()) {
      auto cfg = synth_flags.cfg;
      cfg.annotated = {synth_flags.annotated_start, synth_flags.annotated_end};
      cfg.validate();
      const auto scenario = synth::generate_scenario(cfg);
      synth::write_scenario(scenario, cfg, synth_flags.out_dir);
      out << synth::format_manifest(scenario.manifest, cfg);
    } else if (audio_cmd->parsed()) {
      const auto pre = audio::read_wav(audio_in);
      const auto summary = audio::process_clip(audio_in, audio_out, cutoff, gain);
      out << fmt::format("samples={}\npre_rms={:.6g}\npost_rms={:.6g}\nclipped={}\n", summary.samples,
                         summary.pre_rms, summary.post_rms, summary.clipped);
      if (!probes.empty()) {
        const auto post = audio::read_wav(audio_out);
        for (double f : parse_double_list(probes, "probe")) {
          const double a = 10.0 * std::log10(audio::tone_power(pre.samples, f, pre.sample_rate_hz) + 1e-300);
          const double b = 10.0 * std::log10(audio::tone_power(post.samples, f, post.sample_rate_hz) + 1e-300);
          out << fmt::format("band_{}hz_pre_db={:.2f}\nband_{}hz_post_db={:.2f}\nband_{}hz_change_db={:.2f}\n", f, a,
                             f, b, f, b - a);
        }
      }
    } else if (inspect_cmd->parsed()) {
      auto cfg = inspect_flags.to_config();
      if (!(inspect_window > 0.0)) throw config_error("--window must be positive");
      out << format_overlap_rows(inspect_samples(cfg, inspect_window));
    } else if (vad_cmd->parsed()) {
      if (pause < 0.0 || turn < 0.0) throw config_error("thresholds must be >= 0");
      const auto raw = load_vad(vad_in);
      const auto clean = clean_track(raw, pause, turn);
      if (!vad_out.empty()) save_vad(clean, vad_out);
      const auto onsets = extract_onsets(clean);
      std::size_t raw_speech = 0;
      std::size_t clean_speech = 0;
      for (auto f : raw.frames) raw_speech += f;
      for (auto f : clean.frames) clean_speech += f;
      out << fmt::format("participant {}\nframes {}\nspeech_frames_raw {}\nspeech_frames_clean {}\nonsets {}\n",
                         clean.participant_id, clean.frames.size(), raw_speech, clean_speech, onsets.size());
      for (const auto& o : onsets) out << fmt::format("onset {}\n", text::format_double(o.time_s));
    } else if (eaf_cmd->parsed()) {
      const auto doc = parse_eaf(eaf_in);
      const auto lines = format_annotation_lines(doc);
      if (eaf_out.empty()) {
        out << lines;
      } else {
        text::write_file(eaf_out, lines);
        for (const auto& [name, tier] : doc.tiers) out << fmt::format("tier {} {}\n", name, tier.intervals.size());
        for (const auto& [label, count] : cue_summary(doc)) out << fmt::format("cue {} {}\n", label, count);
      }
    }
  } catch (const std::exception& e) {
    return exit_for(e, err);
  }
  return 0;
}

}  // namespace intent::cli
