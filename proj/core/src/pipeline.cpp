#include "intent/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "intent/error.hpp"
#include "intent/rng.hpp"
#include "intent/text_io.hpp"

namespace intent {

namespace fs = std::filesystem;

namespace {

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + text::format_double(v[i]);
  return out;
}

Interval participant_extent(const ParticipantData& p) {
  const auto a = p.accel.extent();
  const auto v = p.vad.extent();
  return {std::max(a.start, v.start), std::min(a.end, v.end)};
}

Interval intersect(const Interval& a, const Interval& b) {
  return {std::max(a.start, b.start), std::min(a.end, b.end)};
}

std::optional<WindowTensor> tensor_for(const ParticipantData& p, const Interval& span, int label, double max_gap_s) {
  auto r = try_slice_window(p.accel, span.start, span.end, max_gap_s);
  if (r.status != SliceStatus::Ok) return std::nullopt;
  auto t = normalize(*r.tensor, p.norm);
  t.label = label;
  return t;
}

// Rethrows module errors with the experiment/window in the message.
template <class F>
auto with_context(const std::string& ctx, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), ctx + ": " + e.what());
  }
}

struct TrainingSet {
  std::vector<WindowTensor> data;
  std::vector<ManifestRow> manifest;
};

TrainingSet build_training_set(const Dataset& ds, const RunConfig& cfg, double window_s,
                               const std::vector<ParticipantWindows>& windows, std::uint64_t stream) {
  TrainingSet ts;
  for (std::size_t i = 0; i < ds.participants.size(); ++i) {
    const auto& p = ds.participants[i];
    const auto& pw = windows[i];
    std::size_t n_pos = 0;
    for (const auto& w : pw.successful) {
      if (classify_window(w.span, cfg.test_interval) != Split::Train) continue;
      if (auto t = tensor_for(p, w.span, 1, cfg.max_gap_s)) {
        ts.data.push_back(std::move(*t));
        ts.manifest.push_back({p.id, Experiment::Successful, std::string(to_string(w.label)), w.span, true});
        ++n_pos;
      }
    }
    if (n_pos == 0) continue;
    std::vector<Interval> excl{cfg.test_interval};
    for (const auto& w : pw.successful) excl.push_back(w.span);
    for (const auto& w : pw.annotated) excl.push_back(w.span);
    NegativeRequest req;
    req.participant_id = p.id;
    req.count = static_cast<std::size_t>(std::llround(cfg.neg_ratio * static_cast<double>(n_pos)));
    req.extent = participant_extent(p);
    req.window_s = window_s;
    req.grid_step_s = 1.0 / p.accel.rate_hz;
    req.seed = (SeedPath(cfg.seed) / "train-negatives" / p.id / static_cast<std::uint64_t>(std::llround(window_s * 1e6)) / stream).seed();
    const auto negs = with_context(fmt::format("training negatives for '{}' at {} s", p.id, window_s), [&] {
      return build_negatives(req, IntervalSet(excl), [&](const Interval& iv) {
        if (cfg.exclude_speech_negatives && overlaps_speech(p.vad, iv)) return false;
        return try_slice_window(p.accel, iv.start, iv.end, cfg.max_gap_s).status == SliceStatus::Ok;
      });
    });
    for (const auto& w : negs) {
      ts.data.push_back(*tensor_for(p, w.span, 0, cfg.max_gap_s));
      ts.manifest.push_back({p.id, Experiment::Successful, std::string(to_string(w.label)), w.span, false});
    }
  }
  return ts;
}

// Test positives and negative sampling setup for one experiment and participant.
struct TestPlan {
  const ParticipantData* participant = nullptr;
  std::vector<CaseWindow> positives;
  std::vector<WindowTensor> positive_tensors;
  IntervalSet exclusions;
  Interval extent;
};

std::vector<TestPlan> plan_tests(const Dataset& ds, const RunConfig& cfg, Experiment exp,
                                 const std::vector<ParticipantWindows>& windows) {
  std::vector<TestPlan> plans;
  for (std::size_t i = 0; i < ds.participants.size(); ++i) {
    const auto& p = ds.participants[i];
    const auto& pw = windows[i];
    std::vector<CaseWindow> succ_test;
    std::vector<CaseWindow> ann_test;
    for (const auto& w : pw.successful) {
      if (classify_window(w.span, cfg.test_interval) == Split::Test) succ_test.push_back(w);
    }
    for (const auto& w : pw.annotated) {
      if (classify_window(w.span, cfg.test_interval) == Split::Test) ann_test.push_back(w);
    }
    TestPlan plan;
    plan.participant = &p;
    for (const auto& w : build_positives(exp, succ_test, ann_test, p.vad)) {
      if (auto t = tensor_for(p, w.span, 1, cfg.max_gap_s)) {
        plan.positives.push_back(w);
        plan.positive_tensors.push_back(std::move(*t));
      }
    }
    if (plan.positives.empty()) continue;
    plan.exclusions = exclusion_set(exp, plan.positives, pw.successful, pw.annotated);
    plan.extent = intersect(cfg.test_interval, participant_extent(p));
    plans.push_back(std::move(plan));
  }
  return plans;
}

std::vector<CaseWindow> draw_plan_negatives(const TestPlan& plan, const RunConfig& cfg, Experiment exp,
                                            double window_s, std::size_t rep) {
  const auto& p = *plan.participant;
  NegativeRequest req;
  req.participant_id = p.id;
  req.count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(cfg.neg_ratio * static_cast<double>(plan.positives.size()))));
  req.extent = plan.extent;
  req.window_s = window_s;
  req.grid_step_s = 1.0 / p.accel.rate_hz;
  req.seed = (SeedPath(cfg.seed) / "test-negatives" / experiment_key(exp) / p.id / static_cast<std::uint64_t>(std::llround(window_s * 1e6)) / rep).seed();
  return build_negatives(req, plan.exclusions, [&](const Interval& iv) {
    if (cfg.exclude_speech_negatives && overlaps_speech(p.vad, iv)) return false;
    return try_slice_window(p.accel, iv.start, iv.end, cfg.max_gap_s).status == SliceStatus::Ok;
  });
}

std::string format_training_log(const std::vector<TrainResult>& training, const std::vector<double>& windows) {
  std::string out = "window_s,fold,epoch,train_loss,val_auc\n";
  for (std::size_t w = 0; w < training.size(); ++w) {
    const auto& tr = training[w];
    for (std::size_t f = 0; f < tr.epoch_val_auc.size(); ++f) {
      for (std::size_t e = 0; e < tr.epoch_val_auc[f].size(); ++e) {
        fmt::format_to(std::back_inserter(out), "{},{},{},{:.6f},{:.6f}\n", windows[w], f, e + 1,
                       tr.epoch_train_loss[f][e], tr.epoch_val_auc[f][e]);
      }
    }
  }
  // Epoch sweep: mean fold validation AUC after each epoch.
  out += "# epoch sweep (mean fold validation AUC)\n# window_s,epoch,mean_val_auc\n";
  for (std::size_t w = 0; w < training.size(); ++w) {
    const auto& tr = training[w];
    if (tr.epoch_val_auc.empty()) continue;
    for (std::size_t e = 0; e < tr.epoch_val_auc.front().size(); ++e) {
      double m = 0.0;
      for (const auto& fold : tr.epoch_val_auc) m += fold[e];
      m /= static_cast<double>(tr.epoch_val_auc.size());
      fmt::format_to(std::back_inserter(out), "# {},{},{:.6f}\n", windows[w], e + 1, m);
    }
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  auto bad = [](const std::string& m) { return Error(ErrorKind::Config, m); };
  if (windows_s.empty()) throw bad("at least one window size is required");
  for (double w : windows_s) {
    if (!(w > 0.0)) throw bad("window sizes must be positive");
  }
  if (experiments.empty()) throw bad("at least one experiment is required");
  if (repetitions < 1) throw bad("repetitions must be >= 1");
  if (!(test_interval.end > test_interval.start)) throw bad("test interval must have end > start");
  if (!(alpha > 0.0 && alpha < 1.0)) throw bad("alpha must lie in (0, 1)");
  if (!(neg_ratio > 0.0)) throw bad("neg-ratio must be positive");
  if (pause_threshold_s < 0.0 || turn_threshold_s < 0.0) throw bad("VAD thresholds must be >= 0");
  train.validate();
}

std::string RunConfig::describe() const {
  std::vector<std::string> exps;
  for (auto e : experiments) exps.emplace_back(experiment_key(e));
  std::string e_join;
  for (std::size_t i = 0; i < exps.size(); ++i) e_join += (i ? "," : "") + exps[i];
  std::map<std::string, std::string> kv{
      {"alpha", text::format_double(alpha)},
      {"batch-size", std::to_string(train.batch_size)},
      {"channels", std::to_string(train.channels)},
      {"epochs", std::to_string(train.epochs)},
      {"exclude-speech-negatives", exclude_speech_negatives ? "true" : "false"},
      {"experiments", e_join},
      {"folds", std::to_string(train.folds)},
      {"learning-rate", text::format_double(train.learning_rate)},
      {"max-gap", text::format_double(max_gap_s)},
      {"neg-ratio", text::format_double(neg_ratio)},
      {"pause-threshold", text::format_double(pause_threshold_s)},
      {"reps", std::to_string(repetitions)},
      {"retrain-per-rep", retrain_per_rep ? "true" : "false"},
      {"seed", std::to_string(seed)},
      {"test-interval", text::format_double(test_interval.start) + "," + text::format_double(test_interval.end)},
      {"turn-threshold", text::format_double(turn_threshold_s)},
      {"windows", join_doubles(windows_s)},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

Dataset load_dataset(const fs::path& dir, const RunConfig& cfg) {
  const auto vad_dir = dir / "vad";
  if (!fs::is_directory(vad_dir)) throw Error(ErrorKind::Data, "missing directory " + vad_dir.string());
  std::vector<fs::path> vad_files;
  for (const auto& entry : fs::directory_iterator(vad_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".vad") vad_files.push_back(entry.path());
  }
  std::sort(vad_files.begin(), vad_files.end());
  if (vad_files.empty()) throw Error(ErrorKind::Data, "no .vad files in " + vad_dir.string());
  Dataset ds;
  std::set<std::string> seen;
  for (const auto& vp : vad_files) {
    ParticipantData p;
    const auto stem = vp.stem().string();
    p.raw_vad = load_vad(vp);
    if (p.raw_vad.participant_id.empty()) p.raw_vad.participant_id = stem;
    p.id = p.raw_vad.participant_id;
    if (!seen.insert(p.id).second) throw Error(ErrorKind::Data, "duplicate participant '" + p.id + "'");
    p.vad = clean_track(p.raw_vad, cfg.pause_threshold_s, cfg.turn_threshold_s);
    const auto ap = dir / "accel" / (stem + ".acc");
    if (!fs::exists(ap)) throw Error(ErrorKind::Data, "missing accelerometer file " + ap.string());
    p.accel = load_accel(ap);
    if (p.accel.participant_id.empty()) p.accel.participant_id = p.id;
    p.sources = {vp, ap};
    for (const char* ext : {".eaf", ".txt"}) {
      const auto an = dir / "annotations" / (stem + ext);
      if (fs::exists(an)) {
        p.annotations = load_annotations(an);
        if (p.annotations->participant_id.empty()) p.annotations->participant_id = p.id;
        p.sources.push_back(an);
        break;
      }
    }
    p.norm = compute_axis_stats(p.accel, p.accel.extent(), cfg.test_interval);
    ds.participants.push_back(std::move(p));
  }
  return ds;
}

ParticipantWindows case_windows(const ParticipantData& p, double window_s) {
  ParticipantWindows pw;
  const double start = std::max(p.vad.t0_s, p.accel.extent().start);
  const auto onsets = extract_onsets(p.vad);
  pw.successful = successful_case_windows(p.id, onsets, window_s, start);
  if (p.annotations) {
    for (auto label : {CaseLabel::IntsStart, CaseLabel::IntsContinue}) {
      if (!p.annotations->has_tier(tier_name_for(label))) continue;
      for (auto w : intention_windows(*p.annotations, label, window_s, start)) {
        w.participant_id = p.id;
        pw.annotated.push_back(std::move(w));
      }
    }
  }
  return pw;
}

RunOutputs run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  const auto ds = load_dataset(cfg.data_dir, cfg);
  RunOutputs out;
  std::vector<ManifestRow> sample_manifest;

  for (std::size_t wi = 0; wi < cfg.windows_s.size(); ++wi) {
    const double window_s = cfg.windows_s[wi];
    const auto ctx = fmt::format("window {} s", window_s);
    std::vector<ParticipantWindows> windows;
    for (const auto& p : ds.participants) windows.push_back(case_windows(p, window_s));

    auto train_once = [&](std::uint64_t stream) {
      auto ts = build_training_set(ds, cfg, window_s, windows, stream);
      TrainConfig tc = cfg.train;
      tc.seed = (SeedPath(cfg.seed) / "train" / static_cast<std::uint64_t>(std::llround(window_s * 1e6)) / stream).seed();
      auto tr = with_context(ctx + ", training", [&] { return train(ts.data, tc); });
      return std::pair{std::move(tr), std::move(ts.manifest)};
    };

    std::vector<Ensemble> rep_models;
    if (cfg.retrain_per_rep) {
      for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
        auto [tr, manifest] = train_once(rep);
        if (rep == 0) {
          out.training.push_back(tr);
          sample_manifest.insert(sample_manifest.end(), manifest.begin(), manifest.end());
        }
        rep_models.push_back(std::move(tr.ensemble));
      }
    } else {
      auto [tr, manifest] = train_once(0);
      out.training.push_back(tr);
      sample_manifest.insert(sample_manifest.end(), manifest.begin(), manifest.end());
      rep_models.push_back(std::move(tr.ensemble));
    }
    if (cfg.save_checkpoints) {
      for (std::size_t f = 0; f < rep_models.front().members.size(); ++f) {
        const auto path = cfg.out_dir / "models" / fmt::format("window_{}s_fold{}.ckpt", window_s, f);
        save_checkpoint(rep_models.front().members[f], path);
        out.written.push_back(path);
      }
    }

    for (auto exp : cfg.experiments) {
      const auto ectx = fmt::format("experiment '{}', {}", experiment_key(exp), ctx);
      const auto plans = with_context(ectx, [&] { return plan_tests(ds, cfg, exp, windows); });
      std::vector<WindowTensor> positives;
      for (const auto& pl : plans) {
        positives.insert(positives.end(), pl.positive_tensors.begin(), pl.positive_tensors.end());
        for (const auto& w : pl.positives) {
          sample_manifest.push_back({pl.participant->id, exp, std::string(to_string(w.label)), w.span, true});
        }
      }
      auto draw = [&](std::size_t rep) {
        std::vector<WindowTensor> negs;
        for (const auto& pl : plans) {
          const auto windows_neg = draw_plan_negatives(pl, cfg, exp, window_s, rep);
          for (const auto& w : windows_neg) {
            negs.push_back(*tensor_for(*pl.participant, w.span, 0, cfg.max_gap_s));
            if (rep == 0) {
              sample_manifest.push_back({pl.participant->id, exp, std::string(to_string(w.label)), w.span, false});
            }
          }
        }
        return negs;
      };
      ExperimentResult result;
      if (!cfg.retrain_per_rep) {
        result = with_context(ectx, [&] {
          return run_experiment(exp, window_s, rep_models.front(), positives, draw, cfg.repetitions);
        });
      } else {
        result.experiment = exp;
        result.window_s = window_s;
        for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
          auto one = with_context(ectx, [&] {
            return run_experiment(exp, window_s, rep_models[rep], positives, [&](std::size_t) { return draw(rep); }, 1);
          });
          result.auc_values.push_back(one.auc_values.front());
        }
        summarize(result);
      }
      out.results.push_back(std::move(result));
    }
  }

  out.table = report::table_from_results(out.results, cfg.windows_s, cfg.experiments);
  out.stats = report::compute_stats(out.table, static_cast<int>(cfg.repetitions), cfg.alpha);

  // Reports.
  auto write = [&](const std::string& name, const std::string& content) {
    const auto path = cfg.out_dir / name;
    text::write_file(path, content);
    out.written.push_back(path);
  };
  write("auc_table.txt", report::format_auc_table(out.table));
  write("auc_raw.csv", report::format_raw_aucs(out.results));
  write("pvalues.txt", report::format_pvalue_table(out.stats));
  write("regression.txt", report::format_regression_table(out.stats));
  write("welch.txt", report::format_welch_table(out.stats));
  write("stats.csv", report::format_stats_csv(out.stats));
  write("training.txt", format_training_log(out.training, cfg.windows_s));
  write("samples.csv", format_manifest(sample_manifest));

  std::string manifest = "# run manifest\n";
  manifest += cfg.describe();
  manifest += "data-dir = " + cfg.data_dir.generic_string() + "\n";
  for (const auto& p : ds.participants) {
    for (const auto& src : p.sources) {
      manifest += fmt::format("input {} fnv1a64={:016x}\n", fs::relative(src, cfg.data_dir).generic_string(),
                              fnv1a64(text::read_file(src)));
    }
  }
  write("manifest.txt", manifest);
  return out;
}

StatsFromTableOutputs stats_from_table(const fs::path& table_path, int n, double alpha,
                                       const std::optional<fs::path>& out_dir) {
  StatsFromTableOutputs out;
  out.table = report::parse_auc_table(text::read_file(table_path), table_path.string());
  out.stats = report::compute_stats(out.table, n, alpha);
  out.text = report::format_pvalue_table(out.stats) + "\n" + report::format_regression_table(out.stats) + "\n" +
             report::format_welch_table(out.stats);
  if (out_dir) {
    text::write_file(*out_dir / "pvalues.txt", report::format_pvalue_table(out.stats));
    text::write_file(*out_dir / "regression.txt", report::format_regression_table(out.stats));
    text::write_file(*out_dir / "welch.txt", report::format_welch_table(out.stats));
    text::write_file(*out_dir / "stats.csv", report::format_stats_csv(out.stats));
  }
  return out;
}

std::vector<OverlapRow> inspect_samples(const RunConfig& cfg, double window_s) {
  const auto ds = load_dataset(cfg.data_dir, cfg);
  std::vector<ParticipantWindows> windows;
  for (const auto& p : ds.participants) windows.push_back(case_windows(p, window_s));
  std::vector<OverlapRow> rows;
  for (auto exp : cfg.experiments) {
    for (const auto& plan : plan_tests(ds, cfg, exp, windows)) {
      const auto negs = draw_plan_negatives(plan, cfg, exp, window_s, 0);
      rows.push_back({plan.participant->id, exp, overlap_report(negs, plan.participant->vad)});
    }
  }
  return rows;
}

std::string format_overlap_rows(const std::vector<OverlapRow>& rows) {
  std::string out = "participant,experiment,negatives,speech_overlap,silence\n";
  for (const auto& r : rows) {
    fmt::format_to(std::back_inserter(out), "{},{},{},{:.4f},{:.4f}\n", r.participant_id,
                   experiment_key(r.experiment), r.report.total, r.report.speech_fraction, r.report.silence_fraction);
  }
  return out;
}

}  // namespace intent
