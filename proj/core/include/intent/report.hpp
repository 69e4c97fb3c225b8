#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "intent/eval.hpp"
#include "intent/stats.hpp"

namespace intent::report {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

struct AucRow {
  std::string title;                      // e.g. "Successful"
  std::optional<Experiment> experiment;   // set when the title is a known experiment
  std::vector<std::optional<MeanStd>> cells;  // one per window
};

/// Experiments x window sizes table of AUC mean (std).
struct AucTable {
  std::vector<double> windows_s;
  std::vector<AucRow> rows;
};

AucTable table_from_results(std::span<const ExperimentResult> results, std::span<const double> windows_s,
                            std::span<const Experiment> experiments);

/// `0.5661 (0.004)`: mean with 4 decimals, std with 3.
std::string format_cell(const MeanStd& c);
/// "1 second", "2 seconds", "1.5 seconds".
std::string window_heading(double w);

/// Pipe-separated aligned table; first column heading is `corner`.
std::string format_table(std::string_view corner, std::span<const std::string> headings,
                         const std::vector<std::vector<std::string>>& rows);

std::string format_auc_table(const AucTable& t);
/// Parses format_auc_table output (also accepts hand-written tables in the same layout).
AucTable parse_auc_table(std::string_view text, const std::string& source = "<table>");

struct PValueCell {
  stats::TTestResult test;
};

struct RegressionRow {
  std::string title;
  std::optional<stats::RegressionResult> fit;  // empty when fewer than 2 windows are filled
};

struct WelchRow {
  double window_s = 0.0;
  stats::TTestResult one_sided;  // upper tail on |t|
  stats::TTestResult two_sided;
};

struct StatsReport {
  double alpha = 0.001;
  int n = 100;
  std::vector<double> windows_s;
  std::vector<std::string> titles;
  std::vector<std::vector<std::optional<stats::TTestResult>>> vs_random;  // [row][window]
  std::vector<RegressionRow> regressions;
  std::string welch_first;
  std::string welch_second;
  std::vector<WelchRow> welch;  // empty unless both start and continue rows exist
};

/// t-tests against chance, per-row regression over window size, and Welch tests
/// (tests are left empty when n < 2 or a cell has zero spread)
/// between the start and continue rows.
StatsReport compute_stats(const AucTable& table, int n = 100, double alpha = 0.001);

/// `4.889e-77` below 1e-4, `0.2402` otherwise.
std::string format_p(double p);

std::string format_pvalue_table(const StatsReport& r);
std::string format_regression_table(const StatsReport& r);
std::string format_welch_table(const StatsReport& r);
/// Machine-readable companion with full precision.
std::string format_stats_csv(const StatsReport& r);

/// experiment,window_s,rep,auc with 17 significant digits.
std::string format_raw_aucs(std::span<const ExperimentResult> results);

}  // namespace intent::report
