#include <doctest.h>

#include <cmath>

#include "intent/error.hpp"
#include "intent/report.hpp"
#include "intent/text_io.hpp"
#include "support.hpp"

using namespace intent;
using namespace intent::report;

TEST_CASE("cell and heading formats") {
  CHECK(format_cell({0.56609, 0.0041}) == "0.5661 (0.004)");
  CHECK(format_cell({0.5, 0.0}) == "0.5000 (0.000)");
  CHECK(window_heading(1) == "1 second");
  CHECK(window_heading(3) == "3 seconds");
  CHECK(window_heading(1.5) == "1.5 seconds");
  CHECK(format_p(4.889e-77) == "4.889e-77");
  CHECK(format_p(0.24021) == "0.2402");
  CHECK(format_p(1.0) == "1.0000");
}

TEST_CASE("AUC table round trip") {
  const auto table = parse_auc_table(text::read_file(testing::fixture("table1.txt")));
  REQUIRE(table.windows_s == std::vector<double>{1, 2, 3, 4});
  REQUIRE(table.rows.size() == 5);
  CHECK(table.rows[0].experiment == Experiment::All);
  CHECK(table.rows[4].experiment == Experiment::UnsuccessfulContinue);
  CHECK(table.rows[3].cells[1]->mean == 0.5852);
  CHECK(table.rows[3].cells[1]->std == 0.009);
  const auto again = parse_auc_table(format_auc_table(table));
  CHECK(format_auc_table(again) == format_auc_table(table));
}

TEST_CASE("malformed tables") {
  CHECK_THROWS_AS(parse_auc_table(""), ParseError);
  CHECK_THROWS_AS(parse_auc_table("AUC scores | 1 second\nSuccessful | 0.5 0.1\n"), ParseError);
  CHECK_THROWS_AS(parse_auc_table("AUC scores | 1 second\nSuccessful | 0.5 (0.1) | 0.4 (0.1)\n"), ParseError);
  CHECK_THROWS_AS(parse_auc_table("AUC scores | soon\nSuccessful | 0.5 (0.1)\n"), ParseError);
  const auto gaps = parse_auc_table("AUC scores | 1 second | 2 seconds\nSuccessful | - | 0.6 (0.01)\n");
  CHECK_FALSE(gaps.rows[0].cells[0].has_value());
}

TEST_CASE("single-row table") {
  const auto t = parse_auc_table("AUC scores | 1 second | 2 seconds | 3 seconds\nSuccessful | 0.60 (0.01) | 0.55 (0.01) | 0.50 (0.01)\n");
  const auto s = compute_stats(t);
  REQUIRE(s.vs_random.size() == 1);
  CHECK(s.vs_random[0][0]->significant);
  CHECK_FALSE(s.vs_random[0][2]->significant);
  REQUIRE(s.regressions[0].fit.has_value());
  CHECK(s.regressions[0].fit->slope == doctest::Approx(-0.05));
  CHECK(s.welch.empty());
  const auto text = format_pvalue_table(s) + format_regression_table(s) + format_welch_table(s);
  CHECK(text.find("Successful") != std::string::npos);
}

TEST_CASE("degenerate cells are left untested") {
  const auto t = parse_auc_table("AUC scores | 1 second\nSuccessful | 1.0000 (0.000)\n");
  const auto s = compute_stats(t);
  CHECK_FALSE(s.vs_random[0][0].has_value());
  CHECK(format_pvalue_table(s).find("| -") != std::string::npos);
  CHECK_FALSE(s.regressions[0].fit.has_value());
  CHECK_FALSE(compute_stats(parse_auc_table("AUC scores | 1 second\nSuccessful | 0.6 (0.1)\n"), 1).vs_random[0][0]);
}

TEST_CASE("Welch rows use the observed direction") {
  const auto table = parse_auc_table(text::read_file(testing::fixture("table1.txt")));
  const auto s = compute_stats(table);
  REQUIRE(s.welch.size() == 4);
  for (const auto& w : s.welch) {
    CHECK(w.one_sided.t_statistic >= 0.0);
    CHECK(w.two_sided.p_value == doctest::Approx(2.0 * w.one_sided.p_value));
  }
  const auto csv = format_stats_csv(s);
  CHECK(csv.rfind("kind,row,window_s,statistic,df,p,log10_p,significant\n", 0) == 0);
}

TEST_CASE("results become a table in reporting order") {
  std::vector<ExperimentResult> results(2);
  results[0].experiment = Experiment::Successful;
  results[0].window_s = 1.0;
  results[0].auc_values = {0.6, 0.62};
  summarize(results[0]);
  results[1] = results[0];
  results[1].experiment = Experiment::All;
  const std::vector<double> windows{1.0};
  const std::vector<Experiment> exps{Experiment::All, Experiment::Successful};
  const auto t = table_from_results(results, windows, exps);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].title == "All intentions to speak");
  CHECK(t.rows[1].cells[0]->mean == doctest::Approx(0.61));
  const auto raw = format_raw_aucs(results);
  CHECK(raw.find("successful,1,0,0.59999999999999998") != std::string::npos);
}
