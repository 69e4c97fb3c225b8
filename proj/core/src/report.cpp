#include "intent/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "intent/error.hpp"
#include "intent/text_io.hpp"

namespace intent::report {

AucTable table_from_results(std::span<const ExperimentResult> results, std::span<const double> windows_s,
                            std::span<const Experiment> experiments) {
  AucTable t;
  t.windows_s.assign(windows_s.begin(), windows_s.end());
  for (auto e : experiments) {
    AucRow row;
    row.title = std::string(experiment_title(e));
    row.experiment = e;
    row.cells.resize(windows_s.size());
    for (const auto& r : results) {
      if (r.experiment != e) continue;
      for (std::size_t w = 0; w < windows_s.size(); ++w) {
        if (r.window_s == windows_s[w]) row.cells[w] = MeanStd{r.mean, r.std};
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string format_cell(const MeanStd& c) { return fmt::format("{:.4f} ({:.3f})", c.mean, c.std); }

std::string window_heading(double w) {
  const bool integral = std::floor(w) == w;
  const std::string num = integral ? fmt::format("{}", static_cast<long long>(w)) : text::format_double(w);
  return num + (w == 1.0 ? " second" : " seconds");
}

std::string format_table(std::string_view corner, std::span<const std::string> headings,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(headings.size() + 1, 0);
  width[0] = corner.size();
  for (std::size_t c = 0; c < headings.size(); ++c) width[c + 1] = headings[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::string out;
  auto emit = [&](std::span<const std::string> cells) {
    std::string line;
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string& s = c < cells.size() ? cells[c] : std::string();
      if (c > 0) line += " | ";
      line += s;
      if (c + 1 < width.size()) line.append(width[c] - s.size(), ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  };
  std::vector<std::string> head{std::string(corner)};
  head.insert(head.end(), headings.begin(), headings.end());
  emit(head);
  for (const auto& r : rows) emit(r);
  return out;
}

std::string format_auc_table(const AucTable& t) {
  std::vector<std::string> headings;
  for (double w : t.windows_s) headings.push_back(window_heading(w));
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : t.rows) {
    std::vector<std::string> cells{r.title};
    for (const auto& c : r.cells) cells.push_back(c ? format_cell(*c) : "-");
    rows.push_back(std::move(cells));
  }
  return format_table("AUC scores", headings, rows);
}

AucTable parse_auc_table(std::string_view text, const std::string& source) {
  AucTable t;
  bool have_header = false;
  const auto lines = text::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto cells = text::split(line, '|');
    for (auto& c : cells) c = text::trim(c);
    if (!have_header) {
      if (cells.size() < 2) throw ParseError(source, i + 1, "header needs at least one window column");
      for (std::size_t c = 1; c < cells.size(); ++c) {
        const auto h = cells[c];
        const auto sp = h.find_first_of(" s");
        double w = 0.0;
        if (!text::parse_double(h.substr(0, sp), w) || !(w > 0.0)) {
          throw ParseError(source, i + 1, fmt::format("cannot read window size from heading '{}'", h));
        }
        t.windows_s.push_back(w);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != t.windows_s.size() + 1) {
      throw ParseError(source, i + 1,
                       fmt::format("expected {} cells, found {}", t.windows_s.size() + 1, cells.size()));
    }
    AucRow row;
    row.title = std::string(cells[0]);
    row.experiment = parse_experiment(row.title);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const auto cell = cells[c];
      if (cell == "-" || cell.empty()) {
        row.cells.emplace_back();
        continue;
      }
      const auto open = cell.find('(');
      const auto close = cell.find(')');
      MeanStd ms;
      if (open == std::string_view::npos || close == std::string_view::npos || close < open ||
          !text::parse_double(cell.substr(0, open), ms.mean) ||
          !text::parse_double(cell.substr(open + 1, close - open - 1), ms.std)) {
        throw ParseError(source, i + 1, fmt::format("malformed cell '{}' (expected 'mean (std)')", cell));
      }
      row.cells.push_back(ms);
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError(source, 1, "empty table");
  if (t.rows.empty()) throw ParseError(source, lines.size(), "table has no rows");
  return t;
}

StatsReport compute_stats(const AucTable& table, int n, double alpha) {
  StatsReport r;
  r.alpha = alpha;
  r.n = n;
  r.windows_s = table.windows_s;
  const AucRow* start = nullptr;
  const AucRow* cont = nullptr;
  for (const auto& row : table.rows) {
    r.titles.push_back(row.title);
    std::vector<std::optional<stats::TTestResult>> tests;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t w = 0; w < row.cells.size(); ++w) {
      const auto& c = row.cells[w];
      if (!c) {
        tests.emplace_back();
        continue;
      }
      // A single repetition or a zero-variance cell has no spread to test against.
      if (n >= 2 && c->std > 0.0) {
        tests.push_back(stats::t_test_vs_random(c->mean, c->std, n, alpha));
      } else {
        tests.emplace_back();
      }
      xs.push_back(table.windows_s[w]);
      ys.push_back(c->mean);
    }
    r.vs_random.push_back(std::move(tests));
    RegressionRow reg{row.title, std::nullopt};
    const bool distinct = xs.size() >= 2 && std::adjacent_find(xs.begin(), xs.end(), std::not_equal_to<>()) != xs.end();
    if (distinct) reg.fit = stats::linregress(xs, ys);
    r.regressions.push_back(std::move(reg));
    if (row.experiment == Experiment::UnsuccessfulStart) start = &row;
    if (row.experiment == Experiment::UnsuccessfulContinue) cont = &row;
  }
  if (start && cont && n >= 2) {
    r.welch_first = start->title;
    r.welch_second = cont->title;
    for (std::size_t w = 0; w < table.windows_s.size(); ++w) {
      const auto& a = start->cells[w];
      const auto& b = cont->cells[w];
      if (!a || !b || !(a->std > 0.0) || !(b->std > 0.0)) continue;
      WelchRow wr;
      wr.window_s = table.windows_s[w];
      const auto raw = stats::welch_t_test(a->mean, a->std, n, b->mean, b->std, n, stats::Alternative::Greater, alpha);
      // One-sided in the direction of the observed difference.
      wr.one_sided = raw.t_statistic >= 0.0
                         ? raw
                         : stats::welch_t_test(b->mean, b->std, n, a->mean, a->std, n, stats::Alternative::Greater, alpha);
      wr.two_sided = stats::welch_t_test(a->mean, a->std, n, b->mean, b->std, n, stats::Alternative::TwoSided, alpha);
      r.welch.push_back(wr);
    }
  }
  return r;
}

std::string format_p(double p) {
  if (p < 1e-4) return fmt::format("{:.3e}", p);
  return fmt::format("{:.4f}", p);
}

std::string format_pvalue_table(const StatsReport& r) {
  std::vector<std::string> headings;
  for (double w : r.windows_s) headings.push_back(window_heading(w));
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < r.titles.size(); ++i) {
    std::vector<std::string> cells{r.titles[i]};
    for (const auto& t : r.vs_random[i]) {
      cells.push_back(t ? format_p(t->p_value) + (t->significant ? " (sig)" : " (n.s.)") : "-");
    }
    rows.push_back(std::move(cells));
  }
  return format_table("p-values", headings, rows) +
         fmt::format("# one-sided t-test against chance (mean 0.5, same std, n={}); sig: p < {}\n", r.n,
                     format_p(r.alpha));
}

std::string format_regression_table(const StatsReport& r) {
  const std::vector<std::string> headings{"Slope", "R^2"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& reg : r.regressions) {
    if (reg.fit) {
      rows.push_back({reg.title, fmt::format("{:.4f}", reg.fit->slope), fmt::format("{:.3g}", reg.fit->r_squared)});
    } else {
      rows.push_back({reg.title, "-", "-"});
    }
  }
  return format_table("", headings, rows);
}

std::string format_welch_table(const StatsReport& r) {
  if (r.welch.empty()) return "# Welch comparison needs both the start and continue rows\n";
  const std::vector<std::string> headings{"t", "df", "p (one-sided)", "p (two-sided)"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& w : r.welch) {
    rows.push_back({window_heading(w.window_s), fmt::format("{:.3f}", w.two_sided.t_statistic),
                    fmt::format("{:.2f}", w.two_sided.degrees_of_freedom), format_p(w.one_sided.p_value),
                    format_p(w.two_sided.p_value)});
  }
  return fmt::format("# Welch t-test: {} vs {}\n", r.welch_first, r.welch_second) +
         format_table("window", headings, rows);
}

std::string format_stats_csv(const StatsReport& r) {
  std::string out = "kind,row,window_s,statistic,df,p,log10_p,significant\n";
  for (std::size_t i = 0; i < r.titles.size(); ++i) {
    for (std::size_t w = 0; w < r.windows_s.size(); ++w) {
      const auto& t = r.vs_random[i][w];
      if (!t) continue;
      fmt::format_to(std::back_inserter(out), "ttest_vs_chance,{},{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n",
                     r.titles[i], r.windows_s[w], t->t_statistic, t->degrees_of_freedom, t->p_value, t->log10_p,
                     t->significant ? 1 : 0);
    }
  }
  for (const auto& reg : r.regressions) {
    if (!reg.fit) continue;
    fmt::format_to(std::back_inserter(out), "regression,{},,{:.17g},,{:.17g},,\n", reg.title, reg.fit->slope,
                   reg.fit->r_squared);
  }
  for (const auto& w : r.welch) {
    fmt::format_to(std::back_inserter(out), "welch_one_sided,{} vs {},{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n",
                   r.welch_first, r.welch_second, w.window_s, w.one_sided.t_statistic,
                   w.one_sided.degrees_of_freedom, w.one_sided.p_value, w.one_sided.log10_p,
                   w.one_sided.significant ? 1 : 0);
    fmt::format_to(std::back_inserter(out), "welch_two_sided,{} vs {},{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n",
                   r.welch_first, r.welch_second, w.window_s, w.two_sided.t_statistic,
                   w.two_sided.degrees_of_freedom, w.two_sided.p_value, w.two_sided.log10_p,
                   w.two_sided.significant ? 1 : 0);
  }
  return out;
}

std::string format_raw_aucs(std::span<const ExperimentResult> results) {
  std::string out = "experiment,window_s,rep,auc\n";
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.auc_values.size(); ++i) {
      fmt::format_to(std::back_inserter(out), "{},{},{},{:.17g}\n", experiment_key(r.experiment), r.window_s, i,
                     r.auc_values[i]);
    }
  }
  return out;
}

}  // namespace intent::report
