#include <doctest.h>

#include <cmath>

#include "intent/error.hpp"
#include "intent/eval.hpp"
#include "intent/rng.hpp"
#include "support.hpp"

using namespace intent;

namespace {

double auc(std::vector<double> pos, std::vector<double> neg) {
  std::vector<double> s = pos;
  s.insert(s.end(), neg.begin(), neg.end());
  std::vector<int> l(pos.size(), 1);
  l.resize(s.size(), 0);
  return roc_auc(s, l);
}

WindowTensor window(double v, int label) {
  WindowTensor w;
  w.length = 4;
  w.values.assign(12, v);
  w.label = label;
  return w;
}

Ensemble constant_ensemble() {
  auto net = init_model(1, 2);
  for (auto& v : net.group_params("head.weight")) v = 0.0;
  Ensemble e;
  e.members = {net};
  return e;
}

}  // namespace

TEST_CASE("AUC examples") {
  CHECK(auc({0.9, 0.8}, {0.2, 0.1}) == 1.0);
  CHECK(auc({0.3, 0.3}, {0.3, 0.3, 0.3}) == 0.5);
  CHECK(auc({0.9, 0.4}, {0.6, 0.1}) == 0.75);
  CHECK(auc({0.1}, {0.9}) == 0.0);
  std::vector<double> s{0.1, 0.2};
  std::vector<int> one_class{1, 1};
  CHECK_THROWS_AS(roc_auc(s, one_class), Error);
  std::vector<int> short_labels{1};
  CHECK_THROWS_AS(roc_auc(s, short_labels), Error);
}

TEST_CASE("AUC matches the pairwise oracle and its invariances") {
  Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(199);
    std::vector<double> s(n);
    std::vector<int> l(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.below(12)) / 4.0;  // coarse grid: many ties
      l[i] = rng.bernoulli(0.4) ? 1 : 0;
    }
    l[0] = 1;
    l[1] = 0;
    const double a = roc_auc(s, l);
    CHECK(std::abs(a - testing::brute_force_auc(s, l)) < 1e-12);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = std::exp(3.0 * s[i]) - 7.0;
    CHECK(std::abs(roc_auc(t, l) - a) < 1e-12);
    std::vector<int> flipped(n);
    for (std::size_t i = 0; i < n; ++i) flipped[i] = 1 - l[i];
    CHECK(std::abs(roc_auc(s, flipped) + a - 1.0) < 1e-12);
  }
}

TEST_CASE("summaries use the n-1 convention") {
  ExperimentResult r;
  r.auc_values = {0.5, 0.6, 0.7};
  summarize(r);
  CHECK(r.mean == doctest::Approx(0.6));
  CHECK(r.std == doctest::Approx(0.1));
}

TEST_CASE("constant scores give chance on every repetition") {
  std::vector<WindowTensor> pos{window(1, 1), window(2, 1)};
  std::size_t calls = 0;
  auto draw = [&](std::size_t) {
    ++calls;
    return std::vector<WindowTensor>{window(0, 0), window(-1, 0), window(3, 0)};
  };
  const auto r = run_experiment(Experiment::Successful, 1.0, constant_ensemble(), pos, draw, 10);
  CHECK(calls == 10);
  REQUIRE(r.auc_values.size() == 10);
  for (double a : r.auc_values) CHECK(a == 0.5);
  CHECK(r.mean == 0.5);
  CHECK(r.std == 0.0);
  CHECK_THROWS_WITH_AS(run_experiment(Experiment::Successful, 1.0, constant_ensemble(), {}, draw, 2),
                       doctest::Contains("no test positives"), Error);
}

TEST_CASE("repetitions see their own draws, deterministically") {
  auto net = init_model(3, 4);
  Ensemble e;
  e.members = {net};
  std::vector<WindowTensor> pos{window(0.5, 1), window(-0.2, 1), window(0.1, 1)};
  auto draw = [](std::size_t rep) {
    Rng rng(rep);
    std::vector<WindowTensor> out;
    for (int i = 0; i < 3; ++i) out.push_back(window(rng.normal(), 0));
    return out;
  };
  const auto a = run_experiment(Experiment::All, 2.0, e, pos, draw, 5);
  const auto b = run_experiment(Experiment::All, 2.0, e, pos, draw, 5);
  CHECK(a.auc_values == b.auc_values);
  CHECK(a.window_s == 2.0);
  CHECK(a.experiment == Experiment::All);
}

TEST_CASE("hold-out boundaries") {
  const Interval test{3600, 4200};
  CHECK(classify_window({3599, 3600}, test) == Split::Train);
  CHECK(classify_window({3600, 3601}, test) == Split::Test);
  CHECK(classify_window({3599.5, 3600.5}, test) == Split::Excluded);
  CHECK(classify_window({4199, 4200}, test) == Split::Test);
  CHECK(classify_window({4200, 4201}, test) == Split::Train);
  CHECK(classify_window({4199.5, 4200.5}, test) == Split::Excluded);

  std::vector<CaseWindow> ws{{"p", {10, 11}, CaseLabel::Successful},
                             {"p", {3600, 3601}, CaseLabel::Successful},
                             {"p", {3599.5, 3600.5}, CaseLabel::Successful}};
  const auto split = holdout_split(ws, test);
  CHECK(split.train.size() == 1);
  CHECK(split.test.size() == 1);
  std::vector<CaseWindow> only_train{ws[0]};
  CHECK_THROWS_AS(holdout_split(only_train, test), Error);
}
