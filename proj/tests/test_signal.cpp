#include <doctest.h>

#include <cmath>

#include "intent/error.hpp"
#include "intent/rng.hpp"
#include "intent/signal.hpp"

using namespace intent;

namespace {

AccelSeries series(std::size_t n, double rate, auto&& value) {
  AccelSeries s;
  s.participant_id = "p";
  s.rate_hz = rate;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    s.times_s.push_back(t);
    s.samples.push_back(value(t));
  }
  return s;
}

}  // namespace

TEST_CASE("parse accelerometer files") {
  const auto s = parse_accel("# participant=P01 rate_hz=20 t0_s=0\n0.0,0,0,9.81\n0.05,0,0,9.81\n0.10,0.1,0,9.8\n");
  CHECK(s.size() == 3);
  CHECK(s.participant_id == "P01");
  CHECK(s.samples[2][0] == 0.1);
  CHECK(s.extent().end == doctest::Approx(0.15));
  CHECK_THROWS_WITH_AS(parse_accel("# participant=P rate_hz=20 t0_s=0\n0.0,NaN,0,1\n"),
                       doctest::Contains("non-finite sample"), ParseError);
  CHECK_THROWS_WITH_AS(parse_accel("# participant=P rate_hz=20 t0_s=0\n0.1,0,0,1\n0.05,0,0,1\n"),
                       doctest::Contains("non-monotonic"), ParseError);
  CHECK_THROWS_WITH_AS(parse_accel("# participant=P rate_hz=20 t0_s=0\n0,0,0,1\n0.1,0,0,1\n0.2,0,0,1\n"),
                       doctest::Contains("rate mismatch"), ParseError);
  CHECK_THROWS_AS(parse_accel("# participant=P rate_hz=20 t0_s=0\n0,0,0\n"), ParseError);
  CHECK_THROWS_AS(parse_accel("# participant=P rate_hz=20 t0_s=0\n"), ParseError);
}

TEST_CASE("format round trip") {
  const auto s = series(40, 20.0, [](double t) { return Sample3{std::sin(t), 0.5, 9.81}; });
  const auto back = parse_accel(format_accel(s));
  REQUIRE(back.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(back.samples[i][0] == doctest::Approx(s.samples[i][0]).epsilon(1e-4));
    CHECK(back.times_s[i] == doctest::Approx(s.times_s[i]));
  }
}

TEST_CASE("slicing") {
  const auto s = series(200, 20.0, [](double) { return Sample3{0.0, 0.0, 9.81}; });
  const auto w = slice_window(s, 2.0, 3.0);
  CHECK(w.length == 20);
  CHECK(window_samples(1.0, 20.0) == 20);
  for (std::size_t t = 0; t < w.length; ++t) {
    CHECK(w.at(0, t) == 0.0);
    CHECK(w.at(2, t) == 9.81);
  }
  CHECK(try_slice_window(s, 9.5, 10.5).status == SliceStatus::OutOfRange);
  CHECK(try_slice_window(s, -0.5, 0.5).status == SliceStatus::OutOfRange);
  CHECK_THROWS_WITH_AS(slice_window(s, 9.5, 10.5), doctest::Contains("out of range"), Error);
  CHECK(try_slice_window(s, 9.0, 10.0).status == SliceStatus::Ok);
}

TEST_CASE("short gaps are interpolated, long gaps reject the window") {
  auto s = series(40, 20.0, [](double t) { return Sample3{t, 2.0 * t, 1.0}; });
  // Remove the sample at 0.5 s.
  s.times_s.erase(s.times_s.begin() + 10);
  s.samples.erase(s.samples.begin() + 10);
  const auto w = slice_window(s, 0.25, 0.75);
  REQUIRE(w.length == 10);
  CHECK(w.at(0, 5) == doctest::Approx(0.5));
  CHECK(w.at(1, 5) == doctest::Approx(1.0));
  CHECK(w.at(2, 5) == doctest::Approx(1.0));

  auto gappy = series(60, 20.0, [](double t) { return Sample3{t, 0, 0}; });
  gappy.times_s.erase(gappy.times_s.begin() + 10, gappy.times_s.begin() + 20);
  gappy.samples.erase(gappy.samples.begin() + 10, gappy.samples.begin() + 20);
  CHECK(try_slice_window(gappy, 0.25, 1.25).status == SliceStatus::GapTooLarge);
  CHECK(try_slice_window(gappy, 1.5, 2.5).status == SliceStatus::Ok);
}

TEST_CASE("normalization") {
  WindowTensor w;
  w.length = 2;
  w.values = {1, 3, 5, 5, -2, 2};
  AxisStats identity;
  CHECK(normalize(w, identity).values == w.values);

  AxisStats st;
  st.mean = {2.0, 5.0, 0.0};
  st.std = {1.0, 0.0, 2.0};
  const auto n = normalize(w, st);
  CHECK(n.values == std::vector<double>{-1, 1, 0, 0, -1, 1});

  Rng rng(4);
  WindowTensor r;
  r.length = 50;
  for (int i = 0; i < 150; ++i) r.values.push_back(rng.normal() * 3 + 7);
  AxisStats rs;
  rs.mean = {7, -1, 0.3};
  rs.std = {3, 0.5, 11};
  const auto back = denormalize(normalize(r, rs), rs);
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    CHECK(back.values[i] == doctest::Approx(r.values[i]).epsilon(1e-9));
  }
}

TEST_CASE("axis statistics skip the excluded interval") {
  const auto s = series(200, 10.0, [](double t) { return Sample3{t < 10.0 ? 1.0 : 100.0, t < 10.0 ? (t < 5.0 ? 0.0 : 2.0) : 0.0, 3.0}; });
  const auto st = compute_axis_stats(s, s.extent(), {10.0, 20.0});
  CHECK(st.mean[0] == doctest::Approx(1.0));
  CHECK(st.mean[1] == doctest::Approx(1.0));
  CHECK(st.std[0] == doctest::Approx(0.0));
  CHECK(st.std[1] == doctest::Approx(std::sqrt(100.0 / 99.0)));
  CHECK(st.mean[2] == doctest::Approx(3.0));
}
