#include "intent/signal.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "intent/error.hpp"
#include "intent/text_io.hpp"

namespace intent {

namespace {

constexpr double kTimeTol = 1e-6;

double effective_std(double s) { return s > 0.0 && std::isfinite(s) ? s : 1.0; }

}  // namespace

Interval AccelSeries::extent() const {
  if (times_s.empty()) return {t0_s, t0_s};
  return {times_s.front(), times_s.back() + 1.0 / rate_hz};
}

AccelSeries parse_accel(std::string_view text, const std::string& source) {
  const auto lines = text::split_lines(text);
  if (lines.empty() || text::trim(lines.front()).empty()) throw ParseError(source, 1, "empty file");
  std::map<std::string, std::string> hdr;
  if (!text::parse_header(lines.front(), hdr) || !hdr.contains("rate_hz")) {
    throw ParseError(source, 1, "malformed header (expected '# participant=<id> rate_hz=<f> t0_s=<f>')");
  }
  AccelSeries s;
  s.participant_id = hdr.contains("participant") ? hdr["participant"] : std::string{};
  if (!text::parse_double(hdr["rate_hz"], s.rate_hz) || !(s.rate_hz > 0.0) || !std::isfinite(s.rate_hz)) {
    throw ParseError(source, 1, "malformed header: rate_hz must be a positive number");
  }
  if (hdr.contains("t0_s") && (!text::parse_double(hdr["t0_s"], s.t0_s) || !std::isfinite(s.t0_s))) {
    throw ParseError(source, 1, "malformed header: bad t0_s");
  }
  s.times_s.reserve(lines.size());
  s.samples.reserve(lines.size());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto body = text::trim(lines[i]);
    if (body.empty() || body.front() == '#') continue;
    const auto f = text::split(body, ',');
    if (f.size() != 4) throw ParseError(source, i + 1, "expected 't_s,ax,ay,az'");
    double v[4];
    for (std::size_t k = 0; k < 4; ++k) {
      const auto tok = text::trim(f[k]);
      if (!text::parse_double(tok, v[k])) {
        // from_chars accepts "nan"/"inf" spellings too; anything else is garbage.
        throw ParseError(source, i + 1, fmt::format("unparseable value '{}'", tok));
      }
      if (!std::isfinite(v[k])) throw ParseError(source, i + 1, "non-finite sample");
    }
    if (!s.times_s.empty() && !(v[0] > s.times_s.back())) {
      throw ParseError(source, i + 1, "non-monotonic timestamps");
    }
    s.times_s.push_back(v[0]);
    s.samples.push_back({v[1], v[2], v[3]});
  }
  if (s.samples.empty()) throw ParseError(source, lines.size(), "empty series");
  if (s.samples.size() >= 2) {
    std::vector<double> dt(s.samples.size() - 1);
    for (std::size_t i = 1; i < s.times_s.size(); ++i) dt[i - 1] = s.times_s[i] - s.times_s[i - 1];
    auto mid = dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2);
    std::nth_element(dt.begin(), mid, dt.end());
    const double observed = 1.0 / *mid;
    if (std::abs(observed - s.rate_hz) > 0.01 * s.rate_hz) {
      throw ParseError(source, 1,
                       fmt::format("rate mismatch: header {} Hz, timestamps {:.4f} Hz", s.rate_hz, observed));
    }
  }
  return s;
}

AccelSeries load_accel(const std::filesystem::path& path) {
  return parse_accel(text::read_file(path), path.string());
}

std::string format_accel(const AccelSeries& series) {
  std::string out = fmt::format("# participant={} rate_hz={} t0_s={}\n", series.participant_id,
                                text::format_double(series.rate_hz), text::format_double(series.t0_s));
  out.reserve(out.size() + series.size() * 36);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& a = series.samples[i];
    fmt::format_to(std::back_inserter(out), "{:.4f},{:.5f},{:.5f},{:.5f}\n", series.times_s[i], a[0], a[1],
                   a[2]);
  }
  return out;
}

void save_accel(const AccelSeries& series, const std::filesystem::path& path) {
  text::write_file(path, format_accel(series));
}

std::size_t window_samples(double window_s, double rate_hz) {
  return static_cast<std::size_t>(std::llround(window_s * rate_hz));
}

SliceResult try_slice_window(const AccelSeries& series, double start_s, double end_s, double max_gap_s) {
  const std::size_t n = window_samples(end_s - start_s, series.rate_hz);
  if (n == 0 || series.samples.empty()) return {SliceStatus::OutOfRange, std::nullopt};
  const double period = 1.0 / series.rate_hz;
  const auto& ts = series.times_s;
  const double last_needed = start_s + static_cast<double>(n - 1) * period;
  if (start_s < ts.front() - kTimeTol || last_needed > ts.back() + kTimeTol) {
    return {SliceStatus::OutOfRange, std::nullopt};
  }
  WindowTensor w;
  w.length = n;
  w.values.assign(kAxes * n, 0.0);
  w.participant_id = series.participant_id;
  w.span = {start_s, end_s};
  // Walk the grid with a moving cursor; timestamps are sorted.
  auto it = std::lower_bound(ts.begin(), ts.end(), start_s - kTimeTol);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = start_s + static_cast<double>(k) * period;
    while (it != ts.end() && *it < t - kTimeTol) ++it;
    if (it == ts.end()) return {SliceStatus::OutOfRange, std::nullopt};
    const auto hi = static_cast<std::size_t>(it - ts.begin());
    if (std::abs(*it - t) <= kTimeTol) {
      for (std::size_t a = 0; a < kAxes; ++a) w.at(a, k) = series.samples[hi][a];
      continue;
    }
    if (hi == 0) return {SliceStatus::OutOfRange, std::nullopt};
    const std::size_t lo = hi - 1;
    const double gap = ts[hi] - ts[lo];
    // A gap means at least one expected sample is missing.
    if (gap - period > max_gap_s + kTimeTol) return {SliceStatus::GapTooLarge, std::nullopt};
    const double frac = (t - ts[lo]) / gap;
    for (std::size_t a = 0; a < kAxes; ++a) {
      w.at(a, k) = series.samples[lo][a] + frac * (series.samples[hi][a] - series.samples[lo][a]);
    }
  }
  return {SliceStatus::Ok, std::move(w)};
}

WindowTensor slice_window(const AccelSeries& series, double start_s, double end_s, double max_gap_s) {
  auto r = try_slice_window(series, start_s, end_s, max_gap_s);
  switch (r.status) {
    case SliceStatus::Ok: return std::move(*r.tensor);
    case SliceStatus::OutOfRange:
      throw Error(ErrorKind::Data, fmt::format("window [{}, {}) out of range for participant '{}'", start_s,
                                               end_s, series.participant_id));
    case SliceStatus::GapTooLarge:
      throw Error(ErrorKind::Data, fmt::format("window [{}, {}) spans a gap larger than {} s", start_s, end_s,
                                               max_gap_s));
  }
  throw Error(ErrorKind::Data, "unreachable slice status");
}

AxisStats compute_axis_stats(const AccelSeries& series, const Interval& region, const Interval& excluded) {
  AxisStats st;
  Sample3 sum{0, 0, 0};
  Sample3 sum2{0, 0, 0};
  std::size_t count = 0;
  // Two passes for numerical stability: mean first, then squared deviations.
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.times_s[i];
    if (!region.contains(t) || excluded.contains(t)) continue;
    for (std::size_t a = 0; a < kAxes; ++a) sum[a] += series.samples[i][a];
    ++count;
  }
  if (count == 0) return st;
  for (std::size_t a = 0; a < kAxes; ++a) st.mean[a] = sum[a] / static_cast<double>(count);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.times_s[i];
    if (!region.contains(t) || excluded.contains(t)) continue;
    for (std::size_t a = 0; a < kAxes; ++a) {
      const double d = series.samples[i][a] - st.mean[a];
      sum2[a] += d * d;
    }
  }
  for (std::size_t a = 0; a < kAxes; ++a) {
    st.std[a] = count > 1 ? std::sqrt(sum2[a] / static_cast<double>(count - 1)) : 0.0;
  }
  return st;
}

WindowTensor normalize(const WindowTensor& tensor, const AxisStats& stats) {
  WindowTensor out = tensor;
  for (std::size_t a = 0; a < kAxes; ++a) {
    const double s = effective_std(stats.std[a]);
    for (std::size_t t = 0; t < tensor.length; ++t) out.at(a, t) = (tensor.at(a, t) - stats.mean[a]) / s;
  }
  return out;
}

WindowTensor denormalize(const WindowTensor& tensor, const AxisStats& stats) {
  WindowTensor out = tensor;
  for (std::size_t a = 0; a < kAxes; ++a) {
    const double s = effective_std(stats.std[a]);
    for (std::size_t t = 0; t < tensor.length; ++t) out.at(a, t) = tensor.at(a, t) * s + stats.mean[a];
  }
  return out;
}

}  // namespace intent
