#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "intent/intervals.hpp"

namespace intent {

inline constexpr std::size_t kAxes = 3;
using Sample3 = std::array<double, kAxes>;

/// Three-axis accelerometer stream for one participant (m/s^2).
struct AccelSeries {
  std::string participant_id;
  double rate_hz = 20.0;
  double t0_s = 0.0;
  std::vector<double> times_s;  // strictly increasing
  std::vector<Sample3> samples;

  std::size_t size() const { return samples.size(); }
  /// [first timestamp, last timestamp + one period).
  Interval extent() const;
};

/// Axis-major 3 x N window ready for the classifier.
struct WindowTensor {
  std::size_t length = 0;
  std::vector<double> values;  // values[axis * length + t]
  int label = 0;
  std::string participant_id;
  Interval span;

  double at(std::size_t axis, std::size_t t) const { return values[axis * length + t]; }
  double& at(std::size_t axis, std::size_t t) { return values[axis * length + t]; }
};

struct AxisStats {
  Sample3 mean{0.0, 0.0, 0.0};
  Sample3 std{1.0, 1.0, 1.0};
};

AccelSeries parse_accel(std::string_view text, const std::string& source = "<accel>");
AccelSeries load_accel(const std::filesystem::path& path);
std::string format_accel(const AccelSeries& series);
void save_accel(const AccelSeries& series, const std::filesystem::path& path);

inline constexpr double kDefaultMaxGap_s = 0.25;

/// N = round(window_s * rate_hz).
std::size_t window_samples(double window_s, double rate_hz);

enum class SliceStatus { Ok, OutOfRange, GapTooLarge };

struct SliceResult {
  SliceStatus status = SliceStatus::Ok;
  std::optional<WindowTensor> tensor;
};

/// Samples [start_s, end_s) on the series grid, linearly interpolating across
/// gaps no wider than max_gap_s. Never throws for data reasons.
SliceResult try_slice_window(const AccelSeries& series, double start_s, double end_s,
                             double max_gap_s = kDefaultMaxGap_s);

/// Throwing variant of try_slice_window.
WindowTensor slice_window(const AccelSeries& series, double start_s, double end_s,
                          double max_gap_s = kDefaultMaxGap_s);

/// Per-axis mean and sample std over the samples whose timestamps fall inside
/// `region` but not inside `excluded`.
AxisStats compute_axis_stats(const AccelSeries& series, const Interval& region,
                             const Interval& excluded = {});

/// Per-axis z-score; axes with non-positive std are only mean-centred.
WindowTensor normalize(const WindowTensor& tensor, const AxisStats& stats);
WindowTensor denormalize(const WindowTensor& tensor, const AxisStats& stats);

}  // namespace intent
