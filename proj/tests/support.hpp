#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "intent/vad.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(INTENT_FIXTURE_DIR) / name;
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("intent_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline intent::VadTrack track(std::vector<std::uint8_t> frames, double rate = 1.0, double t0 = 0.0) {
  intent::VadTrack t;
  t.participant_id = "p";
  t.rate_hz = rate;
  t.t0_s = t0;
  t.frames = std::move(frames);
  return t;
}

/// O(P*N) concordance: ties count one half.
inline double brute_force_auc(std::span<const double> scores, std::span<const int> labels) {
  double num = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) num += 1.0;
      else if (scores[i] == scores[j]) num += 0.5;
    }
  }
  return num / pairs;
}

/// log of the Student t density.
inline double t_log_pdf(double t, double df) {
  return std::lgamma((df + 1) / 2) - std::lgamma(df / 2) - 0.5 * std::log(df * M_PI) -
         (df + 1) / 2 * std::log1p(t * t / df);
}

/// Upper tail P(T > t) by composite Simpson integration of the density,
/// substituting t = t0 + u/(1-u) to map the tail onto [0, 1). Valid for
/// moderate tails (p > ~1e-300).
inline double t_sf_simpson(double t0, double df, int n = 200000) {
  auto f = [&](double u) {
    if (u >= 1.0) return df == 1.0 ? 1.0 / M_PI : 0.0;  // limit of pdf(t) t^2
    const double t = t0 + u / (1.0 - u);
    const double jac = 1.0 / ((1.0 - u) * (1.0 - u));
    return std::exp(t_log_pdf(t, df)) * jac;
  };
  const double h = 1.0 / n;
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < n; ++i) s += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Leading terms of the asymptotic tail: sf ~ pdf(t) (df + t^2) / ((df + 1) t) * (1 - ...).
inline double t_sf_asymptotic_log10(double t, double df) {
  const double lead = t_log_pdf(t, df) + std::log((df + t * t) / ((df + 1) * t));
  return lead / std::log(10.0);
}

}  // namespace testing
