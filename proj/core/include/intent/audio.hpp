#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace intent::audio {

struct AudioClip {
  double sample_rate_hz = 44100.0;
  std::vector<double> samples;  // mono, nominally in [-1, 1]
};

/// Direct form II transposed second-order section, a0 normalized to 1.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;

  /// High-pass section with the given quality factor (bilinear transform, prewarped).
  static Biquad high_pass(double cutoff_hz, double sample_rate_hz, double q);
  /// |H(e^{jw})| at frequency f.
  double magnitude(double f_hz, double sample_rate_hz) const;
};

/// Maximally flat 4th-order high-pass as two cascaded sections.
std::vector<Biquad> butterworth_high_pass(double cutoff_hz, double sample_rate_hz);

/// Analytic magnitude of the digital 4th-order Butterworth high-pass.
double butterworth_high_pass_gain(double f_hz, double cutoff_hz, double sample_rate_hz);

/// Zero-initial-state causal filtering; throws Error(Config) unless 0 < cutoff < rate/2.
AudioClip high_pass(const AudioClip& clip, double cutoff_hz);

/// Multiplies by `gain` and hard-clips to [-1, 1].
AudioClip amplify(const AudioClip& clip, double gain = 20.0);

/// Count of samples sitting at +-1 after amplification.
std::size_t clipped_count(const AudioClip& clip);

double rms(std::span<const double> x);

/// Power of the component at `f_hz` (Goertzel), normalized by length.
double tone_power(std::span<const double> x, double f_hz, double sample_rate_hz);

/// PCM 16-bit or 32-bit float RIFF WAVE; multichannel input is averaged to mono.
AudioClip read_wav(const std::filesystem::path& path);
AudioClip parse_wav(std::span<const unsigned char> bytes, const std::string& source = "<wav>");

enum class WavFormat { Pcm16, Float32 };
void write_wav(const AudioClip& clip, const std::filesystem::path& path, WavFormat format = WavFormat::Pcm16);
std::vector<unsigned char> encode_wav(const AudioClip& clip, WavFormat format = WavFormat::Pcm16);

struct ClipSummary {
  double pre_rms = 0.0;
  double post_rms = 0.0;
  std::size_t clipped = 0;
  std::size_t samples = 0;
};

/// read -> high_pass -> amplify -> write.
ClipSummary process_clip(const std::filesystem::path& in, const std::filesystem::path& out, double cutoff_hz,
                         double gain);

}  // namespace intent::audio
