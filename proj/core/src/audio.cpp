#include "intent/audio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <numbers>

#include <fmt/format.h>

#include "intent/error.hpp"
#include "intent/text_io.hpp"

namespace intent::audio {

namespace {

constexpr double kPi = std::numbers::pi;

void check_cutoff(double cutoff_hz, double rate_hz) {
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < rate_hz / 2.0)) {
    throw Error(ErrorKind::Config,
                fmt::format("cutoff {} Hz must lie strictly between 0 and half the sample rate ({} Hz)", cutoff_hz,
                            rate_hz / 2.0));
  }
}

std::uint32_t read_u32(std::span<const unsigned char> b, std::size_t pos) {
  return static_cast<std::uint32_t>(b[pos]) | static_cast<std::uint32_t>(b[pos + 1]) << 8 |
         static_cast<std::uint32_t>(b[pos + 2]) << 16 | static_cast<std::uint32_t>(b[pos + 3]) << 24;
}

std::uint16_t read_u16(std::span<const unsigned char> b, std::size_t pos) {
  return static_cast<std::uint16_t>(b[pos] | b[pos + 1] << 8);
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

}  // namespace

Biquad Biquad::high_pass(double cutoff_hz, double sample_rate_hz, double q) {
  // RBJ cookbook high-pass; the bilinear prewarp puts the analog corner at cutoff.
  const double w0 = 2.0 * kPi * cutoff_hz / sample_rate_hz;
  const double cw = std::cos(w0);
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad s;
  s.b0 = (1.0 + cw) / 2.0 / a0;
  s.b1 = -(1.0 + cw) / a0;
  s.b2 = (1.0 + cw) / 2.0 / a0;
  s.a1 = -2.0 * cw / a0;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

double Biquad::magnitude(double f_hz, double sample_rate_hz) const {
  const std::complex<double> z1 = std::polar(1.0, -2.0 * kPi * f_hz / sample_rate_hz);
  const std::complex<double> z2 = z1 * z1;
  return std::abs((b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2));
}

std::vector<Biquad> butterworth_high_pass(double cutoff_hz, double sample_rate_hz) {
  check_cutoff(cutoff_hz, sample_rate_hz);
  // Pole-pair quality factors of a 4th-order Butterworth: 1 / (2 sin((2k+1) pi / 8)).
  std::vector<Biquad> sections;
  for (int k = 0; k < 2; ++k) {
    const double q = 1.0 / (2.0 * std::sin((2.0 * k + 1.0) * kPi / 8.0));
    sections.push_back(Biquad::high_pass(cutoff_hz, sample_rate_hz, q));
  }
  return sections;
}

double butterworth_high_pass_gain(double f_hz, double cutoff_hz, double sample_rate_hz) {
  if (f_hz <= 0.0) return 0.0;
  const double ratio = std::tan(kPi * cutoff_hz / sample_rate_hz) / std::tan(kPi * f_hz / sample_rate_hz);
  return 1.0 / std::sqrt(1.0 + std::pow(ratio, 8.0));
}

AudioClip high_pass(const AudioClip& clip, double cutoff_hz) {
  const auto sections = butterworth_high_pass(cutoff_hz, clip.sample_rate_hz);
  AudioClip out = clip;
  for (const auto& s : sections) {
    double z1 = 0.0;
    double z2 = 0.0;
    for (auto& x : out.samples) {
      const double y = s.b0 * x + z1;
      z1 = s.b1 * x - s.a1 * y + z2;
      z2 = s.b2 * x - s.a2 * y;
      x = y;
    }
  }
  return out;
}

AudioClip amplify(const AudioClip& clip, double gain) {
  if (!(gain > 0.0)) throw Error(ErrorKind::Config, "gain must be positive");
  AudioClip out = clip;
  for (auto& x : out.samples) x = std::clamp(x * gain, -1.0, 1.0);
  return out;
}

std::size_t clipped_count(const AudioClip& clip) {
  return static_cast<std::size_t>(
      std::count_if(clip.samples.begin(), clip.samples.end(), [](double x) { return std::abs(x) >= 1.0; }));
}

double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

double tone_power(std::span<const double> x, double f_hz, double sample_rate_hz) {
  if (x.empty()) return 0.0;
  const double w = 2.0 * kPi * f_hz / sample_rate_hz;
  const double coeff = 2.0 * std::cos(w);
  double s1 = 0.0;
  double s2 = 0.0;
  for (double v : x) {
    const double s0 = v + coeff * s1 - s2;
    s2 = s1;
    s1 = s0;
  }
  const double power = s1 * s1 + s2 * s2 - coeff * s1 * s2;
  const double n = static_cast<double>(x.size());
  return power / (n * n);
}

AudioClip parse_wav(std::span<const unsigned char> b, const std::string& source) {
  auto fail = [&](const std::string& msg) { return ParseError(source, 0, "unsupported WAV: " + msg); };
  if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 || std::memcmp(b.data() + 8, "WAVE", 4) != 0) {
    throw fail("missing RIFF/WAVE header");
  }
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const auto id = std::string(reinterpret_cast<const char*>(b.data() + pos), 4);
    const std::uint32_t size = read_u32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > b.size()) throw fail("truncated chunk '" + id + "'");
    if (id == "fmt ") {
      if (size < 16) throw fail("short fmt chunk");
      format = read_u16(b, body);
      channels = read_u16(b, body + 2);
      rate = read_u32(b, body + 4);
      bits = read_u16(b, body + 14);
      if (format == 0xFFFE && size >= 26) format = read_u16(b, body + 24);  // WAVE_FORMAT_EXTENSIBLE
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw fail("data chunk before fmt chunk");
      if (channels == 0 || rate == 0) throw fail("zero channels or rate");
      const bool pcm16 = format == 1 && bits == 16;
      const bool f32 = format == 3 && bits == 32;
      if (!pcm16 && !f32) throw fail(fmt::format("format {} with {} bits", format, bits));
      const std::size_t frame_bytes = static_cast<std::size_t>(channels) * (bits / 8);
      const std::size_t frames = size / frame_bytes;
      AudioClip clip;
      clip.sample_rate_hz = rate;
      clip.samples.resize(frames);
      for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
          const std::size_t at = body + f * frame_bytes + c * (bits / 8);
          if (pcm16) {
            acc += static_cast<std::int16_t>(read_u16(b, at)) / 32768.0;
          } else {
            acc += std::bit_cast<float>(read_u32(b, at));
          }
        }
        clip.samples[f] = acc / channels;
      }
      return clip;
    }
    pos = body + size + (size & 1u);
  }
  throw fail("no data chunk");
}

AudioClip read_wav(const std::filesystem::path& path) {
  const auto s = text::read_file(path);
  return parse_wav(std::span(reinterpret_cast<const unsigned char*>(s.data()), s.size()), path.string());
}

std::vector<unsigned char> encode_wav(const AudioClip& clip, WavFormat format) {
  const bool pcm16 = format == WavFormat::Pcm16;
  const std::uint16_t bits = pcm16 ? 16 : 32;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(clip.samples.size() * (bits / 8));
  const auto rate = static_cast<std::uint32_t>(std::lround(clip.sample_rate_hz));
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, pcm16 ? 1 : 3);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * (bits / 8));
  put_u16(out, bits / 8);
  put_u16(out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_bytes);
  for (double x : clip.samples) {
    if (pcm16) {
      // Same 1/32768 scale as the decoder, so decode(encode(x)) is exact on the grid.
      const double scaled = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    } else {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
    }
  }
  return out;
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path, WavFormat format) {
  const auto bytes = encode_wav(clip, format);
  text::write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

ClipSummary process_clip(const std::filesystem::path& in, const std::filesystem::path& out, double cutoff_hz,
                         double gain) {
  const auto clip = read_wav(in);
  const auto filtered = high_pass(clip, cutoff_hz);
  const auto amplified = amplify(filtered, gain);
  write_wav(amplified, out);
  return {rms(clip.samples), rms(amplified.samples), clipped_count(amplified), clip.samples.size()};
}

}  // namespace intent::audio
