// pausekit/acoustics.hpp

// Copyright 2026  The pausekit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "pausekit/error.hpp"

namespace pausekit {

struct AudioSignal {
  std::vector<double> samples;  // amplitudes in [-1, 1]
  int sample_rate = 16000;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

struct PauseInterval {
  double start_s = 0.0;
  double end_s = 0.0;

  double duration_s() const { return end_s - start_s; }
  friend bool operator==(const PauseInterval &, const PauseInterval &) = default;
};

/// Energy-threshold detector settings.
///
/// The silence threshold is
///   min(threshold_gain * P(energy_percentile),
///       ceiling_ratio * P(ceiling_percentile))
/// over the frame RMS values. The first term tracks the noise floor. The
/// second caps it relative to the speech level so that a recording with
/// very few silent frames does not get a threshold above its speech
/// frames. Setting ceiling_ratio >= threshold_gain disables the cap.
struct VadConfig {
  double frame_len_s = 0.025;
  double hop_s = 0.010;
  double energy_percentile = 10.0;
  double threshold_gain = 2.0;
  double min_pause_s = 0.150;
  double ceiling_percentile = 90.0;
  double ceiling_ratio = 0.1;

  void validate() const {
    if (!(hop_s > 0.0 && hop_s <= frame_len_s))
      throw Error(ErrorCode::kInvalidArgument, "need 0 < hop_s <= frame_len_s");
    if (!(energy_percentile > 0.0 && energy_percentile < 100.0))
      throw Error(ErrorCode::kInvalidArgument, "energy_percentile must be in (0, 100)");
    if (!(threshold_gain >= 1.0))
      throw Error(ErrorCode::kInvalidArgument, "threshold_gain must be >= 1");
    if (!(min_pause_s > 0.0))
      throw Error(ErrorCode::kInvalidArgument, "min_pause_s must be > 0");
    if (!(ceiling_percentile > 0.0 && ceiling_percentile <= 100.0))
      throw Error(ErrorCode::kInvalidArgument, "ceiling_percentile must be in (0, 100]");
    if (!(ceiling_ratio > 0.0))
      throw Error(ErrorCode::kInvalidArgument, "ceiling_ratio must be > 0");
  }
};

struct FrameEnergy {
  double time_s = 0.0;  // frame start
  double rms = 0.0;
};

namespace internal {

struct FrameGeometry {
  std::size_t frame_len = 0;
  std::size_t hop = 0;
  std::size_t num_frames = 0;
};

inline FrameGeometry frame_geometry(const AudioSignal &signal, const VadConfig &cfg) {
  if (signal.sample_rate <= 0)
    throw Error(ErrorCode::kInvalidArgument, "sample_rate must be positive");
  cfg.validate();
  FrameGeometry g;
  g.frame_len = static_cast<std::size_t>(std::lround(cfg.frame_len_s * signal.sample_rate));
  g.hop = static_cast<std::size_t>(std::lround(cfg.hop_s * signal.sample_rate));
  if (g.frame_len == 0 || g.hop == 0)
    throw Error(ErrorCode::kInvalidArgument, "frame or hop shorter than one sample");
  const std::size_t n = signal.samples.size();
  if (n < g.frame_len)
    throw Error(ErrorCode::kSignalTooShort,
                std::to_string(n) + " samples, one frame needs " +
                    std::to_string(g.frame_len));
  g.num_frames = 1 + (n - g.frame_len + g.hop - 1) / g.hop;
  return g;
}

// Linear interpolation between closest ranks.
inline double percentile(std::vector<double> values, double pct) {
  std::sort(values.begin(), values.end());
  const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace internal

/// One RMS value per hop. The final frame may run past the end of the
/// signal and is zero-padded.
inline std::vector<FrameEnergy> frame_rms(const AudioSignal &signal, const VadConfig &cfg) {
  const auto g = internal::frame_geometry(signal, cfg);
  const std::size_t n = signal.samples.size();
  std::vector<FrameEnergy> frames(g.num_frames);
  for (std::size_t f = 0; f < g.num_frames; ++f) {
    const std::size_t begin = f * g.hop;
    const std::size_t end = std::min(begin + g.frame_len, n);
    double sum_sq = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum_sq += signal.samples[i] * signal.samples[i];
    frames[f].time_s = static_cast<double>(begin) / signal.sample_rate;
    frames[f].rms = std::sqrt(sum_sq / static_cast<double>(g.frame_len));
  }
  return frames;
}

inline double silence_threshold(const std::vector<FrameEnergy> &frames, const VadConfig &cfg) {
  std::vector<double> rms;
  rms.reserve(frames.size());
  for (const auto &f : frames) rms.push_back(f.rms);
  const double floor_term = cfg.threshold_gain * internal::percentile(rms, cfg.energy_percentile);
  const double ceiling_term = cfg.ceiling_ratio * internal::percentile(rms, cfg.ceiling_percentile);
  return std::min(floor_term, ceiling_term);
}

/// Maximal runs of frames with RMS at or below the threshold, kept when
/// they span at least min_pause_s. A run covers [first frame start,
/// last frame start + frame length], clipped to the signal. Frames at
/// exactly the threshold count as silent so that digital silence
/// (threshold 0) is detectable.
inline std::vector<PauseInterval> detect_pause_intervals(const AudioSignal &signal,
                                                         const VadConfig &cfg) {
  const auto frames = frame_rms(signal, cfg);
  const double theta = silence_threshold(frames, cfg);
  const double duration = signal.duration_s();

  std::vector<PauseInterval> out;
  std::size_t f = 0;
  while (f < frames.size()) {
    if (frames[f].rms > theta) {
      ++f;
      continue;
    }
    std::size_t last = f;
    while (last + 1 < frames.size() && frames[last + 1].rms <= theta) ++last;
    PauseInterval iv{frames[f].time_s, std::min(frames[last].time_s + cfg.frame_len_s, duration)};
    // Tolerate representation error in the duration comparison.
    if (iv.duration_s() >= cfg.min_pause_s - 1e-9) out.push_back(iv);
    f = last + 1;
  }
  return out;
}

inline std::size_t intervals_to_tag_count(const std::vector<PauseInterval> &intervals) {
  return intervals.size();
}

// ---------------------------------------------------------------------------
// RIFF/WAVE, 16-bit PCM, mono only.

namespace internal {

inline std::uint32_t read_le32(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t read_le16(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline void put_le32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_le16(std::string &out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace internal

inline AudioSignal decode_wav(const std::string &bytes) {
  using internal::read_le16;
  using internal::read_le32;
  const auto *data = reinterpret_cast<const unsigned char *>(bytes.data());
  const std::size_t size = bytes.size();
  if (size < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0)
    throw Error(ErrorCode::kUnsupportedFormat, "not a RIFF/WAVE stream");

  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const std::string id = bytes.substr(pos, 4);
    const std::size_t chunk_len = read_le32(data + pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_len > size)
      throw Error(ErrorCode::kUnsupportedFormat, "truncated '" + id + "' chunk");
    if (id == "fmt ") {
      if (chunk_len < 16) throw Error(ErrorCode::kUnsupportedFormat, "short fmt chunk");
      const std::uint16_t format = read_le16(data + body);
      channels = read_le16(data + body + 2);
      rate = read_le32(data + body + 4);
      bits = read_le16(data + body + 14);
      // 0xFFFE (extensible) is accepted when it wraps plain PCM.
      const bool extensible_pcm =
          format == 0xFFFE && chunk_len >= 26 && read_le16(data + body + 24) == 1;
      if (format != 1 && !extensible_pcm)
        throw Error(ErrorCode::kUnsupportedFormat, "only PCM is supported");
      if (channels != 1)
        throw Error(ErrorCode::kUnsupportedFormat,
                    std::to_string(channels) + " channels; only mono is accepted");
      if (bits != 16)
        throw Error(ErrorCode::kUnsupportedFormat,
                    std::to_string(bits) + "-bit samples; only 16-bit is accepted");
      if (rate == 0) throw Error(ErrorCode::kUnsupportedFormat, "zero sample rate");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw Error(ErrorCode::kUnsupportedFormat, "data chunk before fmt chunk");
      AudioSignal signal;
      signal.sample_rate = static_cast<int>(rate);
      const std::size_t count = chunk_len / 2;
      signal.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        const auto raw = static_cast<std::int16_t>(read_le16(data + body + 2 * i));
        signal.samples[i] = static_cast<double>(raw) / 32768.0;
      }
      return signal;
    }
    pos = body + chunk_len + (chunk_len & 1);
  }
  throw Error(ErrorCode::kUnsupportedFormat, "no data chunk");
}

inline std::string encode_wav(const AudioSignal &signal) {
  using internal::put_le16;
  using internal::put_le32;
  const auto data_len = static_cast<std::uint32_t>(signal.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  put_le32(out, 36 + data_len);
  out += "WAVEfmt ";
  put_le32(out, 16);
  put_le16(out, 1);
  put_le16(out, 1);
  put_le32(out, static_cast<std::uint32_t>(signal.sample_rate));
  put_le32(out, static_cast<std::uint32_t>(signal.sample_rate) * 2);
  put_le16(out, 2);
  put_le16(out, 16);
  out += "data";
  put_le32(out, data_len);
  for (double s : signal.samples) {
    const double clipped = std::clamp(s, -1.0, 1.0);
    const long v = std::lround(clipped * 32767.0);
    put_le16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  return out;
}

inline AudioSignal read_wav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

inline void write_wav(const std::string &path, const AudioSignal &signal) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  const std::string bytes = encode_wav(signal);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace pausekit
