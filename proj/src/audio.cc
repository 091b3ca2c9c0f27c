/*
 * Copyright 2026 The pamkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pamkit/audio.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>

#include "pamkit/error.h"

namespace pamkit {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  void Need(std::size_t n, const char* what) const {
    if (remaining() < n) throw Error(std::string("malformed header: ") + what);
  }
  std::string_view Tag() {
    Need(4, "truncated chunk id");
    std::string_view tag(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return tag;
  }
  std::uint16_t U16() {
    Need(2, "truncated field");
    std::uint16_t v = bytes_[pos_] | (bytes_[pos_ + 1] << 8);
    pos_ += 2;
    return v;
  }
  std::uint32_t U32() {
    Need(4, "truncated field");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }
  void Skip(std::size_t n) {
    pos_ += std::min(n, remaining());
  }
  std::span<const std::uint8_t> Take(std::size_t n) {
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

FormatChunk ParseFormat(std::span<const std::uint8_t> body) {
  if (body.size() < 16) throw Error("malformed header: fmt chunk too short");
  ByteReader r(body);
  FormatChunk f;
  f.format = r.U16();
  f.channels = r.U16();
  f.sample_rate = r.U32();
  r.U32();  // byte rate
  f.block_align = r.U16();
  f.bits = r.U16();
  if (f.format == kFormatExtensible) {
    if (body.size() < 40) {
      throw Error("malformed header: extensible fmt chunk too short");
    }
    r.U16();  // cbSize
    r.U16();  // valid bits
    r.U32();  // channel mask
    f.format = r.U16();  // first two bytes of the subformat GUID
  }
  if (f.channels == 0) throw Error("malformed header: zero channels");
  if (f.sample_rate == 0) throw Error("malformed header: zero sample rate");
  return f;
}

double DecodeSample(const std::uint8_t* p, const FormatChunk& f) {
  if (f.format == kFormatFloat && f.bits == 32) {
    std::uint32_t u = p[0] | (p[1] << 8) | (p[2] << 16) |
                      (static_cast<std::uint32_t>(p[3]) << 24);
    return std::bit_cast<float>(u);
  }
  switch (f.bits) {
    case 16: {
      auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
      return v / 32768.0;
    }
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case 32: {
      std::uint32_t u = p[0] | (p[1] << 8) | (p[2] << 16) |
                        (static_cast<std::uint32_t>(p[3]) << 24);
      return static_cast<std::int32_t>(u) / 2147483648.0;
    }
  }
  return 0.0;
}

void PutU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(v & 0xFF);
  out.push_back(v >> 8);
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}

void PutTag(std::vector<std::uint8_t>& out, std::string_view tag) {
  out.insert(out.end(), tag.begin(), tag.end());
}

// Modified Bessel function of the first kind, order zero.
double BesselI0(double x) {
  double sum = 1.0;
  double term = 1.0;
  const double half_sq = x * x / 4.0;
  for (int k = 1; k < 200; ++k) {
    term *= half_sq / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

constexpr int kTapsPerPhase = 32;
constexpr int kHalfTaps = kTapsPerPhase / 2;
constexpr double kKaiserBeta = 8.0;
// Passband edge as a fraction of the lower of the two Nyquist rates.
constexpr double kRolloff = 0.9;
constexpr std::int64_t kMaxTabulatedPhases = 4096;

// Taps for an output sample located `frac` input samples after input index
// `base`; tap k multiplies input[base - kHalfTaps + 1 + k].
void PhaseTaps(double frac, double cutoff, std::span<double> taps) {
  const double norm = BesselI0(kKaiserBeta);
  double sum = 0.0;
  for (int k = 0; k < kTapsPerPhase; ++k) {
    const double x = (k - kHalfTaps + 1) - frac;
    const double r = x / kHalfTaps;
    double w = 0.0;
    if (std::abs(r) < 1.0) w = BesselI0(kKaiserBeta * std::sqrt(1.0 - r * r)) / norm;
    const double arg = std::numbers::pi * cutoff * x;
    const double sinc = x == 0.0 ? 1.0 : std::sin(arg) / arg;
    taps[k] = cutoff * sinc * w;
    sum += taps[k];
  }
  for (double& t : taps) t /= sum;  // unity DC gain per phase
}

}  // namespace

AudioClip::AudioClip(std::vector<float> samples, int sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (samples_.empty()) throw Error("audio clip has no samples");
  if (sample_rate_hz_ <= 0) throw Error("sample rate must be positive");
  for (float s : samples_) {
    if (!std::isfinite(s)) throw Error("audio clip contains non-finite samples");
  }
}

AudioClip AudioClip::FromDoubles(std::span<const double> samples,
                                 int sample_rate_hz) {
  return AudioClip(std::vector<float>(samples.begin(), samples.end()),
                   sample_rate_hz);
}

AudioClip DecodeWav(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.remaining() < 12) throw Error("malformed header: file too short");
  if (r.Tag() != "RIFF") throw Error("malformed header: missing RIFF tag");
  r.U32();
  if (r.Tag() != "WAVE") throw Error("malformed header: missing WAVE tag");

  std::optional<FormatChunk> fmt;
  std::optional<std::span<const std::uint8_t>> data;
  while (r.remaining() >= 8 && !data) {
    const std::string_view tag = r.Tag();
    const std::uint32_t size = r.U32();
    if (tag == "data") {
      if (size > r.remaining()) throw Error("truncated data chunk");
      data = r.Take(size);
    } else if (tag == "fmt ") {
      if (size > r.remaining()) throw Error("malformed header: truncated fmt chunk");
      fmt = ParseFormat(r.Take(size));
      if (size % 2 == 1) r.Skip(1);
    } else {
      r.Skip(size + (size % 2));
    }
  }
  if (!fmt) throw Error("malformed header: missing fmt chunk");
  if (!data) throw Error("malformed header: missing data chunk");

  const bool is_float = fmt->format == kFormatFloat && fmt->bits == 32;
  const bool is_pcm = fmt->format == kFormatPcm &&
                      (fmt->bits == 16 || fmt->bits == 24 || fmt->bits == 32);
  if (!is_float && !is_pcm) {
    throw Error("unsupported codec: format " + std::to_string(fmt->format) +
                " with " + std::to_string(fmt->bits) + " bits");
  }
  const std::size_t bytes_per_sample = fmt->bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt->channels;
  if (fmt->block_align != frame_bytes) {
    throw Error("malformed header: block align does not match format");
  }
  if (data->size() % frame_bytes != 0) throw Error("truncated data chunk");
  const std::size_t frames = data->size() / frame_bytes;
  if (frames == 0) throw Error("data chunk is empty");

  std::vector<float> mono(frames);
  const std::uint8_t* p = data->data();
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < fmt->channels; ++c) {
      acc += DecodeSample(p, *fmt);
      p += bytes_per_sample;
    }
    mono[i] = static_cast<float>(acc / fmt->channels);
  }
  return AudioClip(std::move(mono), static_cast<int>(fmt->sample_rate));
}

AudioClip LoadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return DecodeWav(bytes);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> EncodeWav(const AudioClip& clip,
                                    WavEncoding encoding) {
  for (float s : clip.samples()) {
    if (!(s >= -1.0f && s <= 1.0f)) throw Error("sample out of range");
  }
  const bool is_float = encoding == WavEncoding::kFloat32;
  const std::uint16_t bits = is_float ? 32 : 16;
  const std::uint16_t block_align = bits / 8;
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(clip.size() * block_align);
  const std::uint32_t fmt_bytes = is_float ? 18 : 16;
  const std::uint32_t fact_bytes = is_float ? 12 : 0;

  std::vector<std::uint8_t> out;
  out.reserve(44 + 2 + fact_bytes + data_bytes);
  PutTag(out, "RIFF");
  PutU32(out, 4 + (8 + fmt_bytes) + fact_bytes + (8 + data_bytes));
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, fmt_bytes);
  PutU16(out, is_float ? kFormatFloat : kFormatPcm);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(clip.sample_rate_hz()));
  PutU32(out, static_cast<std::uint32_t>(clip.sample_rate_hz()) * block_align);
  PutU16(out, block_align);
  PutU16(out, bits);
  if (is_float) {
    PutU16(out, 0);
    PutTag(out, "fact");
    PutU32(out, 4);
    PutU32(out, static_cast<std::uint32_t>(clip.size()));
  }
  PutTag(out, "data");
  PutU32(out, data_bytes);
  for (float s : clip.samples()) {
    if (is_float) {
      PutU32(out, std::bit_cast<std::uint32_t>(s));
    } else {
      const double q = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
      PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    }
  }
  return out;
}

void SaveWav(const AudioClip& clip, const std::filesystem::path& path,
             WavEncoding encoding) {
  const auto bytes = EncodeWav(clip, encoding);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

AudioClip Resample(const AudioClip& clip, int target_rate_hz) {
  if (target_rate_hz <= 0) throw Error("target sample rate must be positive");
  const int source_rate = clip.sample_rate_hz();
  if (target_rate_hz == source_rate) return clip;

  const std::int64_t g = std::gcd(source_rate, target_rate_hz);
  const std::int64_t up = target_rate_hz / g;
  const std::int64_t down = source_rate / g;
  const auto in = clip.samples();
  const auto n_in = static_cast<std::int64_t>(in.size());
  // round(n_in * up / down), ties away from zero
  const std::int64_t n_out = std::max<std::int64_t>(1, (2 * n_in * up + down) / (2 * down));
  const double cutoff =
      kRolloff * std::min(1.0, static_cast<double>(up) / static_cast<double>(down));

  std::vector<double> table;
  const bool tabulate = up <= kMaxTabulatedPhases;
  if (tabulate) {
    table.resize(static_cast<std::size_t>(up) * kTapsPerPhase);
    for (std::int64_t p = 0; p < up; ++p) {
      PhaseTaps(static_cast<double>(p) / up, cutoff,
                std::span(table).subspan(p * kTapsPerPhase, kTapsPerPhase));
    }
  }

  std::vector<float> out(static_cast<std::size_t>(n_out));
  std::array<double, kTapsPerPhase> scratch;
  for (std::int64_t n = 0; n < n_out; ++n) {
    const std::int64_t pos = n * down;
    const std::int64_t base = pos / up;
    const std::int64_t phase = pos % up;
    std::span<const double> taps;
    if (tabulate) {
      taps = std::span<const double>(table).subspan(phase * kTapsPerPhase,
                                                    kTapsPerPhase);
    } else {
      PhaseTaps(static_cast<double>(phase) / up, cutoff, scratch);
      taps = scratch;
    }
    double acc = 0.0;
    for (int k = 0; k < kTapsPerPhase; ++k) {
      const std::int64_t i = base - kHalfTaps + 1 + k;
      if (i >= 0 && i < n_in) acc += taps[k] * in[i];
    }
    out[n] = static_cast<float>(acc);
  }
  return AudioClip(std::move(out), target_rate_hz);
}

std::size_t SecondsToSamples(double seconds, int sample_rate_hz) {
  return static_cast<std::size_t>(std::llround(seconds * sample_rate_hz));
}

std::vector<AudioClip> WindowClip(const AudioClip& clip, double window_seconds,
                                  double hop_seconds) {
  if (!(hop_seconds > 0.0) || !(window_seconds >= hop_seconds)) {
    throw Error("window_clip requires window_seconds >= hop_seconds > 0");
  }
  const std::size_t win = SecondsToSamples(window_seconds, clip.sample_rate_hz());
  const std::size_t hop = SecondsToSamples(hop_seconds, clip.sample_rate_hz());
  if (win == 0 || hop == 0) throw Error("window or hop shorter than one sample");

  const std::size_t len = clip.size();
  const std::size_t count = len <= win ? 1 : (len - win + hop - 1) / hop + 1;
  const auto in = clip.samples();
  std::vector<AudioClip> windows;
  windows.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t start = w * hop;
    std::vector<float> buf(win, 0.0f);
    if (start < len) {
      const std::size_t n = std::min(win, len - start);
      std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(start), n, buf.begin());
    }
    windows.emplace_back(std::move(buf), clip.sample_rate_hz());
  }
  return windows;
}

}  // namespace pamkit
