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

#ifndef PAMKIT_AUDIO_H_
#define PAMKIT_AUDIO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace pamkit {

// Mono floating-point waveform. Immutable once constructed; the constructor
// rejects empty or non-finite sample data and non-positive rates.
// Amplitudes are nominally in [-1, 1] but the range is only enforced when
// writing integer or float WAV output.
class AudioClip {
 public:
  AudioClip(std::vector<float> samples, int sample_rate_hz);

  std::span<const float> samples() const { return samples_; }
  int sample_rate_hz() const { return sample_rate_hz_; }
  std::size_t size() const { return samples_.size(); }
  double duration_seconds() const {
    return static_cast<double>(samples_.size()) / sample_rate_hz_;
  }

  // Convenience for tests and DSP code that builds clips from doubles.
  static AudioClip FromDoubles(std::span<const double> samples,
                               int sample_rate_hz);

  friend bool operator==(const AudioClip&, const AudioClip&) = default;

 private:
  std::vector<float> samples_;
  int sample_rate_hz_;
};

enum class WavEncoding { kPcm16, kFloat32 };

// Decodes a RIFF/WAVE byte image. Accepts PCM 16/24/32-bit and IEEE float32
// (plain or WAVE_FORMAT_EXTENSIBLE); channels are downmixed by mean.
AudioClip DecodeWav(std::span<const std::uint8_t> bytes);
AudioClip LoadWav(const std::filesystem::path& path);

std::vector<std::uint8_t> EncodeWav(const AudioClip& clip,
                                    WavEncoding encoding);
void SaveWav(const AudioClip& clip, const std::filesystem::path& path,
             WavEncoding encoding);

// Band-limited rational resampling: polyphase windowed sinc, Kaiser window
// (beta 8), 32 taps per phase. Output length is round(n * target / source).
AudioClip Resample(const AudioClip& clip, int target_rate_hz);

// Fixed-length windows starting every hop; the last window is zero-padded.
// A clip shorter than one window yields exactly one padded window.
std::vector<AudioClip> WindowClip(const AudioClip& clip, double window_seconds,
                                  double hop_seconds);

// Number of samples a duration occupies at `sample_rate_hz`, rounded.
std::size_t SecondsToSamples(double seconds, int sample_rate_hz);

}  // namespace pamkit

#endif  // PAMKIT_AUDIO_H_
