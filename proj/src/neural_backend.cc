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

#include <opencv2/dnn.hpp>

#include <mutex>

#include "pamkit/backend.h"
#include "pamkit/error.h"

namespace pamkit {
namespace {

class NeuralBackend final : public EmbeddingBackend {
 public:
  NeuralBackend(const AudioConfig& cfg, std::size_t dim,
                const std::filesystem::path& model)
      : EmbeddingBackend(cfg, dim), front_end_(cfg) {
    try {
      net_ = cv::dnn::readNetFromONNX(model.string());
    } catch (const cv::Exception& e) {
      throw Error("failed to load encoder " + model.string() + ": " + e.what());
    }
    if (net_.empty()) throw Error("encoder model is empty: " + model.string());
    net_.setPreferableBackend(cv::dnn::DNN_BACKEND_OPENCV);
    net_.setPreferableTarget(cv::dnn::DNN_TARGET_CPU);
  }

  std::string_view name() const override { return "neural"; }

 protected:
  EmbeddingVector EmbedWindow(const AudioClip& window,
                              const WindowOrigin&) const override {
    const MelSpectrogram mel = front_end_.LogMel(window);
    const int shape[] = {1, 1, static_cast<int>(mel.num_frames),
                         static_cast<int>(mel.num_mels)};
    cv::Mat input(4, shape, CV_32F);
    auto* dst = input.ptr<float>();
    for (std::size_t i = 0; i < mel.values.size(); ++i) {
      dst[i] = static_cast<float>(mel.values[i]);
    }
    cv::Mat output;
    {
      std::lock_guard lock(mu_);
      try {
        net_.setInput(input);
        output = net_.forward().clone();
      } catch (const cv::Exception& e) {
        throw Error(std::string("encoder inference failed: ") + e.what());
      }
    }
    if (output.total() != dim()) {
      throw Error("encoder produced " + std::to_string(output.total()) +
                  " values, bundle declares dim " + std::to_string(dim()));
    }
    if (output.type() != CV_32F) output.convertTo(output, CV_32F);
    const float* p = output.ptr<float>();
    return EmbeddingVector::Normalized(std::span<const float>(p, output.total()));
  }

 private:
  MelFrontEnd front_end_;
  mutable std::mutex mu_;
  mutable cv::dnn::Net net_;
};

}  // namespace

std::unique_ptr<EmbeddingBackend> MakeNeuralBackend(const PromptBundle& bundle) {
  const auto path = bundle.EncoderPath();
  if (!path) throw Error("bundle has no encoder_model; the neural backend needs one");
  return std::make_unique<NeuralBackend>(bundle.audio_config, bundle.dim, *path);
}

bool NeuralBackendAvailable() { return true; }

}  // namespace pamkit
