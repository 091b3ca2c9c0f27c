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

#include <gtest/gtest.h>

#include <cstring>
#include <fstream>

#include "pamkit/bundle.h"
#include "pamkit/error.h"
#include "test_support.h"

namespace pamkit {
namespace {

using testing::MakeBundle;
using testing::ReadBytes;
using testing::ReadText;
using testing::TempDir;
using testing::WriteText;

std::string ErrorOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

void Rewrite(const std::filesystem::path& dir, const std::string& name,
             const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.close();
  auto meta = nlohmann::json::parse(ReadText(dir / "bundle.json"));
  meta["checksums"][name] = Sha256Hex(bytes);
  WriteText(dir / "bundle.json", meta.dump(2));
}

TEST(BundleTest, SaveLoadRoundTripIsExact) {
  TempDir dir;
  auto b = MakeBundle(16, 1, AudioConfig{});
  b.logit_scale = 33.37;
  b.provenance = {{"checkpoint_id", "x"}, {"sha", "abc"}};
  SaveBundle(b, dir.path());
  const auto loaded = LoadBundle(dir.path());
  EXPECT_TRUE(loaded.warnings.empty());
  EXPECT_EQ(loaded.model_id, b.model_id);
  EXPECT_EQ(loaded.dim, 16u);
  EXPECT_EQ(loaded.logit_scale, b.logit_scale);
  EXPECT_EQ(loaded.audio_config, b.audio_config);
  EXPECT_EQ(loaded.prompts, b.prompts);
  EXPECT_EQ(loaded.embeddings, b.embeddings);
  EXPECT_EQ(loaded.provenance, b.provenance);

  // Saving the loaded bundle again reproduces every file byte for byte.
  TempDir again;
  SaveBundle(loaded, again.path());
  for (const char* name : {"bundle.json", "prompts.json", "embeddings.bin"}) {
    EXPECT_EQ(ReadBytes(dir / name), ReadBytes(again / name)) << name;
  }
}

TEST(BundleTest, EmbeddingsAreRowMajorFloat32LittleEndian) {
  const auto b = MakeBundle(3, 2, AudioConfig{});
  const auto bytes = EncodeEmbeddings(b.embeddings);
  ASSERT_EQ(bytes.size(), 4u * 3u * 4u);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      const std::size_t o = (r * 3 + c) * 4;
      const std::uint32_t u = bytes[o] | (bytes[o + 1] << 8) | (bytes[o + 2] << 16) |
                              (static_cast<std::uint32_t>(bytes[o + 3]) << 24);
      float f;
      std::memcpy(&f, &u, 4);
      EXPECT_EQ(f, b.embeddings[r].values()[c]);
    }
  }
}

TEST(BundleTest, Sha256KnownAnswer) {
  const std::string abc = "abc";
  EXPECT_EQ(Sha256Hex({reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size()}),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(BundleTest, ValidTwoPromptBundleKeepsDimAndTau) {
  TempDir dir;
  auto b = MakeBundle(8, 3, AudioConfig{});
  b.prompts.resize(2);
  b.embeddings.erase(b.embeddings.begin() + 2, b.embeddings.end());
  b.logit_scale = 2.5;
  SaveBundle(b, dir.path());
  const auto loaded = LoadBundle(dir.path());
  EXPECT_EQ(loaded.dim, 8u);
  EXPECT_EQ(loaded.logit_scale, 2.5);
}

TEST(BundleTest, MissingLowRoleIsRejected) {
  auto b = MakeBundle(8, 3, AudioConfig{});
  for (auto& p : b.prompts) p.role = PromptRole::kHigh;
  EXPECT_EQ(ErrorOf([&] { ValidateBundle(b); }), "bundle must contain opposing prompts");

  TempDir dir;
  SaveBundle(MakeBundle(8, 3, AudioConfig{}), dir.path());
  auto prompts = nlohmann::json::parse(ReadText(dir / "prompts.json"));
  for (auto& p : prompts) p["role"] = "high";
  const std::string text = prompts.dump(2) + "\n";
  Rewrite(dir.path(), "prompts.json", {text.begin(), text.end()});
  EXPECT_EQ(ErrorOf([&] { LoadBundle(dir.path()); }), "bundle must contain opposing prompts");
}

TEST(BundleTest, EmbeddingFileSizeMismatch) {
  TempDir dir;
  SaveBundle(MakeBundle(8, 3, AudioConfig{}), dir.path());
  auto bytes = ReadBytes(dir / "embeddings.bin");
  bytes.resize(bytes.size() - 4);
  Rewrite(dir.path(), "embeddings.bin", bytes);
  EXPECT_EQ(ErrorOf([&] { LoadBundle(dir.path()); }), "embedding matrix size mismatch");
}

TEST(BundleTest, NonUnitRowIsRejected) {
  TempDir dir;
  SaveBundle(MakeBundle(8, 3, AudioConfig{}), dir.path());
  auto bytes = ReadBytes(dir / "embeddings.bin");
  float f;
  std::memcpy(&f, bytes.data(), 4);
  f *= 1.01f;
  std::memcpy(bytes.data(), &f, 4);
  Rewrite(dir.path(), "embeddings.bin", bytes);
  EXPECT_NE(ErrorOf([&] { LoadBundle(dir.path()); }).find("not unit-norm"), std::string::npos);
}

TEST(BundleTest, ChecksumMismatchIsRejected) {
  TempDir dir;
  SaveBundle(MakeBundle(8, 3, AudioConfig{}), dir.path());
  auto bytes = ReadBytes(dir / "embeddings.bin");
  std::swap(bytes[0], bytes[4]);
  std::ofstream(dir / "embeddings.bin", std::ios::binary)
      .write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  EXPECT_EQ(ErrorOf([&] { LoadBundle(dir.path()); }), "checksum mismatch for embeddings.bin");
}

TEST(BundleTest, VersionAndDuplicateIdsAreRejected) {
  TempDir dir;
  SaveBundle(MakeBundle(8, 3, AudioConfig{}), dir.path());
  auto meta = nlohmann::json::parse(ReadText(dir / "bundle.json"));
  meta["format_version"] = 2;
  WriteText(dir / "bundle.json", meta.dump());
  EXPECT_NE(ErrorOf([&] { LoadBundle(dir.path()); }).find("unsupported bundle format version"),
            std::string::npos);

  auto b = MakeBundle(8, 3, AudioConfig{});
  b.prompts[2].id = "h1";
  EXPECT_NE(ErrorOf([&] { ValidateBundle(b); }).find("duplicate prompt id"), std::string::npos);
}

TEST(BundleTest, UnknownKeysAndMissingChecksumsWarn) {
  TempDir dir;
  SaveBundle(MakeBundle(8, 3, AudioConfig{}), dir.path());
  auto meta = nlohmann::json::parse(ReadText(dir / "bundle.json"));
  meta["exporter_note"] = "hello";
  meta["checksums"].erase("prompts.json");
  WriteText(dir / "bundle.json", meta.dump());
  const auto loaded = LoadBundle(dir.path());
  ASSERT_EQ(loaded.warnings.size(), 2u);
}

TEST(BundleTest, PromptLookup) {
  const auto b = MakeBundle(8, 3, AudioConfig{});
  EXPECT_EQ(b.PromptById("b2").text, "the sound quality is bad");
  EXPECT_EQ(&b.EmbeddingById("h2"), &b.embeddings[2]);
  EXPECT_EQ(ErrorOf([&] { b.PromptById("h9"); }), "missing prompt id 'h9' in bundle");
  EXPECT_FALSE(b.FindPrompt("zz"));
}

TEST(BundleTest, EncoderFileIsCopiedAndChecksummed) {
  TempDir src;
  WriteText(src / "enc.onnx", "not really a model");
  auto b = MakeBundle(8, 3, AudioConfig{});
  b.encoder_model = "enc.onnx";
  b.root = src.path();
  TempDir dst;
  SaveBundle(b, dst.path());
  EXPECT_EQ(ReadText(dst / "enc.onnx"), "not really a model");
  const auto loaded = LoadBundle(dst.path());
  ASSERT_TRUE(loaded.EncoderPath());
  EXPECT_EQ(*loaded.EncoderPath(), dst / "enc.onnx");
  WriteText(dst / "enc.onnx", "tampered");
  EXPECT_EQ(ErrorOf([&] { LoadBundle(dst.path()); }), "checksum mismatch for enc.onnx");
}

TEST(EmbeddingTest, NormalizationAndDot) {
  const std::vector<double> raw = {3.0, 4.0};
  const auto v = EmbeddingVector::Normalized(raw);
  EXPECT_NEAR(v.Norm(), 1.0, 1e-7);
  EXPECT_NEAR(v.values()[0], 0.6, 1e-7);
  EXPECT_THROW(EmbeddingVector::FromUnitValues({0.5f, 0.5f}), Error);
  const std::vector<double> three = {1.0, 0.0, 0.0};
  EXPECT_THROW(v.Dot(EmbeddingVector::Normalized(three)), Error);
  const std::vector<double> zero = {0.0, 0.0};
  EXPECT_THROW(EmbeddingVector::Normalized(zero), Error);
}

}  // namespace
}  // namespace pamkit
