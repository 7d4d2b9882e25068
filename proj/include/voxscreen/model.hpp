/*
 * Copyright 2026 The voxscreen Authors.
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

#ifndef VOXSCREEN_MODEL_HPP_
#define VOXSCREEN_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "voxscreen/audio_io.hpp"
#include "voxscreen/cnn.hpp"
#include "voxscreen/dsp.hpp"
#include "voxscreen/encoder.hpp"
#include "voxscreen/feature_io.hpp"
#include "voxscreen/logreg.hpp"
#include "voxscreen/lstm.hpp"
#include "voxscreen/render.hpp"
#include "voxscreen/svm.hpp"

namespace voxscreen {

enum class FeatureKind {
  kMfccVector,
  kMfccImage,
  kMelspecImage,
  kEncoder,
  kMfccFrames,  // frame-wise MFCC sequence for the LSTM
};

enum class ModelKind {
  kLogReg,
  kSvm,
  kCnn,
  kLstm,
};

std::string_view FeatureKindName(FeatureKind kind);
FeatureKind ParseFeatureKind(std::string_view name);
std::string_view ModelKindName(ModelKind kind);
ModelKind ParseModelKind(std::string_view name);

bool IsImageFeature(FeatureKind kind);

struct Hyperparams {
  LogRegOptions logreg;
  SvmOptions svm;
  CnnArchitecture cnn_arch;
  CnnTrainOptions cnn;
  LstmArchitecture lstm_arch;
  LstmTrainOptions lstm;
};

struct ModelRecipe {
  FeatureKind feature = FeatureKind::kMfccVector;
  ModelKind model = ModelKind::kLogReg;
  Hyperparams hp;
  // Permits (model, feature) pairs outside the standard set when the shapes
  // still fit.
  bool force = false;

  // "<model>/<feature>", e.g. "svm/mfcc_vector".
  std::string id() const;
  static bool IsStandardPair(ModelKind model, FeatureKind feature);
  void Validate() const;

  // key=value override, e.g. "svm.gamma=0.01" or "lstm.loss=bce".
  void SetOverride(std::string_view assignment);

  nlohmann::json ToJson() const;
  static ModelRecipe FromJson(const nlohmann::json& j);
};

// Features of one clip. Which member is populated depends on kind:
// vector for kMfccVector, image for the image kinds, frames otherwise.
struct ExampleFeatures {
  FeatureKind kind = FeatureKind::kMfccVector;
  Vector vector;
  std::vector<float> image;  // 150 x 150 x 3, HWC
  RowMatrix frames;
};

struct ExtractionConfig {
  FrameParams frame;
  MelParams mel;
  EncoderConfig encoder = EncoderConfig::Default();
  std::shared_ptr<const EncoderWeights> encoder_weights;  // required for kEncoder
  std::string encoder_source = "seeded";  // "seeded" or the weight file path
  std::uint64_t encoder_seed = 0;

  nlohmann::json ToJson() const;
};

// Resample to the canonical rate and peak-normalize.
AudioClip PrepareClip(const AudioClip& clip);
AudioClip LoadClip(const std::filesystem::path& path);

ExampleFeatures ExtractFeatures(const AudioClip& clip, FeatureKind kind,
                                const ExtractionConfig& config);

FeatureDump ToDump(const ExampleFeatures& features);
ExampleFeatures FromDump(const FeatureDump& dump, FeatureKind kind);

// Logistic regression over the mean-pooled, standardized encoder frames.
struct EncoderHeadModel {
  LogRegModel head;
};

struct TrainedModel {
  ModelRecipe recipe;
  std::optional<Standardizer> standardizer;
  std::variant<LogRegModel, SvmModel, CnnModel, LstmModel, EncoderHeadModel> model;
};

// Fits the preprocessing and the learner on the given examples only.
// Parameters are rounded to float32 on completion so that serialization is
// lossless.
TrainedModel TrainModel(const ModelRecipe& recipe, std::span<const ExampleFeatures> examples,
                        std::span<const int> labels, std::uint64_t seed);

// Probability-like score in [0, 1].
double PredictScore(const TrainedModel& model, const ExampleFeatures& features);
// The SVM decision value before the sigmoid map; the logit for LR-based models.
double RawDecision(const TrainedModel& model, const ExampleFeatures& features);

std::vector<std::uint8_t> SerializeModel(const TrainedModel& model);
TrainedModel ParseModel(std::span<const std::uint8_t> bytes);

}  // namespace voxscreen

#endif  // VOXSCREEN_MODEL_HPP_
