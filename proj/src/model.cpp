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

#include "voxscreen/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "voxscreen/activations.hpp"
#include "voxscreen/binary_io.hpp"
#include "voxscreen/error.hpp"

namespace voxscreen {
namespace {

struct KindName {
  FeatureKind kind;
  std::string_view name;
};
constexpr KindName kFeatureNames[] = {
    {FeatureKind::kMfccVector, "mfcc_vector"},   {FeatureKind::kMfccImage, "mfcc_image"},
    {FeatureKind::kMelspecImage, "melspec_image"}, {FeatureKind::kEncoder, "encoder"},
    {FeatureKind::kMfccFrames, "mfcc_frames"},
};

constexpr std::string_view kModelNames[] = {"logreg", "svm", "cnn", "lstm"};

enum class ModelTag : std::uint8_t {
  kLogReg = 0,
  kSvm = 1,
  kCnn = 2,
  kLstm = 3,
  kEncoderHead = 4,
};

double ParseDouble(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kConfigError, "bad value for " + std::string(key) + ": '" + std::string(text) + "'");
  }
  return v;
}

int ParseInt(std::string_view key, std::string_view text) {
  int v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw Error(ErrorCode::kConfigError, "bad integer for " + std::string(key) + ": '" + std::string(text) + "'");
  }
  return v;
}

LstmLoss ParseLoss(std::string_view text) {
  if (text == "mae") return LstmLoss::kMeanAbsoluteError;
  if (text == "bce") return LstmLoss::kBinaryCrossEntropy;
  throw Error(ErrorCode::kConfigError, "lstm.loss must be mae or bce, got '" + std::string(text) + "'");
}

std::string_view LossName(LstmLoss loss) {
  return loss == LstmLoss::kMeanAbsoluteError ? "mae" : "bce";
}

nlohmann::json AdamJson(const AdamOptions& a) {
  return {{"learning_rate", a.learning_rate}, {"beta1", a.beta1}, {"beta2", a.beta2}, {"epsilon", a.epsilon}};
}

void AdamFromJson(const nlohmann::json& j, AdamOptions& a) {
  a.learning_rate = j.value("learning_rate", a.learning_rate);
  a.beta1 = j.value("beta1", a.beta1);
  a.beta2 = j.value("beta2", a.beta2);
  a.epsilon = j.value("epsilon", a.epsilon);
}

double ToFloat(double v) { return static_cast<float>(v); }

Vector ToFloat(const Vector& v) { return v.unaryExpr([](double x) { return ToFloat(x); }); }

// Row consumed by the vector learners.
Vector AsVector(const ExampleFeatures& f) {
  switch (f.kind) {
    case FeatureKind::kMfccVector:
      return f.vector;
    case FeatureKind::kEncoder:
    case FeatureKind::kMfccFrames:
      if (f.frames.rows() == 0) throw Error(ErrorCode::kEmptySequence, "feature has no frames");
      return f.frames.colwise().mean().transpose();
    default:
      throw Error(ErrorCode::kFeatureKindMismatch, "image features need the cnn model");
  }
}

bool LstmUsesFrames(FeatureKind kind) {
  return kind == FeatureKind::kMfccFrames || kind == FeatureKind::kEncoder;
}

void CheckKind(const TrainedModel& model, const ExampleFeatures& f) {
  if (f.kind != model.recipe.feature) {
    throw Error(ErrorCode::kFeatureKindMismatch,
                "model " + model.recipe.id() + " cannot score " + std::string(FeatureKindName(f.kind)));
  }
}

Vector StandardizedVector(const TrainedModel& model, const ExampleFeatures& f) {
  Vector v = AsVector(f);
  return model.standardizer ? model.standardizer->Apply(v) : v;
}

RowMatrix LstmSequence(const TrainedModel& model, const ExampleFeatures& f) {
  if (LstmUsesFrames(f.kind)) {
    if (f.frames.rows() == 0) throw Error(ErrorCode::kEmptySequence, "feature has no frames");
    return model.standardizer ? model.standardizer->ApplyRows(f.frames) : f.frames;
  }
  return VectorAsSequence(StandardizedVector(model, f));
}

std::span<const double> AsSpan(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

Standardizer RoundedStandardizer(const Standardizer& s) {
  return Standardizer(ToFloat(s.mean()), ToFloat(s.scale()));
}

}  // namespace

std::string_view FeatureKindName(FeatureKind kind) {
  for (const auto& e : kFeatureNames) {
    if (e.kind == kind) return e.name;
  }
  return "unknown";
}

FeatureKind ParseFeatureKind(std::string_view name) {
  for (const auto& e : kFeatureNames) {
    if (e.name == name) return e.kind;
  }
  throw Error(ErrorCode::kConfigError, "unknown feature kind '" + std::string(name) + "'");
}

std::string_view ModelKindName(ModelKind kind) { return kModelNames[static_cast<int>(kind)]; }

ModelKind ParseModelKind(std::string_view name) {
  for (int i = 0; i < 4; ++i) {
    if (kModelNames[i] == name) return static_cast<ModelKind>(i);
  }
  throw Error(ErrorCode::kConfigError, "unknown model kind '" + std::string(name) + "'");
}

bool IsImageFeature(FeatureKind kind) {
  return kind == FeatureKind::kMfccImage || kind == FeatureKind::kMelspecImage;
}

std::string ModelRecipe::id() const {
  return std::string(ModelKindName(model)) + "/" + std::string(FeatureKindName(feature));
}

bool ModelRecipe::IsStandardPair(ModelKind model, FeatureKind feature) {
  switch (model) {
    case ModelKind::kLogReg:
      return feature == FeatureKind::kMfccVector || feature == FeatureKind::kEncoder;
    case ModelKind::kSvm:
      return feature == FeatureKind::kMfccVector;
    case ModelKind::kCnn:
      return IsImageFeature(feature);
    case ModelKind::kLstm:
      return feature == FeatureKind::kMfccVector || feature == FeatureKind::kMfccFrames;
  }
  return false;
}

void ModelRecipe::Validate() const {
  if ((model == ModelKind::kCnn) != IsImageFeature(feature)) {
    throw Error(ErrorCode::kConfigError, "recipe " + id() + ": image features pair only with cnn");
  }
  if (!force && !IsStandardPair(model, feature)) {
    throw Error(ErrorCode::kConfigError, "recipe " + id() + " is not a standard pairing; pass --force to run it");
  }
  switch (model) {
    case ModelKind::kLogReg:
      if (hp.logreg.epochs < 0 || !(hp.logreg.learning_rate > 0)) {
        throw Error(ErrorCode::kConfigError, "logreg needs epochs >= 0 and lr > 0");
      }
      break;
    case ModelKind::kSvm:
      if (!(hp.svm.c > 0) || !(hp.svm.gamma > 0) || !(hp.svm.tol > 0) || hp.svm.max_passes < 1) {
        throw Error(ErrorCode::kConfigError, "svm needs positive c, gamma, tol and max_passes");
      }
      break;
    case ModelKind::kCnn:
      hp.cnn_arch.Validate();
      if (hp.cnn.epochs < 0 || hp.cnn.batch_size < 1) throw Error(ErrorCode::kConfigError, "bad cnn epochs/batch");
      break;
    case ModelKind::kLstm:
      hp.lstm_arch.Validate();
      if (hp.lstm.epochs < 0 || hp.lstm.batch_size < 1) throw Error(ErrorCode::kConfigError, "bad lstm epochs/batch");
      break;
  }
}

void ModelRecipe::SetOverride(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorCode::kConfigError, "override must be key=value, got '" + std::string(assignment) + "'");
  }
  const std::string_view key = assignment.substr(0, eq);
  const std::string_view value = assignment.substr(eq + 1);
  if (key == "logreg.epochs") hp.logreg.epochs = ParseInt(key, value);
  else if (key == "logreg.lr") hp.logreg.learning_rate = ParseDouble(key, value);
  else if (key == "svm.c") hp.svm.c = ParseDouble(key, value);
  else if (key == "svm.gamma") hp.svm.gamma = ParseDouble(key, value);
  else if (key == "svm.tol") hp.svm.tol = ParseDouble(key, value);
  else if (key == "svm.max_passes") hp.svm.max_passes = ParseInt(key, value);
  else if (key == "cnn.epochs") hp.cnn.epochs = ParseInt(key, value);
  else if (key == "cnn.batch") hp.cnn.batch_size = ParseInt(key, value);
  else if (key == "cnn.lr") hp.cnn.adam.learning_rate = ParseDouble(key, value);
  else if (key == "cnn.filters1") hp.cnn_arch.filters1 = ParseInt(key, value);
  else if (key == "cnn.filters2") hp.cnn_arch.filters2 = ParseInt(key, value);
  else if (key == "cnn.dropout") hp.cnn_arch.dropout = ParseDouble(key, value);
  else if (key == "lstm.epochs") hp.lstm.epochs = ParseInt(key, value);
  else if (key == "lstm.batch") hp.lstm.batch_size = ParseInt(key, value);
  else if (key == "lstm.lr") hp.lstm.adam.learning_rate = ParseDouble(key, value);
  else if (key == "lstm.hidden") hp.lstm_arch.hidden = ParseInt(key, value);
  else if (key == "lstm.dense") hp.lstm_arch.dense = ParseInt(key, value);
  else if (key == "lstm.dropout") hp.lstm_arch.dropout = ParseDouble(key, value);
  else if (key == "lstm.loss") hp.lstm.loss = ParseLoss(value);
  else throw Error(ErrorCode::kConfigError, "unknown hyperparameter '" + std::string(key) + "'");
}

nlohmann::json ModelRecipe::ToJson() const {
  nlohmann::json h;
  switch (model) {
    case ModelKind::kLogReg:
      h = {{"epochs", hp.logreg.epochs}, {"learning_rate", hp.logreg.learning_rate}};
      break;
    case ModelKind::kSvm:
      h = {{"c", hp.svm.c}, {"gamma", hp.svm.gamma}, {"tol", hp.svm.tol}, {"max_passes", hp.svm.max_passes}};
      break;
    case ModelKind::kCnn:
      h = {{"epochs", hp.cnn.epochs},         {"batch_size", hp.cnn.batch_size},
           {"adam", AdamJson(hp.cnn.adam)},   {"height", hp.cnn_arch.height},
           {"width", hp.cnn_arch.width},      {"channels", hp.cnn_arch.channels},
           {"filters1", hp.cnn_arch.filters1}, {"filters2", hp.cnn_arch.filters2},
           {"dropout", hp.cnn_arch.dropout}};
      break;
    case ModelKind::kLstm:
      h = {{"epochs", hp.lstm.epochs},          {"batch_size", hp.lstm.batch_size},
           {"adam", AdamJson(hp.lstm.adam)},    {"loss", LossName(hp.lstm.loss)},
           {"input_size", hp.lstm_arch.input_size}, {"hidden", hp.lstm_arch.hidden},
           {"dense", hp.lstm_arch.dense},       {"dropout", hp.lstm_arch.dropout}};
      break;
  }
  return {{"model", ModelKindName(model)},
          {"feature", FeatureKindName(feature)},
          {"force", force},
          {"hyperparameters", h}};
}

ModelRecipe ModelRecipe::FromJson(const nlohmann::json& j) {
  try {
    ModelRecipe r;
    r.model = ParseModelKind(j.at("model").get<std::string>());
    r.feature = ParseFeatureKind(j.at("feature").get<std::string>());
    r.force = j.value("force", false);
    const nlohmann::json h = j.value("hyperparameters", nlohmann::json::object());
    switch (r.model) {
      case ModelKind::kLogReg:
        r.hp.logreg.epochs = h.value("epochs", r.hp.logreg.epochs);
        r.hp.logreg.learning_rate = h.value("learning_rate", r.hp.logreg.learning_rate);
        break;
      case ModelKind::kSvm:
        r.hp.svm.c = h.value("c", r.hp.svm.c);
        r.hp.svm.gamma = h.value("gamma", r.hp.svm.gamma);
        r.hp.svm.tol = h.value("tol", r.hp.svm.tol);
        r.hp.svm.max_passes = h.value("max_passes", r.hp.svm.max_passes);
        break;
      case ModelKind::kCnn:
        r.hp.cnn.epochs = h.value("epochs", r.hp.cnn.epochs);
        r.hp.cnn.batch_size = h.value("batch_size", r.hp.cnn.batch_size);
        if (h.contains("adam")) AdamFromJson(h["adam"], r.hp.cnn.adam);
        r.hp.cnn_arch.height = h.value("height", r.hp.cnn_arch.height);
        r.hp.cnn_arch.width = h.value("width", r.hp.cnn_arch.width);
        r.hp.cnn_arch.channels = h.value("channels", r.hp.cnn_arch.channels);
        r.hp.cnn_arch.filters1 = h.value("filters1", r.hp.cnn_arch.filters1);
        r.hp.cnn_arch.filters2 = h.value("filters2", r.hp.cnn_arch.filters2);
        r.hp.cnn_arch.dropout = h.value("dropout", r.hp.cnn_arch.dropout);
        break;
      case ModelKind::kLstm:
        r.hp.lstm.epochs = h.value("epochs", r.hp.lstm.epochs);
        r.hp.lstm.batch_size = h.value("batch_size", r.hp.lstm.batch_size);
        if (h.contains("adam")) AdamFromJson(h["adam"], r.hp.lstm.adam);
        if (h.contains("loss")) r.hp.lstm.loss = ParseLoss(h["loss"].get<std::string>());
        r.hp.lstm_arch.input_size = h.value("input_size", r.hp.lstm_arch.input_size);
        r.hp.lstm_arch.hidden = h.value("hidden", r.hp.lstm_arch.hidden);
        r.hp.lstm_arch.dense = h.value("dense", r.hp.lstm_arch.dense);
        r.hp.lstm_arch.dropout = h.value("dropout", r.hp.lstm_arch.dropout);
        break;
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("bad recipe: ") + e.what());
  }
}

nlohmann::json ExtractionConfig::ToJson() const {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : encoder.layers) {
    layers.push_back({l.kernel, l.stride, l.in_channels, l.out_channels});
  }
  return {{"frame_length", frame.frame_length},
          {"hop_length", frame.hop_length},
          {"centered", frame.centered},
          {"window", frame.window == Window::kHannPeriodic ? "hann_periodic" : "rectangular"},
          {"n_mels", mel.n_mels},
          {"n_mfcc", mel.n_mfcc},
          {"f_min", mel.f_min},
          {"f_max", mel.f_max},
          {"log_floor", mel.log_floor},
          {"sample_rate", kCanonicalSampleRate},
          {"encoder_layers", layers},
          {"encoder_source", encoder_source},
          {"encoder_seed", encoder_seed}};
}

AudioClip PrepareClip(const AudioClip& clip) {
  return PeakNormalize(ResampleLinear(clip, kCanonicalSampleRate));
}

AudioClip LoadClip(const std::filesystem::path& path) { return PrepareClip(LoadWavFile(path)); }

ExampleFeatures ExtractFeatures(const AudioClip& clip, FeatureKind kind, const ExtractionConfig& config) {
  ExampleFeatures out;
  out.kind = kind;
  switch (kind) {
    case FeatureKind::kMfccVector:
      out.vector = MfccMeanVector(ComputeMfcc(clip, config.frame, config.mel)).values;
      break;
    case FeatureKind::kMfccFrames:
      out.frames = ComputeMfcc(clip, config.frame, config.mel).values;
      break;
    case FeatureKind::kMfccImage:
      out.image = RenderImage(ComputeMfcc(clip, config.frame, config.mel)).pixels;
      break;
    case FeatureKind::kMelspecImage:
      out.image = RenderImage(ComputeMelSpectrogram(clip, config.frame, config.mel)).pixels;
      break;
    case FeatureKind::kEncoder:
      if (!config.encoder_weights) throw Error(ErrorCode::kConfigError, "encoder features need encoder weights");
      out.frames = ApplyEncoder(clip, config.encoder, *config.encoder_weights).values;
      break;
  }
  return out;
}

FeatureDump ToDump(const ExampleFeatures& f) {
  FeatureDump dump;
  switch (f.kind) {
    case FeatureKind::kMfccVector:
      dump.kind = FeatureDumpKind::kVector;
      dump.values = f.vector.transpose();
      return dump;
    case FeatureKind::kMfccFrames:
      dump.kind = FeatureDumpKind::kMfcc;
      dump.values = f.frames;
      return dump;
    case FeatureKind::kEncoder:
      dump.kind = FeatureDumpKind::kEncoder;
      dump.values = f.frames;
      return dump;
    case FeatureKind::kMfccImage:
    case FeatureKind::kMelspecImage: {
      FeatureImage image;
      image.pixels = f.image;
      image.source = f.kind == FeatureKind::kMfccImage ? ImageSource::kMfcc : ImageSource::kMelSpectrogram;
      if (image.pixels.size() != static_cast<std::size_t>(kImageSize) * kImageSize * kImageChannels) {
        throw Error(ErrorCode::kShapeMismatch, "image features must be 150x150x3");
      }
      return DumpFromImage(image);
    }
  }
  return dump;
}

ExampleFeatures FromDump(const FeatureDump& dump, FeatureKind kind) {
  ExampleFeatures f;
  f.kind = kind;
  auto require = [&](FeatureDumpKind expected) {
    if (dump.kind != expected) {
      throw Error(ErrorCode::kFeatureKindMismatch,
                  "dump tag " + std::to_string(static_cast<int>(dump.kind)) + " does not hold " +
                      std::string(FeatureKindName(kind)));
    }
  };
  switch (kind) {
    case FeatureKind::kMfccVector:
      require(FeatureDumpKind::kVector);
      if (dump.values.rows() != 1) throw Error(ErrorCode::kShapeMismatch, "vector dump must have one row");
      f.vector = dump.values.row(0).transpose();
      break;
    case FeatureKind::kMfccFrames:
      require(FeatureDumpKind::kMfcc);
      f.frames = dump.values;
      break;
    case FeatureKind::kEncoder:
      require(FeatureDumpKind::kEncoder);
      f.frames = dump.values;
      break;
    case FeatureKind::kMfccImage:
    case FeatureKind::kMelspecImage:
      require(kind == FeatureKind::kMfccImage ? FeatureDumpKind::kMfccImage
                                              : FeatureDumpKind::kMelSpectrogramImage);
      f.image = ImageFromDump(dump).pixels;
      break;
  }
  return f;
}

TrainedModel TrainModel(const ModelRecipe& recipe, std::span<const ExampleFeatures> examples,
                        std::span<const int> labels, std::uint64_t seed) {
  recipe.Validate();
  if (examples.size() != labels.size()) throw Error(ErrorCode::kLengthMismatch, "examples and labels differ in length");
  if (examples.empty()) throw Error(ErrorCode::kEmptyData, "no training examples");
  for (const auto& e : examples) {
    if (e.kind != recipe.feature) {
      throw Error(ErrorCode::kFeatureKindMismatch, "recipe " + recipe.id() + " got " +
                                                       std::string(FeatureKindName(e.kind)) + " features");
    }
  }

  TrainedModel out;
  out.recipe = recipe;
  const std::size_t n = examples.size();

  if (recipe.model == ModelKind::kCnn) {
    std::vector<std::vector<float>> images(n);
    for (std::size_t i = 0; i < n; ++i) images[i] = examples[i].image;
    CnnTrainOptions opts = recipe.hp.cnn;
    opts.seed = seed;
    out.model = TrainCnn(images, labels, recipe.hp.cnn_arch, opts);
    return out;
  }

  if (recipe.model == ModelKind::kLstm && LstmUsesFrames(recipe.feature)) {
    std::vector<Vector> frame_rows;
    for (const auto& e : examples) {
      if (e.frames.rows() == 0) throw Error(ErrorCode::kEmptySequence, "training example has no frames");
      for (Eigen::Index r = 0; r < e.frames.rows(); ++r) frame_rows.push_back(e.frames.row(r).transpose());
    }
    out.standardizer = RoundedStandardizer(Standardizer::Fit(frame_rows));
    std::vector<RowMatrix> sequences(n);
    for (std::size_t i = 0; i < n; ++i) sequences[i] = out.standardizer->ApplyRows(examples[i].frames);
    out.recipe.hp.lstm_arch.input_size = static_cast<int>(examples[0].frames.cols());
    LstmTrainOptions opts = recipe.hp.lstm;
    opts.seed = seed;
    LstmModel lstm = TrainLstm(sequences, labels, out.recipe.hp.lstm_arch, opts);
    for (double& p : lstm.net.params()) p = ToFloat(p);
    out.model = std::move(lstm);
    return out;
  }

  std::vector<Vector> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = AsVector(examples[i]);
  out.standardizer = RoundedStandardizer(Standardizer::Fit(rows));
  for (auto& r : rows) r = out.standardizer->Apply(r);

  switch (recipe.model) {
    case ModelKind::kLogReg: {
      LogRegModel lr = TrainLogReg(rows, labels, recipe.hp.logreg);
      lr.weights = ToFloat(lr.weights);
      lr.bias = ToFloat(lr.bias);
      if (recipe.feature == FeatureKind::kEncoder) {
        out.model = EncoderHeadModel{lr};
      } else {
        out.model = lr;
      }
      break;
    }
    case ModelKind::kSvm: {
      SvmModel svm = TrainSvmSmo(rows, labels, recipe.hp.svm).model;
      svm.support_vectors = svm.support_vectors.unaryExpr([](double x) { return ToFloat(x); });
      svm.dual_coefs = ToFloat(svm.dual_coefs);
      svm.bias = ToFloat(svm.bias);
      out.model = svm;
      break;
    }
    case ModelKind::kLstm: {
      std::vector<RowMatrix> sequences(n);
      for (std::size_t i = 0; i < n; ++i) sequences[i] = VectorAsSequence(rows[i]);
      out.recipe.hp.lstm_arch.input_size = 1;
      LstmTrainOptions opts = recipe.hp.lstm;
      opts.seed = seed;
      LstmModel lstm = TrainLstm(sequences, labels, out.recipe.hp.lstm_arch, opts);
      for (double& p : lstm.net.params()) p = ToFloat(p);
      out.model = std::move(lstm);
      break;
    }
    case ModelKind::kCnn:
      break;
  }
  return out;
}

double RawDecision(const TrainedModel& model, const ExampleFeatures& f) {
  CheckKind(model, f);
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LogRegModel>) {
          return m.Logit(StandardizedVector(model, f));
        } else if constexpr (std::is_same_v<M, EncoderHeadModel>) {
          return m.head.Logit(StandardizedVector(model, f));
        } else if constexpr (std::is_same_v<M, SvmModel>) {
          return m.DecisionValue(StandardizedVector(model, f));
        } else if constexpr (std::is_same_v<M, CnnModel>) {
          const double p = m.Score(f.image);
          return std::log(p) - std::log1p(-p);
        } else {
          const double p = m.Score(LstmSequence(model, f));
          return std::log(p) - std::log1p(-p);
        }
      },
      model.model);
}

double PredictScore(const TrainedModel& model, const ExampleFeatures& f) {
  CheckKind(model, f);
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LogRegModel>) {
          return m.Score(StandardizedVector(model, f));
        } else if constexpr (std::is_same_v<M, EncoderHeadModel>) {
          return m.head.Score(StandardizedVector(model, f));
        } else if constexpr (std::is_same_v<M, SvmModel>) {
          return m.Score(StandardizedVector(model, f));
        } else if constexpr (std::is_same_v<M, CnnModel>) {
          if (f.image.size() != m.net.arch().input_size()) {
            throw Error(ErrorCode::kShapeMismatch, "image size does not match the network input");
          }
          return m.Score(f.image);
        } else {
          return m.Score(LstmSequence(model, f));
        }
      },
      model.model);
}

std::vector<std::uint8_t> SerializeModel(const TrainedModel& model) {
  ByteWriter w;
  w.Magic("VXM1");
  const auto tag = static_cast<ModelTag>(model.model.index());
  w.U8(static_cast<std::uint8_t>(tag));
  w.String(model.recipe.ToJson().dump());
  w.String(model.recipe.id());
  w.U8(model.standardizer ? 1 : 0);
  if (model.standardizer) {
    w.FloatArray<double>(AsSpan(model.standardizer->mean()));
    w.FloatArray<double>(AsSpan(model.standardizer->scale()));
  }
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LogRegModel>) {
          w.FloatArray<double>(AsSpan(m.weights));
          w.F32(static_cast<float>(m.bias));
        } else if constexpr (std::is_same_v<M, EncoderHeadModel>) {
          w.FloatArray<double>(AsSpan(m.head.weights));
          w.F32(static_cast<float>(m.head.bias));
        } else if constexpr (std::is_same_v<M, SvmModel>) {
          w.U32(static_cast<std::uint32_t>(m.support_vectors.rows()));
          w.U32(static_cast<std::uint32_t>(m.support_vectors.cols()));
          w.FloatArray<double>({m.support_vectors.data(), static_cast<std::size_t>(m.support_vectors.size())});
          w.FloatArray<double>(AsSpan(m.dual_coefs));
          w.F32(static_cast<float>(m.bias));
          w.U8(m.converged ? 1 : 0);
          w.U32(static_cast<std::uint32_t>(std::min<long long>(m.iterations, 0xffffffffLL)));
        } else if constexpr (std::is_same_v<M, CnnModel>) {
          w.FloatArray<float>(m.net.params());
        } else {
          w.FloatArray<double>(m.net.params());
        }
      },
      model.model);
  return std::move(w.bytes());
}

TrainedModel ParseModel(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.ExpectMagic("VXM1");
  const std::uint8_t tag = r.U8();
  if (tag > static_cast<std::uint8_t>(ModelTag::kEncoderHead)) {
    throw Error(ErrorCode::kMalformedFile, "unknown model tag " + std::to_string(tag));
  }
  TrainedModel out;
  const std::string recipe_text = r.String();
  nlohmann::json recipe_json;
  try {
    recipe_json = nlohmann::json::parse(recipe_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedFile, std::string("bad hyperparameter block: ") + e.what());
  }
  out.recipe = ModelRecipe::FromJson(recipe_json);
  const std::string id = r.String();
  if (id != out.recipe.id()) throw Error(ErrorCode::kMalformedFile, "recipe id '" + id + "' disagrees with block");
  if (r.U8() != 0) {
    const auto mean = r.FloatArray();
    const auto scale = r.FloatArray();
    if (mean.size() != scale.size()) throw Error(ErrorCode::kMalformedFile, "standardizer size mismatch");
    out.standardizer = Standardizer(Vector::Map(mean.data(), static_cast<Eigen::Index>(mean.size())),
                                    Vector::Map(scale.data(), static_cast<Eigen::Index>(scale.size())));
  }
  auto to_vector = [](const std::vector<double>& v) {
    return Vector(Vector::Map(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  auto copy_params = [](const auto& src, auto dst) {
    if (src.size() != dst.size()) {
      throw Error(ErrorCode::kMalformedFile, "parameter count " + std::to_string(src.size()) + " != " +
                                                 std::to_string(dst.size()));
    }
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<typename decltype(dst)::value_type>(src[i]);
  };
  switch (static_cast<ModelTag>(tag)) {
    case ModelTag::kLogReg:
    case ModelTag::kEncoderHead: {
      LogRegModel lr;
      lr.weights = to_vector(r.FloatArray());
      lr.bias = r.F32();
      if (static_cast<ModelTag>(tag) == ModelTag::kEncoderHead) {
        out.model = EncoderHeadModel{lr};
      } else {
        out.model = lr;
      }
      break;
    }
    case ModelTag::kSvm: {
      SvmModel svm;
      const std::uint32_t rows = r.U32();
      const std::uint32_t cols = r.U32();
      const auto sv = r.FloatArray();
      if (sv.size() != static_cast<std::size_t>(rows) * cols) {
        throw Error(ErrorCode::kMalformedFile, "support vector block size mismatch");
      }
      svm.support_vectors = RowMatrix::Map(sv.data(), rows, cols);
      svm.dual_coefs = to_vector(r.FloatArray());
      if (svm.dual_coefs.size() != static_cast<Eigen::Index>(rows)) {
        throw Error(ErrorCode::kMalformedFile, "dual coefficient count mismatch");
      }
      svm.bias = r.F32();
      svm.converged = r.U8() != 0;
      svm.iterations = r.U32();
      svm.gamma = out.recipe.hp.svm.gamma;
      svm.c = out.recipe.hp.svm.c;
      out.model = svm;
      break;
    }
    case ModelTag::kCnn: {
      CnnModel cnn;
      cnn.net = ConvNet<float>(out.recipe.hp.cnn_arch);
      copy_params(r.FloatArray(), cnn.net.params());
      out.model = std::move(cnn);
      break;
    }
    case ModelTag::kLstm: {
      LstmModel lstm;
      lstm.net = BiLstm(out.recipe.hp.lstm_arch);
      copy_params(r.FloatArray(), lstm.net.params());
      out.model = std::move(lstm);
      break;
    }
  }
  if (!r.AtEnd()) throw Error(ErrorCode::kMalformedFile, "trailing bytes after model");
  return out;
}

}  // namespace voxscreen
