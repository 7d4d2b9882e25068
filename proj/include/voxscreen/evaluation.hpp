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

#ifndef VOXSCREEN_EVALUATION_HPP_
#define VOXSCREEN_EVALUATION_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "voxscreen/model.hpp"

namespace voxscreen {

struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<int> assignment;  // example index -> fold

  std::vector<std::size_t> TestIndices(int fold) const;
  std::vector<std::size_t> TrainIndices(int fold) const;
};

// Shuffles each class with the seed and deals it round-robin into k folds.
// The negatives' dealing continues from the fold after the last positive.
FoldPlan StratifiedFolds(std::span<const int> labels, int k, std::uint64_t seed);

struct ConfusionCounts {
  long long tp = 0, fp = 0, tn = 0, fn = 0;
  long long total() const { return tp + fp + tn + fn; }
};

// Predicts positive iff score >= threshold.
ConfusionCounts ConfusionAtThreshold(std::span<const double> scores, std::span<const int> labels,
                                     double threshold = 0.5);

// Ratios with a zero denominator are absent.
struct Metrics {
  std::optional<double> accuracy, sensitivity, specificity, ppv, npv;
};

Metrics ComputeMetrics(const ConfusionCounts& c);

struct RocPoint {
  double threshold;  // +inf for the (0, 0) start
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// One point per distinct score, thresholds descending.
RocCurve RocAuc(std::span<const double> scores, std::span<const int> labels);

struct FoldResult {
  int fold = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  ConfusionCounts counts;
  Metrics metrics;
  std::optional<double> auc;
};

struct MetricSummary {
  std::optional<double> mean;
  std::optional<double> std;  // population
  int count = 0;              // folds where the metric was defined

  // "m±s" with two decimals, "n/a" when absent.
  std::string Cell() const;
};

MetricSummary Summarize(std::span<const std::optional<double>> values);

inline constexpr const char* kMetricNames[] = {"accuracy", "sensitivity", "specificity", "ppv", "npv"};

std::optional<double> MetricByName(const Metrics& m, std::string_view name);

struct EvaluationReport {
  nlohmann::json config;  // recipe, k, seed, threshold and caller context
  std::string fingerprint;
  std::vector<FoldResult> folds;
  std::vector<double> out_of_fold_scores;  // indexed like the input examples
  RocCurve pooled_roc;

  MetricSummary Aggregate(std::string_view metric) const;  // five metrics or "auc"
};

// FNV-1a 64 over the compact JSON dump, as 16 hex digits.
std::string ConfigFingerprint(const nlohmann::json& config);

struct CvOptions {
  int k = 10;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  int jobs = 1;  // folds trained concurrently
  nlohmann::json context = nlohmann::json::object();
};

// Every fold fits its preprocessing and model on the training split only.
EvaluationReport CrossValidate(std::span<const ExampleFeatures> examples, std::span<const int> labels,
                               const ModelRecipe& recipe, const CvOptions& options);

nlohmann::json ReportToJson(const EvaluationReport& report);
EvaluationReport ReportFromJson(const nlohmann::json& j);
std::string FormatReportTable(const EvaluationReport& report);
std::string RocCsv(const RocCurve& roc);

}  // namespace voxscreen

#endif  // VOXSCREEN_EVALUATION_HPP_
