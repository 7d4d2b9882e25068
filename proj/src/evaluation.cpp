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

#include "voxscreen/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "voxscreen/error.hpp"
#include "voxscreen/parallel.hpp"
#include "voxscreen/rng.hpp"

namespace voxscreen {
namespace {

nlohmann::json OptionalJson(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> OptionalFromJson(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

std::optional<double> Ratio(long long num, long long den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string FormatDouble(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Fixed(const std::optional<double>& v, int decimals) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, *v);
  return buf;
}

void CheckLabels(std::span<const int> labels) {
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::kBadLabel, "labels must be 0 or 1");
  }
}

}  // namespace

std::vector<std::size_t> FoldPlan::TestIndices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::TrainIndices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan StratifiedFolds(std::span<const int> labels, int k, std::uint64_t seed) {
  CheckLabels(labels);
  if (k < 2) throw Error(ErrorCode::kConfigError, "k must be at least 2");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < static_cast<std::size_t>(k)) {
      throw Error(ErrorCode::kInsufficientClassCount,
                  "class " + std::to_string(c) + " has " + std::to_string(by_class[c].size()) +
                      " examples, fewer than k=" + std::to_string(k));
    }
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignment.assign(labels.size(), -1);
  Rng rng(seed);
  std::size_t next = 0;
  for (int c : {1, 0}) {
    auto& members = by_class[c];
    rng.Shuffle(members);
    for (std::size_t idx : members) {
      plan.assignment[idx] = static_cast<int>(next % static_cast<std::size_t>(k));
      ++next;
    }
  }
  return plan;
}

ConfusionCounts ConfusionAtThreshold(std::span<const double> scores, std::span<const int> labels,
                                     double threshold) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::kLengthMismatch, "scores and labels differ in length");
  CheckLabels(labels);
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      predicted ? ++c.tp : ++c.fn;
    } else {
      predicted ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

Metrics ComputeMetrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error(ErrorCode::kEmptyEvaluation, "no evaluated examples");
  Metrics m;
  m.accuracy = Ratio(c.tp + c.tn, c.total());
  m.sensitivity = Ratio(c.tp, c.tp + c.fn);
  m.specificity = Ratio(c.tn, c.tn + c.fp);
  m.ppv = Ratio(c.tp, c.tp + c.fp);
  m.npv = Ratio(c.tn, c.tn + c.fn);
  return m;
}

RocCurve RocAuc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::kLengthMismatch, "scores and labels differ in length");
  CheckLabels(labels);
  long long n_pos = 0;
  for (int y : labels) n_pos += y;
  const long long n_neg = static_cast<long long>(labels.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error(ErrorCode::kSingleClassData, "ROC needs both classes");
  for (double s : scores) {
    if (std::isnan(s)) throw Error(ErrorCode::kDomainError, "NaN score");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  long long tp = 0, fp = 0;
  // Twice the area in units of one (positive, negative) pair.
  long long doubled_area = 0;
  for (std::size_t at = 0; at < order.size();) {
    const double threshold = scores[order[at]];
    long long p = 0, q = 0;
    while (at < order.size() && scores[order[at]] == threshold) {
      labels[order[at]] == 1 ? ++p : ++q;
      ++at;
    }
    doubled_area += q * (2 * tp + p);
    tp += p;
    fp += q;
    roc.points.push_back({threshold, static_cast<double>(fp) / n_neg, static_cast<double>(tp) / n_pos});
  }
  roc.auc = static_cast<double>(doubled_area) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
  return roc;
}

std::string MetricSummary::Cell() const {
  if (!mean) return "n/a";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f±%.2f", *mean, std.value_or(0.0));
  return buf;
}

MetricSummary Summarize(std::span<const std::optional<double>> values) {
  MetricSummary s;
  double sum = 0.0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++s.count;
    }
  }
  if (s.count == 0) return s;
  const double mean = sum / s.count;
  double sq = 0.0;
  for (const auto& v : values) {
    if (v) sq += (*v - mean) * (*v - mean);
  }
  s.mean = mean;
  s.std = std::sqrt(sq / s.count);
  return s;
}

std::optional<double> MetricByName(const Metrics& m, std::string_view name) {
  if (name == "accuracy") return m.accuracy;
  if (name == "sensitivity") return m.sensitivity;
  if (name == "specificity") return m.specificity;
  if (name == "ppv") return m.ppv;
  if (name == "npv") return m.npv;
  throw Error(ErrorCode::kConfigError, "unknown metric '" + std::string(name) + "'");
}

MetricSummary EvaluationReport::Aggregate(std::string_view metric) const {
  std::vector<std::optional<double>> values;
  for (const auto& f : folds) values.push_back(metric == "auc" ? f.auc : MetricByName(f.metrics, metric));
  return Summarize(values);
}

std::string ConfigFingerprint(const nlohmann::json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

EvaluationReport CrossValidate(std::span<const ExampleFeatures> examples, std::span<const int> labels,
                               const ModelRecipe& recipe, const CvOptions& options) {
  if (examples.size() != labels.size()) throw Error(ErrorCode::kLengthMismatch, "examples and labels differ in length");
  recipe.Validate();
  const FoldPlan plan = StratifiedFolds(labels, options.k, options.seed);

  EvaluationReport report;
  report.config = {{"recipe", recipe.ToJson()},
                   {"recipe_id", recipe.id()},
                   {"k", options.k},
                   {"seed", options.seed},
                   {"threshold", options.threshold},
                   {"n_examples", examples.size()},
                   {"context", options.context}};
  report.fingerprint = ConfigFingerprint(report.config);
  report.folds.resize(static_cast<std::size_t>(options.k));
  report.out_of_fold_scores.assign(examples.size(), 0.0);

  auto run_fold = [&](int fold) {
    const auto train_idx = plan.TrainIndices(fold);
    const auto test_idx = plan.TestIndices(fold);
    std::vector<ExampleFeatures> train;
    std::vector<int> train_labels;
    train.reserve(train_idx.size());
    for (std::size_t i : train_idx) {
      train.push_back(examples[i]);
      train_labels.push_back(labels[i]);
    }
    const TrainedModel model = TrainModel(recipe, train, train_labels, MixSeed(options.seed, 1000 + fold));
    std::vector<double> scores;
    std::vector<int> test_labels;
    for (std::size_t i : test_idx) {
      const double s = PredictScore(model, examples[i]);
      report.out_of_fold_scores[i] = s;
      scores.push_back(s);
      test_labels.push_back(labels[i]);
    }
    FoldResult& r = report.folds[static_cast<std::size_t>(fold)];
    r.fold = fold;
    r.n_train = train_idx.size();
    r.n_test = test_idx.size();
    r.counts = ConfusionAtThreshold(scores, test_labels, options.threshold);
    r.metrics = ComputeMetrics(r.counts);
    if (r.counts.tp + r.counts.fn > 0 && r.counts.tn + r.counts.fp > 0) {
      r.auc = RocAuc(scores, test_labels).auc;
    }
  };

  ParallelFor(static_cast<std::size_t>(options.k), options.jobs,
              [&](std::size_t fold) { run_fold(static_cast<int>(fold)); });
  report.pooled_roc = RocAuc(report.out_of_fold_scores, labels);
  return report;
}

nlohmann::json ReportToJson(const EvaluationReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.folds) {
    nlohmann::json j = {{"fold", f.fold}, {"n_train", f.n_train}, {"n_test", f.n_test},
                        {"tp", f.counts.tp}, {"fp", f.counts.fp}, {"tn", f.counts.tn},
                        {"fn", f.counts.fn}, {"auc", OptionalJson(f.auc)}};
    for (const char* name : kMetricNames) j[name] = OptionalJson(MetricByName(f.metrics, name));
    folds.push_back(std::move(j));
  }
  nlohmann::json aggregate = nlohmann::json::object();
  auto add = [&](const char* name) {
    const MetricSummary s = report.Aggregate(name);
    aggregate[name] = {{"mean", OptionalJson(s.mean)}, {"std", OptionalJson(s.std)},
                       {"count", s.count}, {"cell", s.Cell()}};
  };
  for (const char* name : kMetricNames) add(name);
  add("auc");
  nlohmann::json roc = nlohmann::json::array();
  for (const auto& p : report.pooled_roc.points) {
    roc.push_back({std::isinf(p.threshold) ? nlohmann::json(nullptr) : nlohmann::json(p.threshold), p.fpr, p.tpr});
  }
  return {{"config", report.config},
          {"fingerprint", report.fingerprint},
          {"folds", folds},
          {"aggregate", aggregate},
          {"pooled_auc", report.pooled_roc.auc},
          {"roc", roc},
          {"out_of_fold_scores", report.out_of_fold_scores}};
}

EvaluationReport ReportFromJson(const nlohmann::json& j) {
  try {
    EvaluationReport r;
    r.config = j.at("config");
    r.fingerprint = j.at("fingerprint").get<std::string>();
    for (const auto& f : j.at("folds")) {
      FoldResult fr;
      fr.fold = f.at("fold").get<int>();
      fr.n_train = f.at("n_train").get<std::size_t>();
      fr.n_test = f.at("n_test").get<std::size_t>();
      fr.counts = {f.at("tp").get<long long>(), f.at("fp").get<long long>(), f.at("tn").get<long long>(),
                   f.at("fn").get<long long>()};
      fr.metrics.accuracy = OptionalFromJson(f, "accuracy");
      fr.metrics.sensitivity = OptionalFromJson(f, "sensitivity");
      fr.metrics.specificity = OptionalFromJson(f, "specificity");
      fr.metrics.ppv = OptionalFromJson(f, "ppv");
      fr.metrics.npv = OptionalFromJson(f, "npv");
      fr.auc = OptionalFromJson(f, "auc");
      r.folds.push_back(fr);
    }
    r.pooled_roc.auc = j.at("pooled_auc").get<double>();
    for (const auto& p : j.at("roc")) {
      const double t = p.at(0).is_null() ? std::numeric_limits<double>::infinity() : p.at(0).get<double>();
      r.pooled_roc.points.push_back({t, p.at(1).get<double>(), p.at(2).get<double>()});
    }
    if (j.contains("out_of_fold_scores")) r.out_of_fold_scores = j["out_of_fold_scores"].get<std::vector<double>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedFile, std::string("bad report: ") + e.what());
  }
}

std::string FormatReportTable(const EvaluationReport& report) {
  std::ostringstream out;
  const auto& cfg = report.config;
  out << "recipe       " << cfg.value("recipe_id", std::string("?")) << "\n";
  if (cfg.contains("context") && cfg["context"].contains("cohort")) {
    out << "cohort       " << cfg["context"]["cohort"].get<std::string>() << "\n";
  }
  out << "k            " << cfg.value("k", 0) << "\n";
  out << "seed         " << cfg.value("seed", std::uint64_t{0}) << "\n";
  out << "threshold    " << cfg.value("threshold", 0.5) << "\n";
  out << "fingerprint  " << report.fingerprint << "\n\n";

  char line[256];
  std::snprintf(line, sizeof line, "%-5s %6s %5s %5s %5s %5s %9s %11s %11s %6s %6s %6s\n", "fold", "n_test", "tp",
                "fp", "tn", "fn", "accuracy", "sensitivity", "specificity", "ppv", "npv", "auc");
  out << line;
  for (const auto& f : report.folds) {
    std::snprintf(line, sizeof line, "%-5d %6zu %5lld %5lld %5lld %5lld %9s %11s %11s %6s %6s %6s\n", f.fold,
                  f.n_test, f.counts.tp, f.counts.fp, f.counts.tn, f.counts.fn, Fixed(f.metrics.accuracy, 3).c_str(),
                  Fixed(f.metrics.sensitivity, 3).c_str(), Fixed(f.metrics.specificity, 3).c_str(),
                  Fixed(f.metrics.ppv, 3).c_str(), Fixed(f.metrics.npv, 3).c_str(), Fixed(f.auc, 3).c_str());
    out << line;
  }
  out << "\n";
  for (const char* name : kMetricNames) {
    std::snprintf(line, sizeof line, "%-12s %s\n", name, report.Aggregate(name).Cell().c_str());
    out << line;
  }
  std::snprintf(line, sizeof line, "%-12s %s\n", "fold auc", report.Aggregate("auc").Cell().c_str());
  out << line;
  std::snprintf(line, sizeof line, "%-12s %.4f\n", "pooled auc", report.pooled_roc.auc);
  out << line;
  return out.str();
}

std::string RocCsv(const RocCurve& roc) {
  std::string out = "threshold,fpr,tpr\n";
  for (const auto& p : roc.points) {
    out += FormatDouble(p.threshold) + "," + FormatDouble(p.fpr) + "," + FormatDouble(p.tpr) + "\n";
  }
  return out;
}

}  // namespace voxscreen
