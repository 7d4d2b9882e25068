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

#include "voxscreen/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "voxscreen/datasets.hpp"
#include "voxscreen/error.hpp"
#include "voxscreen/evaluation.hpp"
#include "voxscreen/feature_io.hpp"
#include "voxscreen/model.hpp"
#include "voxscreen/parallel.hpp"

namespace voxscreen {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct PipelineOptions {
  std::string manifest;
  std::string feature = "mfcc_vector";
  std::string cohort = "all";
  std::string encoder_weights;
  std::uint64_t encoder_seed = 0;
  bool encoder_seed_set = false;
  int frame_length = 2048;
  int hop_length = 512;
  int n_mels = 64;
  int jobs = 1;
};

struct CvCommandOptions {
  PipelineOptions pipeline;
  std::string model = "logreg";
  std::vector<std::string> overrides;
  bool force = false;
  int k = 10;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  std::string out;
  std::string features_dir;
};

struct LoadedCorpus {
  std::vector<LabeledExample> examples;
  std::vector<fs::path> clip_paths;
  int missing_delay = 0;
  std::string cohort_name;
};

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

std::string ReadText(const fs::path& path) {
  const auto bytes = ReadFile(path);
  return std::string(bytes.begin(), bytes.end());
}

std::uint64_t Fnv1a(std::span<const std::uint8_t> bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void AddPipelineFlags(CLI::App* cmd, PipelineOptions& p) {
  cmd->add_option("--manifest", p.manifest, "Manifest CSV")->required();
  cmd->add_option("--feature", p.feature, "mfcc_vector, mfcc_image, melspec_image, encoder or mfcc_frames");
  cmd->add_option("--cohort", p.cohort, "all, positives_within_days:N or covid_vs_cold_symptomatic");
  cmd->add_option("--encoder-weights", p.encoder_weights, "VXW1 weight file (seeded weights otherwise)");
  cmd->add_option("--encoder-seed", p.encoder_seed, "Seed for encoder weights")->each([&p](const std::string&) {
    p.encoder_seed_set = true;
  });
  cmd->add_option("--frame-length", p.frame_length, "STFT frame length (power of two)");
  cmd->add_option("--hop", p.hop_length, "STFT hop length");
  cmd->add_option("--n-mels", p.n_mels, "Mel band count");
}

json PipelineJson(const PipelineOptions& p) {
  return {{"manifest", p.manifest},
          {"feature", p.feature},
          {"cohort", p.cohort},
          {"encoder_weights", p.encoder_weights},
          {"encoder_seed", p.encoder_seed},
          {"frame_length", p.frame_length},
          {"hop_length", p.hop_length},
          {"n_mels", p.n_mels}};
}

ExtractionConfig MakeExtractionConfig(const PipelineOptions& p, std::uint64_t seed) {
  ExtractionConfig cfg;
  cfg.frame.frame_length = p.frame_length;
  cfg.frame.hop_length = p.hop_length;
  cfg.frame.Validate();
  cfg.mel.n_mels = p.n_mels;
  cfg.mel.Validate(kCanonicalSampleRate);
  if (ParseFeatureKind(p.feature) == FeatureKind::kEncoder) {
    if (!p.encoder_weights.empty()) {
      cfg.encoder_weights = std::make_shared<EncoderWeights>(LoadEncoderWeights(p.encoder_weights, cfg.encoder));
      cfg.encoder_source = p.encoder_weights;
    } else {
      cfg.encoder_seed = p.encoder_seed_set ? p.encoder_seed : seed;
      cfg.encoder_weights = std::make_shared<EncoderWeights>(EncoderWeights::Seeded(cfg.encoder, cfg.encoder_seed));
    }
  }
  return cfg;
}

LoadedCorpus LoadCorpus(const PipelineOptions& p, std::ostream& err) {
  LoadedCorpus corpus;
  const auto all = LoadManifest(p.manifest);
  const CohortFilter filter = CohortFilter::Parse(p.cohort);
  CohortResult cohort = ApplyCohort(all, filter);
  corpus.examples = std::move(cohort.examples);
  corpus.missing_delay = cohort.missing_delay;
  corpus.cohort_name = filter.Name();
  if (corpus.missing_delay > 0) {
    err << "warning: " << corpus.missing_delay << " positive rows lack test_delay_days and were excluded\n";
  }
  const fs::path base = fs::path(p.manifest).parent_path();
  for (const auto& e : corpus.examples) {
    const fs::path clip(e.clip_path);
    corpus.clip_paths.push_back(clip.is_absolute() ? clip : base / clip);
  }
  return corpus;
}

// Extracts every clip; failures are reported per path and rethrown as one error.
std::vector<ExampleFeatures> ExtractAll(const LoadedCorpus& corpus, FeatureKind kind, const ExtractionConfig& cfg,
                                        int jobs, std::ostream& err) {
  std::vector<ExampleFeatures> features(corpus.clip_paths.size());
  std::vector<std::string> failures(corpus.clip_paths.size());
  ParallelFor(corpus.clip_paths.size(), jobs, [&](std::size_t i) {
    try {
      features[i] = ExtractFeatures(LoadClip(corpus.clip_paths[i]), kind, cfg);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });
  int failed = 0;
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (!failures[i].empty()) {
      err << "error: " << corpus.clip_paths[i].string() << ": " << failures[i] << "\n";
      ++failed;
    }
  }
  if (failed > 0) throw Error(ErrorCode::kIoError, std::to_string(failed) + " clip(s) failed to extract");
  return features;
}

struct IndexRow {
  std::string path;
  int label = 0;
  std::string feature_file;
  std::string hash;
};

constexpr std::string_view kIndexHeader = "path,label,feature_file,content_hash";

std::map<std::string, IndexRow> ReadIndex(const fs::path& path) {
  std::map<std::string, IndexRow> rows;
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line) || line != kIndexHeader) return rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) continue;
    rows[cells[0]] = {cells[0], std::atoi(cells[1].c_str()), cells[2], cells[3]};
  }
  return rows;
}

// Features listed in an extract index, in manifest order.
std::vector<ExampleFeatures> LoadIndexedFeatures(const LoadedCorpus& corpus, FeatureKind kind,
                                                 const fs::path& dir) {
  const auto index = ReadIndex(dir / "index.csv");
  if (index.empty()) throw Error(ErrorCode::kIoError, "no usable index.csv in " + dir.string());
  std::vector<ExampleFeatures> out;
  for (const auto& e : corpus.examples) {
    const auto it = index.find(e.clip_path);
    if (it == index.end()) throw Error(ErrorCode::kIoError, "index has no entry for " + e.clip_path);
    out.push_back(FromDump(ParseFeatureDump(ReadFile(dir / it->second.feature_file)), kind));
  }
  return out;
}

json ConfigFile(std::string_view command, int argc, const char* const* argv, json options) {
  std::vector<std::string> args(argv, argv + argc);
  json j = {{"command", command}, {"argv", args}, {"options", std::move(options)}};
  j["fingerprint"] = ConfigFingerprint(j["options"]);
  return j;
}

std::vector<int> Labels(const LoadedCorpus& corpus) {
  std::vector<int> labels;
  for (const auto& e : corpus.examples) labels.push_back(e.label);
  return labels;
}

ModelRecipe MakeRecipe(const CvCommandOptions& o) {
  ModelRecipe recipe;
  recipe.model = ParseModelKind(o.model);
  recipe.feature = ParseFeatureKind(o.pipeline.feature);
  recipe.force = o.force;
  for (const auto& s : o.overrides) recipe.SetOverride(s);
  recipe.Validate();
  return recipe;
}

CvOptions MakeCvOptions(const CvCommandOptions& o, const LoadedCorpus& corpus, const ExtractionConfig& cfg) {
  CvOptions cv;
  cv.k = o.k;
  cv.seed = o.seed;
  cv.threshold = o.threshold;
  cv.jobs = o.pipeline.jobs;
  cv.context = {{"manifest", o.pipeline.manifest},
                {"cohort", corpus.cohort_name},
                {"missing_delay", corpus.missing_delay},
                {"feature_config", cfg.ToJson()}};
  return cv;
}

std::vector<ExampleFeatures> CorpusFeatures(const CvCommandOptions& o, const LoadedCorpus& corpus,
                                            const ExtractionConfig& cfg, std::ostream& err) {
  const FeatureKind kind = ParseFeatureKind(o.pipeline.feature);
  if (!o.features_dir.empty()) return LoadIndexedFeatures(corpus, kind, o.features_dir);
  return ExtractAll(corpus, kind, cfg, o.pipeline.jobs, err);
}

void AddCvFlags(CLI::App* cmd, CvCommandOptions& o) {
  AddPipelineFlags(cmd, o.pipeline);
  cmd->add_option("--k", o.k, "Fold count")->check(CLI::Range(2, 1000));
  cmd->add_option("--seed", o.seed, "Run seed (default $VOXSCREEN_SEED)");
  cmd->add_option("--threshold", o.threshold, "Operating threshold for the confusion metrics");
  cmd->add_option("--set", o.overrides, "Hyperparameter override key=value (repeatable)");
  cmd->add_flag("--force", o.force, "Allow non-standard model/feature pairs");
  cmd->add_option("--out", o.out, "Output directory")->required();
  cmd->add_option("--features", o.features_dir, "Reuse an extract output directory");
}

json CvOptionsJson(const CvCommandOptions& o) {
  return {{"pipeline", PipelineJson(o.pipeline)}, {"model", o.model},   {"overrides", o.overrides},
          {"force", o.force},                     {"k", o.k},            {"seed", o.seed},
          {"threshold", o.threshold},             {"features", o.features_dir}};
}

int CmdSynth(int n_pos, int n_neg, std::uint64_t seed, const std::string& out_dir, double duration, int argc,
             const char* const* argv, std::ostream& out) {
  GenerateSyntheticCorpus(n_pos, n_neg, seed, out_dir, duration);
  const json options = {{"n_pos", n_pos}, {"n_neg", n_neg}, {"seed", seed}, {"duration", duration}};
  WriteText(fs::path(out_dir) / "config.json", ConfigFile("synth", argc, argv, options).dump(2) + "\n");
  out << "wrote " << (n_pos + n_neg) << " clips and manifest.csv to " << out_dir << "\n";
  return 0;
}

int CmdExtract(const PipelineOptions& p, const std::string& out_dir, bool png, std::uint64_t seed, int argc,
               const char* const* argv, std::ostream& out, std::ostream& err) {
  const FeatureKind kind = ParseFeatureKind(p.feature);
  const LoadedCorpus corpus = LoadCorpus(p, err);
  const ExtractionConfig cfg = MakeExtractionConfig(p, seed);
  const fs::path dir(out_dir);
  fs::create_directories(dir / "features");
  const auto previous = ReadIndex(dir / "index.csv");
  const std::string cfg_text = cfg.ToJson().dump() + std::string(FeatureKindName(kind));
  const std::span<const std::uint8_t> cfg_bytes(reinterpret_cast<const std::uint8_t*>(cfg_text.data()),
                                                cfg_text.size());

  const std::size_t n = corpus.examples.size();
  std::vector<IndexRow> rows(n);
  std::vector<std::string> failures(n);
  std::vector<char> skipped(n, 0);
  ParallelFor(n, p.jobs, [&](std::size_t i) {
    const auto& e = corpus.examples[i];
    try {
      const auto wav = ReadFile(corpus.clip_paths[i]);
      const std::string hash = Hex(Fnv1a(wav, Fnv1a(cfg_bytes)));
      char name[40];
      std::snprintf(name, sizeof name, "features/%05zu.vxf", i);
      rows[i] = {e.clip_path, e.label, name, hash};
      const auto it = previous.find(e.clip_path);
      if (it != previous.end() && it->second.hash == hash && it->second.feature_file == name &&
          fs::exists(dir / name)) {
        skipped[i] = 1;
        return;
      }
      const ExampleFeatures f = ExtractFeatures(PrepareClip(LoadWav(wav, e.clip_path)), kind, cfg);
      WriteFile(dir / name, SerializeFeatureDump(ToDump(f)));
      if (png && IsImageFeature(kind)) {
        FeatureImage image;
        image.pixels = f.image;
        image.source = kind == FeatureKind::kMfccImage ? ImageSource::kMfcc : ImageSource::kMelSpectrogram;
        char png_name[40];
        std::snprintf(png_name, sizeof png_name, "features/%05zu.png", i);
        WritePng(image, dir / png_name);
      }
    } catch (const std::exception& ex) {
      failures[i] = ex.what();
    }
  });

  std::string index(kIndexHeader);
  index += "\n";
  int failed = 0, reused = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i].empty()) {
      err << "error: " << corpus.clip_paths[i].string() << ": " << failures[i] << "\n";
      ++failed;
      continue;
    }
    reused += skipped[i];
    index += rows[i].path + "," + std::to_string(rows[i].label) + "," + rows[i].feature_file + "," + rows[i].hash +
             "\n";
  }
  WriteText(dir / "index.csv", index);
  json options = PipelineJson(p);
  options["seed"] = seed;
  options["png"] = png;
  options["feature_config"] = cfg.ToJson();
  WriteText(dir / "config.json", ConfigFile("extract", argc, argv, options).dump(2) + "\n");
  out << "extracted " << (n - failed - reused) << ", unchanged " << reused << ", failed " << failed << "\n";
  return failed == 0 ? 0 : 1;
}

void WriteReport(const EvaluationReport& report, const fs::path& dir) {
  WriteText(dir / "report.json", ReportToJson(report).dump(2) + "\n");
  WriteText(dir / "report.txt", FormatReportTable(report));
  WriteText(dir / "roc.csv", RocCsv(report.pooled_roc));
}

int CmdCv(const CvCommandOptions& o, int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const ModelRecipe recipe = MakeRecipe(o);
  const LoadedCorpus corpus = LoadCorpus(o.pipeline, err);
  const ExtractionConfig cfg = MakeExtractionConfig(o.pipeline, o.seed);
  const CvOptions cv = MakeCvOptions(o, corpus, cfg);
  const auto features = CorpusFeatures(o, corpus, cfg, err);
  const auto labels = Labels(corpus);
  EvaluationReport report;
  try {
    report = CrossValidate(features, labels, recipe, cv);
  } catch (const Error& e) {
    throw Error(e.code(), std::string(e.what()) + " [config " + ConfigFingerprint(CvOptionsJson(o)) + "]");
  }
  const fs::path dir(o.out);
  fs::create_directories(dir);
  WriteReport(report, dir);
  json config = ConfigFile("cv", argc, argv, CvOptionsJson(o));
  config["report_fingerprint"] = report.fingerprint;
  WriteText(dir / "config.json", config.dump(2) + "\n");

  out << recipe.id() << "  cohort " << corpus.cohort_name << "  n=" << labels.size() << "\n";
  for (const char* name : kMetricNames) out << "  " << name << " " << report.Aggregate(name).Cell() << "\n";
  char auc[32];
  std::snprintf(auc, sizeof auc, "%.4f", report.pooled_roc.auc);
  out << "  pooled auc " << auc << "\n";
  return 0;
}

int CmdGammaSweep(CvCommandOptions o, std::vector<double> gammas, int argc, const char* const* argv,
                  std::ostream& out, std::ostream& err) {
  o.model = "svm";
  std::vector<double> unique;
  for (double g : gammas) {
    if (std::find(unique.begin(), unique.end(), g) != unique.end()) {
      err << "warning: duplicate gamma " << g << " ignored\n";
      continue;
    }
    unique.push_back(g);
  }
  std::sort(unique.begin(), unique.end());
  MakeRecipe(o);
  const LoadedCorpus corpus = LoadCorpus(o.pipeline, err);
  const ExtractionConfig cfg = MakeExtractionConfig(o.pipeline, o.seed);
  const auto features = CorpusFeatures(o, corpus, cfg, err);
  const auto labels = Labels(corpus);
  const CvOptions cv = MakeCvOptions(o, corpus, cfg);

  struct Row {
    double gamma;
    EvaluationReport report;
  };
  std::vector<Row> rows;
  for (double g : unique) {
    ModelRecipe recipe = MakeRecipe(o);
    recipe.hp.svm.gamma = g;
    recipe.Validate();
    rows.push_back({g, CrossValidate(features, labels, recipe, cv)});
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].report.pooled_roc.auc > rows[best].report.pooled_roc.auc) best = i;
  }
  const fs::path dir(o.out);
  fs::create_directories(dir);
  std::string csv = "gamma,pooled_auc,fold_auc,accuracy,best\n";
  char line[160];
  out << "gamma         pooled_auc  fold_auc    accuracy\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i].report;
    std::snprintf(line, sizeof line, "%-12.6g  %.4f      %-10s  %-10s%s\n", rows[i].gamma, r.pooled_roc.auc,
                  r.Aggregate("auc").Cell().c_str(), r.Aggregate("accuracy").Cell().c_str(), i == best ? "  *best" : "");
    out << line;
    std::snprintf(line, sizeof line, "%.17g,%.17g,%s,%s,%d\n", rows[i].gamma, r.pooled_roc.auc,
                  r.Aggregate("auc").Cell().c_str(), r.Aggregate("accuracy").Cell().c_str(), i == best ? 1 : 0);
    csv += line;
  }
  WriteText(dir / "sweep.csv", csv);
  json options = CvOptionsJson(o);
  options["gammas"] = unique;
  WriteText(dir / "config.json", ConfigFile("gamma-sweep", argc, argv, options).dump(2) + "\n");
  return 0;
}

int CmdReport(const std::string& path, bool roc, std::ostream& out) {
  json j;
  try {
    j = json::parse(ReadText(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedFile, path + ": " + e.what());
  }
  const EvaluationReport report = ReportFromJson(j);
  out << (roc ? RocCsv(report.pooled_roc) : FormatReportTable(report));
  return 0;
}

}  // namespace

std::uint64_t DefaultSeed() {
  const char* env = std::getenv("VOXSCREEN_SEED");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  return (end && *end == '\0') ? v : 0;
}

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vocal-biomarker screening toolkit"};
  app.require_subcommand(1);
  int jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads for extraction and folds")->check(CLI::PositiveNumber);
  const std::uint64_t default_seed = DefaultSeed();

  int n_pos = 0, n_neg = 0;
  double duration = 1.0;
  std::uint64_t synth_seed = default_seed;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled corpus");
  synth->add_option("n_pos", n_pos, "Positive clips")->required()->check(CLI::PositiveNumber);
  synth->add_option("n_neg", n_neg, "Negative clips")->required()->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "Corpus seed (default $VOXSCREEN_SEED)");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--duration", duration, "Clip length in seconds")->check(CLI::Range(kSynthMinDuration, 3600.0));

  PipelineOptions extract_opts;
  std::string extract_out;
  bool png = false;
  std::uint64_t extract_seed = default_seed;
  auto* extract = app.add_subcommand("extract", "Extract per-clip feature files");
  AddPipelineFlags(extract, extract_opts);
  extract->add_option("--out", extract_out, "Output directory")->required();
  extract->add_option("--seed", extract_seed, "Seed for encoder weights (default $VOXSCREEN_SEED)");
  extract->add_flag("--png", png, "Also write PNG previews of image features");

  CvCommandOptions cv_opts;
  cv_opts.seed = default_seed;
  auto* cv = app.add_subcommand("cv", "Stratified cross-validation of one recipe");
  AddCvFlags(cv, cv_opts);
  cv->add_option("--model", cv_opts.model, "logreg, svm, cnn or lstm");

  CvCommandOptions sweep_opts;
  sweep_opts.seed = default_seed;
  std::vector<double> gammas;
  auto* sweep = app.add_subcommand("gamma-sweep", "Cross-validate the SVM over a list of gammas");
  AddCvFlags(sweep, sweep_opts);
  sweep->add_option("--gammas", gammas, "Comma-separated gamma values")->required()->delimiter(',');

  std::string report_path;
  bool report_roc = false;
  auto* report = app.add_subcommand("report", "Pretty-print a report.json");
  report->add_option("file", report_path, "report.json")->required()->check(CLI::ExistingFile);
  report->add_flag("--roc", report_roc, "Print the ROC points as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  extract_opts.jobs = cv_opts.pipeline.jobs = sweep_opts.pipeline.jobs = jobs;

  try {
    if (*synth) return CmdSynth(n_pos, n_neg, synth_seed, synth_out, duration, argc, argv, out);
    if (*extract) return CmdExtract(extract_opts, extract_out, png, extract_seed, argc, argv, out, err);
    if (*cv) return CmdCv(cv_opts, argc, argv, out, err);
    if (*sweep) return CmdGammaSweep(sweep_opts, gammas, argc, argv, out, err);
    if (*report) return CmdReport(report_path, report_roc, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace voxscreen
