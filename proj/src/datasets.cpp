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

#include "voxscreen/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "voxscreen/audio_io.hpp"
#include "voxscreen/error.hpp"
#include "voxscreen/rng.hpp"

namespace voxscreen {
namespace {

std::vector<std::string_view> Split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = text.find(sep, start);
    if (at == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, at - start));
    start = at + 1;
  }
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string Where(int line, int column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": ";
}

bool HasColdSymptom(const LabeledExample& e) {
  for (const auto& s : e.symptoms) {
    if (std::find(std::begin(kColdSymptoms), std::end(kColdSymptoms), s) != std::end(kColdSymptoms)) return true;
  }
  return false;
}

}  // namespace

bool IsSymptomTag(std::string_view tag) {
  return std::find(std::begin(kSymptomTags), std::end(kSymptomTags), tag) != std::end(kSymptomTags);
}

std::vector<LabeledExample> ParseManifest(std::string_view text) {
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
    text.remove_prefix(3);
  }
  const auto lines = Split(text, '\n');
  if (lines.empty() || Trim(lines[0]) != kManifestHeader) {
    throw Error(ErrorCode::kHeaderMismatch, Where(1, 1) + "expected header '" + std::string(kManifestHeader) + "'");
  }
  std::vector<LabeledExample> out;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const int line_no = static_cast<int>(n) + 1;
    const std::string_view line = Trim(lines[n]);
    if (line.empty()) continue;
    const auto cells = Split(line, ',');
    if (cells.size() != 5) {
      throw Error(ErrorCode::kBadField, Where(line_no, 1) + "expected 5 fields, got " + std::to_string(cells.size()));
    }
    LabeledExample e;
    e.clip_path = std::string(Trim(cells[0]));
    if (e.clip_path.empty()) throw Error(ErrorCode::kBadField, Where(line_no, 1) + "empty path");

    const std::string_view label = Trim(cells[1]);
    if (label == "0" || label == "1") {
      e.label = label[0] - '0';
    } else {
      throw Error(ErrorCode::kBadLabel, Where(line_no, 2) + "label must be 0 or 1, got '" + std::string(label) + "'");
    }

    const std::string_view symptoms = Trim(cells[2]);
    if (!symptoms.empty()) {
      for (std::string_view tag : Split(symptoms, ';')) {
        tag = Trim(tag);
        if (!IsSymptomTag(tag)) {
          throw Error(ErrorCode::kUnknownSymptomTag, Where(line_no, 3) + "unknown symptom '" + std::string(tag) + "'");
        }
        if (std::find(e.symptoms.begin(), e.symptoms.end(), tag) == e.symptoms.end()) e.symptoms.emplace_back(tag);
      }
    }

    const std::string_view delay = Trim(cells[3]);
    if (!delay.empty()) {
      int v = 0;
      const auto [end, ec] = std::from_chars(delay.data(), delay.data() + delay.size(), v);
      if (ec != std::errc() || end != delay.data() + delay.size() || v < 0) {
        throw Error(ErrorCode::kBadDelay, Where(line_no, 4) + "delay must be a non-negative integer, got '" +
                                              std::string(delay) + "'");
      }
      e.test_delay_days = v;
    }

    const std::string_view hosp = Trim(cells[4]);
    if (hosp == "true" || hosp == "1") {
      e.hospitalized = true;
    } else if (hosp == "false" || hosp == "0") {
      e.hospitalized = false;
    } else if (!hosp.empty()) {
      throw Error(ErrorCode::kBadField, Where(line_no, 5) + "hospitalized must be true or false");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<LabeledExample> LoadManifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open manifest " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseManifest(ss.str());
}

std::string SerializeManifest(std::span<const LabeledExample> examples) {
  std::string out(kManifestHeader);
  out += "\n";
  for (const auto& e : examples) {
    out += e.clip_path + "," + std::to_string(e.label) + ",";
    for (std::size_t i = 0; i < e.symptoms.size(); ++i) {
      if (i) out += ";";
      out += e.symptoms[i];
    }
    out += ",";
    if (e.test_delay_days) out += std::to_string(*e.test_delay_days);
    out += ",";
    if (e.hospitalized) out += *e.hospitalized ? "true" : "false";
    out += "\n";
  }
  return out;
}

CohortFilter CohortFilter::PositivesWithinDays(int n) {
  if (n <= 0) throw Error(ErrorCode::kConfigError, "cohort day limit must be positive");
  return {Kind::kPositivesWithinDays, n};
}

CohortFilter CohortFilter::Parse(std::string_view text) {
  if (text == "all") return All();
  if (text == "covid_vs_cold_symptomatic") return CovidVsColdSymptomatic();
  constexpr std::string_view prefix = "positives_within_days";
  if (text.substr(0, prefix.size()) == prefix) {
    std::string_view rest = text.substr(prefix.size());
    if (rest.empty()) return PositivesWithinDays(14);
    if (rest.front() == ':' || rest.front() == '=') {
      rest.remove_prefix(1);
    } else if (rest.front() == '(' && rest.back() == ')') {
      rest = rest.substr(1, rest.size() - 2);
    }
    int n = 0;
    const auto [end, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), n);
    if (ec == std::errc() && end == rest.data() + rest.size()) return PositivesWithinDays(n);
  }
  throw Error(ErrorCode::kConfigError, "unknown cohort '" + std::string(text) + "'");
}

std::string CohortFilter::Name() const {
  switch (kind) {
    case Kind::kAll:
      return "all";
    case Kind::kPositivesWithinDays:
      return "positives_within_days:" + std::to_string(days);
    case Kind::kCovidVsColdSymptomatic:
      return "covid_vs_cold_symptomatic";
  }
  return "all";
}

CohortResult ApplyCohort(std::span<const LabeledExample> examples, const CohortFilter& filter) {
  CohortResult result;
  for (const auto& e : examples) {
    bool keep = true;
    switch (filter.kind) {
      case CohortFilter::Kind::kAll:
        break;
      case CohortFilter::Kind::kPositivesWithinDays:
        if (e.label == 1) {
          if (!e.test_delay_days) {
            ++result.missing_delay;
            keep = false;
          } else {
            keep = *e.test_delay_days <= filter.days;
          }
        }
        break;
      case CohortFilter::Kind::kCovidVsColdSymptomatic:
        keep = e.label == 1 || HasColdSymptom(e);
        break;
    }
    if (keep) result.examples.push_back(e);
  }
  return result;
}

std::string GenerateSyntheticCorpus(int n_pos, int n_neg, std::uint64_t seed, const std::filesystem::path& out_dir,
                                    double duration_s) {
  if (n_pos < 1 || n_neg < 1) throw Error(ErrorCode::kConfigError, "need at least one clip per class");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + out_dir.string() + ": " + ec.message());

  Rng meta(MixSeed(seed, 7));
  std::vector<LabeledExample> examples;
  const int total = n_pos + n_neg;
  for (int i = 0; i < total; ++i) {
    LabeledExample e;
    e.label = i < n_pos ? 1 : 0;
    char name[32];
    std::snprintf(name, sizeof name, "clip_%05d.wav", i);
    e.clip_path = name;
    const AudioClip clip = SynthClipAudio(e.label, MixSeed(seed, static_cast<std::uint64_t>(i)), duration_s);
    WriteFile(out_dir / name, EncodeWav16(clip));

    // Draw the same number of values for every row so metadata never shifts
    // with earlier outcomes.
    const double r_symptomatic = meta.Uniform();
    std::vector<std::string> picked;
    for (std::string_view tag : kSymptomTags) {
      if (tag == "none") continue;
      if (meta.Uniform() < 0.3) picked.emplace_back(tag);
    }
    const double r_delay = meta.Uniform();
    const double r_hosp = meta.Uniform();
    if (r_symptomatic < 0.5) {
      e.symptoms = picked;
    } else {
      e.symptoms = {"none"};
    }
    if (e.label == 1) {
      e.test_delay_days = static_cast<int>(r_delay * 29.0);
      e.hospitalized = r_hosp < 0.1;
    }
    examples.push_back(std::move(e));
  }
  const std::string manifest = SerializeManifest(examples);
  std::ofstream out(out_dir / "manifest.csv", std::ios::binary);
  out << manifest;
  if (!out) throw Error(ErrorCode::kIoError, "cannot write manifest in " + out_dir.string());
  return manifest;
}

}  // namespace voxscreen
