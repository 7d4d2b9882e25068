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

#ifndef VOXSCREEN_DATASETS_HPP_
#define VOXSCREEN_DATASETS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace voxscreen {

inline constexpr std::string_view kSymptomTags[] = {
    "dry_cough", "wet_cough", "fever", "sore_throat", "smell_taste_loss",
    "short_breath", "muscle_ache", "headache", "none",
};

inline constexpr std::string_view kColdSymptoms[] = {"dry_cough", "wet_cough", "fever", "sore_throat"};

bool IsSymptomTag(std::string_view tag);

struct LabeledExample {
  std::string clip_path;
  int label = 0;
  std::vector<std::string> symptoms;  // as listed, duplicates removed
  std::optional<int> test_delay_days;
  std::optional<bool> hospitalized;

  bool operator==(const LabeledExample&) const = default;
};

inline constexpr std::string_view kManifestHeader = "path,label,symptoms,test_delay_days,hospitalized";

// Errors carry "line N, column M" in their message.
std::vector<LabeledExample> ParseManifest(std::string_view text);
std::vector<LabeledExample> LoadManifest(const std::filesystem::path& path);
std::string SerializeManifest(std::span<const LabeledExample> examples);

struct CohortFilter {
  enum class Kind { kAll, kPositivesWithinDays, kCovidVsColdSymptomatic };
  Kind kind = Kind::kAll;
  int days = 14;

  static CohortFilter All() { return {}; }
  static CohortFilter PositivesWithinDays(int n);
  static CohortFilter CovidVsColdSymptomatic() { return {Kind::kCovidVsColdSymptomatic, 14}; }

  // "all", "positives_within_days:N" and "covid_vs_cold_symptomatic".
  static CohortFilter Parse(std::string_view text);
  std::string Name() const;
};

struct CohortResult {
  std::vector<LabeledExample> examples;
  int missing_delay = 0;  // positives dropped for lacking a delay
};

CohortResult ApplyCohort(std::span<const LabeledExample> examples, const CohortFilter& filter);

// Writes n_pos + n_neg one-second clips and manifest.csv into out_dir and
// returns the manifest text. Clip paths are relative to out_dir.
std::string GenerateSyntheticCorpus(int n_pos, int n_neg, std::uint64_t seed,
                                    const std::filesystem::path& out_dir, double duration_s = 1.0);

}  // namespace voxscreen

#endif  // VOXSCREEN_DATASETS_HPP_
