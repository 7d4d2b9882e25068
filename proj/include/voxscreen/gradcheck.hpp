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

#ifndef VOXSCREEN_GRADCHECK_HPP_
#define VOXSCREEN_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace voxscreen {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

// Compares an analytic gradient against central differences of `loss`.
// Relative error is |a - n| / max(|a|, |n|, denominator_floor); the floor keeps
// parameters with a true gradient of ~0 from dividing roundoff by roundoff.
inline GradCheckResult CheckGradient(const std::function<double(std::span<const double>)>& loss,
                                     std::span<const double> params,
                                     std::span<const double> analytic, double step = 1e-5,
                                     double denominator_floor = 1e-6) {
  std::vector<double> probe(params.begin(), params.end());
  GradCheckResult result;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double original = probe[i];
    probe[i] = original + step;
    const double up = loss(probe);
    probe[i] = original - step;
    const double down = loss(probe);
    probe[i] = original;
    const double numeric = (up - down) / (2.0 * step);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), denominator_floor});
    const double rel = std::abs(analytic[i] - numeric) / denom;
    if (rel > result.max_relative_error) {
      result.max_relative_error = rel;
      result.worst_index = i;
    }
    ++result.checked;
  }
  return result;
}

}  // namespace voxscreen

#endif  // VOXSCREEN_GRADCHECK_HPP_
