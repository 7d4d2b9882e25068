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

#ifndef VOXSCREEN_ERROR_HPP_
#define VOXSCREEN_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace voxscreen {

enum class ErrorCode {
  kMalformedHeader,
  kUnsupportedEncoding,
  kEmptyData,
  kDegenerateInput,
  kDomainError,
  kInfeasibleBank,
  kWeightShapeMismatch,
  kDimensionMismatch,
  kShapeMismatch,
  kLengthMismatch,
  kSingleClassData,
  kNonFiniteGradient,
  kNonFiniteLoss,
  kEmptySequence,
  kFeatureKindMismatch,
  kInsufficientClassCount,
  kEmptyEvaluation,
  kConfigError,
  kHeaderMismatch,
  kBadLabel,
  kUnknownSymptomTag,
  kBadDelay,
  kBadField,
  kMalformedFile,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every recoverable failure in the library is reported as an Error carrying
// one of the codes above; callers branch on code(), humans read what().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace voxscreen

#endif  // VOXSCREEN_ERROR_HPP_
