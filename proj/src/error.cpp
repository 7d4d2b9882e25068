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

#include "voxscreen/error.hpp"

namespace voxscreen {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kUnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::kEmptyData: return "EmptyData";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kInfeasibleBank: return "InfeasibleBank";
    case ErrorCode::kWeightShapeMismatch: return "WeightShapeMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kSingleClassData: return "SingleClassData";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kFeatureKindMismatch: return "FeatureKindMismatch";
    case ErrorCode::kInsufficientClassCount: return "InsufficientClassCount";
    case ErrorCode::kEmptyEvaluation: return "EmptyEvaluation";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kHeaderMismatch: return "HeaderMismatch";
    case ErrorCode::kBadLabel: return "BadLabel";
    case ErrorCode::kUnknownSymptomTag: return "UnknownSymptomTag";
    case ErrorCode::kBadDelay: return "BadDelay";
    case ErrorCode::kBadField: return "BadField";
    case ErrorCode::kMalformedFile: return "MalformedFile";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace voxscreen
