// Copyright 2026 The attnseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "attnseg/error.h"

#include <string>

namespace attnseg {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNegativeWeight: return "NegativeWeight";
    case ErrorCode::kNonFiniteWeight: return "NonFiniteWeight";
    case ErrorCode::kColumnMass: return "ColumnMass";
    case ErrorCode::kEmptyAxis: return "EmptyAxis";
    case ErrorCode::kMissingFrameShift: return "MissingFrameShift";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kWrongDirection: return "WrongDirection";
    case ErrorCode::kEmptyDevSet: return "EmptyDevSet";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kUnitMismatch: return "UnitMismatch";
    case ErrorCode::kZeroReference: return "ZeroReference";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kConfigInfeasible: return "ConfigInfeasible";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

void RethrowWithUtterance(const Error& e, std::string_view utterance_id) {
  throw Error(e.code(), std::string(utterance_id) + ": " + e.what());
}

}  // namespace attnseg
