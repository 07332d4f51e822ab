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

#ifndef ATTNSEG_ERROR_H_
#define ATTNSEG_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace attnseg {

enum class ErrorCode {
  // align-core
  kNegativeWeight,
  kNonFiniteWeight,
  kColumnMass,
  kEmptyAxis,
  kMissingFrameShift,
  kInvariantViolation,
  // postprocess
  kWrongDirection,
  kEmptyDevSet,
  kInfeasible,
  kTooLarge,
  // boundary-eval
  kUnitMismatch,
  kZeroReference,
  kEmptyCorpus,
  // synth
  kConfigInfeasible,
  // io / cli
  kBadMagic,
  kTruncatedPayload,
  kDimensionMismatch,
  kParseError,
  kIoError,
  kConfigError,
};

// Stable identifier used in machine-readable error lines, e.g. "ColumnMass".
std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Rethrows `e` with "<utterance_id>: " prepended, keeping the code.
[[noreturn]] void RethrowWithUtterance(const Error& e,
                                       std::string_view utterance_id);

}  // namespace attnseg

#endif  // ATTNSEG_ERROR_H_
