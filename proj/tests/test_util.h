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

// Shared generators and assertions for the unit and acceptance suites.

#ifndef ATTNSEG_TESTS_TEST_UTIL_H_
#define ATTNSEG_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "attnseg/align_core.h"
#include "attnseg/error.h"
#include "attnseg/synth.h"

namespace attnseg::testing {

// I.i.d. uniform weights, each column divided by its sum.
inline AttentionMap RandomMap(Rng& rng, std::size_t T, std::size_t K,
                              Unit input = Unit::kPhone,
                              Unit output = Unit::kWord,
                              std::string id = "rand") {
  std::optional<double> shift;
  if (IsFrameUnit(input) || IsFrameUnit(output)) shift = kDefaultFrameShiftMs;
  AttentionMap m(std::move(id), T, K, input, output, shift);
  for (std::size_t k = 0; k < K; ++k) {
    double sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      m.at(t, k) = rng.Uniform() + 1e-3;
      sum += m.at(t, k);
    }
    for (std::size_t t = 0; t < T; ++t) m.at(t, k) /= sum;
  }
  return m;
}

// Sorted distinct positions drawn from [1, horizon - 1].
inline std::vector<std::int64_t> RandomPositions(Rng& rng, std::int64_t horizon,
                                                 double density) {
  std::vector<std::int64_t> out;
  for (std::int64_t p = 1; p < horizon; ++p) {
    if (rng.Uniform() < density) out.push_back(p);
  }
  return out;
}

template <typename Fn>
bool ThrowsCode(ErrorCode code, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace attnseg::testing

#ifdef GTEST_API_
namespace attnseg::testing {
template <typename Fn>
void ExpectErrorCode(ErrorCode code, Fn&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << ErrorCodeName(code) << ", nothing thrown";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << "expected " << ErrorCodeName(code) << ", got "
                              << ErrorCodeName(e.code()) << ": " << e.what();
  }
}
}  // namespace attnseg::testing
#endif

#endif  // ATTNSEG_TESTS_TEST_UTIL_H_
