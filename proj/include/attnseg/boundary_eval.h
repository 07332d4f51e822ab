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

// Word-boundary scoring: one-to-one matching (exact or within a tolerance
// window), precision / recall / F, over-segmentation and micro-averaged
// corpus reports.

#ifndef ATTNSEG_BOUNDARY_EVAL_H_
#define ATTNSEG_BOUNDARY_EVAL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "attnseg/align_core.h"

namespace attnseg {

enum class MatchMode : std::uint8_t { kSymbolicExact, kTemporalTolerance };

struct MatchConfig {
  MatchMode mode = MatchMode::kSymbolicExact;
  double tolerance_ms = 30.0;
  double frame_shift_ms = kDefaultFrameShiftMs;

  static MatchConfig Exact() { return {}; }
  static MatchConfig Temporal(double tolerance_ms = 30.0,
                              double frame_shift_ms = kDefaultFrameShiftMs) {
    return {MatchMode::kTemporalTolerance, tolerance_ms, frame_shift_ms};
  }
};

struct EvalCounts {
  std::int64_t matched = 0;
  std::int64_t n_hyp = 0;
  std::int64_t n_ref = 0;

  EvalCounts& operator+=(const EvalCounts& o) {
    matched += o.matched;
    n_hyp += o.n_hyp;
    n_ref += o.n_ref;
    return *this;
  }
  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

struct UtteranceCounts {
  std::string utterance_id;
  EvalCounts counts;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  // Unset when the corpus holds no reference boundary at all.
  std::optional<double> over_segmentation;
  EvalCounts counts;
  std::vector<UtteranceCounts> per_utterance;
};

// Half-width of the matching window in frames: 0 in exact mode,
// floor(tolerance_ms / frame_shift_ms) in temporal mode.
std::int64_t WindowFrames(const MatchConfig& cfg,
                          std::optional<double> frame_shift_ms = std::nullopt);

// Maximum one-to-one matching between hypothesis and reference positions,
// where a pair matches when |hyp - ref| <= window. Positions must be sorted.
std::int64_t CountMatches(std::span<const std::int64_t> hyp,
                          std::span<const std::int64_t> ref,
                          std::int64_t window);

EvalCounts MatchBoundaries(const BoundarySet& hyp, const BoundarySet& ref,
                           const MatchConfig& cfg);

Prf ComputePrf(const EvalCounts& counts);

// (n_hyp - n_ref) / n_ref. Throws kZeroReference when n_ref is 0.
double OverSegmentation(const EvalCounts& counts);

using BoundaryPair = std::pair<BoundarySet, BoundarySet>;  // (hyp, ref)

// Sums per-utterance counts, then applies ComputePrf / OverSegmentation to
// the totals.
EvalReport EvaluateCorpus(std::span<const BoundaryPair> pairs,
                          const MatchConfig& cfg);

EvalReport ReportFromCounts(const EvalCounts& totals);

}  // namespace attnseg

#endif  // ATTNSEG_BOUNDARY_EVAL_H_
