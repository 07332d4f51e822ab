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

#include "attnseg/boundary_eval.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "attnseg/error.h"

namespace attnseg {

std::int64_t WindowFrames(const MatchConfig& cfg,
                          std::optional<double> frame_shift_ms) {
  if (cfg.mode == MatchMode::kSymbolicExact) return 0;
  if (!(cfg.tolerance_ms >= 0.0)) {
    throw Error(ErrorCode::kConfigError, "tolerance_ms must be >= 0");
  }
  const double shift = frame_shift_ms.value_or(cfg.frame_shift_ms);
  if (!(shift > 0.0)) {
    throw Error(ErrorCode::kMissingFrameShift,
                "temporal matching needs a positive frame shift");
  }
  // The small slack keeps ratios such as 30 / 7.5 from flooring to 3.
  return static_cast<std::int64_t>(
      std::floor(cfg.tolerance_ms / shift + 1e-9));
}

// Reference positions are processed left to right; each takes the leftmost
// unmatched hypothesis inside its window. Every window has the same width,
// so windows are ordered by both endpoints and this greedy yields a maximum
// matching.
std::int64_t CountMatches(std::span<const std::int64_t> hyp,
                          std::span<const std::int64_t> ref,
                          std::int64_t window) {
  std::int64_t matched = 0;
  std::size_t next = 0;  // first hypothesis not yet consumed or skipped
  for (std::int64_t r : ref) {
    while (next < hyp.size() && hyp[next] < r - window) ++next;
    if (next < hyp.size() && hyp[next] <= r + window) {
      ++matched;
      ++next;
    }
  }
  return matched;
}

EvalCounts MatchBoundaries(const BoundarySet& hyp, const BoundarySet& ref,
                           const MatchConfig& cfg) {
  if (hyp.unit != ref.unit) {
    throw Error(ErrorCode::kUnitMismatch,
                "hypothesis and reference boundaries use different units");
  }
  std::optional<double> shift;
  if (hyp.unit == BoundaryUnit::kTemporalFrame) {
    if (hyp.frame_shift_ms && ref.frame_shift_ms &&
        *hyp.frame_shift_ms != *ref.frame_shift_ms) {
      throw Error(ErrorCode::kUnitMismatch,
                  "hypothesis and reference frame shifts differ");
    }
    shift = hyp.frame_shift_ms ? hyp.frame_shift_ms : ref.frame_shift_ms;
  } else if (cfg.mode == MatchMode::kTemporalTolerance) {
    throw Error(ErrorCode::kUnitMismatch,
                "tolerance matching requires frame-unit boundaries");
  }
  EvalCounts counts;
  counts.n_hyp = static_cast<std::int64_t>(hyp.positions.size());
  counts.n_ref = static_cast<std::int64_t>(ref.positions.size());
  counts.matched =
      CountMatches(hyp.positions, ref.positions, WindowFrames(cfg, shift));
  return counts;
}

Prf ComputePrf(const EvalCounts& counts) {
  Prf out;
  if (counts.n_hyp > 0) {
    out.precision = static_cast<double>(counts.matched) /
                    static_cast<double>(counts.n_hyp);
  }
  if (counts.n_ref > 0) {
    out.recall = static_cast<double>(counts.matched) /
                 static_cast<double>(counts.n_ref);
  }
  if (out.precision + out.recall > 0.0) {
    out.f_score = 2.0 * out.precision * out.recall /
                  (out.precision + out.recall);
  }
  return out;
}

double OverSegmentation(const EvalCounts& counts) {
  if (counts.n_ref == 0) {
    throw Error(ErrorCode::kZeroReference,
                "over-segmentation undefined with no reference boundaries");
  }
  return static_cast<double>(counts.n_hyp - counts.n_ref) /
         static_cast<double>(counts.n_ref);
}

EvalReport ReportFromCounts(const EvalCounts& totals) {
  EvalReport report;
  const Prf prf = ComputePrf(totals);
  report.precision = prf.precision;
  report.recall = prf.recall;
  report.f_score = prf.f_score;
  if (totals.n_ref > 0) report.over_segmentation = OverSegmentation(totals);
  report.counts = totals;
  return report;
}

EvalReport EvaluateCorpus(std::span<const BoundaryPair> pairs,
                          const MatchConfig& cfg) {
  if (pairs.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "no utterances to evaluate");
  }
  EvalCounts totals;
  std::vector<UtteranceCounts> per_utterance;
  per_utterance.reserve(pairs.size());
  for (const auto& [hyp, ref] : pairs) {
    EvalCounts c;
    try {
      c = MatchBoundaries(hyp, ref, cfg);
    } catch (const Error& e) {
      RethrowWithUtterance(e, ref.utterance_id);
    }
    totals += c;
    per_utterance.push_back({ref.utterance_id, c});
  }
  EvalReport report = ReportFromCounts(totals);
  report.per_utterance = std::move(per_utterance);
  return report;
}

}  // namespace attnseg
