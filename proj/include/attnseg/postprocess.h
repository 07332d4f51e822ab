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

// Attention-to-segmentation postprocessing: hard assignment, thresholding
// (with exhaustive threshold search) and segmental assignment.

#ifndef ATTNSEG_POSTPROCESS_H_
#define ATTNSEG_POSTPROCESS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "attnseg/align_core.h"
#include "attnseg/boundary_eval.h"

namespace attnseg {

inline constexpr std::int64_t kDefaultMaxSegmentFrames = 400;

struct ThresholdConfig {
  double tau_onset = 0.5;
  double tau_offset = 0.5;
  double grid_step = 0.01;

  friend bool operator==(const ThresholdConfig&,
                         const ThresholdConfig&) = default;
};

struct SegmentalConfig {
  // nullopt means unbounded.
  std::optional<std::int64_t> max_segment_len;

  // 400 for frame-unit inputs, unbounded otherwise.
  static SegmentalConfig DefaultFor(Unit input_unit);
};

struct Span {
  std::int64_t onset = 1;   // inclusive, 1-based input step
  std::int64_t offset = 1;  // inclusive

  friend bool operator==(const Span&, const Span&) = default;
};

struct ThresholdSpans {
  std::string utterance_id;
  std::int64_t horizon = 0;  // T
  Unit input_unit = Unit::kPhone;
  std::optional<double> frame_shift_ms;
  std::vector<std::vector<Span>> spans;  // one list per output column
};

// Hard assignment. Each output column is aligned to its argmax input step
// (smallest t on ties); a boundary is placed after output k whenever outputs
// k and k+1 align to different inputs. Positions are on the output axis.
// Requires words on the input side.
BoundarySet HardAssign(const AttentionMap& map);

// 1-based argmax input step of each column.
std::vector<std::int64_t> ColumnArgmax(const AttentionMap& map);

// Scans each word column; weight > tau_onset opens a span, weight <
// tau_offset closes it at the previous step. Requires words on the output
// side.
ThresholdSpans ThresholdSegment(const AttentionMap& map,
                                const ThresholdConfig& cfg);

// Union of {onset - 1, offset} over all spans, restricted to [1, T-1].
BoundarySet SpansToBoundaries(const ThresholdSpans& spans);

struct ThresholdDevItem {
  AttentionMap map;
  BoundarySet reference;
};

struct ThresholdSearchResult {
  ThresholdConfig config;
  EvalReport report;  // dev-set report at `config`
};

// Grid values {0, step, 2 step, ..., 1}; 1 is always included.
std::vector<double> ThresholdGrid(double grid_step);

// Exhaustive search over ThresholdGrid(grid_step)^2 for the pair maximizing
// micro-averaged boundary F on `dev`. Ties go to the smallest tau_onset,
// then the smallest tau_offset.
ThresholdSearchResult SearchThresholds(std::span<const ThresholdDevItem> dev,
                                       double grid_step,
                                       const MatchConfig& match);

struct SegmentalResult {
  Segmentation segmentation;
  double objective = 0.0;
};

// Segmental assignment: the monotone, connected K-segmentation of the input
// axis maximizing the attention mass each output covers, found by dynamic
// programming in O(T K L) time and O(T K) memory. Among optimal
// segmentations the one with the lexicographically smallest boundary
// sequence is returned.
SegmentalResult SegmentalAssign(const AttentionMap& map,
                                const SegmentalConfig& cfg);

inline constexpr std::int64_t kBruteForceMaxInput = 14;
inline constexpr std::int64_t kBruteForceMaxOutput = 6;

// Enumerates every feasible segmentation. Throws kTooLarge past
// T = kBruteForceMaxInput or K = kBruteForceMaxOutput.
SegmentalResult BruteForceSegmental(const AttentionMap& map,
                                    const SegmentalConfig& cfg);

// Right-nested sum w_1 + (w_2 + (... + w_K)) of the mass each segment covers
// in its own column, with every w_k taken from column prefix sums. This is
// the objective both SegmentalAssign and BruteForceSegmental report.
double SegmentalObjective(const AttentionMap& map, const Segmentation& seg);

}  // namespace attnseg

#endif  // ATTNSEG_POSTPROCESS_H_
