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

#include "attnseg/postprocess.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "attnseg/error.h"

namespace attnseg {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void RequireNonEmpty(const AttentionMap& map) {
  if (map.rows() == 0 || map.cols() == 0) {
    throw Error(ErrorCode::kEmptyAxis, map.utterance_id() + ": empty axis");
  }
}

// prefix[k * (T + 1) + t] = sum of column k over input steps 1..t.
std::vector<double> ColumnPrefixSums(const AttentionMap& map) {
  const std::size_t T = map.rows();
  const std::size_t K = map.cols();
  std::vector<double> prefix(K * (T + 1), 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    double* p = &prefix[k * (T + 1)];
    for (std::size_t t = 1; t <= T; ++t) p[t] = p[t - 1] + map.at(t - 1, k);
  }
  return prefix;
}

std::int64_t EffectiveCap(const SegmentalConfig& cfg, std::int64_t T) {
  if (!cfg.max_segment_len) return T;
  if (*cfg.max_segment_len < 1) {
    throw Error(ErrorCode::kConfigError, "max_segment_len must be >= 1");
  }
  return std::min(*cfg.max_segment_len, T);
}

void CheckFeasible(const AttentionMap& map, std::int64_t cap) {
  const auto T = static_cast<std::int64_t>(map.rows());
  const auto K = static_cast<std::int64_t>(map.cols());
  if (K > T) {
    throw Error(ErrorCode::kInfeasible,
                map.utterance_id() + ": " + std::to_string(K) +
                    " outputs cannot segment " + std::to_string(T) +
                    " inputs");
  }
  if (K * cap < T) {
    throw Error(ErrorCode::kInfeasible,
                map.utterance_id() + ": " + std::to_string(K) +
                    " segments of at most " + std::to_string(cap) +
                    " cannot cover " + std::to_string(T) + " inputs");
  }
}

Segmentation MakeSegmentation(const AttentionMap& map,
                              const std::vector<std::int64_t>& ends) {
  Segmentation seg;
  seg.utterance_id = map.utterance_id();
  seg.horizon = static_cast<std::int64_t>(map.rows());
  seg.unit = map.input_unit();
  seg.frame_shift_ms = map.frame_shift_ms();
  seg.segments.reserve(ends.size());
  std::int64_t start = 1;
  for (std::size_t k = 0; k < ends.size(); ++k) {
    seg.segments.push_back({start, ends[k], std::to_string(k + 1)});
    start = ends[k] + 1;
  }
  return seg;
}

bool Feasible(const std::vector<std::int64_t>& ends, std::int64_t cap) {
  std::int64_t prev = 0;
  for (std::int64_t e : ends) {
    if (e - prev > cap) return false;
    prev = e;
  }
  return true;
}

}  // namespace

SegmentalConfig SegmentalConfig::DefaultFor(Unit input_unit) {
  SegmentalConfig cfg;
  if (IsFrameUnit(input_unit)) cfg.max_segment_len = kDefaultMaxSegmentFrames;
  return cfg;
}

std::vector<std::int64_t> ColumnArgmax(const AttentionMap& map) {
  RequireNonEmpty(map);
  std::vector<std::int64_t> argmax(map.cols());
  for (std::size_t k = 0; k < map.cols(); ++k) {
    std::size_t best = 0;
    for (std::size_t t = 1; t < map.rows(); ++t) {
      if (map.at(t, k) > map.at(best, k)) best = t;
    }
    argmax[k] = static_cast<std::int64_t>(best) + 1;
  }
  return argmax;
}

BoundarySet HardAssign(const AttentionMap& map) {
  if (map.input_unit() != Unit::kWord) {
    throw Error(ErrorCode::kWrongDirection,
                map.utterance_id() +
                    ": hard assignment needs words on the input side, got " +
                    std::string(UnitName(map.input_unit())));
  }
  const std::vector<std::int64_t> argmax = ColumnArgmax(map);
  BoundarySet b;
  b.utterance_id = map.utterance_id();
  b.horizon = static_cast<std::int64_t>(map.cols());
  b.unit = BoundaryUnitFor(map.output_unit());
  if (b.unit == BoundaryUnit::kTemporalFrame) {
    b.frame_shift_ms = map.frame_shift_ms().value_or(kDefaultFrameShiftMs);
  }
  for (std::size_t k = 0; k + 1 < argmax.size(); ++k) {
    if (argmax[k] != argmax[k + 1]) {
      b.positions.push_back(static_cast<std::int64_t>(k) + 1);
    }
  }
  return b;
}

ThresholdSpans ThresholdSegment(const AttentionMap& map,
                                const ThresholdConfig& cfg) {
  if (map.output_unit() != Unit::kWord) {
    throw Error(ErrorCode::kWrongDirection,
                map.utterance_id() +
                    ": thresholding needs words on the output side, got " +
                    std::string(UnitName(map.output_unit())));
  }
  RequireNonEmpty(map);
  ThresholdSpans out;
  out.utterance_id = map.utterance_id();
  out.horizon = static_cast<std::int64_t>(map.rows());
  out.input_unit = map.input_unit();
  out.frame_shift_ms = map.frame_shift_ms();
  out.spans.resize(map.cols());
  const auto T = static_cast<std::int64_t>(map.rows());
  for (std::size_t k = 0; k < map.cols(); ++k) {
    auto& column = out.spans[k];
    std::int64_t onset = 0;  // 0 while outside a span
    for (std::int64_t t = 1; t <= T; ++t) {
      const double w = map.at(static_cast<std::size_t>(t - 1), k);
      if (onset == 0) {
        if (w > cfg.tau_onset) onset = t;
      } else if (w < cfg.tau_offset) {
        column.push_back({onset, t - 1});
        onset = 0;
      }
    }
    if (onset != 0) column.push_back({onset, T});
  }
  return out;
}

BoundarySet SpansToBoundaries(const ThresholdSpans& spans) {
  BoundarySet b;
  b.utterance_id = spans.utterance_id;
  b.horizon = spans.horizon;
  b.unit = BoundaryUnitFor(spans.input_unit);
  if (b.unit == BoundaryUnit::kTemporalFrame) {
    b.frame_shift_ms = spans.frame_shift_ms.value_or(kDefaultFrameShiftMs);
  }
  for (const auto& column : spans.spans) {
    for (const Span& s : column) {
      for (std::int64_t p : {s.onset - 1, s.offset}) {
        if (p >= 1 && p <= spans.horizon - 1) b.positions.push_back(p);
      }
    }
  }
  std::sort(b.positions.begin(), b.positions.end());
  b.positions.erase(std::unique(b.positions.begin(), b.positions.end()),
                    b.positions.end());
  return b;
}

std::vector<double> ThresholdGrid(double grid_step) {
  if (!(grid_step > 0.0) || grid_step > 1.0) {
    throw Error(ErrorCode::kConfigError, "grid_step must lie in (0, 1]");
  }
  std::vector<double> grid;
  const auto n = static_cast<std::int64_t>(std::floor(1.0 / grid_step + 1e-9));
  for (std::int64_t i = 0; i <= n; ++i) {
    grid.push_back(std::min(1.0, static_cast<double>(i) * grid_step));
  }
  if (grid.back() < 1.0 - 1e-12) {
    grid.push_back(1.0);
  } else {
    grid.back() = 1.0;
  }
  return grid;
}

ThresholdSearchResult SearchThresholds(std::span<const ThresholdDevItem> dev,
                                       double grid_step,
                                       const MatchConfig& match) {
  if (dev.empty()) {
    throw Error(ErrorCode::kEmptyDevSet, "threshold search needs a dev set");
  }
  const std::vector<double> grid = ThresholdGrid(grid_step);
  ThresholdSearchResult best;
  bool have_best = false;
  for (double on : grid) {
    for (double off : grid) {
      const ThresholdConfig cfg{on, off, grid_step};
      EvalCounts totals;
      for (const ThresholdDevItem& item : dev) {
        try {
          const BoundarySet hyp =
              SpansToBoundaries(ThresholdSegment(item.map, cfg));
          totals += MatchBoundaries(hyp, item.reference, match);
        } catch (const Error& e) {
          RethrowWithUtterance(e, item.map.utterance_id());
        }
      }
      const double f = ComputePrf(totals).f_score;
      // Grid order is (on, off) ascending, so strict improvement keeps the
      // smallest pair among ties.
      if (!have_best || f > best.report.f_score) {
        best.config = cfg;
        best.report = ReportFromCounts(totals);
        have_best = true;
      }
    }
  }
  return best;
}

double SegmentalObjective(const AttentionMap& map, const Segmentation& seg) {
  const std::vector<double> prefix = ColumnPrefixSums(map);
  const std::size_t stride = map.rows() + 1;
  double acc = 0.0;
  for (std::size_t k = seg.segments.size(); k-- > 0;) {
    const Segment& s = seg.segments[k];
    const double* p = &prefix[k * stride];
    acc = (p[s.end] - p[s.start - 1]) + acc;
  }
  return acc;
}

// Backward DP over the grid graph: best[k][t] is the largest mass that
// outputs k+1..K can cover on inputs t+1..T. The forward walk then takes the
// smallest feasible end at each step, which yields the lexicographically
// smallest boundary sequence among optimal paths.
SegmentalResult SegmentalAssign(const AttentionMap& map,
                                const SegmentalConfig& cfg) {
  RequireNonEmpty(map);
  const auto T = static_cast<std::int64_t>(map.rows());
  const auto K = static_cast<std::int64_t>(map.cols());
  const std::int64_t cap = EffectiveCap(cfg, T);
  CheckFeasible(map, cap);

  const std::vector<double> prefix = ColumnPrefixSums(map);
  const auto stride = static_cast<std::size_t>(T + 1);
  std::vector<double> best(static_cast<std::size_t>(K + 1) * stride, kNegInf);
  auto cell = [&](std::int64_t k, std::int64_t t) -> double& {
    return best[static_cast<std::size_t>(k) * stride +
                static_cast<std::size_t>(t)];
  };
  cell(K, T) = 0.0;
  for (std::int64_t k = K - 1; k >= 0; --k) {
    const double* p = &prefix[static_cast<std::size_t>(k) * stride];
    const std::int64_t remaining = K - k;  // segments still to place
    // At least one input per remaining segment.
    for (std::int64_t t = k; t <= T - remaining; ++t) {
      double value = kNegInf;
      const std::int64_t last = std::min(t + cap, T - (remaining - 1));
      for (std::int64_t e = t + 1; e <= last; ++e) {
        const double next = cell(k + 1, e);
        if (next == kNegInf) continue;
        const double candidate = (p[e] - p[t]) + next;
        if (candidate > value) value = candidate;
      }
      cell(k, t) = value;
    }
  }
  if (cell(0, 0) == kNegInf) {
    throw Error(ErrorCode::kInfeasible,
                map.utterance_id() + ": no segmentation satisfies the cap");
  }

  std::vector<std::int64_t> ends;
  ends.reserve(static_cast<std::size_t>(K));
  std::int64_t t = 0;
  for (std::int64_t k = 0; k < K; ++k) {
    const double* p = &prefix[static_cast<std::size_t>(k) * stride];
    const double target = cell(k, t);
    const std::int64_t last = std::min(t + cap, T);
    std::int64_t chosen = -1;
    for (std::int64_t e = t + 1; e <= last; ++e) {
      const double next = cell(k + 1, e);
      if (next == kNegInf) continue;
      if ((p[e] - p[t]) + next == target) {
        chosen = e;
        break;
      }
    }
    // The target was produced by one of these candidates.
    ends.push_back(chosen);
    t = chosen;
  }
  return {MakeSegmentation(map, ends), cell(0, 0)};
}

SegmentalResult BruteForceSegmental(const AttentionMap& map,
                                    const SegmentalConfig& cfg) {
  RequireNonEmpty(map);
  const auto T = static_cast<std::int64_t>(map.rows());
  const auto K = static_cast<std::int64_t>(map.cols());
  if (T > kBruteForceMaxInput || K > kBruteForceMaxOutput) {
    throw Error(ErrorCode::kTooLarge,
                map.utterance_id() + ": brute force limited to T <= " +
                    std::to_string(kBruteForceMaxInput) + ", K <= " +
                    std::to_string(kBruteForceMaxOutput));
  }
  const std::int64_t cap = EffectiveCap(cfg, T);
  CheckFeasible(map, cap);

  // Boundary sequences b_1 < ... < b_{K-1} in [1, T-1], visited in
  // lexicographic order; ends = (b_1, ..., b_{K-1}, T).
  std::vector<std::int64_t> ends(static_cast<std::size_t>(K));
  for (std::int64_t i = 0; i + 1 < K; ++i) ends[i] = i + 1;
  ends.back() = T;

  std::optional<SegmentalResult> best;
  while (true) {
    if (Feasible(ends, cap)) {
      Segmentation seg = MakeSegmentation(map, ends);
      const double objective = SegmentalObjective(map, seg);
      if (!best || objective > best->objective) {
        best = SegmentalResult{std::move(seg), objective};
      }
    }
    // Advance to the next combination of the first K-1 entries.
    std::int64_t i = K - 2;
    while (i >= 0 && ends[i] == T - (K - 1) + i) --i;
    if (i < 0) break;
    ++ends[i];
    for (std::int64_t j = i + 1; j + 1 < K; ++j) ends[j] = ends[j - 1] + 1;
  }
  if (!best) {
    throw Error(ErrorCode::kInfeasible,
                map.utterance_id() + ": no segmentation satisfies the cap");
  }
  return *std::move(best);
}

}  // namespace attnseg
