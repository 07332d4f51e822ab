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

#include "attnseg/align_core.h"

#include <cmath>
#include <string>
#include <utility>

#include "attnseg/error.h"

namespace attnseg {

std::string_view UnitName(Unit u) {
  switch (u) {
    case Unit::kAcousticFrame: return "acoustic-frame";
    case Unit::kPhoneFrame: return "phone-frame";
    case Unit::kPhone: return "phone";
    case Unit::kWord: return "word";
  }
  return "unknown";
}

std::optional<Unit> ParseUnit(std::string_view s) {
  for (Unit u : {Unit::kAcousticFrame, Unit::kPhoneFrame, Unit::kPhone,
                 Unit::kWord}) {
    if (s == UnitName(u)) return u;
  }
  return std::nullopt;
}

std::optional<Unit> UnitFromCode(std::uint8_t code) {
  if (code > static_cast<std::uint8_t>(Unit::kWord)) return std::nullopt;
  return static_cast<Unit>(code);
}

AttentionMap::AttentionMap(std::string utterance_id, std::size_t rows,
                           std::size_t cols, Unit input_unit, Unit output_unit,
                           std::optional<double> frame_shift_ms)
    : AttentionMap(std::move(utterance_id), rows, cols,
                   std::vector<double>(rows * cols, 0.0), input_unit,
                   output_unit, frame_shift_ms) {}

AttentionMap::AttentionMap(std::string utterance_id, std::size_t rows,
                           std::size_t cols, std::vector<double> weights,
                           Unit input_unit, Unit output_unit,
                           std::optional<double> frame_shift_ms)
    : utterance_id_(std::move(utterance_id)),
      rows_(rows),
      cols_(cols),
      weights_(std::move(weights)),
      input_unit_(input_unit),
      output_unit_(output_unit),
      frame_shift_ms_(frame_shift_ms) {
  if (weights_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kDimensionMismatch,
                utterance_id_ + ": weight count " +
                    std::to_string(weights_.size()) + " != " +
                    std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

AttentionMap AttentionMap::FromRows(
    std::string utterance_id, const std::vector<std::vector<double>>& rows,
    Unit input_unit, Unit output_unit, std::optional<double> frame_shift_ms) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * cols);
  for (const auto& row : rows) {
    if (row.size() != cols) {
      throw Error(ErrorCode::kDimensionMismatch,
                  utterance_id + ": ragged rows");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return AttentionMap(std::move(utterance_id), rows.size(), cols,
                      std::move(flat), input_unit, output_unit,
                      frame_shift_ms);
}

double AttentionMap::ColumnSum(std::size_t k) const {
  double sum = 0.0;
  for (std::size_t t = 0; t < rows_; ++t) sum += at(t, k);
  return sum;
}

AttentionMap ValidateMap(AttentionMap map) {
  const std::string& id = map.utterance_id();
  if (map.rows() == 0 || map.cols() == 0) {
    throw Error(ErrorCode::kEmptyAxis,
                id + ": empty axis (" + std::to_string(map.rows()) + "x" +
                    std::to_string(map.cols()) + ")");
  }
  for (std::size_t t = 0; t < map.rows(); ++t) {
    for (std::size_t k = 0; k < map.cols(); ++k) {
      const double w = map.at(t, k);
      if (!std::isfinite(w)) {
        throw Error(ErrorCode::kNonFiniteWeight,
                    id + ": non-finite weight at (" + std::to_string(t + 1) +
                        "," + std::to_string(k + 1) + ")");
      }
      if (w < 0.0) {
        throw Error(ErrorCode::kNegativeWeight,
                    id + ": negative weight at (" + std::to_string(t + 1) +
                        "," + std::to_string(k + 1) + ")");
      }
    }
  }
  for (std::size_t k = 0; k < map.cols(); ++k) {
    const double sum = map.ColumnSum(k);
    if (std::abs(sum - 1.0) > kColumnMassTolerance) {
      throw Error(ErrorCode::kColumnMass,
                  id + ": column " + std::to_string(k + 1) + " sums to " +
                      std::to_string(sum));
    }
    // Below 1e-12 the column is left untouched so that validating twice is
    // the same as validating once.
    if (std::abs(sum - 1.0) > 1e-12) {
      for (std::size_t t = 0; t < map.rows(); ++t) map.at(t, k) /= sum;
    }
  }
  return map;
}

AttentionMap Transpose(const AttentionMap& map) {
  AttentionMap out(map.utterance_id(), map.cols(), map.rows(),
                   map.output_unit(), map.input_unit(), map.frame_shift_ms());
  for (std::size_t t = 0; t < map.rows(); ++t) {
    for (std::size_t k = 0; k < map.cols(); ++k) out.at(k, t) = map.at(t, k);
  }
  for (std::size_t k = 0; k < out.cols(); ++k) {
    const double sum = out.ColumnSum(k);
    if (sum > 0.0 && std::isfinite(sum)) {
      for (std::size_t t = 0; t < out.rows(); ++t) out.at(t, k) /= sum;
    }
  }
  return ValidateMap(std::move(out));
}

void ValidateSegmentation(const Segmentation& seg) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kInvariantViolation,
                "utterance '" + seg.utterance_id + "': " + what);
  };
  if (seg.segments.empty()) fail("no segments");
  if (seg.horizon < 1) fail("horizon < 1");
  std::int64_t expected_start = 1;
  for (std::size_t i = 0; i < seg.segments.size(); ++i) {
    const Segment& s = seg.segments[i];
    if (s.start != expected_start) {
      fail("segment " + std::to_string(i + 1) + " starts at " +
           std::to_string(s.start) + ", expected " +
           std::to_string(expected_start) +
           (s.start > expected_start ? " (gap)" : " (overlap)"));
    }
    if (s.end < s.start) {
      fail("segment " + std::to_string(i + 1) + " has end < start");
    }
    expected_start = s.end + 1;
  }
  if (seg.segments.back().end != seg.horizon) {
    fail("last segment ends at " + std::to_string(seg.segments.back().end) +
         ", horizon is " + std::to_string(seg.horizon));
  }
}

void ValidateBoundarySet(const BoundarySet& b) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kInvariantViolation,
                "utterance '" + b.utterance_id + "': " + what);
  };
  std::int64_t prev = 0;
  for (std::int64_t p : b.positions) {
    if (p <= prev) fail("boundary positions not strictly increasing");
    if (p < 1 || p > b.horizon - 1) {
      fail("boundary " + std::to_string(p) + " outside [1, " +
           std::to_string(b.horizon - 1) + "]");
    }
    prev = p;
  }
  if (b.unit == BoundaryUnit::kTemporalFrame &&
      (!b.frame_shift_ms || !(*b.frame_shift_ms > 0.0))) {
    throw Error(ErrorCode::kMissingFrameShift,
                "utterance '" + b.utterance_id +
                    "': temporal boundaries need a positive frame shift");
  }
}

void ValidateCorpusItem(const CorpusItem& item) {
  if (!item.reference) return;
  ValidateSegmentation(*item.reference);
  if (item.reference->horizon !=
      static_cast<std::int64_t>(item.input_seq.size())) {
    throw Error(ErrorCode::kInvariantViolation,
                "utterance '" + item.utterance_id +
                    "': reference horizon " +
                    std::to_string(item.reference->horizon) +
                    " != input length " +
                    std::to_string(item.input_seq.size()));
  }
}

BoundarySet BoundariesFromSegmentation(const Segmentation& seg) {
  BoundarySet b;
  b.utterance_id = seg.utterance_id;
  b.horizon = seg.horizon;
  b.unit = BoundaryUnitFor(seg.unit);
  if (b.unit == BoundaryUnit::kTemporalFrame) {
    b.frame_shift_ms = seg.frame_shift_ms.value_or(kDefaultFrameShiftMs);
  }
  if (!seg.segments.empty()) {
    b.positions.reserve(seg.segments.size() - 1);
    for (std::size_t i = 0; i + 1 < seg.segments.size(); ++i) {
      b.positions.push_back(seg.segments[i].end);
    }
  }
  return b;
}

std::vector<double> FramesToTime(const BoundarySet& b) {
  if (b.unit != BoundaryUnit::kTemporalFrame || !b.frame_shift_ms) {
    throw Error(ErrorCode::kMissingFrameShift,
                "utterance '" + b.utterance_id +
                    "': boundaries carry no frame shift");
  }
  std::vector<double> times;
  times.reserve(b.positions.size());
  for (std::int64_t p : b.positions) {
    times.push_back(static_cast<double>(p) * *b.frame_shift_ms / 1000.0);
  }
  return times;
}

}  // namespace attnseg
