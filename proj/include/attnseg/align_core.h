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

// Shared data model: attention maps, segmentations, boundary sets and
// corpus items, plus validation and unit conversion.
//
// Index convention used throughout the toolkit: input steps and output steps
// are 1-based in every public structure (segments, boundaries, spans). A
// boundary at position p separates unit p from unit p + 1. The
// utterance-initial and utterance-final edges are never boundaries.

#ifndef ATTNSEG_ALIGN_CORE_H_
#define ATTNSEG_ALIGN_CORE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace attnseg {

inline constexpr double kColumnMassTolerance = 1e-4;
inline constexpr double kDefaultFrameShiftMs = 10.0;

// Granularity of one axis of an attention map. The numeric values are the
// on-disk unit codes of the ATNB format.
enum class Unit : std::uint8_t {
  kAcousticFrame = 0,
  kPhoneFrame = 1,
  kPhone = 2,
  kWord = 3,
};

inline bool IsFrameUnit(Unit u) {
  return u == Unit::kAcousticFrame || u == Unit::kPhoneFrame;
}

std::string_view UnitName(Unit u);                 // "phone-frame", ...
std::optional<Unit> ParseUnit(std::string_view s);
std::optional<Unit> UnitFromCode(std::uint8_t code);

// T x K matrix of attention weights. Row t is an input step, column k an
// output step. Storage is row-major, 64-bit.
class AttentionMap {
 public:
  AttentionMap() = default;
  AttentionMap(std::string utterance_id, std::size_t rows, std::size_t cols,
               Unit input_unit, Unit output_unit,
               std::optional<double> frame_shift_ms = std::nullopt);
  // `weights` is row-major and must hold rows * cols values.
  AttentionMap(std::string utterance_id, std::size_t rows, std::size_t cols,
               std::vector<double> weights, Unit input_unit, Unit output_unit,
               std::optional<double> frame_shift_ms = std::nullopt);
  // Convenience for fixtures: one inner vector per input step.
  static AttentionMap FromRows(std::string utterance_id,
                               const std::vector<std::vector<double>>& rows,
                               Unit input_unit, Unit output_unit,
                               std::optional<double> frame_shift_ms =
                                   std::nullopt);

  const std::string& utterance_id() const { return utterance_id_; }
  std::size_t rows() const { return rows_; }  // T
  std::size_t cols() const { return cols_; }  // K
  Unit input_unit() const { return input_unit_; }
  Unit output_unit() const { return output_unit_; }
  const std::optional<double>& frame_shift_ms() const {
    return frame_shift_ms_;
  }

  // 0-based element access.
  double at(std::size_t t, std::size_t k) const {
    return weights_[t * cols_ + k];
  }
  double& at(std::size_t t, std::size_t k) { return weights_[t * cols_ + k]; }
  std::span<const double> weights() const { return weights_; }

  double ColumnSum(std::size_t k) const;

  friend bool operator==(const AttentionMap&, const AttentionMap&) = default;

 private:
  std::string utterance_id_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> weights_;
  Unit input_unit_ = Unit::kPhone;
  Unit output_unit_ = Unit::kWord;
  std::optional<double> frame_shift_ms_;
};

struct Segment {
  std::int64_t start = 1;  // inclusive
  std::int64_t end = 1;    // inclusive
  std::string label;

  std::int64_t length() const { return end - start + 1; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

// Ordered, connected cover of [1, horizon]. `unit` is the granularity of the
// segmented axis.
struct Segmentation {
  std::string utterance_id;
  std::vector<Segment> segments;
  std::int64_t horizon = 0;
  Unit unit = Unit::kPhone;
  std::optional<double> frame_shift_ms;

  friend bool operator==(const Segmentation&, const Segmentation&) = default;
};

enum class BoundaryUnit : std::uint8_t { kSymbolic, kTemporalFrame };

struct BoundarySet {
  std::string utterance_id;
  std::vector<std::int64_t> positions;  // strictly increasing, in [1, horizon-1]
  std::int64_t horizon = 0;
  BoundaryUnit unit = BoundaryUnit::kSymbolic;
  std::optional<double> frame_shift_ms;  // set iff unit is kTemporalFrame

  friend bool operator==(const BoundarySet&, const BoundarySet&) = default;
};

inline BoundaryUnit BoundaryUnitFor(Unit u) {
  return IsFrameUnit(u) ? BoundaryUnit::kTemporalFrame
                        : BoundaryUnit::kSymbolic;
}

// (x, y, z) training triplet; z is optional.
struct CorpusItem {
  std::string utterance_id;
  std::vector<std::string> input_seq;
  std::vector<std::string> output_seq;
  std::optional<Segmentation> reference;
};

// Checks T, K >= 1, weights finite and non-negative, and every column summing
// to 1 within kColumnMassTolerance. Columns inside the tolerance are
// renormalized in the returned copy; anything else throws.
AttentionMap ValidateMap(AttentionMap map);

// Swaps the axes (and their units) and renormalizes the new columns.
AttentionMap Transpose(const AttentionMap& map);

// Throws kInvariantViolation naming the utterance if `seg` is not a connected
// cover of [1, horizon].
void ValidateSegmentation(const Segmentation& seg);
void ValidateBoundarySet(const BoundarySet& b);
void ValidateCorpusItem(const CorpusItem& item);

// Internal boundaries: the end of every segment but the last.
BoundarySet BoundariesFromSegmentation(const Segmentation& seg);

// End time in seconds of each boundary frame.
std::vector<double> FramesToTime(const BoundarySet& b);

}  // namespace attnseg

#endif  // ATTNSEG_ALIGN_CORE_H_
