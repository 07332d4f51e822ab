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

// Experiment runner: manifests, the segment -> evaluate pipeline, report
// tables, and the toy direction/method grid.

#ifndef ATTNSEG_EXPERIMENT_H_
#define ATTNSEG_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attnseg/align_core.h"
#include "attnseg/boundary_eval.h"
#include "attnseg/postprocess.h"
#include "attnseg/synth.h"

namespace attnseg {

enum class Direction : std::uint8_t {
  kWordToPhone,
  kPhoneToWord,
  kFrameToWord,
  kAcousticToWord,
};

enum class Method : std::uint8_t { kHard, kThreshold, kSegmental };

std::string_view DirectionName(Direction d);  // "w->p", ...
std::optional<Direction> ParseDirection(std::string_view s);
std::string_view MethodName(Method m);        // "Hard", "Thr", "Seg"
std::optional<Method> ParseMethod(std::string_view s);

Unit InputUnit(Direction d);
Unit OutputUnit(Direction d);

struct RunManifest {
  Direction direction = Direction::kPhoneToWord;
  Method method = Method::kSegmental;
  bool transpose = false;
  // Unset: exact matching for symbolic references, tolerance matching for
  // frame references.
  std::optional<MatchMode> match_mode;
  double tolerance_ms = 30.0;
  double frame_shift_ms = kDefaultFrameShiftMs;
  std::int64_t max_segment_frames = kDefaultMaxSegmentFrames;
  ThresholdConfig threshold;
  bool search_thresholds = true;
  std::filesystem::path attention;
  std::filesystem::path reference;
  std::filesystem::path dev_attention;  // empty: tune on `attention`
  std::filesystem::path dev_reference;
  std::filesystem::path hypothesis_out;
  std::filesystem::path report_out;
  std::uint64_t seed = 0;
};

// Throws kConfigError for combinations that cannot run: hard assignment
// without word inputs, thresholding without word outputs, segmental
// assignment whose (possibly transposed) outputs are not words.
void ValidateManifest(const RunManifest& m);

RunManifest ManifestFromJson(std::string_view json_text,
                             const std::filesystem::path& base_dir = {});
std::string ManifestToJson(const RunManifest& m);

MatchConfig MatchConfigFor(const RunManifest& m, BoundaryUnit reference_unit);

struct RunResult {
  std::vector<BoundarySet> hypotheses;
  EvalReport report;
  std::optional<ThresholdConfig> tuned_thresholds;
};

// In-memory pipeline. References are matched to maps by utterance id.
RunResult RunPipeline(const RunManifest& m, std::span<const AttentionMap> maps,
                      std::span<const Segmentation> references,
                      std::span<const AttentionMap> dev_maps = {},
                      std::span<const Segmentation> dev_references = {});

// Reads the manifest's inputs, runs the pipeline, writes the hypothesis and
// report files when their paths are set.
RunResult RunManifestFiles(const RunManifest& m);

struct ReportRow {
  std::string direction;
  std::string method;
  EvalReport report;
};

// One decimal, as a percentage; "-0.0" prints as "0.0".
std::string FormatPercent(double fraction);
std::string FormatReportMarkdown(std::span<const ReportRow> rows);
std::string FormatReportTsv(std::span<const ReportRow> rows);

struct ToyGridConfig {
  LexiconConfig lexicon;
  std::int64_t n_dev_utterances = 50;
  SynthConfig attention{0.8, 0.05, 0};
  double grid_step = 0.01;
  double tolerance_ms = 30.0;
  std::int64_t max_segment_frames = kDefaultMaxSegmentFrames;
  std::uint64_t seed = 0;
};

struct ToyGridData {
  SynthCorpus corpus;       // training utterances
  SynthCorpus dev;          // disjoint dev utterances, same lexicon
  std::vector<AttentionMap> p2w, f2w, w2p;
  std::vector<AttentionMap> dev_p2w;
};

// Synthetic oracle maps for every direction of the grid.
ToyGridData BuildToyGrid(const ToyGridConfig& cfg);

// Rows: w->p Hard, w->p Seg, p->w Thr, p->w Seg, f->w Seg.
std::vector<ReportRow> RunToyGrid(const ToyGridConfig& cfg);

// Independent per-utterance seed stream (SplitMix64 of base + index).
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t index);

}  // namespace attnseg

#endif  // ATTNSEG_EXPERIMENT_H_
