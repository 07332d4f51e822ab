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

// On-disk formats.
//
// ATNB (attention maps, binary, little-endian):
//   magic "ATNB1\n"
//   per map: u32 id_len | id bytes (UTF-8) | u32 T | u32 K |
//            u8 input_unit | u8 output_unit | f32 frame_shift_ms |
//            T*K f32 weights, row-major
//   frame_shift_ms is 0 when neither axis is in frame units.
//
// Attention TSV (hand-written fixtures):
//   "# utt=<id> input=<unit> output=<unit> [frame_shift_ms=<x>]"
//   followed by T lines of K whitespace-separated weights; blank lines and
//   further "#" headers start the next map.
//
// Alignment TSV:
//   "# unit=<unit> [frame_shift_ms=<x>]"
//   "<utt_id>\t<start>\t<end>\t<label>" per segment, utterances contiguous.
//
// Boundary TSV (hypotheses):
//   "# boundaries unit=<symbolic|temporal-frame> [frame_shift_ms=<x>]"
//   "<utt_id>\t<horizon>\t<p1 p2 ...>" per utterance.
//
// ATNF (acoustic-like features, binary, little-endian):
//   magic "ATNF1\n"; per utterance: u32 id_len | id | u32 T | u32 D |
//   T*D f32 row-major.

#ifndef ATTNSEG_IO_H_
#define ATTNSEG_IO_H_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attnseg/align_core.h"
#include "attnseg/synth.h"

namespace attnseg {

inline constexpr std::string_view kAtnbMagic = "ATNB1\n";
inline constexpr std::string_view kAtnfMagic = "ATNF1\n";

// Weights are narrowed to f32 on write.
std::string EncodeAtnb(std::span<const AttentionMap> maps);
std::vector<AttentionMap> DecodeAtnb(std::string_view bytes);

std::string EncodeAttentionTsv(std::span<const AttentionMap> maps);
std::vector<AttentionMap> DecodeAttentionTsv(std::string_view text);

// Files ending in .tsv or .txt use the text format; anything else is ATNB.
void WriteAttention(const std::filesystem::path& path,
                    std::span<const AttentionMap> maps);
std::vector<AttentionMap> ReadAttention(const std::filesystem::path& path);

// Every segmentation must share the unit and frame shift of the first.
std::string EncodeAlignments(std::span<const Segmentation> segs);
// Rejects gaps and overlaps (kInvariantViolation) and malformed lines
// (kParseError with the line number).
std::vector<Segmentation> DecodeAlignments(std::string_view text);
void WriteAlignments(const std::filesystem::path& path,
                     std::span<const Segmentation> segs);
std::vector<Segmentation> ReadAlignments(const std::filesystem::path& path);

std::string EncodeBoundaries(std::span<const BoundarySet> sets);
std::vector<BoundarySet> DecodeBoundaries(std::string_view text);
void WriteBoundaries(const std::filesystem::path& path,
                     std::span<const BoundarySet> sets);
std::vector<BoundarySet> ReadBoundaries(const std::filesystem::path& path);

std::string EncodeFeatures(std::span<const FeatureMatrix> feats);
std::vector<FeatureMatrix> DecodeFeatures(std::string_view bytes);

// Corpus TSV: "utt_id\twords\tphones\tframes_per_phone" (space-separated
// fields) with a header line; lexicon TSV: "word\tphones".
std::string EncodeCorpus(const SynthCorpus& corpus);
std::string EncodeLexicon(const SynthCorpus& corpus);

// Binary PGM (P5), T rows by K columns, darker = more attention.
std::string EncodeHeatmapPgm(const AttentionMap& map);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view bytes);

// Shortest decimal that round-trips the double.
std::string FormatNumber(double v);

}  // namespace attnseg

#endif  // ATTNSEG_IO_H_
