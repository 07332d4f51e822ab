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

#include "attnseg/io.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "attnseg/error.h"

namespace attnseg {
namespace {

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PutF32(std::string& out, float v) { PutU32(out, std::bit_cast<std::uint32_t>(v)); }

std::uint32_t CheckedU32(std::size_t v, const std::string& what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kDimensionMismatch, what + " exceeds u32");
  }
  return static_cast<std::uint32_t>(v);
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  bool AtEnd() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::string_view Take(std::size_t n, std::string_view what) {
    if (remaining() < n) {
      throw Error(ErrorCode::kTruncatedPayload,
                  "truncated " + std::string(what) + " at byte " +
                      std::to_string(pos_));
    }
    std::string_view s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t U8(std::string_view what) {
    return static_cast<std::uint8_t>(Take(1, what)[0]);
  }
  std::uint32_t U32(std::string_view what) {
    const std::string_view s = Take(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
      v = (v << 8) | static_cast<std::uint8_t>(s[static_cast<std::size_t>(i)]);
    }
    return v;
  }
  float F32(std::string_view what) { return std::bit_cast<float>(U32(what)); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void CheckMagic(std::string_view bytes, std::string_view magic) {
  if (bytes.substr(0, magic.size()) != magic) {
    throw Error(ErrorCode::kBadMagic,
                "expected magic '" + std::string(magic.substr(0, 4)) + "'");
  }
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> SplitWhitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

// Lines without their terminators; a trailing "\r" is dropped too.
std::vector<std::string_view> Lines(std::string_view text) {
  std::vector<std::string_view> lines = Split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto& line : lines) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  }
  return lines;
}

[[noreturn]] void ParseFail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kParseError,
              "line " + std::to_string(line_no) + ": " + what);
}

std::int64_t ParseInt(std::string_view s, std::size_t line_no) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    ParseFail(line_no, "bad integer '" + std::string(s) + "'");
  }
  return v;
}

double ParseDouble(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    ParseFail(line_no, "bad number '" + std::string(s) + "'");
  }
  return v;
}

// "# key=value key=value" -> map; a bare word (e.g. "boundaries") maps to "".
std::map<std::string, std::string, std::less<>> ParseHeader(
    std::string_view line, std::size_t line_no) {
  if (line.empty() || line.front() != '#') ParseFail(line_no, "expected '#' header");
  std::map<std::string, std::string, std::less<>> kv;
  for (std::string_view tok : SplitWhitespace(line.substr(1))) {
    const std::size_t eq = tok.find('=');
    if (eq == std::string_view::npos) {
      kv.emplace(std::string(tok), "");
    } else {
      kv.emplace(std::string(tok.substr(0, eq)), std::string(tok.substr(eq + 1)));
    }
  }
  return kv;
}

Unit HeaderUnit(const std::map<std::string, std::string, std::less<>>& kv,
                std::string_view key, std::size_t line_no) {
  const auto it = kv.find(key);
  if (it == kv.end()) ParseFail(line_no, "header lacks " + std::string(key) + "=");
  const std::optional<Unit> u = ParseUnit(it->second);
  if (!u) ParseFail(line_no, "unknown unit '" + it->second + "'");
  return *u;
}

std::optional<double> HeaderShift(
    const std::map<std::string, std::string, std::less<>>& kv,
    std::size_t line_no) {
  const auto it = kv.find("frame_shift_ms");
  if (it == kv.end()) return std::nullopt;
  const double v = ParseDouble(it->second, line_no);
  if (!(v > 0.0)) ParseFail(line_no, "frame_shift_ms must be > 0");
  return v;
}

bool HasTextExtension(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  return ext == ".tsv" || ext == ".txt";
}

}  // namespace

std::string FormatNumber(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void WriteFile(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

// --- ATNB -------------------------------------------------------------------

std::string EncodeAtnb(std::span<const AttentionMap> maps) {
  std::string out(kAtnbMagic);
  for (const AttentionMap& m : maps) {
    PutU32(out, CheckedU32(m.utterance_id().size(), "utterance id length"));
    out += m.utterance_id();
    PutU32(out, CheckedU32(m.rows(), "T"));
    PutU32(out, CheckedU32(m.cols(), "K"));
    out.push_back(static_cast<char>(m.input_unit()));
    out.push_back(static_cast<char>(m.output_unit()));
    PutF32(out, static_cast<float>(m.frame_shift_ms().value_or(0.0)));
    for (double w : m.weights()) PutF32(out, static_cast<float>(w));
  }
  return out;
}

std::vector<AttentionMap> DecodeAtnb(std::string_view bytes) {
  CheckMagic(bytes, kAtnbMagic);
  ByteReader r(bytes.substr(kAtnbMagic.size()));
  std::vector<AttentionMap> maps;
  while (!r.AtEnd()) {
    const std::uint32_t id_len = r.U32("utterance id length");
    std::string id(r.Take(id_len, "utterance id"));
    const std::uint32_t T = r.U32("T");
    const std::uint32_t K = r.U32("K");
    if (T == 0 || K == 0) {
      throw Error(ErrorCode::kDimensionMismatch,
                  id + ": zero-sized map " + std::to_string(T) + "x" +
                      std::to_string(K));
    }
    const std::optional<Unit> in_unit = UnitFromCode(r.U8("input unit"));
    const std::optional<Unit> out_unit = UnitFromCode(r.U8("output unit"));
    if (!in_unit || !out_unit) {
      throw Error(ErrorCode::kParseError, id + ": unknown unit code");
    }
    const float shift = r.F32("frame shift");
    const std::uint64_t n = std::uint64_t{T} * std::uint64_t{K};
    if (n > r.remaining() / 4) {
      throw Error(ErrorCode::kTruncatedPayload,
                  id + ": header declares " + std::to_string(T) + "x" +
                      std::to_string(K) + " weights but only " +
                      std::to_string(r.remaining() / 4) + " remain");
    }
    std::vector<double> weights(static_cast<std::size_t>(n));
    for (double& w : weights) w = r.F32("weights");
    std::optional<double> frame_shift;
    if (shift != 0.0f) frame_shift = static_cast<double>(shift);
    maps.emplace_back(std::move(id), T, K, std::move(weights), *in_unit,
                      *out_unit, frame_shift);
  }
  return maps;
}

// --- Attention TSV ----------------------------------------------------------

std::string EncodeAttentionTsv(std::span<const AttentionMap> maps) {
  std::string out;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const AttentionMap& m = maps[i];
    if (i > 0) out += '\n';
    out += "# utt=" + m.utterance_id() + " input=" +
           std::string(UnitName(m.input_unit())) + " output=" +
           std::string(UnitName(m.output_unit()));
    if (m.frame_shift_ms()) out += " frame_shift_ms=" + FormatNumber(*m.frame_shift_ms());
    out += '\n';
    for (std::size_t t = 0; t < m.rows(); ++t) {
      for (std::size_t k = 0; k < m.cols(); ++k) {
        if (k > 0) out += '\t';
        out += FormatNumber(m.at(t, k));
      }
      out += '\n';
    }
  }
  return out;
}

std::vector<AttentionMap> DecodeAttentionTsv(std::string_view text) {
  struct Pending {
    std::string id;
    Unit in = Unit::kPhone;
    Unit out = Unit::kWord;
    std::optional<double> shift;
    std::vector<std::vector<double>> rows;
  };
  std::vector<AttentionMap> maps;
  std::optional<Pending> cur;
  auto flush = [&](std::size_t line_no) {
    if (!cur) return;
    if (cur->rows.empty()) ParseFail(line_no, "map '" + cur->id + "' has no rows");
    maps.push_back(AttentionMap::FromRows(cur->id, cur->rows, cur->in, cur->out,
                                          cur->shift));
    cur.reset();
  };
  const auto lines = Lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = lines[i];
    if (SplitWhitespace(line).empty()) {
      flush(line_no);
      continue;
    }
    if (line.front() == '#') {
      flush(line_no);
      const auto kv = ParseHeader(line, line_no);
      const auto id = kv.find("utt");
      if (id == kv.end()) ParseFail(line_no, "header lacks utt=");
      cur = Pending{id->second, HeaderUnit(kv, "input", line_no),
                    HeaderUnit(kv, "output", line_no), HeaderShift(kv, line_no),
                    {}};
      continue;
    }
    if (!cur) ParseFail(line_no, "weights before any '# utt=' header");
    std::vector<double> row;
    for (std::string_view tok : SplitWhitespace(line)) {
      row.push_back(ParseDouble(tok, line_no));
    }
    if (!cur->rows.empty() && row.size() != cur->rows.front().size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "line " + std::to_string(line_no) + ": row has " +
                      std::to_string(row.size()) + " columns, expected " +
                      std::to_string(cur->rows.front().size()));
    }
    cur->rows.push_back(std::move(row));
  }
  flush(lines.size());
  return maps;
}

void WriteAttention(const std::filesystem::path& path,
                    std::span<const AttentionMap> maps) {
  WriteFile(path, HasTextExtension(path) ? EncodeAttentionTsv(maps)
                                         : EncodeAtnb(maps));
}

std::vector<AttentionMap> ReadAttention(const std::filesystem::path& path) {
  const std::string bytes = ReadFile(path);
  return HasTextExtension(path) ? DecodeAttentionTsv(bytes) : DecodeAtnb(bytes);
}

// --- Alignment TSV ----------------------------------------------------------

std::string EncodeAlignments(std::span<const Segmentation> segs) {
  if (segs.empty()) return {};
  const Segmentation& first = segs.front();
  std::string out = "# unit=" + std::string(UnitName(first.unit));
  if (first.frame_shift_ms) out += " frame_shift_ms=" + FormatNumber(*first.frame_shift_ms);
  out += '\n';
  for (const Segmentation& seg : segs) {
    if (seg.unit != first.unit || seg.frame_shift_ms != first.frame_shift_ms) {
      throw Error(ErrorCode::kUnitMismatch,
                  "utterance '" + seg.utterance_id +
                      "': alignment files hold a single unit");
    }
    ValidateSegmentation(seg);
    for (const Segment& s : seg.segments) {
      if (s.label.find_first_of("\t\n") != std::string::npos) {
        throw Error(ErrorCode::kInvariantViolation,
                    "utterance '" + seg.utterance_id + "': label with tab/newline");
      }
      out += seg.utterance_id + '\t' + std::to_string(s.start) + '\t' +
             std::to_string(s.end) + '\t' + s.label + '\n';
    }
  }
  return out;
}

std::vector<Segmentation> DecodeAlignments(std::string_view text) {
  const auto lines = Lines(text);
  std::vector<Segmentation> segs;
  std::size_t i = 0;
  while (i < lines.size() && SplitWhitespace(lines[i]).empty()) ++i;
  if (i == lines.size()) return segs;
  const auto kv = ParseHeader(lines[i], i + 1);
  const Unit unit = HeaderUnit(kv, "unit", i + 1);
  const std::optional<double> shift = HeaderShift(kv, i + 1);
  if (IsFrameUnit(unit) && !shift) ParseFail(i + 1, "frame units need frame_shift_ms=");

  std::set<std::string, std::less<>> finished;
  for (++i; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (SplitWhitespace(lines[i]).empty()) continue;
    const auto fields = Split(lines[i], '\t');
    if (fields.size() != 4) {
      ParseFail(line_no, "expected 4 tab-separated fields, got " +
                             std::to_string(fields.size()));
    }
    if (fields[0].empty()) ParseFail(line_no, "empty utterance id");
    Segment s{ParseInt(fields[1], line_no), ParseInt(fields[2], line_no),
              std::string(fields[3])};
    if (segs.empty() || segs.back().utterance_id != fields[0]) {
      if (!segs.empty()) finished.insert(segs.back().utterance_id);
      if (finished.contains(fields[0])) {
        ParseFail(line_no, "utterance '" + std::string(fields[0]) +
                               "' is not contiguous");
      }
      Segmentation seg;
      seg.utterance_id = std::string(fields[0]);
      seg.unit = unit;
      seg.frame_shift_ms = shift;
      segs.push_back(std::move(seg));
    }
    segs.back().segments.push_back(std::move(s));
    segs.back().horizon = segs.back().segments.back().end;
  }
  for (const Segmentation& seg : segs) ValidateSegmentation(seg);
  return segs;
}

void WriteAlignments(const std::filesystem::path& path,
                     std::span<const Segmentation> segs) {
  WriteFile(path, EncodeAlignments(segs));
}

std::vector<Segmentation> ReadAlignments(const std::filesystem::path& path) {
  return DecodeAlignments(ReadFile(path));
}

// --- Boundary TSV -----------------------------------------------------------

std::string EncodeBoundaries(std::span<const BoundarySet> sets) {
  if (sets.empty()) return {};
  const BoundarySet& first = sets.front();
  std::string out = "# boundaries unit=";
  out += first.unit == BoundaryUnit::kTemporalFrame ? "temporal-frame" : "symbolic";
  if (first.frame_shift_ms) out += " frame_shift_ms=" + FormatNumber(*first.frame_shift_ms);
  out += '\n';
  for (const BoundarySet& b : sets) {
    if (b.unit != first.unit || b.frame_shift_ms != first.frame_shift_ms) {
      throw Error(ErrorCode::kUnitMismatch,
                  "utterance '" + b.utterance_id +
                      "': boundary files hold a single unit");
    }
    ValidateBoundarySet(b);
    out += b.utterance_id + '\t' + std::to_string(b.horizon) + '\t';
    for (std::size_t i = 0; i < b.positions.size(); ++i) {
      if (i > 0) out += ' ';
      out += std::to_string(b.positions[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<BoundarySet> DecodeBoundaries(std::string_view text) {
  const auto lines = Lines(text);
  std::vector<BoundarySet> sets;
  std::size_t i = 0;
  while (i < lines.size() && SplitWhitespace(lines[i]).empty()) ++i;
  if (i == lines.size()) return sets;
  const auto kv = ParseHeader(lines[i], i + 1);
  if (!kv.contains("boundaries")) ParseFail(i + 1, "not a boundary file");
  const auto unit_it = kv.find("unit");
  if (unit_it == kv.end()) ParseFail(i + 1, "header lacks unit=");
  BoundaryUnit unit;
  if (unit_it->second == "symbolic") {
    unit = BoundaryUnit::kSymbolic;
  } else if (unit_it->second == "temporal-frame") {
    unit = BoundaryUnit::kTemporalFrame;
  } else {
    ParseFail(i + 1, "unknown boundary unit '" + unit_it->second + "'");
  }
  const std::optional<double> shift = HeaderShift(kv, i + 1);
  for (++i; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (SplitWhitespace(lines[i]).empty()) continue;
    const auto fields = Split(lines[i], '\t');
    if (fields.size() != 3) {
      ParseFail(line_no, "expected 3 tab-separated fields, got " +
                             std::to_string(fields.size()));
    }
    BoundarySet b;
    b.utterance_id = std::string(fields[0]);
    b.horizon = ParseInt(fields[1], line_no);
    b.unit = unit;
    b.frame_shift_ms = shift;
    for (std::string_view tok : SplitWhitespace(fields[2])) {
      b.positions.push_back(ParseInt(tok, line_no));
    }
    try {
      ValidateBoundarySet(b);
    } catch (const Error& e) {
      RethrowWithUtterance(e, b.utterance_id);
    }
    sets.push_back(std::move(b));
  }
  return sets;
}

void WriteBoundaries(const std::filesystem::path& path,
                     std::span<const BoundarySet> sets) {
  WriteFile(path, EncodeBoundaries(sets));
}

std::vector<BoundarySet> ReadBoundaries(const std::filesystem::path& path) {
  return DecodeBoundaries(ReadFile(path));
}

// --- ATNF -------------------------------------------------------------------

std::string EncodeFeatures(std::span<const FeatureMatrix> feats) {
  std::string out(kAtnfMagic);
  for (const FeatureMatrix& f : feats) {
    if (f.values.size() != f.rows * f.dims) {
      throw Error(ErrorCode::kDimensionMismatch, f.utterance_id + ": bad feature size");
    }
    PutU32(out, CheckedU32(f.utterance_id.size(), "utterance id length"));
    out += f.utterance_id;
    PutU32(out, CheckedU32(f.rows, "T"));
    PutU32(out, CheckedU32(f.dims, "D"));
    for (float v : f.values) PutF32(out, v);
  }
  return out;
}

std::vector<FeatureMatrix> DecodeFeatures(std::string_view bytes) {
  CheckMagic(bytes, kAtnfMagic);
  ByteReader r(bytes.substr(kAtnfMagic.size()));
  std::vector<FeatureMatrix> out;
  while (!r.AtEnd()) {
    FeatureMatrix f;
    const std::uint32_t id_len = r.U32("utterance id length");
    f.utterance_id = std::string(r.Take(id_len, "utterance id"));
    f.rows = r.U32("T");
    f.dims = r.U32("D");
    const std::uint64_t n = std::uint64_t{f.rows} * f.dims;
    if (n > r.remaining() / 4) {
      throw Error(ErrorCode::kTruncatedPayload, f.utterance_id + ": truncated features");
    }
    f.values.resize(static_cast<std::size_t>(n));
    for (float& v : f.values) v = r.F32("features");
    out.push_back(std::move(f));
  }
  return out;
}

// --- Corpus / lexicon -------------------------------------------------------

namespace {

template <typename Range>
std::string JoinSpace(const Range& items) {
  std::ostringstream os;
  bool first = true;
  for (const auto& x : items) {
    if (!first) os << ' ';
    os << x;
    first = false;
  }
  return os.str();
}

}  // namespace

std::string EncodeCorpus(const SynthCorpus& corpus) {
  std::string out = "#utt_id\twords\tphones\tframes_per_phone\n";
  for (const SynthUtterance& u : corpus.utterances) {
    out += u.utterance_id + '\t' + JoinSpace(u.words) + '\t' +
           JoinSpace(u.phones) + '\t' + JoinSpace(u.phone_durations) + '\n';
  }
  return out;
}

std::string EncodeLexicon(const SynthCorpus& corpus) {
  std::string out = "#word\tphones\n";
  for (const LexiconEntry& e : corpus.lexicon) {
    out += e.word + '\t' + JoinSpace(e.phones) + '\n';
  }
  return out;
}

// --- Heat map ----------------------------------------------------------------

std::string EncodeHeatmapPgm(const AttentionMap& map) {
  std::string out = "P5\n" + std::to_string(map.cols()) + " " +
                    std::to_string(map.rows()) + "\n255\n";
  double peak = 0.0;
  for (double w : map.weights()) peak = std::max(peak, w);
  for (std::size_t t = 0; t < map.rows(); ++t) {
    for (std::size_t k = 0; k < map.cols(); ++k) {
      const double level = peak > 0.0 ? map.at(t, k) / peak : 0.0;
      out.push_back(static_cast<char>(
          static_cast<unsigned char>(std::lround(255.0 * (1.0 - level)))));
    }
  }
  return out;
}

}  // namespace attnseg
