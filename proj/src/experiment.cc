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

#include "attnseg/experiment.h"

#include <cstdio>
#include <map>
#include <string>
#include <utility>

#include "attnseg/error.h"
#include "attnseg/io.h"
#include "json.hpp"

namespace attnseg {
namespace {

using json = nlohmann::json;

struct EffectiveUnits {
  Unit input;
  Unit output;
};

EffectiveUnits UnitsAfterTranspose(const RunManifest& m) {
  EffectiveUnits u{InputUnit(m.direction), OutputUnit(m.direction)};
  if (m.transpose) std::swap(u.input, u.output);
  return u;
}

[[noreturn]] void ConfigFail(const std::string& what) {
  throw Error(ErrorCode::kConfigError, what);
}

std::map<std::string, const Segmentation*, std::less<>> IndexById(
    std::span<const Segmentation> segs) {
  std::map<std::string, const Segmentation*, std::less<>> index;
  for (const Segmentation& s : segs) {
    if (!index.emplace(s.utterance_id, &s).second) {
      throw Error(ErrorCode::kInvariantViolation,
                  "duplicate reference for utterance '" + s.utterance_id + "'");
    }
  }
  return index;
}

const Segmentation& LookupReference(
    const std::map<std::string, const Segmentation*, std::less<>>& index,
    const std::string& id) {
  const auto it = index.find(id);
  if (it == index.end()) {
    throw Error(ErrorCode::kInvariantViolation,
                "no reference for utterance '" + id + "'");
  }
  return *it->second;
}

// Validated map, with axis units checked against the direction and the
// transpose applied.
AttentionMap PrepareMap(const RunManifest& m, const AttentionMap& raw) {
  if (raw.input_unit() != InputUnit(m.direction) ||
      raw.output_unit() != OutputUnit(m.direction)) {
    throw Error(ErrorCode::kConfigError,
                "map units " + std::string(UnitName(raw.input_unit())) + "->" +
                    std::string(UnitName(raw.output_unit())) +
                    " do not match direction " +
                    std::string(DirectionName(m.direction)));
  }
  AttentionMap map = ValidateMap(raw);
  if (m.transpose) map = Transpose(map);
  return map;
}

BoundarySet ReferenceBoundaries(const Segmentation& ref, const BoundarySet& hyp) {
  BoundarySet b = BoundariesFromSegmentation(ref);
  if (b.horizon != hyp.horizon) {
    throw Error(ErrorCode::kDimensionMismatch,
                "hypothesis horizon " + std::to_string(hyp.horizon) +
                    " != reference horizon " + std::to_string(b.horizon));
  }
  return b;
}

SegmentalConfig SegmentalFor(const RunManifest& m, Unit input_unit) {
  SegmentalConfig cfg;
  if (IsFrameUnit(input_unit)) cfg.max_segment_len = m.max_segment_frames;
  return cfg;
}

}  // namespace

std::string_view DirectionName(Direction d) {
  switch (d) {
    case Direction::kWordToPhone: return "w->p";
    case Direction::kPhoneToWord: return "p->w";
    case Direction::kFrameToWord: return "f->w";
    case Direction::kAcousticToWord: return "a->w";
  }
  return "?";
}

std::optional<Direction> ParseDirection(std::string_view s) {
  static const std::pair<std::string_view, Direction> kNames[] = {
      {"w->p", Direction::kWordToPhone},     {"w2p", Direction::kWordToPhone},
      {"w→p", Direction::kWordToPhone},      {"p->w", Direction::kPhoneToWord},
      {"p2w", Direction::kPhoneToWord},      {"p→w", Direction::kPhoneToWord},
      {"f->w", Direction::kFrameToWord},     {"f2w", Direction::kFrameToWord},
      {"f→w", Direction::kFrameToWord},      {"a->w", Direction::kAcousticToWord},
      {"a2w", Direction::kAcousticToWord},   {"a→w", Direction::kAcousticToWord},
  };
  for (const auto& [name, d] : kNames) {
    if (s == name) return d;
  }
  return std::nullopt;
}

std::string_view MethodName(Method m) {
  switch (m) {
    case Method::kHard: return "Hard";
    case Method::kThreshold: return "Thr";
    case Method::kSegmental: return "Seg";
  }
  return "?";
}

std::optional<Method> ParseMethod(std::string_view s) {
  if (s == "hard" || s == "Hard") return Method::kHard;
  if (s == "threshold" || s == "thr" || s == "Thr") return Method::kThreshold;
  if (s == "segmental" || s == "seg" || s == "Seg") return Method::kSegmental;
  return std::nullopt;
}

Unit InputUnit(Direction d) {
  switch (d) {
    case Direction::kWordToPhone: return Unit::kWord;
    case Direction::kPhoneToWord: return Unit::kPhone;
    case Direction::kFrameToWord: return Unit::kPhoneFrame;
    case Direction::kAcousticToWord: return Unit::kAcousticFrame;
  }
  return Unit::kPhone;
}

Unit OutputUnit(Direction d) {
  return d == Direction::kWordToPhone ? Unit::kPhone : Unit::kWord;
}

void ValidateManifest(const RunManifest& m) {
  const EffectiveUnits u = UnitsAfterTranspose(m);
  const std::string where = std::string(DirectionName(m.direction)) + " " +
                            std::string(MethodName(m.method)) +
                            (m.transpose ? " (transposed)" : "");
  switch (m.method) {
    case Method::kHard:
      if (u.input != Unit::kWord) {
        ConfigFail(where + ": hard assignment requires words on the input side");
      }
      break;
    case Method::kThreshold:
      if (u.output != Unit::kWord) {
        ConfigFail(where + ": thresholding requires words on the output side");
      }
      break;
    case Method::kSegmental:
      if (u.output != Unit::kWord) {
        ConfigFail(where +
                   ": segmental assignment segments the input axis by words; "
                   "transpose maps with words on the input side");
      }
      break;
  }
  if (m.max_segment_frames < 1) ConfigFail("max_segment_frames must be >= 1");
  if (!(m.tolerance_ms >= 0.0)) ConfigFail("tolerance_ms must be >= 0");
  if (!(m.frame_shift_ms > 0.0)) ConfigFail("frame_shift_ms must be > 0");
  if (m.method == Method::kThreshold &&
      !(m.threshold.grid_step > 0.0 && m.threshold.grid_step <= 1.0)) {
    ConfigFail("grid_step must lie in (0, 1]");
  }
}

RunManifest ManifestFromJson(std::string_view json_text,
                             const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("manifest: ") + e.what());
  }
  RunManifest m;
  auto path = [&](const char* key) -> std::filesystem::path {
    if (!j.contains("paths") || !j.at("paths").contains(key)) return {};
    std::filesystem::path p = j.at("paths").at(key).get<std::string>();
    return (p.is_relative() && !base_dir.empty()) ? base_dir / p : p;
  };
  try {
    const auto dir = ParseDirection(j.at("direction").get<std::string>());
    if (!dir) ConfigFail("manifest: unknown direction");
    m.direction = *dir;
    const auto method = ParseMethod(j.at("method").get<std::string>());
    if (!method) ConfigFail("manifest: unknown method");
    m.method = *method;
    m.transpose = j.value("transpose", false);
    if (j.contains("match")) {
      const json& mj = j.at("match");
      if (mj.contains("mode")) {
        const std::string mode = mj.at("mode").get<std::string>();
        if (mode == "symbolic-exact" || mode == "exact") {
          m.match_mode = MatchMode::kSymbolicExact;
        } else if (mode == "temporal-tolerance" || mode == "tolerance") {
          m.match_mode = MatchMode::kTemporalTolerance;
        } else {
          ConfigFail("manifest: unknown match mode '" + mode + "'");
        }
      }
      m.tolerance_ms = mj.value("tolerance_ms", m.tolerance_ms);
      m.frame_shift_ms = mj.value("frame_shift_ms", m.frame_shift_ms);
    }
    if (j.contains("segmental")) {
      m.max_segment_frames =
          j.at("segmental").value("max_segment_frames", m.max_segment_frames);
    }
    if (j.contains("threshold")) {
      const json& tj = j.at("threshold");
      m.threshold.tau_onset = tj.value("tau_onset", m.threshold.tau_onset);
      m.threshold.tau_offset = tj.value("tau_offset", m.threshold.tau_offset);
      m.threshold.grid_step = tj.value("grid_step", m.threshold.grid_step);
      m.search_thresholds = tj.value("search", m.search_thresholds);
    }
    m.attention = path("attention");
    m.reference = path("reference");
    m.dev_attention = path("dev_attention");
    m.dev_reference = path("dev_reference");
    m.hypothesis_out = path("hypothesis_out");
    m.report_out = path("report_out");
    m.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("manifest: ") + e.what());
  }
  ValidateManifest(m);
  return m;
}

std::string ManifestToJson(const RunManifest& m) {
  json j;
  j["direction"] = std::string(DirectionName(m.direction));
  j["method"] = std::string(MethodName(m.method));
  j["transpose"] = m.transpose;
  json match;
  if (m.match_mode) {
    match["mode"] = *m.match_mode == MatchMode::kSymbolicExact
                        ? "symbolic-exact"
                        : "temporal-tolerance";
  }
  match["tolerance_ms"] = m.tolerance_ms;
  match["frame_shift_ms"] = m.frame_shift_ms;
  j["match"] = match;
  j["segmental"] = {{"max_segment_frames", m.max_segment_frames}};
  j["threshold"] = {{"tau_onset", m.threshold.tau_onset},
                    {"tau_offset", m.threshold.tau_offset},
                    {"grid_step", m.threshold.grid_step},
                    {"search", m.search_thresholds}};
  json paths = json::object();
  auto put = [&](const char* key, const std::filesystem::path& p) {
    if (!p.empty()) paths[key] = p.string();
  };
  put("attention", m.attention);
  put("reference", m.reference);
  put("dev_attention", m.dev_attention);
  put("dev_reference", m.dev_reference);
  put("hypothesis_out", m.hypothesis_out);
  put("report_out", m.report_out);
  j["paths"] = paths;
  j["seed"] = m.seed;
  return j.dump(2) + "\n";
}

MatchConfig MatchConfigFor(const RunManifest& m, BoundaryUnit reference_unit) {
  MatchConfig cfg;
  cfg.mode = m.match_mode.value_or(reference_unit == BoundaryUnit::kTemporalFrame
                                       ? MatchMode::kTemporalTolerance
                                       : MatchMode::kSymbolicExact);
  cfg.tolerance_ms = m.tolerance_ms;
  cfg.frame_shift_ms = m.frame_shift_ms;
  return cfg;
}

RunResult RunPipeline(const RunManifest& m, std::span<const AttentionMap> maps,
                      std::span<const Segmentation> references,
                      std::span<const AttentionMap> dev_maps,
                      std::span<const Segmentation> dev_references) {
  ValidateManifest(m);
  if (maps.empty()) throw Error(ErrorCode::kEmptyCorpus, "no attention maps");
  const auto ref_index = IndexById(references);
  const BoundaryUnit ref_unit = BoundaryUnitFor(references.empty()
                                                    ? InputUnit(m.direction)
                                                    : references.front().unit);
  const MatchConfig match = MatchConfigFor(m, ref_unit);

  RunResult result;
  ThresholdConfig thresholds = m.threshold;
  if (m.method == Method::kThreshold && m.search_thresholds) {
    const bool own_dev = !dev_maps.empty();
    const auto dev_refs = own_dev ? IndexById(dev_references) : decltype(ref_index){};
    std::vector<ThresholdDevItem> dev;
    for (const AttentionMap& raw : own_dev ? dev_maps : maps) {
      try {
        AttentionMap map = PrepareMap(m, raw);
        const Segmentation& ref =
            LookupReference(own_dev ? dev_refs : ref_index, raw.utterance_id());
        BoundarySet ref_b = BoundariesFromSegmentation(ref);
        dev.push_back({std::move(map), std::move(ref_b)});
      } catch (const Error& e) {
        RethrowWithUtterance(e, raw.utterance_id());
      }
    }
    thresholds = SearchThresholds(dev, m.threshold.grid_step, match).config;
    result.tuned_thresholds = thresholds;
  }

  std::vector<BoundaryPair> pairs;
  pairs.reserve(maps.size());
  for (const AttentionMap& raw : maps) {
    try {
      const AttentionMap map = PrepareMap(m, raw);
      BoundarySet hyp;
      switch (m.method) {
        case Method::kHard:
          hyp = HardAssign(map);
          break;
        case Method::kThreshold:
          hyp = SpansToBoundaries(ThresholdSegment(map, thresholds));
          break;
        case Method::kSegmental:
          hyp = BoundariesFromSegmentation(
              SegmentalAssign(map, SegmentalFor(m, map.input_unit())).segmentation);
          break;
      }
      BoundarySet ref = ReferenceBoundaries(
          LookupReference(ref_index, raw.utterance_id()), hyp);
      result.hypotheses.push_back(hyp);
      pairs.emplace_back(std::move(hyp), std::move(ref));
    } catch (const Error& e) {
      RethrowWithUtterance(e, raw.utterance_id());
    }
  }
  result.report = EvaluateCorpus(pairs, match);
  return result;
}

RunResult RunManifestFiles(const RunManifest& m) {
  ValidateManifest(m);
  if (m.attention.empty() || m.reference.empty()) {
    ConfigFail("manifest needs attention and reference paths");
  }
  const std::vector<AttentionMap> maps = ReadAttention(m.attention);
  const std::vector<Segmentation> refs = ReadAlignments(m.reference);
  std::vector<AttentionMap> dev_maps;
  std::vector<Segmentation> dev_refs;
  if (!m.dev_attention.empty()) {
    if (m.dev_reference.empty()) ConfigFail("dev_attention needs dev_reference");
    dev_maps = ReadAttention(m.dev_attention);
    dev_refs = ReadAlignments(m.dev_reference);
  }
  RunResult result = RunPipeline(m, maps, refs, dev_maps, dev_refs);
  if (!m.hypothesis_out.empty()) WriteBoundaries(m.hypothesis_out, result.hypotheses);
  if (!m.report_out.empty()) {
    const ReportRow row{std::string(DirectionName(m.direction)),
                        std::string(MethodName(m.method)), result.report};
    const bool markdown = m.report_out.extension() == ".md";
    WriteFile(m.report_out, markdown ? FormatReportMarkdown({&row, 1})
                                     : FormatReportTsv({&row, 1}));
  }
  return result;
}

std::string FormatPercent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * fraction);
  std::string s(buf);
  if (s == "-0.0") s = "0.0";
  return s;
}

namespace {

std::string OsCell(const EvalReport& r) {
  return r.over_segmentation ? FormatPercent(*r.over_segmentation) : "n/a";
}

}  // namespace

std::string FormatReportMarkdown(std::span<const ReportRow> rows) {
  std::string out =
      "| Direction | Method | P | R | F | OS |\n"
      "|---|---|---:|---:|---:|---:|\n";
  for (const ReportRow& row : rows) {
    out += "| " + row.direction + " | " + row.method + " | " +
           FormatPercent(row.report.precision) + " | " +
           FormatPercent(row.report.recall) + " | " +
           FormatPercent(row.report.f_score) + " | " + OsCell(row.report) +
           " |\n";
  }
  return out;
}

std::string FormatReportTsv(std::span<const ReportRow> rows) {
  std::string out = "direction\tmethod\tP\tR\tF\tOS\tmatched\tn_hyp\tn_ref\n";
  for (const ReportRow& row : rows) {
    const EvalReport& r = row.report;
    out += row.direction + '\t' + row.method + '\t' + FormatPercent(r.precision) +
           '\t' + FormatPercent(r.recall) + '\t' + FormatPercent(r.f_score) +
           '\t' + OsCell(r) + '\t' + std::to_string(r.counts.matched) + '\t' +
           std::to_string(r.counts.n_hyp) + '\t' +
           std::to_string(r.counts.n_ref) + '\n';
  }
  return out;
}

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ToyGridData BuildToyGrid(const ToyGridConfig& cfg) {
  LexiconConfig lex = cfg.lexicon;
  lex.seed = DeriveSeed(cfg.seed, 0);
  lex.n_utterances = cfg.lexicon.n_utterances + cfg.n_dev_utterances;
  SynthCorpus all = SynthesizeCorpus(lex);

  ToyGridData data;
  data.corpus.phone_inventory = all.phone_inventory;
  data.corpus.lexicon = all.lexicon;
  data.dev.phone_inventory = all.phone_inventory;
  data.dev.lexicon = all.lexicon;
  for (std::size_t i = 0; i < all.utterances.size(); ++i) {
    auto& dst = static_cast<std::int64_t>(i) < cfg.lexicon.n_utterances
                    ? data.corpus.utterances
                    : data.dev.utterances;
    dst.push_back(std::move(all.utterances[i]));
  }

  const std::uint64_t map_base = DeriveSeed(cfg.seed, 1);
  auto synth = [&](const Segmentation& ref, std::uint64_t stream) {
    SynthConfig sc = cfg.attention;
    sc.seed = DeriveSeed(map_base, stream);
    return SynthAttention(ref, sc);
  };
  const std::uint64_t n = data.corpus.utterances.size();
  for (std::uint64_t i = 0; i < n; ++i) {
    const SynthUtterance& u = data.corpus.utterances[i];
    data.p2w.push_back(synth(u.phone_reference, 4 * i));
    data.f2w.push_back(synth(u.frame_reference, 4 * i + 1));
    data.w2p.push_back(Transpose(synth(u.phone_reference, 4 * i + 2)));
  }
  for (std::uint64_t i = 0; i < data.dev.utterances.size(); ++i) {
    data.dev_p2w.push_back(
        synth(data.dev.utterances[i].phone_reference, 4 * (n + i) + 3));
  }
  return data;
}

std::vector<ReportRow> RunToyGrid(const ToyGridConfig& cfg) {
  const ToyGridData data = BuildToyGrid(cfg);
  std::vector<Segmentation> phone_refs, frame_refs, dev_refs;
  for (const auto& u : data.corpus.utterances) {
    phone_refs.push_back(u.phone_reference);
    frame_refs.push_back(u.frame_reference);
  }
  for (const auto& u : data.dev.utterances) dev_refs.push_back(u.phone_reference);

  auto manifest = [&](Direction d, Method method, bool transpose) {
    RunManifest m;
    m.direction = d;
    m.method = method;
    m.transpose = transpose;
    m.tolerance_ms = cfg.tolerance_ms;
    m.frame_shift_ms = cfg.lexicon.frame_shift_ms;
    m.max_segment_frames = cfg.max_segment_frames;
    m.threshold.grid_step = cfg.grid_step;
    m.seed = cfg.seed;
    return m;
  };
  auto row = [](const RunManifest& m, const RunResult& r) {
    return ReportRow{std::string(DirectionName(m.direction)),
                     std::string(MethodName(m.method)), r.report};
  };

  std::vector<ReportRow> rows;
  {
    const RunManifest m = manifest(Direction::kWordToPhone, Method::kHard, false);
    rows.push_back(row(m, RunPipeline(m, data.w2p, phone_refs)));
  }
  {
    const RunManifest m = manifest(Direction::kWordToPhone, Method::kSegmental, true);
    rows.push_back(row(m, RunPipeline(m, data.w2p, phone_refs)));
  }
  {
    const RunManifest m = manifest(Direction::kPhoneToWord, Method::kThreshold, false);
    rows.push_back(row(m, RunPipeline(m, data.p2w, phone_refs, data.dev_p2w, dev_refs)));
  }
  {
    const RunManifest m = manifest(Direction::kPhoneToWord, Method::kSegmental, false);
    rows.push_back(row(m, RunPipeline(m, data.p2w, phone_refs)));
  }
  {
    const RunManifest m = manifest(Direction::kFrameToWord, Method::kSegmental, false);
    rows.push_back(row(m, RunPipeline(m, data.f2w, frame_refs)));
  }
  return rows;
}

}  // namespace attnseg
