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

// attnseg: attention maps -> word segmentations -> boundary scores.
//
//   attnseg synth             synthetic corpus, references and oracle maps
//   attnseg segment           run one postprocessing method over a map file
//   attnseg evaluate          score hypothesis boundaries against references
//   attnseg search-thresholds exhaustive (tau_onset, tau_offset) search
//   attnseg run               execute a JSON run manifest
//   attnseg report            toy direction/method grid as a table
//   attnseg heatmap           PGM dump of one attention map
//
// On failure a single line "attnseg-error\t<Code>\t<message>" goes to stderr
// and the exit code is 2 (1 for usage errors).

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "attnseg/align_core.h"
#include "attnseg/boundary_eval.h"
#include "attnseg/error.h"
#include "attnseg/experiment.h"
#include "attnseg/io.h"
#include "attnseg/postprocess.h"
#include "attnseg/synth.h"

namespace fs = std::filesystem;
using namespace attnseg;

namespace {

struct MatchFlags {
  std::string mode = "auto";
  double tolerance_ms = 30.0;
  double frame_shift_ms = kDefaultFrameShiftMs;

  void Register(CLI::App* app) {
    app->add_option("--mode", mode, "auto | exact | tolerance")
        ->check(CLI::IsMember({"auto", "exact", "tolerance"}));
    app->add_option("--tolerance-ms", tolerance_ms, "Tolerance window (ms)")
        ->capture_default_str();
    app->add_option("--frame-shift-ms", frame_shift_ms, "Frame shift (ms)")
        ->capture_default_str();
  }

  MatchConfig For(BoundaryUnit unit) const {
    MatchConfig cfg;
    if (mode == "exact") {
      cfg.mode = MatchMode::kSymbolicExact;
    } else if (mode == "tolerance") {
      cfg.mode = MatchMode::kTemporalTolerance;
    } else {
      cfg.mode = unit == BoundaryUnit::kTemporalFrame
                     ? MatchMode::kTemporalTolerance
                     : MatchMode::kSymbolicExact;
    }
    cfg.tolerance_ms = tolerance_ms;
    cfg.frame_shift_ms = frame_shift_ms;
    return cfg;
  }
};

std::vector<BoundaryPair> PairByUtterance(const std::vector<BoundarySet>& hyps,
                                          const std::vector<Segmentation>& refs) {
  std::vector<BoundaryPair> pairs;
  for (const Segmentation& ref : refs) {
    const BoundarySet* hyp = nullptr;
    for (const BoundarySet& h : hyps) {
      if (h.utterance_id == ref.utterance_id) {
        hyp = &h;
        break;
      }
    }
    if (!hyp) {
      throw Error(ErrorCode::kInvariantViolation,
                  "no hypothesis for utterance '" + ref.utterance_id + "'");
    }
    pairs.emplace_back(*hyp, BoundariesFromSegmentation(ref));
  }
  return pairs;
}

void EmitReport(const std::vector<ReportRow>& rows, const std::string& format,
                const std::string& out) {
  const std::string text = format == "tsv" ? FormatReportTsv(rows)
                                           : FormatReportMarkdown(rows);
  if (out.empty()) {
    std::cout << text;
  } else {
    WriteFile(out, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attnseg: word segmentation from attention maps"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus and oracle maps");
  std::string synth_out;
  ToyGridConfig toy;
  toy.lexicon.n_utterances = 200;
  std::size_t acoustic_dims = 16;
  synth->add_option("--out-dir", synth_out, "Output directory")->required();
  synth->add_option("--seed", toy.seed, "Seed")->capture_default_str();
  synth->add_option("--n-utterances", toy.lexicon.n_utterances)->capture_default_str();
  synth->add_option("--n-dev", toy.n_dev_utterances)->capture_default_str();
  synth->add_option("--n-word-types", toy.lexicon.n_word_types)->capture_default_str();
  synth->add_option("--phone-inventory", toy.lexicon.phone_inventory_size)
      ->capture_default_str();
  synth->add_option("--peak-mass", toy.attention.peak_mass)->capture_default_str();
  synth->add_option("--noise-sigma", toy.attention.noise_sigma)->capture_default_str();
  synth->add_option("--frame-shift-ms", toy.lexicon.frame_shift_ms)->capture_default_str();
  synth->add_option("--acoustic-dims", acoustic_dims)->capture_default_str();

  // segment
  auto* segment = app.add_subcommand("segment", "Postprocess attention maps into boundaries");
  std::string seg_attention, seg_out, seg_direction = "p->w", seg_method = "segmental";
  bool seg_transpose = false;
  std::int64_t max_segment_frames = kDefaultMaxSegmentFrames;
  ThresholdConfig seg_thr;
  segment->add_option("--attention", seg_attention, "ATNB or .tsv map file")->required();
  segment->add_option("--out", seg_out, "Hypothesis boundary TSV (default stdout)");
  segment->add_option("--direction", seg_direction, "w->p | p->w | f->w | a->w")
      ->capture_default_str();
  segment->add_option("--method", seg_method, "hard | threshold | segmental")
      ->capture_default_str();
  segment->add_flag("--transpose", seg_transpose, "Transpose maps first");
  segment->add_option("--max-segment-frames", max_segment_frames)->capture_default_str();
  segment->add_option("--tau-on", seg_thr.tau_onset)->capture_default_str();
  segment->add_option("--tau-off", seg_thr.tau_offset)->capture_default_str();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score hypotheses against references");
  std::string eval_hyp, eval_ref, eval_format = "md", eval_out;
  MatchFlags eval_match;
  evaluate->add_option("--hyp", eval_hyp, "Hypothesis boundary TSV")->required();
  evaluate->add_option("--ref", eval_ref, "Reference alignment TSV")->required();
  evaluate->add_option("--format", eval_format)->check(CLI::IsMember({"md", "tsv"}));
  evaluate->add_option("--out", eval_out);
  bool eval_per_utt = false;
  evaluate->add_flag("--per-utterance", eval_per_utt, "Print per-utterance counts");
  eval_match.Register(evaluate);

  // search-thresholds
  auto* search = app.add_subcommand("search-thresholds", "Grid-search thresholds");
  std::string search_attention, search_ref;
  double grid_step = 0.01;
  MatchFlags search_match;
  search->add_option("--attention", search_attention)->required();
  search->add_option("--ref", search_ref)->required();
  search->add_option("--grid-step", grid_step)->capture_default_str();
  search_match.Register(search);

  // run
  auto* run = app.add_subcommand("run", "Execute a JSON run manifest");
  std::string manifest_path;
  run->add_option("--manifest", manifest_path)->required();

  // report
  auto* report = app.add_subcommand("report", "Run the toy direction/method grid");
  ToyGridConfig grid;
  grid.lexicon.n_utterances = 200;
  std::string report_format = "md", report_out;
  report->add_option("--seed", grid.seed)->capture_default_str();
  report->add_option("--n-utterances", grid.lexicon.n_utterances)->capture_default_str();
  report->add_option("--n-dev", grid.n_dev_utterances)->capture_default_str();
  report->add_option("--peak-mass", grid.attention.peak_mass)->capture_default_str();
  report->add_option("--noise-sigma", grid.attention.noise_sigma)->capture_default_str();
  report->add_option("--grid-step", grid.grid_step)->capture_default_str();
  report->add_option("--tolerance-ms", grid.tolerance_ms)->capture_default_str();
  report->add_option("--max-segment-frames", grid.max_segment_frames)->capture_default_str();
  report->add_option("--format", report_format)->check(CLI::IsMember({"md", "tsv"}));
  report->add_option("--out", report_out);

  // heatmap
  auto* heatmap = app.add_subcommand("heatmap", "Export one map as a PGM image");
  std::string heat_attention, heat_utt, heat_out;
  heatmap->add_option("--attention", heat_attention)->required();
  heatmap->add_option("--utt", heat_utt, "Utterance id (default: first map)");
  heatmap->add_option("--out", heat_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      const fs::path dir = synth_out;
      const ToyGridData data = BuildToyGrid(toy);
      std::vector<Segmentation> phone_refs, frame_refs, dev_refs;
      for (const auto& u : data.corpus.utterances) {
        phone_refs.push_back(u.phone_reference);
        frame_refs.push_back(u.frame_reference);
      }
      for (const auto& u : data.dev.utterances) dev_refs.push_back(u.phone_reference);
      WriteFile(dir / "corpus.tsv", EncodeCorpus(data.corpus));
      WriteFile(dir / "dev_corpus.tsv", EncodeCorpus(data.dev));
      WriteFile(dir / "lexicon.tsv", EncodeLexicon(data.corpus));
      WriteAlignments(dir / "ref_phone.tsv", phone_refs);
      WriteAlignments(dir / "ref_frame.tsv", frame_refs);
      WriteAlignments(dir / "dev_ref_phone.tsv", dev_refs);
      WriteAttention(dir / "attn_w2p.atnb", data.w2p);
      WriteAttention(dir / "attn_p2w.atnb", data.p2w);
      WriteAttention(dir / "attn_f2w.atnb", data.f2w);
      WriteAttention(dir / "dev_attn_p2w.atnb", data.dev_p2w);
      AcousticConfig ac;
      ac.dims = acoustic_dims;
      ac.seed = DeriveSeed(toy.seed, 2);
      WriteFile(dir / "acoustic.atnf",
                EncodeFeatures(SynthesizeAcoustics(data.corpus, ac)));
      std::cout << "wrote " << data.corpus.utterances.size() << " utterances ("
                << data.dev.utterances.size() << " dev) to " << dir.string() << "\n";
    } else if (*segment) {
      RunManifest m;
      const auto dir = ParseDirection(seg_direction);
      const auto method = ParseMethod(seg_method);
      if (!dir) throw Error(ErrorCode::kConfigError, "unknown direction " + seg_direction);
      if (!method) throw Error(ErrorCode::kConfigError, "unknown method " + seg_method);
      m.direction = *dir;
      m.method = *method;
      m.transpose = seg_transpose;
      m.max_segment_frames = max_segment_frames;
      ValidateManifest(m);
      std::vector<BoundarySet> hyps;
      for (const AttentionMap& raw : ReadAttention(seg_attention)) {
        try {
          AttentionMap map = ValidateMap(raw);
          if (map.input_unit() != InputUnit(m.direction) ||
              map.output_unit() != OutputUnit(m.direction)) {
            throw Error(ErrorCode::kConfigError, "map units do not match --direction");
          }
          if (m.transpose) map = Transpose(map);
          switch (m.method) {
            case Method::kHard:
              hyps.push_back(HardAssign(map));
              break;
            case Method::kThreshold:
              hyps.push_back(SpansToBoundaries(ThresholdSegment(map, seg_thr)));
              break;
            case Method::kSegmental: {
              SegmentalConfig cfg;
              if (IsFrameUnit(map.input_unit())) cfg.max_segment_len = max_segment_frames;
              hyps.push_back(BoundariesFromSegmentation(
                  SegmentalAssign(map, cfg).segmentation));
              break;
            }
          }
        } catch (const Error& e) {
          RethrowWithUtterance(e, raw.utterance_id());
        }
      }
      if (seg_out.empty()) {
        std::cout << EncodeBoundaries(hyps);
      } else {
        WriteBoundaries(seg_out, hyps);
      }
    } else if (*evaluate) {
      const auto hyps = ReadBoundaries(eval_hyp);
      const auto refs = ReadAlignments(eval_ref);
      if (refs.empty()) throw Error(ErrorCode::kEmptyCorpus, "reference file is empty");
      const auto pairs = PairByUtterance(hyps, refs);
      const MatchConfig cfg = eval_match.For(BoundaryUnitFor(refs.front().unit));
      const EvalReport r = EvaluateCorpus(pairs, cfg);
      EmitReport({ReportRow{"-", "-", r}}, eval_format, eval_out);
      if (eval_per_utt) {
        for (const auto& u : r.per_utterance) {
          std::cout << u.utterance_id << '\t' << u.counts.matched << '\t'
                    << u.counts.n_hyp << '\t' << u.counts.n_ref << '\n';
        }
      }
    } else if (*search) {
      const auto maps = ReadAttention(search_attention);
      const auto refs = ReadAlignments(search_ref);
      std::vector<ThresholdDevItem> dev;
      for (const AttentionMap& raw : maps) {
        const Segmentation* ref = nullptr;
        for (const auto& r : refs) {
          if (r.utterance_id == raw.utterance_id()) ref = &r;
        }
        if (!ref) {
          throw Error(ErrorCode::kInvariantViolation,
                      "no reference for utterance '" + raw.utterance_id() + "'");
        }
        dev.push_back({ValidateMap(raw), BoundariesFromSegmentation(*ref)});
      }
      if (dev.empty()) throw Error(ErrorCode::kEmptyDevSet, "no maps");
      const MatchConfig cfg = search_match.For(dev.front().reference.unit);
      const ThresholdSearchResult r = SearchThresholds(dev, grid_step, cfg);
      std::cout << "tau_onset\t" << FormatNumber(r.config.tau_onset) << "\n"
                << "tau_offset\t" << FormatNumber(r.config.tau_offset) << "\n"
                << "F\t" << FormatPercent(r.report.f_score) << "\n";
    } else if (*run) {
      const fs::path path = manifest_path;
      const RunManifest m = ManifestFromJson(ReadFile(path), path.parent_path());
      const RunResult r = RunManifestFiles(m);
      const ReportRow row{std::string(DirectionName(m.direction)),
                          std::string(MethodName(m.method)), r.report};
      std::cout << FormatReportMarkdown({&row, 1});
      if (r.tuned_thresholds) {
        std::cout << "tuned tau_onset=" << FormatNumber(r.tuned_thresholds->tau_onset)
                  << " tau_offset=" << FormatNumber(r.tuned_thresholds->tau_offset)
                  << "\n";
      }
    } else if (*report) {
      EmitReport(RunToyGrid(grid), report_format, report_out);
    } else if (*heatmap) {
      const auto maps = ReadAttention(heat_attention);
      const AttentionMap* chosen = maps.empty() ? nullptr : &maps.front();
      if (!heat_utt.empty()) {
        chosen = nullptr;
        for (const auto& m : maps) {
          if (m.utterance_id() == heat_utt) chosen = &m;
        }
      }
      if (!chosen) throw Error(ErrorCode::kInvariantViolation, "no such map");
      WriteFile(heat_out, EncodeHeatmapPgm(*chosen));
    }
  } catch (const Error& e) {
    std::cerr << "attnseg-error\t" << ErrorCodeName(e.code()) << '\t' << e.what()
              << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "attnseg-error\tInternal\t" << e.what() << std::endl;
    return 2;
  }
  return 0;
}
