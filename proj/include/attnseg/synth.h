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

// Synthetic attention maps with known segmentations, and synthetic
// lexicon-driven corpora (words, phones, phone frames, acoustic-like frames).
//
// All generators are deterministic given a seed and produce the same bytes on
// every platform: the engine is std::mt19937_64 and the distributions are
// implemented here rather than taken from <random>, whose distributions are
// implementation-defined.

#ifndef ATTNSEG_SYNTH_H_
#define ATTNSEG_SYNTH_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "attnseg/align_core.h"

namespace attnseg {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }
  // Uniform integer in [lo, hi].
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);
  // Uniform double in [0, 1).
  double Uniform();
  double Normal(double mean = 0.0, double sigma = 1.0);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct SynthConfig {
  double peak_mass = 0.8;   // (0, 1]
  double noise_sigma = 0.05;
  std::uint64_t seed = 0;
};

// Column k places `peak_mass` uniformly on the reference segment k and the
// rest uniformly on the other inputs, then adds N(0, noise_sigma) noise,
// clamps at zero and renormalizes. Inputs use `ref.unit`.
AttentionMap SynthAttention(const Segmentation& ref, const SynthConfig& cfg,
                            Unit output_unit = Unit::kWord);

// Uniformly random composition of `horizon` into `n_segments` parts.
Segmentation RandomSegmentation(Rng& rng, std::string utterance_id,
                                std::int64_t horizon, std::int64_t n_segments,
                                Unit unit,
                                std::optional<double> frame_shift_ms =
                                    std::nullopt);

struct RandomCorpusConfig {
  std::int64_t n_utterances = 200;
  std::int64_t min_horizon = 50;
  std::int64_t max_horizon = 70;
  std::int64_t min_segments = 6;
  std::int64_t max_segments = 10;
  Unit unit = Unit::kPhoneFrame;
  double frame_shift_ms = kDefaultFrameShiftMs;
  std::uint64_t seed = 0;
};

std::vector<Segmentation> RandomSegmentations(const RandomCorpusConfig& cfg);

struct IntRange {
  std::int64_t min = 1;
  std::int64_t max = 1;
};

struct LexiconConfig {
  std::int64_t n_word_types = 50;
  std::int64_t phone_inventory_size = 20;
  IntRange word_len{2, 5};         // phones per word
  IntRange utterance_len{4, 8};    // words per utterance
  IntRange frames_per_phone{3, 9};
  std::int64_t n_utterances = 500;
  double frame_shift_ms = kDefaultFrameShiftMs;
  std::uint64_t seed = 0;
};

struct LexiconEntry {
  std::string word;
  std::vector<std::string> phones;
};

struct SynthUtterance {
  std::string utterance_id;
  std::vector<std::string> words;
  std::vector<std::string> phones;
  std::vector<std::int64_t> phone_durations;  // frames per phone
  std::vector<std::string> phone_frames;      // phones repeated by duration
  Segmentation phone_reference;  // words over phones
  Segmentation frame_reference;  // words over phone frames
};

struct SynthCorpus {
  std::vector<std::string> phone_inventory;
  std::vector<LexiconEntry> lexicon;
  std::vector<SynthUtterance> utterances;
};

// Number of distinct pronunciations of length in `word_len` over an inventory
// of `inventory` phones with no phone repeated back to back (saturating).
std::int64_t PronunciationCapacity(std::int64_t inventory, IntRange word_len);

// Throws kConfigInfeasible for empty ranges or when the inventory cannot
// provide n_word_types distinct pronunciations.
SynthCorpus SynthesizeCorpus(const LexiconConfig& cfg);

// Corpus items for each task. The word -> phone item carries no reference:
// its word segmentation lives on the output axis.
CorpusItem WordToPhoneItem(const SynthUtterance& u);
CorpusItem PhoneToWordItem(const SynthUtterance& u);
CorpusItem FrameToWordItem(const SynthUtterance& u);

// Row-major T x D matrix of acoustic-like frames for one utterance.
struct FeatureMatrix {
  std::string utterance_id;
  std::size_t rows = 0;
  std::size_t dims = 0;
  std::vector<float> values;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

struct AcousticConfig {
  std::size_t dims = 16;
  double prototype_sigma = 1.0;
  double frame_noise_sigma = 0.5;
  std::uint64_t seed = 0;
};

// One random prototype vector per phone, plus Gaussian noise per frame.
std::vector<FeatureMatrix> SynthesizeAcoustics(const SynthCorpus& corpus,
                                               const AcousticConfig& cfg);

}  // namespace attnseg

#endif  // ATTNSEG_SYNTH_H_
