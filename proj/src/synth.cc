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

#include "attnseg/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <set>
#include <utility>

#include "attnseg/error.h"

namespace attnseg {

std::int64_t Rng::UniformInt(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) std::swap(lo, hi);
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(Next());  // full range
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = Next();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

double Rng::Uniform() {
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

double Rng::Normal(double mean, double sigma) {
  if (has_spare_) {
    has_spare_ = false;
    return mean + sigma * spare_;
  }
  // Box-Muller; 1 - Uniform() lies in (0, 1] so the log is finite.
  const double u1 = 1.0 - Uniform();
  const double u2 = Uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return mean + sigma * radius * std::cos(angle);
}

AttentionMap SynthAttention(const Segmentation& ref, const SynthConfig& cfg,
                            Unit output_unit) {
  ValidateSegmentation(ref);
  if (!(cfg.peak_mass > 0.0 && cfg.peak_mass <= 1.0)) {
    throw Error(ErrorCode::kConfigError, "peak_mass must lie in (0, 1]");
  }
  if (!(cfg.noise_sigma >= 0.0)) {
    throw Error(ErrorCode::kConfigError, "noise_sigma must be >= 0");
  }
  const auto T = static_cast<std::size_t>(ref.horizon);
  const std::size_t K = ref.segments.size();
  std::optional<double> shift = ref.frame_shift_ms;
  if (IsFrameUnit(ref.unit) && !shift) shift = kDefaultFrameShiftMs;
  AttentionMap map(ref.utterance_id, T, K, ref.unit, output_unit, shift);
  Rng rng(cfg.seed);

  std::vector<double> clean(T);
  for (std::size_t k = 0; k < K; ++k) {
    const Segment& seg = ref.segments[k];
    const auto len = static_cast<std::size_t>(seg.length());
    const std::size_t rest = T - len;
    // With no input outside the segment all mass stays on it.
    const double inside =
        rest == 0 ? 1.0 / static_cast<double>(len)
                  : cfg.peak_mass / static_cast<double>(len);
    const double outside =
        rest == 0 ? 0.0
                  : (1.0 - cfg.peak_mass) / static_cast<double>(rest);
    for (std::size_t t = 0; t < T; ++t) {
      const auto step = static_cast<std::int64_t>(t) + 1;
      clean[t] = (step >= seg.start && step <= seg.end) ? inside : outside;
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      double w = clean[t];
      if (cfg.noise_sigma > 0.0) w = std::max(0.0, w + rng.Normal(0.0, cfg.noise_sigma));
      map.at(t, k) = w;
      sum += w;
    }
    if (!(sum > 0.0)) {
      for (std::size_t t = 0; t < T; ++t) map.at(t, k) = clean[t];
      sum = 0.0;
      for (std::size_t t = 0; t < T; ++t) sum += clean[t];
    }
    for (std::size_t t = 0; t < T; ++t) map.at(t, k) /= sum;
  }
  return map;
}

Segmentation RandomSegmentation(Rng& rng, std::string utterance_id,
                                std::int64_t horizon, std::int64_t n_segments,
                                Unit unit,
                                std::optional<double> frame_shift_ms) {
  if (n_segments < 1 || horizon < n_segments) {
    throw Error(ErrorCode::kConfigInfeasible,
                "cannot split " + std::to_string(horizon) + " steps into " +
                    std::to_string(n_segments) + " segments");
  }
  // Partial Fisher-Yates over the candidate cut points 1..horizon-1.
  std::vector<std::int64_t> cuts(static_cast<std::size_t>(horizon - 1));
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    cuts[i] = static_cast<std::int64_t>(i) + 1;
  }
  const auto n_cuts = static_cast<std::size_t>(n_segments - 1);
  for (std::size_t i = 0; i < n_cuts; ++i) {
    const auto j = static_cast<std::size_t>(rng.UniformInt(
        static_cast<std::int64_t>(i), static_cast<std::int64_t>(cuts.size()) - 1));
    std::swap(cuts[i], cuts[j]);
  }
  cuts.resize(n_cuts);
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(horizon);

  Segmentation seg;
  seg.utterance_id = std::move(utterance_id);
  seg.horizon = horizon;
  seg.unit = unit;
  if (IsFrameUnit(unit)) {
    seg.frame_shift_ms = frame_shift_ms.value_or(kDefaultFrameShiftMs);
  }
  std::int64_t start = 1;
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    seg.segments.push_back({start, cuts[k], "w" + std::to_string(k + 1)});
    start = cuts[k] + 1;
  }
  return seg;
}

namespace {

std::string UtteranceId(std::int64_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "utt%05lld", static_cast<long long>(i));
  return buf;
}

void CheckRange(IntRange r, const char* name) {
  if (r.min < 1 || r.max < r.min) {
    throw Error(ErrorCode::kConfigInfeasible,
                std::string(name) + " must satisfy 1 <= min <= max");
  }
}

std::vector<std::string> PhoneInventory(std::int64_t n) {
  std::vector<std::string> phones;
  phones.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    phones.push_back(n <= 26 ? std::string(1, static_cast<char>('a' + i))
                             : "p" + std::to_string(i));
  }
  return phones;
}

}  // namespace

std::vector<Segmentation> RandomSegmentations(const RandomCorpusConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<Segmentation> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(0, cfg.n_utterances)));
  for (std::int64_t i = 0; i < cfg.n_utterances; ++i) {
    const std::int64_t horizon = rng.UniformInt(cfg.min_horizon, cfg.max_horizon);
    const std::int64_t k = rng.UniformInt(cfg.min_segments,
                                          std::min(cfg.max_segments, horizon));
    out.push_back(RandomSegmentation(rng, UtteranceId(i), horizon, k, cfg.unit,
                                     cfg.frame_shift_ms));
  }
  return out;
}

std::int64_t PronunciationCapacity(std::int64_t inventory, IntRange word_len) {
  constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  if (inventory < 1 || word_len.min < 1 || word_len.max < word_len.min) return 0;
  std::int64_t total = 0;
  std::int64_t count = inventory;  // pronunciations of length 1
  for (std::int64_t len = 1; len <= word_len.max; ++len) {
    if (len >= word_len.min) total = (total > kMax - count) ? kMax : total + count;
    if (inventory - 1 == 0) {
      count = 0;
    } else if (count > kMax / (inventory - 1)) {
      count = kMax;
    } else {
      count *= inventory - 1;
    }
    if (total == kMax) break;
  }
  return total;
}

SynthCorpus SynthesizeCorpus(const LexiconConfig& cfg) {
  CheckRange(cfg.word_len, "word_len_range");
  CheckRange(cfg.utterance_len, "utterance_len_range");
  CheckRange(cfg.frames_per_phone, "frames_per_phone_range");
  if (cfg.n_word_types < 1 || cfg.phone_inventory_size < 1) {
    throw Error(ErrorCode::kConfigInfeasible,
                "n_word_types and phone_inventory_size must be >= 1");
  }
  if (PronunciationCapacity(cfg.phone_inventory_size, cfg.word_len) <
      cfg.n_word_types) {
    throw Error(ErrorCode::kConfigInfeasible,
                std::to_string(cfg.phone_inventory_size) +
                    " phones cannot form " + std::to_string(cfg.n_word_types) +
                    " distinct word types");
  }
  if (!(cfg.frame_shift_ms > 0.0)) {
    throw Error(ErrorCode::kConfigInfeasible, "frame_shift_ms must be > 0");
  }

  Rng rng(cfg.seed);
  SynthCorpus corpus;
  corpus.phone_inventory = PhoneInventory(cfg.phone_inventory_size);
  const bool single_char = cfg.phone_inventory_size <= 26;

  // Lexicon: one pronunciation per word type, no phone repeated back to
  // back inside a word so that phone frames collapse unambiguously.
  std::set<std::vector<std::int64_t>> seen;
  const std::int64_t max_attempts = 1000 * cfg.n_word_types + 100000;
  std::int64_t attempts = 0;
  while (static_cast<std::int64_t>(corpus.lexicon.size()) < cfg.n_word_types) {
    if (++attempts > max_attempts) {
      throw Error(ErrorCode::kConfigInfeasible,
                  "could not sample enough distinct pronunciations");
    }
    const std::int64_t len = rng.UniformInt(cfg.word_len.min, cfg.word_len.max);
    std::vector<std::int64_t> ids;
    for (std::int64_t i = 0; i < len; ++i) {
      std::int64_t p;
      if (ids.empty()) {
        p = rng.UniformInt(0, cfg.phone_inventory_size - 1);
      } else {
        // Draw from the inventory minus the previous phone.
        p = rng.UniformInt(0, cfg.phone_inventory_size - 2);
        if (p >= ids.back()) ++p;
      }
      ids.push_back(p);
    }
    if (!seen.insert(ids).second) continue;
    LexiconEntry entry;
    for (std::int64_t p : ids) {
      const std::string& phone = corpus.phone_inventory[static_cast<std::size_t>(p)];
      if (!entry.word.empty() && !single_char) entry.word += '+';
      entry.word += phone;
      entry.phones.push_back(phone);
    }
    corpus.lexicon.push_back(std::move(entry));
  }

  for (std::int64_t i = 0; i < cfg.n_utterances; ++i) {
    SynthUtterance u;
    u.utterance_id = UtteranceId(i);
    const std::int64_t n_words =
        rng.UniformInt(cfg.utterance_len.min, cfg.utterance_len.max);
    u.phone_reference.utterance_id = u.utterance_id;
    u.phone_reference.unit = Unit::kPhone;
    u.frame_reference.utterance_id = u.utterance_id;
    u.frame_reference.unit = Unit::kPhoneFrame;
    u.frame_reference.frame_shift_ms = cfg.frame_shift_ms;
    std::int64_t phone_pos = 0;
    std::int64_t frame_pos = 0;
    for (std::int64_t w = 0; w < n_words; ++w) {
      const LexiconEntry& entry = corpus.lexicon[static_cast<std::size_t>(
          rng.UniformInt(0, cfg.n_word_types - 1))];
      u.words.push_back(entry.word);
      const std::int64_t phone_start = phone_pos + 1;
      const std::int64_t frame_start = frame_pos + 1;
      for (const std::string& phone : entry.phones) {
        const std::int64_t dur =
            rng.UniformInt(cfg.frames_per_phone.min, cfg.frames_per_phone.max);
        u.phones.push_back(phone);
        u.phone_durations.push_back(dur);
        u.phone_frames.insert(u.phone_frames.end(),
                              static_cast<std::size_t>(dur), phone);
        ++phone_pos;
        frame_pos += dur;
      }
      u.phone_reference.segments.push_back({phone_start, phone_pos, entry.word});
      u.frame_reference.segments.push_back({frame_start, frame_pos, entry.word});
    }
    u.phone_reference.horizon = phone_pos;
    u.frame_reference.horizon = frame_pos;
    corpus.utterances.push_back(std::move(u));
  }
  return corpus;
}

CorpusItem WordToPhoneItem(const SynthUtterance& u) {
  return {u.utterance_id, u.words, u.phones, std::nullopt};
}

CorpusItem PhoneToWordItem(const SynthUtterance& u) {
  return {u.utterance_id, u.phones, u.words, u.phone_reference};
}

CorpusItem FrameToWordItem(const SynthUtterance& u) {
  return {u.utterance_id, u.phone_frames, u.words, u.frame_reference};
}

std::vector<FeatureMatrix> SynthesizeAcoustics(const SynthCorpus& corpus,
                                               const AcousticConfig& cfg) {
  if (cfg.dims == 0) {
    throw Error(ErrorCode::kConfigInfeasible, "feature dims must be >= 1");
  }
  Rng rng(cfg.seed);
  std::vector<std::vector<double>> prototypes(corpus.phone_inventory.size());
  for (auto& proto : prototypes) {
    proto.resize(cfg.dims);
    for (double& v : proto) v = rng.Normal(0.0, cfg.prototype_sigma);
  }
  auto phone_index = [&](const std::string& phone) {
    const auto it = std::find(corpus.phone_inventory.begin(),
                              corpus.phone_inventory.end(), phone);
    return static_cast<std::size_t>(it - corpus.phone_inventory.begin());
  };
  std::vector<FeatureMatrix> out;
  out.reserve(corpus.utterances.size());
  for (const SynthUtterance& u : corpus.utterances) {
    FeatureMatrix m;
    m.utterance_id = u.utterance_id;
    m.rows = u.phone_frames.size();
    m.dims = cfg.dims;
    m.values.reserve(m.rows * m.dims);
    for (const std::string& phone : u.phone_frames) {
      const auto& proto = prototypes[phone_index(phone)];
      for (double v : proto) {
        m.values.push_back(
            static_cast<float>(v + rng.Normal(0.0, cfg.frame_noise_sigma)));
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace attnseg
