// Copyright (c) 2026 dvbias Authors
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

#ifndef DVBIAS_FIXTURE_HPP_
#define DVBIAS_FIXTURE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dvbias/labels.hpp"
#include "dvbias/types.hpp"

namespace dvbias::fixture {

struct FrameRange {
  int min = 2;
  int max = 4;
};

// Recipe for a synthetic corpus: peaky posteriors around a ground-truth
// token sequence, with optional corruption of contextual-phrase frames and
// spurious bias-token peaks. Deterministic per seed.
struct FixtureSpec {
  // 32..128: blank + word separator + a-z + two-letter syllables.
  int vocab_size = 64;
  int num_utterances = 50;
  FrameRange frames_per_token;
  // Probability mass on the true label at an emission frame; the rest is
  // spread uniformly.
  double alpha = 0.9;
  // Probability that a contextual-phrase token run is corrupted toward a
  // confusable token (0.52*alpha confusable vs 0.48*alpha truth).
  double rho = 0.0;
  // Bias sampling: with probability bias_prob an utterance gets
  // [bias_min, bias_max] of its own distinct words as contextual phrases.
  double bias_prob = 0.8;
  int bias_min = 2;
  int bias_max = 10;
  // Phrases appended to every bias list but absent from the audio.
  int distractors = 0;
  // Per-distractor probability of inserting a fake bias-token peak.
  double spurious_rate = 0.0;
  // Posterior style: kNone emits plain subword peaks; kWr / kTa add bias
  // tokens per the corresponding target strategy.
  labels::Strategy mode = labels::Strategy::kNone;
  std::uint64_t seed = 0;
};

struct Utterance {
  Transcript transcript;
  std::vector<std::string> bias_texts;  // real phrases then distractors
  PosteriorMatrix posteriors;
};

struct Fixture {
  Vocabulary vocab;
  std::vector<Utterance> utterances;
  std::vector<std::string> bias_union;  // corpus-level phrase list
};

// Blank, word separator, a-z, then consonant-vowel syllables in a fixed
// order, truncated to `vocab_size` entries.
Vocabulary build_vocabulary(int vocab_size);

// Throws INVALID_SPEC on out-of-range fields.
void validate_spec(const FixtureSpec& spec);

Fixture gen_fixture(const FixtureSpec& spec);

// Writes vocab.txt, refs.tsv, bias_union.txt, bias/<id>.txt and
// post/<id>.dvp under `dir`, creating directories as needed.
void write_fixture(const std::string& dir, const Fixture& fixture);

}  // namespace dvbias::fixture

#endif  // DVBIAS_FIXTURE_HPP_
