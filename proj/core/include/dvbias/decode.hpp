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

#ifndef DVBIAS_DECODE_HPP_
#define DVBIAS_DECODE_HPP_

#include <string>
#include <utility>
#include <vector>

#include "dvbias/types.hpp"

namespace dvbias::decode {

// One greedily decoded token: the frame with the highest probability inside
// its argmax run, and that probability. Peak frames strictly increase along
// an emission sequence.
struct Emission {
  TokenId token;
  int peak_frame;
  double peak_prob;
};

struct ActivationConfig {
  // Per-token confidence threshold; a phrase of length k needs total score
  // >= k * threshold to be applied.
  double threshold = 0.5;
  // Candidate window sizes j range over [k - j_slack, k + j_slack].
  int j_slack = 2;
  // When false every emitted bias token is replaced unconditionally with
  // j = k (ablation switch); records then carry applied = true regardless
  // of score.
  bool activation_enabled = true;
};

// Audit record for one emitted bias token. With activation enabled,
// applied == (score >= k * threshold). chosen_j = 0 and score = -inf mean
// no candidate window was feasible.
struct ActivationRecord {
  int phrase;
  int chosen_j;
  int window_begin;  // first frame of the searched window
  int window_end;    // bias-token peak frame (exclusive bound)
  double score;
  bool applied;
};

// Per-frame argmax (ties toward the lowest id), collapsed into runs;
// blank runs emit nothing. Each run's peak is its highest-probability
// frame, earliest on ties.
std::vector<Emission> greedy_decode(const PosteriorMatrix& m);

struct ConfidenceResult {
  double score;             // -inf when no feasible alignment exists
  std::vector<int> frames;  // one emission frame per subword when feasible
};

// Best monotone emission-frame assignment of phrase.subwords to frames in
// [window_begin, window_end): frames strictly increase, with at least one
// intervening frame between equal adjacent subwords (the mandatory CTC
// blank). Score is the sum of the posterior probability at each subword's
// frame; ties prefer the earliest frames.
ConfidenceResult confidence_search(const PosteriorMatrix& m, int window_begin,
                                   int window_end, const BiasPhrase& phrase);

// Scans emissions left to right. Each emitted bias token closes a segment
// (the emissions after the previous bias token); candidate windows reach
// back j emissions into that segment only, so earlier decisions and the
// threshold never change which candidate is chosen. The best-scoring j
// wins (smallest on ties); if its score passes k * threshold the last j
// segment tokens are replaced by the phrase subwords, otherwise they are
// kept; the bias token itself is never emitted.
std::pair<std::vector<TokenId>, std::vector<ActivationRecord>> activate_ta(
    const PosteriorMatrix& m, const std::vector<Emission>& emissions,
    const BiasList& bias, const ActivationConfig& cfg);

// Greedy decode, merge runs of identical bias tokens, then substitute each
// bias token by its phrase subwords. Never returns dynamic ids.
std::vector<TokenId> decode_wr(const PosteriorMatrix& m, const BiasList& bias);

// kGreedy is the unbiased baseline: collapsed tokens as-is (dynamic ids
// are dropped at rendering, having no surface form).
enum class Mode { kGreedy, kWr, kTa };

Mode parse_mode(const std::string& name);
const char* mode_name(Mode mode);

struct DecodeResult {
  std::string text;
  std::vector<TokenId> tokens;
  std::vector<ActivationRecord> records;  // empty except in TA mode
};

DecodeResult decode_utterance(const PosteriorMatrix& m, const BiasList& bias,
                              const Vocabulary& vocab, Mode mode,
                              const ActivationConfig& cfg);

}  // namespace dvbias::decode

#endif  // DVBIAS_DECODE_HPP_
