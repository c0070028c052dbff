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

#ifndef DVBIAS_LABELS_HPP_
#define DVBIAS_LABELS_HPP_

#include <span>
#include <vector>

#include "dvbias/types.hpp"

namespace dvbias::labels {

// One phrase match inside a token sequence: tokens [begin, end) equal the
// phrase's subwords. Occurrences from find_phrase_occurrences never overlap.
struct PhraseOccurrence {
  int phrase;  // index into the bias list
  int begin;   // first token position
  int end;     // one past the last token position
};

enum class Strategy { kNone, kWr, kTa };

// A bias-label training target plus the spans it rewrote. For WR each span
// covers the k_i replacement copies of the dynamic id; for TA it covers the
// phrase subwords plus the appended dynamic id.
struct TargetSequence {
  std::vector<TokenId> tokens;
  Strategy strategy = Strategy::kNone;
  std::vector<PhraseOccurrence> spans;  // positions are into `tokens`
};

// Scans `tokens` left to right for subword-level matches of the phrases in
// `bias`. At each position the longest matching phrase wins; on equal
// length the lowest phrase index wins. Matched tokens are consumed, so the
// result is non-overlapping and ordered by `begin`.
std::vector<PhraseOccurrence> find_phrase_occurrences(
    std::span<const TokenId> tokens, const BiasList& bias);

// Word-replacement target: every occurrence of phrase i has each of its
// k_i subwords replaced by the dynamic id V+i, so length is preserved.
TargetSequence build_wr_target(std::span<const TokenId> tokens,
                               const BiasList& bias);

// Text-augmentation target: the dynamic id V+i is inserted directly after
// each occurrence of phrase i; original subwords are kept.
TargetSequence build_ta_target(std::span<const TokenId> tokens,
                               const BiasList& bias);

// CTC collapse: merge consecutive duplicates, then drop blanks.
std::vector<TokenId> ctc_collapse(std::span<const TokenId> frames);

// Collapses runs of the same dynamic id (>= vocab_size) to one token.
// Base-vocabulary tokens pass through untouched, duplicates included.
std::vector<TokenId> merge_consecutive_bias(std::span<const TokenId> tokens,
                                            int vocab_size);

}  // namespace dvbias::labels

#endif  // DVBIAS_LABELS_HPP_
