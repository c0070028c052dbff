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

#include "dvbias/labels.hpp"

#include <algorithm>

namespace dvbias::labels {

std::vector<PhraseOccurrence> find_phrase_occurrences(
    std::span<const TokenId> tokens, const BiasList& bias) {
  std::vector<PhraseOccurrence> occurrences;
  const int n_tokens = static_cast<int>(tokens.size());
  int pos = 0;
  while (pos < n_tokens) {
    int best = -1;
    int best_len = 0;
    for (int i = 0; i < bias.size(); ++i) {
      const std::vector<TokenId>& sub = bias.phrase(i).subwords;
      const int len = static_cast<int>(sub.size());
      if (len <= best_len || pos + len > n_tokens) continue;
      if (std::equal(sub.begin(), sub.end(), tokens.begin() + pos)) {
        best = i;
        best_len = len;
      }
    }
    if (best >= 0) {
      occurrences.push_back({best, pos, pos + best_len});
      pos += best_len;
    } else {
      ++pos;
    }
  }
  return occurrences;
}

TargetSequence build_wr_target(std::span<const TokenId> tokens,
                               const BiasList& bias) {
  TargetSequence target;
  target.strategy = Strategy::kWr;
  target.tokens.assign(tokens.begin(), tokens.end());
  target.spans = find_phrase_occurrences(tokens, bias);
  for (const PhraseOccurrence& occ : target.spans) {
    const TokenId dyn = bias.dynamic_id(occ.phrase);
    for (int p = occ.begin; p < occ.end; ++p) target.tokens[p] = dyn;
  }
  return target;
}

TargetSequence build_ta_target(std::span<const TokenId> tokens,
                               const BiasList& bias) {
  TargetSequence target;
  target.strategy = Strategy::kTa;
  std::vector<PhraseOccurrence> occurrences =
      find_phrase_occurrences(tokens, bias);
  target.tokens.reserve(tokens.size() + occurrences.size());
  std::size_t next = 0;
  int pos = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    target.tokens.push_back(tokens[i]);
    ++pos;
    if (next < occurrences.size() &&
        static_cast<int>(i) + 1 == occurrences[next].end) {
      const PhraseOccurrence& occ = occurrences[next];
      target.tokens.push_back(bias.dynamic_id(occ.phrase));
      ++pos;
      // Span in the output covers subwords plus the appended dynamic id.
      const int len = occ.end - occ.begin;
      target.spans.push_back({occ.phrase, pos - len - 1, pos});
      ++next;
    }
  }
  return target;
}

std::vector<TokenId> ctc_collapse(std::span<const TokenId> frames) {
  std::vector<TokenId> out;
  TokenId prev = -1;
  for (TokenId id : frames) {
    if (id != prev && id != kBlankId) out.push_back(id);
    prev = id;
  }
  return out;
}

std::vector<TokenId> merge_consecutive_bias(std::span<const TokenId> tokens,
                                            int vocab_size) {
  std::vector<TokenId> out;
  for (TokenId id : tokens) {
    if (id >= vocab_size && !out.empty() && out.back() == id) continue;
    out.push_back(id);
  }
  return out;
}

}  // namespace dvbias::labels
