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

#include "dvbias/score.hpp"

#include <algorithm>
#include <limits>

namespace dvbias::score {

namespace {

double rate(long long errors, long long denom) {
  if (denom > 0) return static_cast<double>(errors) / denom;
  return errors == 0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

std::vector<TraceStep> align(const std::vector<std::string>& ref,
                             const std::vector<std::string>& hyp) {
  const int r = static_cast<int>(ref.size());
  const int h = static_cast<int>(hyp.size());
  std::vector<std::vector<int>> cost(r + 1, std::vector<int>(h + 1, 0));
  for (int i = 0; i <= r; ++i) cost[i][0] = i;
  for (int j = 0; j <= h; ++j) cost[0][j] = j;
  for (int i = 1; i <= r; ++i) {
    for (int j = 1; j <= h; ++j) {
      const int diag = cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const int del = cost[i - 1][j] + 1;
      const int ins = cost[i][j - 1] + 1;
      cost[i][j] = std::min({diag, del, ins});
    }
  }

  // Backtrace preferring match > substitution > deletion > insertion.
  std::vector<TraceStep> trace;
  int i = r, j = h;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      const int diag = cost[i - 1][j - 1] + (same ? 0 : 1);
      if (diag == cost[i][j] && same) {
        trace.push_back({EditOp::kMatch, i - 1, j - 1});
        --i; --j;
        continue;
      }
      if (diag == cost[i][j]) {
        trace.push_back({EditOp::kSub, i - 1, j - 1});
        --i; --j;
        continue;
      }
    }
    if (i > 0 && cost[i - 1][j] + 1 == cost[i][j]) {
      trace.push_back({EditOp::kDel, i - 1, -1});
      --i;
      continue;
    }
    trace.push_back({EditOp::kIns, -1, j - 1});
    --j;
  }
  std::reverse(trace.begin(), trace.end());
  return trace;
}

double AlignmentBreakdown::wer() const {
  return rate(total_errors(), ref_len());
}

double AlignmentBreakdown::bwer() const {
  return rate(biased.total(), ref_biased);
}

double AlignmentBreakdown::uwer() const {
  return rate(unbiased.total(), ref_unbiased);
}

void AlignmentBreakdown::add(const AlignmentBreakdown& other) {
  biased.subs += other.biased.subs;
  biased.dels += other.biased.dels;
  biased.ins += other.biased.ins;
  unbiased.subs += other.unbiased.subs;
  unbiased.dels += other.unbiased.dels;
  unbiased.ins += other.unbiased.ins;
  ref_biased += other.ref_biased;
  ref_unbiased += other.ref_unbiased;
}

AlignmentBreakdown breakdown_units(const std::vector<std::string>& ref_units,
                                   const std::vector<bool>& ref_bias,
                                   const std::vector<std::string>& hyp_units,
                                   const std::vector<bool>& hyp_bias) {
  AlignmentBreakdown out;
  out.trace = align(ref_units, hyp_units);
  for (std::size_t i = 0; i < ref_units.size(); ++i) {
    if (ref_bias[i]) ++out.ref_biased; else ++out.ref_unbiased;
  }
  for (const TraceStep& step : out.trace) {
    switch (step.op) {
      case EditOp::kMatch:
        break;
      case EditOp::kSub:
        if (ref_bias[step.ref_pos]) ++out.biased.subs;
        else ++out.unbiased.subs;
        break;
      case EditOp::kDel:
        if (ref_bias[step.ref_pos]) ++out.biased.dels;
        else ++out.unbiased.dels;
        break;
      case EditOp::kIns:
        if (hyp_bias[step.hyp_pos]) ++out.biased.ins;
        else ++out.unbiased.ins;
        break;
    }
  }
  return out;
}

AlignmentBreakdown wer_breakdown(const std::vector<std::string>& ref,
                                 const std::vector<std::string>& hyp,
                                 const std::set<std::string>& bias_words) {
  if (ref.empty()) {
    throw Error(ErrorCode::kEmptyReference,
                "reference has no words; rates are undefined");
  }
  auto flags = [&bias_words](const std::vector<std::string>& units) {
    std::vector<bool> out(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
      out[i] = bias_words.count(units[i]) > 0;
    }
    return out;
  };
  return breakdown_units(ref, flags(ref), hyp, flags(hyp));
}

Unit parse_unit(const std::string& name) {
  if (name == "word") return Unit::kWord;
  if (name == "char") return Unit::kChar;
  throw Error(ErrorCode::kInvalidSpec,
              "unknown scoring unit '" + name + "' (word|char)");
}

std::vector<bool> mark_phrase_words(
    const std::vector<std::string>& words,
    const std::vector<std::vector<std::string>>& bias_phrases) {
  std::vector<bool> flags(words.size(), false);
  const int n_words = static_cast<int>(words.size());
  int pos = 0;
  while (pos < n_words) {
    int best_len = 0;
    for (const std::vector<std::string>& phrase : bias_phrases) {
      const int len = static_cast<int>(phrase.size());
      if (len <= best_len || len == 0 || pos + len > n_words) continue;
      if (std::equal(phrase.begin(), phrase.end(), words.begin() + pos)) {
        best_len = len;
      }
    }
    if (best_len > 0) {
      for (int p = pos; p < pos + best_len; ++p) flags[p] = true;
      pos += best_len;
    } else {
      ++pos;
    }
  }
  return flags;
}

std::vector<std::string> utf8_chars(const std::string& text) {
  std::vector<std::string> chars;
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if ((lead & 0x80) == 0x00) len = 1;
    else if ((lead & 0xE0) == 0xC0) len = 2;
    else if ((lead & 0xF0) == 0xE0) len = 3;
    else if ((lead & 0xF8) == 0xF0) len = 4;
    len = std::min(len, text.size() - i);
    chars.push_back(text.substr(i, len));
    i += len;
  }
  return chars;
}

namespace {

// Expands words into character units, each inheriting its word's flag.
void expand_chars(const std::vector<std::string>& words,
                  const std::vector<bool>& word_flags,
                  std::vector<std::string>* units,
                  std::vector<bool>* flags) {
  for (std::size_t w = 0; w < words.size(); ++w) {
    for (std::string& c : utf8_chars(words[w])) {
      units->push_back(std::move(c));
      flags->push_back(word_flags[w]);
    }
  }
}

}  // namespace

AlignmentBreakdown corpus_score(
    const std::vector<std::pair<std::vector<std::string>,
                                std::vector<std::string>>>& pairs,
    const std::vector<std::vector<std::string>>& bias_phrases, Unit unit) {
  std::set<std::string> bias_words;
  for (const std::vector<std::string>& phrase : bias_phrases) {
    bias_words.insert(phrase.begin(), phrase.end());
  }

  AlignmentBreakdown corpus;
  for (const auto& [ref, hyp] : pairs) {
    AlignmentBreakdown one;
    if (unit == Unit::kWord) {
      auto flags = [&bias_words](const std::vector<std::string>& units) {
        std::vector<bool> out(units.size());
        for (std::size_t i = 0; i < units.size(); ++i) {
          out[i] = bias_words.count(units[i]) > 0;
        }
        return out;
      };
      one = breakdown_units(ref, flags(ref), hyp, flags(hyp));
    } else {
      std::vector<std::string> ref_units, hyp_units;
      std::vector<bool> ref_flags, hyp_flags;
      expand_chars(ref, mark_phrase_words(ref, bias_phrases), &ref_units,
                   &ref_flags);
      expand_chars(hyp, mark_phrase_words(hyp, bias_phrases), &hyp_units,
                   &hyp_flags);
      one = breakdown_units(ref_units, ref_flags, hyp_units, hyp_flags);
    }
    corpus.add(one);
  }
  return corpus;
}

}  // namespace dvbias::score
