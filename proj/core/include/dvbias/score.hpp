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

#ifndef DVBIAS_SCORE_HPP_
#define DVBIAS_SCORE_HPP_

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dvbias/types.hpp"

namespace dvbias::score {

enum class EditOp { kMatch, kSub, kDel, kIns };

// One alignment step. ref_pos / hyp_pos index into the aligned unit
// sequences, -1 when the side is not consumed (insertion / deletion).
struct TraceStep {
  EditOp op;
  int ref_pos;
  int hyp_pos;
};

// Minimal-cost alignment with unit substitution/insertion/deletion costs.
// Among minimal traces the backtrace prefers match, then substitution,
// then deletion, then insertion at every tie.
std::vector<TraceStep> align(const std::vector<std::string>& ref,
                             const std::vector<std::string>& hyp);

struct ErrorCounts {
  long long subs = 0;
  long long dels = 0;
  long long ins = 0;

  long long total() const { return subs + dels + ins; }
};

// Edit errors split into the class of units carrying bias phrases and the
// rest. Substitutions and deletions follow the reference unit's class;
// insertions follow the inserted hypothesis unit's class.
struct AlignmentBreakdown {
  ErrorCounts biased;
  ErrorCounts unbiased;
  long long ref_biased = 0;
  long long ref_unbiased = 0;
  std::vector<TraceStep> trace;  // empty for corpus aggregates

  long long ref_len() const { return ref_biased + ref_unbiased; }
  long long total_errors() const { return biased.total() + unbiased.total(); }

  // Error rates; an empty class with zero errors rates 0, with errors +inf.
  double wer() const;
  double bwer() const;
  double uwer() const;

  void add(const AlignmentBreakdown& other);
};

// Word-level breakdown against an explicit bias word set. Throws
// EMPTY_REFERENCE when `ref` is empty.
AlignmentBreakdown wer_breakdown(const std::vector<std::string>& ref,
                                 const std::vector<std::string>& hyp,
                                 const std::set<std::string>& bias_words);

// Core alignment + classification over arbitrary unit sequences with
// precomputed bias flags. Never throws on empty input.
AlignmentBreakdown breakdown_units(const std::vector<std::string>& ref_units,
                                   const std::vector<bool>& ref_bias,
                                   const std::vector<std::string>& hyp_units,
                                   const std::vector<bool>& hyp_bias);

enum class Unit { kWord, kChar };

Unit parse_unit(const std::string& name);

// Marks each word that lies inside an occurrence of any bias phrase
// (leftmost, longest-phrase-first, non-overlapping word-level matching).
std::vector<bool> mark_phrase_words(
    const std::vector<std::string>& words,
    const std::vector<std::vector<std::string>>& bias_phrases);

// Splits a UTF-8 string into codepoint units.
std::vector<std::string> utf8_chars(const std::string& text);

// Sums per-pair counts over the corpus before any division. Word unit:
// a word is biased when it equals any constituent word of any phrase.
// Char unit: each word splits into UTF-8 codepoints (no space units) and a
// character is biased when its word lies inside a phrase occurrence, on
// the reference side for substitutions/deletions and the hypothesis side
// for insertions. Empty references are legal here and contribute only
// insertions.
AlignmentBreakdown corpus_score(
    const std::vector<std::pair<std::vector<std::string>,
                                std::vector<std::string>>>& pairs,
    const std::vector<std::vector<std::string>>& bias_phrases, Unit unit);

}  // namespace dvbias::score

#endif  // DVBIAS_SCORE_HPP_
