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

#include "dvbias/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace dvbias {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyText: return "EMPTY_TEXT";
    case ErrorCode::kUncoverableText: return "UNCOVERABLE_TEXT";
    case ErrorCode::kShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::kInfeasibleTarget: return "INFEASIBLE_TARGET";
    case ErrorCode::kEmptyReference: return "EMPTY_REFERENCE";
    case ErrorCode::kInvalidSpec: return "INVALID_SPEC";
    case ErrorCode::kBadFile: return "BAD_FILE";
  }
  return "UNKNOWN";
}

const char* validation_tag_name(ValidationTag tag) {
  switch (tag) {
    case ValidationTag::kRowSum: return "ROW_SUM";
    case ValidationTag::kNegativeProb: return "NEGATIVE_PROB";
    case ValidationTag::kProbAboveOne: return "PROB_ABOVE_ONE";
  }
  return "UNKNOWN";
}

namespace {

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

}  // namespace

Vocabulary Vocabulary::from_entries(std::vector<std::string> entries) {
  if (entries.empty() || !entries[0].empty()) {
    throw Error(ErrorCode::kInvalidSpec,
                "vocabulary entry 0 must be the empty blank symbol");
  }
  Vocabulary v;
  v.entries_ = std::move(entries);
  for (int id = 1; id < v.size(); ++id) {
    const std::string& e = v.entries_[id];
    if (e.empty()) {
      throw Error(ErrorCode::kInvalidSpec,
                  "vocabulary entry " + std::to_string(id) + " is empty");
    }
    if (has_whitespace(e)) {
      throw Error(ErrorCode::kInvalidSpec,
                  "vocabulary entry '" + e + "' contains whitespace");
    }
    auto [it, inserted] = v.index_.emplace(e, id);
    if (!inserted) {
      throw Error(ErrorCode::kInvalidSpec,
                  "duplicate vocabulary entry '" + e + "'");
    }
  }
  return v;
}

TokenId Vocabulary::find(std::string_view subword) const {
  auto it = index_.find(std::string(subword));
  return it == index_.end() ? -1 : it->second;
}

std::string Vocabulary::render(std::span<const TokenId> tokens) const {
  std::string out;
  for (TokenId id : tokens) {
    if (id == kBlankId || !contains_id(id)) continue;
    const std::string& e = entries_[id];
    for (char c : e) out.push_back(c == kWordSep ? ' ' : c);
  }
  return out;
}

BiasList::BiasList(std::vector<BiasPhrase> phrases, int base_vocab_size)
    : phrases_(std::move(phrases)), base_vocab_size_(base_vocab_size) {
  if (base_vocab_size_ <= 0) {
    throw Error(ErrorCode::kInvalidSpec, "base vocabulary size must be > 0");
  }
  for (const BiasPhrase& p : phrases_) {
    if (p.subwords.empty()) {
      throw Error(ErrorCode::kInvalidSpec,
                  "bias phrase '" + p.text + "' has no subwords");
    }
    for (TokenId t : p.subwords) {
      if (t <= kBlankId || t >= base_vocab_size_) {
        throw Error(ErrorCode::kInvalidSpec,
                    "bias phrase '" + p.text + "' has out-of-range subword " +
                        std::to_string(t));
      }
    }
  }
}

BiasList BiasList::from_texts(const std::vector<std::string>& texts,
                              const Vocabulary& vocab) {
  std::vector<BiasPhrase> phrases;
  phrases.reserve(texts.size());
  for (const std::string& text : texts) {
    phrases.push_back(make_bias_phrase(text, vocab));
  }
  return BiasList(std::move(phrases), vocab.size());
}

std::vector<int> BiasList::duplicates() const {
  std::vector<int> dup;
  for (int i = 0; i < size(); ++i) {
    for (int j = 0; j < i; ++j) {
      if (phrases_[i].subwords == phrases_[j].subwords) {
        dup.push_back(i);
        break;
      }
    }
  }
  return dup;
}

PosteriorMatrix::PosteriorMatrix(int num_frames, int vocab_size, int num_bias)
    : num_frames_(num_frames), vocab_size_(vocab_size), num_bias_(num_bias) {
  if (num_frames < 0 || vocab_size <= 0 || num_bias < 0) {
    throw Error(ErrorCode::kShapeMismatch,
                "posterior matrix needs T >= 0, V > 0, n >= 0; got T=" +
                    std::to_string(num_frames) + " V=" +
                    std::to_string(vocab_size) + " n=" +
                    std::to_string(num_bias));
  }
  values_.assign(static_cast<std::size_t>(num_frames) * width(), 0.0);
}

std::vector<TokenId> tokenize_phrase(std::string_view text,
                                     const Vocabulary& vocab) {
  if (text.empty()) {
    throw Error(ErrorCode::kEmptyText, "cannot tokenize empty text");
  }
  const std::size_t n = text.size();
  std::size_t max_len = 0;
  for (const std::string& e : vocab.entries()) max_len = std::max(max_len, e.size());

  // Longest-match-first with backtracking: at each position try the longest
  // vocabulary prefix, stepping down on dead ends. Deterministic, and finds
  // a cover whenever one exists.
  struct Frame {
    std::size_t pos;
    std::size_t len;  // length currently being tried at pos
  };
  std::vector<Frame> stack;
  std::vector<TokenId> out;
  std::size_t pos = 0;
  std::size_t try_len = std::min(max_len, n);
  while (true) {
    bool advanced = false;
    for (std::size_t len = try_len; len >= 1; --len) {
      if (pos + len > n) continue;
      TokenId id = vocab.find(text.substr(pos, len));
      if (id > kBlankId) {
        stack.push_back({pos, len});
        out.push_back(id);
        pos += len;
        try_len = std::min(max_len, n - pos);
        advanced = true;
        break;
      }
    }
    if (pos == n) return out;
    if (!advanced) {
      // Dead end: back up and retry the previous choice one shorter.
      while (!stack.empty() && stack.back().len == 1) {
        stack.pop_back();
        out.pop_back();
      }
      if (stack.empty()) {
        throw Error(ErrorCode::kUncoverableText,
                    "no subword segmentation covers '" + std::string(text) +
                        "'");
      }
      pos = stack.back().pos;
      try_len = stack.back().len - 1;
      stack.pop_back();
      out.pop_back();
    }
  }
}

std::vector<TokenId> tokenize_words(const std::vector<std::string>& words,
                                    const Vocabulary& vocab) {
  const std::string sep(1, kWordSep);
  TokenId sep_id = vocab.find(sep);
  std::vector<TokenId> tokens;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) {
      if (sep_id <= kBlankId) {
        throw Error(ErrorCode::kUncoverableText,
                    "vocabulary has no word separator '" + sep +
                        "' for multi-word text");
      }
      tokens.push_back(sep_id);
    }
    std::vector<TokenId> piece = tokenize_phrase(words[i], vocab);
    tokens.insert(tokens.end(), piece.begin(), piece.end());
  }
  return tokens;
}

Transcript make_transcript(std::string utterance_id,
                           std::vector<std::string> words,
                           const Vocabulary& vocab) {
  Transcript t;
  t.utterance_id = std::move(utterance_id);
  t.tokens = tokenize_words(words, vocab);
  t.words = std::move(words);
  return t;
}

BiasPhrase make_bias_phrase(const std::string& text, const Vocabulary& vocab) {
  BiasPhrase p;
  p.text = text;
  p.subwords = tokenize_words(split_words(text), vocab);
  if (p.subwords.empty()) {
    throw Error(ErrorCode::kEmptyText, "bias phrase '" + text + "' is empty");
  }
  return p;
}

ValidationReport validate_posteriors(const PosteriorMatrix& m) {
  constexpr double kRowSumTol = 1e-6;
  ValidationReport report;
  for (int t = 0; t < m.num_frames(); ++t) {
    double sum = 0.0;
    bool negative = false, above = false;
    double worst_neg = 0.0, worst_above = 1.0;
    for (double v : m.row(t)) {
      sum += v;
      if (v < 0.0) { negative = true; worst_neg = std::min(worst_neg, v); }
      if (v > 1.0) { above = true; worst_above = std::max(worst_above, v); }
    }
    if (negative) {
      report.issues.push_back({t, ValidationTag::kNegativeProb, worst_neg});
    }
    if (above) {
      report.issues.push_back({t, ValidationTag::kProbAboveOne, worst_above});
    }
    if (std::abs(sum - 1.0) > kRowSumTol) {
      report.issues.push_back({t, ValidationTag::kRowSum, sum});
    }
  }
  return report;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

}  // namespace dvbias
