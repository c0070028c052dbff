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

#ifndef DVBIAS_TYPES_HPP_
#define DVBIAS_TYPES_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dvbias {

using TokenId = std::int32_t;

// The CTC blank is always token 0 and renders as the empty string.
inline constexpr TokenId kBlankId = 0;

// Word boundary marker used by the bundled vocabularies: rendering maps it
// to a space, and multi-word text maps spaces to it before tokenization.
inline constexpr char kWordSep = '_';

enum class ErrorCode {
  kEmptyText,
  kUncoverableText,
  kShapeMismatch,
  kInfeasibleTarget,
  kEmptyReference,
  kInvalidSpec,
  kBadFile,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Subword inventory shared by tokenization, decoding and rendering.
// Entry 0 is the blank; all other entries are unique, non-empty and contain
// no whitespace. Immutable after construction.
class Vocabulary {
 public:
  // `entries[0]` must be the empty string (the blank).
  static Vocabulary from_entries(std::vector<std::string> entries);

  int size() const { return static_cast<int>(entries_.size()); }  // V
  const std::string& entry(TokenId id) const { return entries_.at(id); }
  bool contains_id(TokenId id) const { return id >= 0 && id < size(); }

  // Returns the id of `subword`, or -1 when absent.
  TokenId find(std::string_view subword) const;

  // Concatenates subword strings, mapping the word separator to a space.
  // Blank and dynamic (out-of-vocabulary) ids contribute nothing.
  std::string render(std::span<const TokenId> tokens) const;

  const std::vector<std::string>& entries() const { return entries_; }

 private:
  Vocabulary() = default;
  std::vector<std::string> entries_;
  std::unordered_map<std::string, TokenId> index_;
};

// One contextual phrase: surface text plus its subword segmentation.
// `subwords` is non-empty and never contains the blank.
struct BiasPhrase {
  std::string text;
  std::vector<TokenId> subwords;

  int length() const { return static_cast<int>(subwords.size()); }  // k_i
};

// Ordered list of contextual phrases. Phrase i owns the dynamic output id
// V + i, extending the base vocabulary to V + n labels. Empty lists are
// valid; duplicate phrases are permitted but reported by duplicates().
class BiasList {
 public:
  BiasList() = default;
  BiasList(std::vector<BiasPhrase> phrases, int base_vocab_size);

  // Tokenizes each surface phrase against `vocab` (spaces map to the word
  // separator) and builds the list.
  static BiasList from_texts(const std::vector<std::string>& texts,
                             const Vocabulary& vocab);

  int size() const { return static_cast<int>(phrases_.size()); }  // n
  bool empty() const { return phrases_.empty(); }
  const BiasPhrase& phrase(int i) const { return phrases_.at(i); }
  const std::vector<BiasPhrase>& phrases() const { return phrases_; }

  int base_vocab_size() const { return base_vocab_size_; }
  TokenId dynamic_id(int i) const { return base_vocab_size_ + i; }
  bool is_dynamic(TokenId id) const {
    return id >= base_vocab_size_ && id < base_vocab_size_ + size();
  }
  int phrase_index(TokenId dynamic) const { return dynamic - base_vocab_size_; }

  // Indices of phrases whose subword sequence already appeared earlier in
  // the list. Duplicates keep their own dynamic id.
  std::vector<int> duplicates() const;

 private:
  std::vector<BiasPhrase> phrases_;
  int base_vocab_size_ = 0;
};

// T x (V + n) per-frame probability distribution over the dynamic
// vocabulary. Row-major, 64-bit. Every consumer expects rows that sum to 1
// within 1e-6; validate_posteriors() reports violations.
class PosteriorMatrix {
 public:
  PosteriorMatrix(int num_frames, int vocab_size, int num_bias);

  int num_frames() const { return num_frames_; }  // T
  int vocab_size() const { return vocab_size_; }  // V
  int num_bias() const { return num_bias_; }      // n
  int width() const { return vocab_size_ + num_bias_; }

  double& at(int frame, TokenId id) { return values_[index(frame, id)]; }
  double at(int frame, TokenId id) const { return values_[index(frame, id)]; }

  std::span<double> row(int frame) {
    return {values_.data() + static_cast<std::size_t>(frame) * width(),
            static_cast<std::size_t>(width())};
  }
  std::span<const double> row(int frame) const {
    return {values_.data() + static_cast<std::size_t>(frame) * width(),
            static_cast<std::size_t>(width())};
  }

  bool is_bias(TokenId id) const { return id >= vocab_size_; }
  int bias_index(TokenId id) const { return id - vocab_size_; }

  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t index(int frame, TokenId id) const {
    return static_cast<std::size_t>(frame) * width() + id;
  }

  int num_frames_;
  int vocab_size_;
  int num_bias_;
  std::vector<double> values_;
};

// Reference transcription of one utterance. `tokens` is the subword
// rendering of `words` (separator tokens between words); it contains no
// blank and no dynamic ids.
struct Transcript {
  std::string utterance_id;
  std::vector<std::string> words;
  std::vector<TokenId> tokens;
};

// Segments `text` into subword ids by longest-match-first scanning from the
// left, backtracking when a greedy choice dead-ends. Fails with
// UNCOVERABLE_TEXT only when no segmentation exists, and EMPTY_TEXT on
// empty input. The concatenated subword strings reproduce `text` exactly.
std::vector<TokenId> tokenize_phrase(std::string_view text,
                                     const Vocabulary& vocab);

// Tokenizes a word sequence with separator tokens between words. Requires
// the vocabulary to contain the word separator when `words` has more than
// one element.
std::vector<TokenId> tokenize_words(const std::vector<std::string>& words,
                                    const Vocabulary& vocab);

Transcript make_transcript(std::string utterance_id,
                           std::vector<std::string> words,
                           const Vocabulary& vocab);

// Builds a phrase from surface text; spaces become word separator tokens.
BiasPhrase make_bias_phrase(const std::string& text, const Vocabulary& vocab);

enum class ValidationTag { kRowSum, kNegativeProb, kProbAboveOne };

const char* validation_tag_name(ValidationTag tag);

struct ValidationIssue {
  int row;
  ValidationTag tag;
  double value;  // offending sum or entry
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

// Report-only check: flags rows whose sum deviates from 1 by more than
// 1e-6 and rows containing entries outside [0, 1].
ValidationReport validate_posteriors(const PosteriorMatrix& m);

// Whitespace split, skipping empty fields.
std::vector<std::string> split_words(std::string_view text);

}  // namespace dvbias

#endif  // DVBIAS_TYPES_HPP_
