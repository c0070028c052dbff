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

#include "dvbias/fixture.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>

#include "dvbias/io.hpp"

namespace dvbias::fixture {

namespace {

constexpr int kLexiconSize = 60;
constexpr const char* kConsonants = "bcdfghjklmnpqrstvwxz";  // 20
constexpr const char* kVowels = "aeiou";                     // 5

// First non-letter, non-separator vocabulary index (blank, "_", a-z).
constexpr TokenId kFirstSyllable = 28;

std::string utterance_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "utt-%04d", index);
  return buf;
}

// Deterministic confusable for corruption: the next syllable id, wrapping
// within the syllable block; dynamic ids fall back to the caller's choice.
TokenId confusable_of(TokenId id, int vocab_size) {
  const int syllables = vocab_size - kFirstSyllable;
  if (id < kFirstSyllable) {
    // Letters and the separator rotate within a-z.
    const TokenId first_letter = 2;
    return first_letter + (id - first_letter + 1) % 26;
  }
  return kFirstSyllable + (id - kFirstSyllable + 1) % syllables;
}

struct Run {
  TokenId token;
  bool corruptible;  // lies inside a contextual-phrase span
};

}  // namespace

Vocabulary build_vocabulary(int vocab_size) {
  if (vocab_size < 32 || vocab_size > 128) {
    throw Error(ErrorCode::kInvalidSpec,
                "vocab_size must be in [32, 128], got " +
                    std::to_string(vocab_size));
  }
  std::vector<std::string> entries;
  entries.emplace_back("");
  entries.emplace_back(1, kWordSep);
  for (char c = 'a'; c <= 'z'; ++c) entries.emplace_back(1, c);
  for (const char* c = kConsonants; *c && static_cast<int>(entries.size()) <
                                              vocab_size; ++c) {
    for (const char* v = kVowels; *v && static_cast<int>(entries.size()) <
                                            vocab_size; ++v) {
      entries.push_back(std::string(1, *c) + *v);
    }
  }
  return Vocabulary::from_entries(std::move(entries));
}

void validate_spec(const FixtureSpec& spec) {
  auto fail = [](const std::string& why) {
    throw Error(ErrorCode::kInvalidSpec, why);
  };
  if (spec.vocab_size < 32 || spec.vocab_size > 128) {
    fail("vocab_size must be in [32, 128]");
  }
  if (spec.num_utterances < 1) fail("num_utterances must be >= 1");
  if (spec.frames_per_token.min < 1 ||
      spec.frames_per_token.max < spec.frames_per_token.min ||
      spec.frames_per_token.max > 8) {
    fail("frames_per_token must satisfy 1 <= min <= max <= 8");
  }
  if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) fail("alpha must be in (0, 1]");
  if (spec.rho < 0.0 || spec.rho > 1.0) fail("rho must be in [0, 1]");
  if (spec.bias_prob < 0.0 || spec.bias_prob > 1.0) {
    fail("bias_prob must be in [0, 1]");
  }
  if (spec.bias_min < 1 || spec.bias_max < spec.bias_min) {
    fail("bias_min/bias_max must satisfy 1 <= min <= max");
  }
  if (spec.distractors < 0) fail("distractors must be >= 0");
  if (spec.spurious_rate < 0.0 || spec.spurious_rate > 1.0) {
    fail("spurious_rate must be in [0, 1]");
  }
}

Fixture gen_fixture(const FixtureSpec& spec) {
  validate_spec(spec);
  Fixture fixture{build_vocabulary(spec.vocab_size), {}, {}};
  std::mt19937_64 rng(spec.seed);

  // Lexicon: distinct words of 2-4 syllables over the available block.
  const int syllables = spec.vocab_size - kFirstSyllable;
  std::uniform_int_distribution<int> syl_dist(0, syllables - 1);
  std::uniform_int_distribution<int> word_len(2, 4);
  std::set<std::string> seen;
  std::vector<std::string> lexicon;
  while (static_cast<int>(lexicon.size()) < kLexiconSize) {
    std::string word;
    const int len = word_len(rng);
    for (int s = 0; s < len; ++s) {
      word += fixture.vocab.entry(kFirstSyllable + syl_dist(rng));
    }
    if (seen.insert(word).second) lexicon.push_back(std::move(word));
  }

  std::uniform_int_distribution<int> words_per_utt(3, 10);
  std::uniform_int_distribution<int> lex_dist(0, kLexiconSize - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> run_len(spec.frames_per_token.min,
                                             spec.frames_per_token.max);
  std::uniform_int_distribution<int> gap_len(1, 2);
  std::uniform_int_distribution<int> edge_len(0, 2);

  std::set<std::string> union_set;

  for (int u = 0; u < spec.num_utterances; ++u) {
    Utterance utt{Transcript{}, {}, PosteriorMatrix(0, spec.vocab_size, 0)};

    std::vector<std::string> words(words_per_utt(rng));
    for (std::string& w : words) w = lexicon[lex_dist(rng)];
    utt.transcript = make_transcript(utterance_id(u), words, fixture.vocab);

    // Real phrases: distinct utterance words, sampled without replacement.
    std::vector<std::string> distinct(words);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    if (unit(rng) < spec.bias_prob) {
      std::uniform_int_distribution<int> count_dist(spec.bias_min,
                                                    spec.bias_max);
      int count = std::min(count_dist(rng),
                           static_cast<int>(distinct.size()));
      std::shuffle(distinct.begin(), distinct.end(), rng);
      utt.bias_texts.assign(distinct.begin(), distinct.begin() + count);
    }
    const int real_count = static_cast<int>(utt.bias_texts.size());

    // Distractors: lexicon words absent from this utterance.
    for (int d = 0; d < spec.distractors; ++d) {
      std::string candidate;
      do {
        candidate = lexicon[lex_dist(rng)];
      } while (std::find(words.begin(), words.end(), candidate) !=
                   words.end() ||
               std::find(utt.bias_texts.begin(), utt.bias_texts.end(),
                         candidate) != utt.bias_texts.end());
      utt.bias_texts.push_back(std::move(candidate));
    }
    union_set.insert(utt.bias_texts.begin(), utt.bias_texts.end());

    BiasList bias = BiasList::from_texts(utt.bias_texts, fixture.vocab);
    const int width_bias = bias.size();

    // Ground-truth frame labeling per the requested strategy.
    labels::TargetSequence target;
    switch (spec.mode) {
      case labels::Strategy::kNone:
        target.tokens = utt.transcript.tokens;
        target.strategy = labels::Strategy::kNone;
        target.spans =
            labels::find_phrase_occurrences(utt.transcript.tokens, bias);
        break;
      case labels::Strategy::kWr:
        target = labels::build_wr_target(utt.transcript.tokens, bias);
        break;
      case labels::Strategy::kTa:
        target = labels::build_ta_target(utt.transcript.tokens, bias);
        break;
    }

    std::vector<Run> runs;
    runs.reserve(target.tokens.size() + spec.distractors);
    {
      std::vector<bool> in_span(target.tokens.size(), false);
      for (const labels::PhraseOccurrence& occ : target.spans) {
        for (int p = occ.begin; p < occ.end; ++p) in_span[p] = true;
      }
      for (std::size_t p = 0; p < target.tokens.size(); ++p) {
        const TokenId id = target.tokens[p];
        // Corruption touches phrase subwords; a TA bias token stays clean
        // so activation is exercised, while WR spans (all bias tokens)
        // corrupt the bias token itself.
        const bool corruptible =
            in_span[p] &&
            (!bias.is_dynamic(id) || spec.mode == labels::Strategy::kWr);
        runs.push_back({id, corruptible});
      }
    }

    // Spurious bias-token peaks for distractor phrases.
    for (int d = 0; d < spec.distractors; ++d) {
      if (unit(rng) < spec.spurious_rate) {
        std::uniform_int_distribution<int> pos_dist(
            0, static_cast<int>(runs.size()));
        runs.insert(runs.begin() + pos_dist(rng),
                    {bias.dynamic_id(real_count + d), false});
      }
    }

    // Frame layout: leading/trailing gaps of 0-2 blanks, 1-2 blanks
    // between runs, 2-4 frames per token run.
    struct Slot {
      TokenId token;
      int frames;
      bool corruptible;
    };
    std::vector<Slot> slots;
    slots.push_back({kBlankId, edge_len(rng), false});
    for (std::size_t r = 0; r < runs.size(); ++r) {
      slots.push_back({runs[r].token, run_len(rng), runs[r].corruptible});
      slots.push_back({kBlankId,
                       r + 1 == runs.size() ? edge_len(rng) : gap_len(rng),
                       false});
    }

    int total_frames = 0;
    for (const Slot& s : slots) total_frames += s.frames;
    PosteriorMatrix m(total_frames, spec.vocab_size, width_bias);
    const int width = m.width();

    int frame = 0;
    for (const Slot& slot : slots) {
      const bool corrupt =
          slot.corruptible && spec.rho > 0.0 && unit(rng) < spec.rho;
      TokenId confusable = -1;
      if (corrupt) {
        confusable = bias.is_dynamic(slot.token)
                         ? bias.phrase(bias.phrase_index(slot.token))
                               .subwords.front()
                         : confusable_of(slot.token, spec.vocab_size);
      }
      for (int f = 0; f < slot.frames; ++f, ++frame) {
        auto row = m.row(frame);
        if (corrupt) {
          const double rest = (1.0 - spec.alpha) / (width - 2);
          for (int c = 0; c < width; ++c) row[c] = rest;
          row[slot.token] = 0.48 * spec.alpha;
          row[confusable] = 0.52 * spec.alpha;
        } else {
          const double rest = (1.0 - spec.alpha) / (width - 1);
          for (int c = 0; c < width; ++c) row[c] = rest;
          row[slot.token] = spec.alpha;
        }
      }
    }
    utt.posteriors = std::move(m);
    fixture.utterances.push_back(std::move(utt));
  }

  fixture.bias_union.assign(union_set.begin(), union_set.end());
  return fixture;
}

void write_fixture(const std::string& dir, const Fixture& fixture) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "bias");
  fs::create_directories(fs::path(dir) / "post");

  io::write_vocabulary((fs::path(dir) / "vocab.txt").string(), fixture.vocab);
  io::write_bias_texts((fs::path(dir) / "bias_union.txt").string(),
                       fixture.bias_union);

  std::vector<std::pair<std::string, std::string>> refs;
  for (const Utterance& utt : fixture.utterances) {
    std::string text;
    for (std::size_t w = 0; w < utt.transcript.words.size(); ++w) {
      if (w > 0) text += ' ';
      text += utt.transcript.words[w];
    }
    refs.emplace_back(utt.transcript.utterance_id, std::move(text));
    io::write_bias_texts((fs::path(dir) / "bias" /
                          (utt.transcript.utterance_id + ".txt"))
                             .string(),
                         utt.bias_texts);
    io::write_posteriors((fs::path(dir) / "post" /
                          (utt.transcript.utterance_id + ".dvp"))
                             .string(),
                         utt.posteriors);
  }
  io::write_tsv((fs::path(dir) / "refs.tsv").string(), refs);
}

}  // namespace dvbias::fixture
