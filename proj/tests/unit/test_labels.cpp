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

#include <random>
#include <vector>

#include "doctest.h"
#include "dvbias/labels.hpp"
#include "dvbias/types.hpp"
#include "test_util.hpp"

using dvbias::BiasList;
using dvbias::BiasPhrase;
using dvbias::TokenId;
using dvbias::labels::PhraseOccurrence;
using dvbias::labels::Strategy;
using dvbias::labels::TargetSequence;

namespace {

// Five base ids: blank 0, separator 1, a=2, b=3, c=4. Dynamic ids start
// at 5.
constexpr int kBase = 5;

BiasList list_of(std::vector<std::vector<TokenId>> phrases) {
  std::vector<BiasPhrase> out;
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    out.push_back({"p" + std::to_string(i), std::move(phrases[i])});
  }
  return BiasList(std::move(out), kBase);
}

bool same(const PhraseOccurrence& got, int phrase, int begin, int end) {
  return got.phrase == phrase && got.begin == begin && got.end == end;
}

}  // namespace

TEST_SUITE("labels") {

TEST_CASE("matches consume tokens so occurrences never overlap") {
  // [a b] beats [b] at position 0; the leftover final b still matches.
  const BiasList bias = list_of({{2, 3}, {3}});
  const std::vector<TokenId> tokens{2, 3, 3};
  const auto occ = dvbias::labels::find_phrase_occurrences(tokens, bias);
  REQUIRE(occ.size() == 2);
  CHECK(same(occ[0], 0, 0, 2));
  CHECK(same(occ[1], 1, 2, 3));
}

TEST_CASE("longest phrase wins and equal lengths pick the lowest index") {
  const BiasList longer_later = list_of({{2}, {2, 3}});
  const std::vector<TokenId> tokens{2, 3};
  const auto occ =
      dvbias::labels::find_phrase_occurrences(tokens, longer_later);
  REQUIRE(occ.size() == 1);
  CHECK(same(occ[0], 1, 0, 2));

  const BiasList twins = list_of({{2}, {2}});
  const auto tie = dvbias::labels::find_phrase_occurrences(tokens, twins);
  REQUIRE(tie.size() == 1);
  CHECK(tie[0].phrase == 0);
}

TEST_CASE("repeated occurrences of one phrase are all found") {
  const BiasList bias = list_of({{2, 3}});
  const std::vector<TokenId> tokens{2, 3, 4, 2, 3};
  const auto occ = dvbias::labels::find_phrase_occurrences(tokens, bias);
  REQUIRE(occ.size() == 2);
  CHECK(same(occ[0], 0, 0, 2));
  CHECK(same(occ[1], 0, 3, 5));
}

TEST_CASE("self-overlapping patterns match greedily from the left") {
  const BiasList bias = list_of({{2, 2}});
  const std::vector<TokenId> tokens{2, 2, 2};
  const auto occ = dvbias::labels::find_phrase_occurrences(tokens, bias);
  REQUIRE(occ.size() == 1);
  CHECK(same(occ[0], 0, 0, 2));
}

TEST_CASE("no bias phrases means no occurrences") {
  const std::vector<TokenId> tokens{2, 3, 4};
  CHECK(dvbias::labels::find_phrase_occurrences(tokens, BiasList{}).empty());
}

TEST_CASE("replacement target swaps each matched subword in place") {
  const BiasList bias = list_of({{3, 4}});
  const std::vector<TokenId> tokens{2, 3, 4};
  const TargetSequence t = dvbias::labels::build_wr_target(tokens, bias);
  CHECK(t.strategy == Strategy::kWr);
  CHECK(t.tokens == std::vector<TokenId>{2, 5, 5});
  REQUIRE(t.spans.size() == 1);
  CHECK(same(t.spans[0], 0, 1, 3));
}

TEST_CASE("replacement preserves length for every input") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<TokenId> tok(2, 4);
  std::uniform_int_distribution<int> len(0, 12);
  const BiasList bias = list_of({{2, 3}, {4}});
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<TokenId> tokens(len(rng));
    for (TokenId& t : tokens) t = tok(rng);
    const TargetSequence target = dvbias::labels::build_wr_target(tokens, bias);
    CHECK(target.tokens.size() == tokens.size());
    // Positions outside spans are untouched.
    std::vector<bool> in_span(tokens.size(), false);
    for (const PhraseOccurrence& occ : target.spans) {
      for (int p = occ.begin; p < occ.end; ++p) in_span[p] = true;
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (!in_span[i]) CHECK(target.tokens[i] == tokens[i]);
    }
  }
}

TEST_CASE("augmentation target appends the phrase token after the match") {
  const BiasList bias = list_of({{3, 4}});
  const std::vector<TokenId> tokens{2, 3, 4, 2};
  const TargetSequence t = dvbias::labels::build_ta_target(tokens, bias);
  CHECK(t.strategy == Strategy::kTa);
  CHECK(t.tokens == std::vector<TokenId>{2, 3, 4, 5, 2});
  REQUIRE(t.spans.size() == 1);
  // The span covers the subwords plus the appended phrase token.
  CHECK(same(t.spans[0], 0, 1, 4));
}

TEST_CASE("deleting phrase tokens from the augmented target round-trips") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<TokenId> tok(2, 4);
  std::uniform_int_distribution<int> len(0, 12);
  const BiasList bias = list_of({{2, 3}, {4, 4}, {3}});
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<TokenId> tokens(len(rng));
    for (TokenId& t : tokens) t = tok(rng);
    const TargetSequence target = dvbias::labels::build_ta_target(tokens, bias);
    std::vector<TokenId> stripped;
    for (TokenId id : target.tokens) {
      if (!bias.is_dynamic(id)) stripped.push_back(id);
    }
    CHECK(stripped == tokens);
    // Every span ends on its phrase token and covers its subwords.
    for (const PhraseOccurrence& occ : target.spans) {
      CHECK(target.tokens[occ.end - 1] == bias.dynamic_id(occ.phrase));
      const auto& sub = bias.phrase(occ.phrase).subwords;
      for (std::size_t i = 0; i < sub.size(); ++i) {
        CHECK(target.tokens[occ.begin + i] == sub[i]);
      }
    }
  }
}

TEST_CASE("adjacent occurrences each get their own phrase token") {
  const BiasList bias = list_of({{2, 3}});
  const std::vector<TokenId> tokens{2, 3, 2, 3};
  const TargetSequence t = dvbias::labels::build_ta_target(tokens, bias);
  CHECK(t.tokens == std::vector<TokenId>{2, 3, 5, 2, 3, 5});
  REQUIRE(t.spans.size() == 2);
  CHECK(same(t.spans[0], 0, 0, 3));
  CHECK(same(t.spans[1], 0, 3, 6));
}

TEST_CASE("collapse merges duplicates before dropping blanks") {
  const std::vector<TokenId> frames{0, 2, 2, 0, 2, 3, 3, 0, 0};
  CHECK(dvbias::labels::ctc_collapse(frames) ==
        std::vector<TokenId>{2, 2, 3});
  CHECK(dvbias::labels::ctc_collapse(std::vector<TokenId>{}).empty());
  CHECK(dvbias::labels::ctc_collapse(std::vector<TokenId>{0, 0}).empty());
}

TEST_CASE("collapse output never contains blanks") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<TokenId> tok(0, 4);
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<TokenId> frames(20);
    for (TokenId& t : frames) t = tok(rng);
    for (TokenId id : dvbias::labels::ctc_collapse(frames)) {
      CHECK(id != dvbias::kBlankId);
    }
  }
}

TEST_CASE("merge_consecutive_bias touches only dynamic runs") {
  const std::vector<TokenId> tokens{2, 5, 5, 3, 3, 5, 6, 6};
  CHECK(dvbias::labels::merge_consecutive_bias(tokens, kBase) ==
        std::vector<TokenId>{2, 5, 3, 3, 5, 6});
}

}  // TEST_SUITE
