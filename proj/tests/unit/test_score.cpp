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

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "dvbias/check.hpp"
#include "dvbias/score.hpp"
#include "dvbias/types.hpp"
#include "test_util.hpp"

using dvbias::ErrorCode;
using dvbias::score::AlignmentBreakdown;
using dvbias::score::EditOp;
using dvbias::score::TraceStep;
using dvbias::score::Unit;
using testutil::error_code_of;

using Words = std::vector<std::string>;
using Phrases = std::vector<std::vector<std::string>>;

TEST_SUITE("score") {

TEST_CASE("alignment prefers match, then substitution, then deletion") {
  const std::vector<TraceStep> trace =
      dvbias::score::align({"a", "b"}, {"a", "c"});
  REQUIRE(trace.size() == 2);
  CHECK(trace[0].op == EditOp::kMatch);
  CHECK(trace[0].ref_pos == 0);
  CHECK(trace[0].hyp_pos == 0);
  CHECK(trace[1].op == EditOp::kSub);
  CHECK(trace[1].ref_pos == 1);
  CHECK(trace[1].hyp_pos == 1);
}

TEST_CASE("insertions and deletions carry one-sided positions") {
  const std::vector<TraceStep> ins = dvbias::score::align({"a"}, {"a", "b"});
  REQUIRE(ins.size() == 2);
  CHECK(ins[1].op == EditOp::kIns);
  CHECK(ins[1].ref_pos == -1);
  CHECK(ins[1].hyp_pos == 1);

  const std::vector<TraceStep> del = dvbias::score::align({"a", "b"}, {"b"});
  REQUIRE(del.size() == 2);
  CHECK(del[0].op == EditOp::kDel);
  CHECK(del[0].ref_pos == 0);
  CHECK(del[0].hyp_pos == -1);
  CHECK(del[1].op == EditOp::kMatch);
}

TEST_CASE("empty sequences align to pure insertions or deletions") {
  const std::vector<TraceStep> ins = dvbias::score::align({}, {"a", "b"});
  CHECK(ins.size() == 2);
  CHECK(ins[0].op == EditOp::kIns);
  const std::vector<TraceStep> del = dvbias::score::align({"a"}, {});
  CHECK(del.size() == 1);
  CHECK(del[0].op == EditOp::kDel);
  CHECK(dvbias::score::align({}, {}).empty());
}

TEST_CASE("alignment error count matches brute force") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> len(0, 6);
  std::uniform_int_distribution<int> letter(0, 2);
  for (int i = 0; i < 50; ++i) {
    Words ref(len(rng)), hyp(len(rng));
    for (auto& w : ref) w = std::string(1, 'a' + letter(rng));
    for (auto& w : hyp) w = std::string(1, 'a' + letter(rng));
    int got = 0;
    for (const TraceStep& s : dvbias::score::align(ref, hyp)) {
      if (s.op != EditOp::kMatch) ++got;
    }
    CHECK(got == dvbias::check::brute_force_edit_distance(ref, hyp));
  }
}

TEST_CASE("breakdown splits errors by the reference unit's class") {
  const AlignmentBreakdown b = dvbias::score::wer_breakdown(
      {"x", "alexander"}, {"x", "alexandra"}, {"alexander"});
  CHECK(b.ref_biased == 1);
  CHECK(b.ref_unbiased == 1);
  CHECK(b.biased.subs == 1);
  CHECK(b.unbiased.total() == 0);
  CHECK(b.wer() == doctest::Approx(0.5));
  CHECK(b.bwer() == doctest::Approx(1.0));
  CHECK(b.uwer() == doctest::Approx(0.0));
}

TEST_CASE("insertions classify by the inserted hypothesis unit") {
  const AlignmentBreakdown biased = dvbias::score::wer_breakdown(
      {"x"}, {"x", "alexander"}, {"alexander"});
  CHECK(biased.biased.ins == 1);
  CHECK(biased.unbiased.total() == 0);
  // No biased reference units, but a biased error: the rate is infinite.
  CHECK(std::isinf(biased.bwer()));
  CHECK(biased.uwer() == doctest::Approx(0.0));

  const AlignmentBreakdown plain = dvbias::score::wer_breakdown(
      {"x"}, {"x", "y"}, {"alexander"});
  CHECK(plain.unbiased.ins == 1);
  CHECK(plain.biased.total() == 0);
  CHECK(plain.bwer() == 0.0);
}

TEST_CASE("deletions classify by the deleted reference unit") {
  const AlignmentBreakdown b = dvbias::score::wer_breakdown(
      {"alexander", "x"}, {"x"}, {"alexander"});
  CHECK(b.biased.dels == 1);
  CHECK(b.unbiased.total() == 0);
  CHECK(b.bwer() == doctest::Approx(1.0));
}

TEST_CASE("empty references are rejected at the utterance level") {
  CHECK(error_code_of([] {
          dvbias::score::wer_breakdown({}, {"a"}, {});
        }) == ErrorCode::kEmptyReference);
}

TEST_CASE("error-free empty classes rate zero, not nan") {
  const AlignmentBreakdown b =
      dvbias::score::wer_breakdown({"x"}, {"x"}, {"alexander"});
  CHECK(b.bwer() == 0.0);
  CHECK(b.uwer() == 0.0);
  CHECK(b.wer() == 0.0);
}

TEST_CASE("the biased rate ignores unbiased perturbations") {
  const std::set<std::string> bias{"alexander"};
  const AlignmentBreakdown clean = dvbias::score::wer_breakdown(
      {"p", "q", "alexander"}, {"p", "q", "alexander"}, bias);
  const AlignmentBreakdown noisy = dvbias::score::wer_breakdown(
      {"p", "q", "alexander"}, {"r", "s", "alexander"}, bias);
  CHECK(clean.bwer() == noisy.bwer());
  CHECK(clean.uwer() == 0.0);
  CHECK(noisy.uwer() == doctest::Approx(1.0));
}

TEST_CASE("corpus duplication leaves every rate unchanged") {
  const std::pair<Words, Words> pair{{"i", "like", "new", "york"},
                                     {"i", "liked", "new", "jersey"}};
  const Phrases phrases{{"new", "york"}};
  const AlignmentBreakdown once =
      dvbias::score::corpus_score({pair}, phrases, Unit::kWord);
  const AlignmentBreakdown twice =
      dvbias::score::corpus_score({pair, pair}, phrases, Unit::kWord);
  CHECK(once.wer() == twice.wer());
  CHECK(once.bwer() == twice.bwer());
  CHECK(once.uwer() == twice.uwer());
  CHECK(twice.total_errors() == 2 * once.total_errors());
  CHECK(twice.ref_len() == 2 * once.ref_len());
}

TEST_CASE("word unit classifies by phrase constituent words") {
  // "york" alone is still a bias word even without the full phrase.
  const AlignmentBreakdown b = dvbias::score::corpus_score(
      {{{"i", "like", "new", "york"}, {"i", "like", "new", "jersey"}}},
      {{"new", "york"}}, Unit::kWord);
  CHECK(b.ref_biased == 2);
  CHECK(b.ref_unbiased == 2);
  CHECK(b.biased.subs == 1);
  CHECK(b.unbiased.total() == 0);
  CHECK(b.bwer() == doctest::Approx(0.5));
  CHECK(b.uwer() == 0.0);
}

TEST_CASE("phrase marking is leftmost with longer phrases first") {
  const Words words{"new", "york", "city", "new", "york"};
  const Phrases phrases{{"new", "york"}, {"new", "york", "city"}};
  const std::vector<bool> marks =
      dvbias::score::mark_phrase_words(words, phrases);
  CHECK(marks == std::vector<bool>{true, true, true, true, true});

  const std::vector<bool> single =
      dvbias::score::mark_phrase_words({"a", "b", "a"}, {{"a", "b"}});
  CHECK(single == std::vector<bool>{true, true, false});
}

TEST_CASE("utf8 characters split at codepoint boundaries") {
  const std::vector<std::string> ascii = dvbias::score::utf8_chars("abc");
  CHECK(ascii == std::vector<std::string>{"a", "b", "c"});
  const std::vector<std::string> accented =
      dvbias::score::utf8_chars("h\xc3\xa9llo");
  REQUIRE(accented.size() == 5);
  CHECK(accented[1] == "\xc3\xa9");
  const std::vector<std::string> cjk =
      dvbias::score::utf8_chars("\xe6\x97\xa5\xe6\x9c\xac");
  CHECK(cjk.size() == 2);
}

TEST_CASE("char unit inherits bias flags from phrase occurrences") {
  const AlignmentBreakdown b = dvbias::score::corpus_score(
      {{{"ab"}, {"ac"}}}, {{"ab"}}, Unit::kChar);
  CHECK(b.ref_biased == 2);
  CHECK(b.ref_unbiased == 0);
  CHECK(b.biased.subs == 1);
  CHECK(b.wer() == doctest::Approx(0.5));
  CHECK(b.bwer() == doctest::Approx(0.5));
}

TEST_CASE("char unit insertions follow the hypothesis side") {
  const AlignmentBreakdown b = dvbias::score::corpus_score(
      {{{"x"}, {"x", "ab"}}}, {{"ab"}}, Unit::kChar);
  CHECK(b.biased.ins == 2);
  CHECK(b.unbiased.total() == 0);
  CHECK(std::isinf(b.bwer()));
}

TEST_CASE("char unit has no units for spaces") {
  const AlignmentBreakdown b = dvbias::score::corpus_score(
      {{{"ab", "cd"}, {"ab", "cd"}}}, {}, Unit::kChar);
  CHECK(b.ref_len() == 4);
  CHECK(b.total_errors() == 0);
}

TEST_CASE("corpus scoring tolerates empty references") {
  const AlignmentBreakdown b = dvbias::score::corpus_score(
      {{{}, {"a"}}, {{"b"}, {"b"}}}, {}, Unit::kWord);
  CHECK(b.ref_len() == 1);
  CHECK(b.unbiased.ins == 1);
}

TEST_CASE("unit names parse") {
  CHECK(dvbias::score::parse_unit("word") == Unit::kWord);
  CHECK(dvbias::score::parse_unit("char") == Unit::kChar);
  CHECK(error_code_of([] { dvbias::score::parse_unit("phoneme"); }) ==
        ErrorCode::kInvalidSpec);
}

}  // TEST_SUITE
