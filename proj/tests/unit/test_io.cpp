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
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "dvbias/io.hpp"
#include "dvbias/types.hpp"
#include "test_util.hpp"

using dvbias::ErrorCode;
using dvbias::PosteriorMatrix;
using dvbias::Vocabulary;
using testutil::error_code_of;
using testutil::error_message_of;
using testutil::ScratchDir;

namespace {

void write_raw(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void append_u32(std::string* bytes, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    bytes->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

void append_f32(std::string* bytes, float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  append_u32(bytes, u);
}

std::string posterior_bytes(int t_frames, int vocab, int bias,
                            const std::vector<float>& values) {
  std::string bytes = "DVP1";
  append_u32(&bytes, static_cast<std::uint32_t>(t_frames));
  append_u32(&bytes, static_cast<std::uint32_t>(vocab));
  append_u32(&bytes, static_cast<std::uint32_t>(bias));
  for (float v : values) append_f32(&bytes, v);
  return bytes;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("posterior files round-trip within float32 precision") {
  ScratchDir dir("dvp");
  PosteriorMatrix m(3, 4, 1);
  for (int t = 0; t < 3; ++t) {
    for (int c = 0; c < 5; ++c) {
      m.at(t, c) = (t * 5 + c + 1) / 40.0;
    }
  }
  const std::string path = dir.file("m.dvp");
  dvbias::io::write_posteriors(path, m);
  const PosteriorMatrix back = dvbias::io::read_posteriors(path);
  CHECK(back.num_frames() == 3);
  CHECK(back.vocab_size() == 4);
  CHECK(back.num_bias() == 1);
  for (int t = 0; t < 3; ++t) {
    for (int c = 0; c < 5; ++c) {
      CHECK(std::abs(back.at(t, c) - m.at(t, c)) <= 1e-7 * m.at(t, c));
    }
  }
}

TEST_CASE("hand-built posterior bytes parse row-major") {
  ScratchDir dir("dvp_raw");
  const std::string path = dir.file("m.dvp");
  write_raw(path, posterior_bytes(2, 2, 1, {0.1f, 0.2f, 0.7f,
                                            0.5f, 0.25f, 0.25f}));
  const PosteriorMatrix m = dvbias::io::read_posteriors(path);
  CHECK(m.at(0, 2) == doctest::Approx(0.7));
  CHECK(m.at(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("corrupt posterior containers are rejected with the path") {
  ScratchDir dir("dvp_bad");
  const std::string path = dir.file("bad.dvp");

  write_raw(path, "XXXX");
  CHECK(error_code_of([&] { dvbias::io::read_posteriors(path); }) ==
        ErrorCode::kBadFile);
  CHECK(error_message_of([&] { dvbias::io::read_posteriors(path); })
            .find(path) != std::string::npos);

  // Truncated payload: header promises 2x3 values, file carries 5.
  std::string truncated =
      posterior_bytes(2, 3, 0, {0.1f, 0.2f, 0.7f, 0.5f, 0.25f});
  write_raw(path, truncated);
  CHECK(error_code_of([&] { dvbias::io::read_posteriors(path); }) ==
        ErrorCode::kBadFile);

  // Trailing garbage after a complete payload.
  std::string trailing =
      posterior_bytes(1, 2, 0, {0.5f, 0.5f}) + std::string("zz");
  write_raw(path, trailing);
  CHECK(error_code_of([&] { dvbias::io::read_posteriors(path); }) ==
        ErrorCode::kBadFile);

  // A zero-width vocabulary can never be valid.
  write_raw(path, posterior_bytes(1, 0, 2, {0.5f, 0.5f}));
  CHECK(error_code_of([&] { dvbias::io::read_posteriors(path); }) ==
        ErrorCode::kBadFile);

  CHECK(error_code_of([&] {
          dvbias::io::read_posteriors(dir.file("missing.dvp"));
        }) == ErrorCode::kBadFile);
}

TEST_CASE("tsv rows round-trip and keep tabs inside payloads") {
  ScratchDir dir("tsv");
  const std::string path = dir.file("rows.tsv");
  const std::vector<std::pair<std::string, std::string>> rows{
      {"utt-0001", "hello there"},
      {"utt-0002", "wr\t1 2 3"},
      {"utt-0003", ""},
  };
  dvbias::io::write_tsv(path, rows);
  CHECK(dvbias::io::read_tsv(path) == rows);
}

TEST_CASE("tsv parse errors carry 1-based line numbers") {
  ScratchDir dir("tsv_bad");
  const std::string path = dir.file("rows.tsv");

  write_raw(path, "no tab here\n");
  CHECK(error_code_of([&] { dvbias::io::read_tsv(path); }) ==
        ErrorCode::kBadFile);
  CHECK(error_message_of([&] { dvbias::io::read_tsv(path); }).find("line 1") !=
        std::string::npos);

  write_raw(path, "a\tx\na\ty\n");
  CHECK(error_message_of([&] { dvbias::io::read_tsv(path); }).find("line 2") !=
        std::string::npos);

  write_raw(path, "\tpayload\n");  // empty id
  CHECK(error_code_of([&] { dvbias::io::read_tsv(path); }) ==
        ErrorCode::kBadFile);
}

TEST_CASE("tsv skips blank lines and strips carriage returns") {
  ScratchDir dir("tsv_crlf");
  const std::string path = dir.file("rows.tsv");
  write_raw(path, "a\tx\r\n\nb\ty\n");
  const auto rows = dvbias::io::read_tsv(path);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::pair<std::string, std::string>{"a", "x"});
  CHECK(rows[1] == std::pair<std::string, std::string>{"b", "y"});
}

TEST_CASE("vocabulary files round-trip") {
  ScratchDir dir("vocab");
  const std::string path = dir.file("vocab.txt");
  const Vocabulary v =
      Vocabulary::from_entries({"", "_", "a", "ab", "ander"});
  dvbias::io::write_vocabulary(path, v);
  const Vocabulary back = dvbias::io::read_vocabulary(path);
  CHECK(back.entries() == v.entries());
}

TEST_CASE("vocabulary files must start with the blank line") {
  ScratchDir dir("vocab_bad");
  const std::string path = dir.file("vocab.txt");
  write_raw(path, "a\nb\n");
  CHECK(error_code_of([&] { dvbias::io::read_vocabulary(path); }) ==
        ErrorCode::kBadFile);
  write_raw(path, "\na\na\n");  // duplicate entry
  CHECK(error_code_of([&] { dvbias::io::read_vocabulary(path); }) ==
        ErrorCode::kBadFile);
  write_raw(path, "");
  CHECK(error_code_of([&] { dvbias::io::read_vocabulary(path); }) ==
        ErrorCode::kBadFile);
}

TEST_CASE("bias lists round-trip and the empty file is an empty list") {
  ScratchDir dir("bias");
  const std::string path = dir.file("bias.txt");
  const std::vector<std::string> texts{"new york", "alexander"};
  dvbias::io::write_bias_texts(path, texts);
  CHECK(dvbias::io::read_bias_texts(path) == texts);

  write_raw(path, "");
  CHECK(dvbias::io::read_bias_texts(path).empty());
}

TEST_CASE("bias list files reject blank lines and edge whitespace") {
  ScratchDir dir("bias_bad");
  const std::string path = dir.file("bias.txt");
  write_raw(path, "ok\n\nalso ok\n");
  CHECK(error_message_of([&] { dvbias::io::read_bias_texts(path); })
            .find("line 2") != std::string::npos);
  write_raw(path, "trailing \n");
  CHECK(error_code_of([&] { dvbias::io::read_bias_texts(path); }) ==
        ErrorCode::kBadFile);
  write_raw(path, " leading\n");
  CHECK(error_code_of([&] { dvbias::io::read_bias_texts(path); }) ==
        ErrorCode::kBadFile);
}

TEST_CASE("config files parse trimmed keys, comments and overrides") {
  ScratchDir dir("config");
  const std::string path = dir.file("run.conf");
  write_raw(path,
            "# pipeline settings\n"
            "\n"
            "threshold = 0.5\n"
            "mode= ta\n"
            "  threshold =0.75\n"
            "out=work/out\n");
  const std::map<std::string, std::string> config =
      dvbias::io::read_config(path);
  CHECK(config.size() == 3);
  CHECK(config.at("threshold") == "0.75");  // last value wins
  CHECK(config.at("mode") == "ta");
  CHECK(config.at("out") == "work/out");
}

TEST_CASE("config parse errors carry 1-based line numbers") {
  ScratchDir dir("config_bad");
  const std::string path = dir.file("run.conf");
  write_raw(path, "mode = ta\nnovalue\n");
  CHECK(error_code_of([&] { dvbias::io::read_config(path); }) ==
        ErrorCode::kBadFile);
  CHECK(error_message_of([&] { dvbias::io::read_config(path); })
            .find("line 2") != std::string::npos);
  write_raw(path, "=x\n");
  CHECK(error_code_of([&] { dvbias::io::read_config(path); }) ==
        ErrorCode::kBadFile);
}

}  // TEST_SUITE
