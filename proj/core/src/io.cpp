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

#include "dvbias/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace dvbias::io {

namespace {

constexpr char kMagic[4] = {'D', 'V', 'P', '1'};

[[noreturn]] void bad_file(const std::string& path, const std::string& why) {
  throw Error(ErrorCode::kBadFile, path + ": " + why);
}

std::uint32_t read_u32(std::istream& in, const std::string& path,
                       const char* what) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    bad_file(path, std::string("truncated while reading ") + what);
  }
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void write_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char bytes[4] = {
      static_cast<unsigned char>(v & 0xFF),
      static_cast<unsigned char>((v >> 8) & 0xFF),
      static_cast<unsigned char>((v >> 16) & 0xFF),
      static_cast<unsigned char>((v >> 24) & 0xFF)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

float read_f32(std::istream& in, const std::string& path) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    bad_file(path, "truncated inside the value block");
  }
  const std::uint32_t u = static_cast<std::uint32_t>(bytes[0]) |
                          (static_cast<std::uint32_t>(bytes[1]) << 8) |
                          (static_cast<std::uint32_t>(bytes[2]) << 16) |
                          (static_cast<std::uint32_t>(bytes[3]) << 24);
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

void write_f32(std::ostream& out, float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  write_u32(out, u);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad_file(path, "cannot open for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

PosteriorMatrix read_posteriors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad_file(path, "cannot open for reading");
  char magic[4];
  if (!in.read(magic, 4)) bad_file(path, "truncated before magic");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    bad_file(path, "bad magic (expected DVP1)");
  }
  const std::uint32_t t = read_u32(in, path, "frame count");
  const std::uint32_t v = read_u32(in, path, "vocabulary size");
  const std::uint32_t n = read_u32(in, path, "bias count");
  constexpr std::uint32_t kMaxDim = 1u << 24;
  if (v == 0 || t > kMaxDim || v > kMaxDim || n > kMaxDim) {
    bad_file(path, "implausible header dimensions T=" + std::to_string(t) +
                       " V=" + std::to_string(v) + " n=" + std::to_string(n));
  }
  PosteriorMatrix m(static_cast<int>(t), static_cast<int>(v),
                    static_cast<int>(n));
  for (int frame = 0; frame < m.num_frames(); ++frame) {
    for (int c = 0; c < m.width(); ++c) {
      m.at(frame, c) = static_cast<double>(read_f32(in, path));
    }
  }
  char extra;
  if (in.read(&extra, 1)) bad_file(path, "trailing bytes after value block");
  return m;
}

void write_posteriors(const std::string& path, const PosteriorMatrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) bad_file(path, "cannot open for writing");
  out.write(kMagic, 4);
  write_u32(out, static_cast<std::uint32_t>(m.num_frames()));
  write_u32(out, static_cast<std::uint32_t>(m.vocab_size()));
  write_u32(out, static_cast<std::uint32_t>(m.num_bias()));
  for (int frame = 0; frame < m.num_frames(); ++frame) {
    for (int c = 0; c < m.width(); ++c) {
      write_f32(out, static_cast<float>(m.at(frame, c)));
    }
  }
  if (!out) bad_file(path, "write failed");
}

std::vector<std::pair<std::string, std::string>> read_tsv(
    const std::string& path) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::set<std::string> seen;
  const std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      bad_file(path, "line " + std::to_string(i + 1) +
                         ": expected `id<TAB>payload`");
    }
    std::string id = line.substr(0, tab);
    if (!seen.insert(id).second) {
      bad_file(path,
               "line " + std::to_string(i + 1) + ": duplicate id '" + id +
                   "'");
    }
    rows.emplace_back(std::move(id), line.substr(tab + 1));
  }
  return rows;
}

void write_tsv(const std::string& path,
               const std::vector<std::pair<std::string, std::string>>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) bad_file(path, "cannot open for writing");
  for (const auto& [id, payload] : rows) {
    out << id << '\t' << payload << '\n';
  }
  if (!out) bad_file(path, "write failed");
}

Vocabulary read_vocabulary(const std::string& path) {
  std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) bad_file(path, "empty vocabulary file");
  if (!lines[0].empty()) {
    bad_file(path, "line 1 must be the empty blank line");
  }
  try {
    return Vocabulary::from_entries(std::move(lines));
  } catch (const Error& e) {
    bad_file(path, e.what());
  }
}

void write_vocabulary(const std::string& path, const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) bad_file(path, "cannot open for writing");
  for (const std::string& entry : vocab.entries()) out << entry << '\n';
  if (!out) bad_file(path, "write failed");
}

std::vector<std::string> read_bias_texts(const std::string& path) {
  std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) {
      bad_file(path, "line " + std::to_string(i + 1) + ": empty phrase");
    }
    if (lines[i].back() == ' ' || lines[i].back() == '\t' ||
        lines[i].front() == ' ' || lines[i].front() == '\t') {
      bad_file(path, "line " + std::to_string(i + 1) +
                         ": leading or trailing whitespace");
    }
  }
  return lines;
}

void write_bias_texts(const std::string& path,
                      const std::vector<std::string>& texts) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) bad_file(path, "cannot open for writing");
  for (const std::string& t : texts) out << t << '\n';
  if (!out) bad_file(path, "write failed");
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::map<std::string, std::string> config;
  const std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      bad_file(path,
               "line " + std::to_string(i + 1) + ": expected `key=value`");
    }
    config[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return config;
}

}  // namespace dvbias::io
