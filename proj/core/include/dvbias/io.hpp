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

#ifndef DVBIAS_IO_HPP_
#define DVBIAS_IO_HPP_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dvbias/types.hpp"

namespace dvbias::io {

// Posterior container: magic "DVP1", then uint32 little-endian T, V, n,
// then T*(V+n) IEEE-754 float32 little-endian values, row-major by frame.
// Values are widened to 64-bit on read; internal math never reuses the
// 32-bit representation.
PosteriorMatrix read_posteriors(const std::string& path);
void write_posteriors(const std::string& path, const PosteriorMatrix& m);

// TSV line: `utterance-id<TAB>payload`, UTF-8, LF endings (a trailing CR
// is stripped). Missing tab or duplicate id fails with the line number.
std::vector<std::pair<std::string, std::string>> read_tsv(
    const std::string& path);
void write_tsv(const std::string& path,
               const std::vector<std::pair<std::string, std::string>>& rows);

// Vocabulary file: one subword per line; line 0 is the blank (empty line).
Vocabulary read_vocabulary(const std::string& path);
void write_vocabulary(const std::string& path, const Vocabulary& vocab);

// Bias list file: one phrase per line; no trailing whitespace and no empty
// lines. An empty file is a valid empty list.
std::vector<std::string> read_bias_texts(const std::string& path);
void write_bias_texts(const std::string& path,
                      const std::vector<std::string>& texts);

// Flat `key=value` config, `#` comment lines and blank lines skipped.
// Whitespace around key and value is trimmed; duplicate keys keep the
// last value.
std::map<std::string, std::string> read_config(const std::string& path);

}  // namespace dvbias::io

#endif  // DVBIAS_IO_HPP_
