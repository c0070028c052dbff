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

#include "dvbias/decode.hpp"

#include <algorithm>
#include <limits>

#include "dvbias/labels.hpp"

namespace dvbias::decode {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

std::vector<Emission> greedy_decode(const PosteriorMatrix& m) {
  std::vector<Emission> emissions;
  const int t_frames = m.num_frames();
  int t = 0;
  while (t < t_frames) {
    auto row = m.row(t);
    TokenId best = 0;
    for (int c = 1; c < m.width(); ++c) {
      if (row[c] > row[best]) best = c;  // ties keep the lowest id
    }
    // Extend the run of frames sharing this argmax, tracking the peak.
    int peak = t;
    double peak_prob = row[best];
    int end = t + 1;
    while (end < t_frames) {
      auto next = m.row(end);
      TokenId next_best = 0;
      for (int c = 1; c < m.width(); ++c) {
        if (next[c] > next[next_best]) next_best = c;
      }
      if (next_best != best) break;
      if (next[best] > peak_prob) {  // ties keep the earliest frame
        peak_prob = next[best];
        peak = end;
      }
      ++end;
    }
    if (best != kBlankId) emissions.push_back({best, peak, peak_prob});
    t = end;
  }
  return emissions;
}

ConfidenceResult confidence_search(const PosteriorMatrix& m, int window_begin,
                                   int window_end, const BiasPhrase& phrase) {
  if (window_begin < 0 || window_end > m.num_frames()) {
    throw Error(ErrorCode::kShapeMismatch,
                "window [" + std::to_string(window_begin) + ", " +
                    std::to_string(window_end) + ") outside 0.." +
                    std::to_string(m.num_frames()));
  }
  ConfidenceResult result{kNegInf, {}};
  const int k = phrase.length();
  if (window_begin >= window_end || k == 0) return result;
  const std::vector<TokenId>& sub = phrase.subwords;

  const int width = window_end - window_begin;
  // dp[f] = best sum placing subwords[0..j] with subword j emitted at
  // window frame f. Sums accumulate left to right, matching the order an
  // exhaustive path enumeration would use, so equal paths compare equal.
  std::vector<std::vector<double>> dp(k, std::vector<double>(width, kNegInf));
  std::vector<std::vector<int>> parent(k, std::vector<int>(width, -1));
  for (int f = 0; f < width; ++f) {
    dp[0][f] = m.at(window_begin + f, sub[0]);
  }
  for (int j = 1; j < k; ++j) {
    // An equal adjacent subword needs an intervening blank frame.
    const int gap = sub[j] == sub[j - 1] ? 2 : 1;
    double best_prev = kNegInf;
    int best_prev_f = -1;
    for (int f = 0; f < width; ++f) {
      const int avail = f - gap;
      if (avail >= 0 && dp[j - 1][avail] > best_prev) {
        best_prev = dp[j - 1][avail];
        best_prev_f = avail;
      }
      if (best_prev != kNegInf) {
        dp[j][f] = best_prev + m.at(window_begin + f, sub[j]);
        parent[j][f] = best_prev_f;
      }
    }
  }

  int best_f = -1;
  for (int f = 0; f < width; ++f) {
    if (dp[k - 1][f] > result.score) {
      result.score = dp[k - 1][f];
      best_f = f;
    }
  }
  if (best_f < 0) {
    result.score = kNegInf;
    return result;
  }
  result.frames.assign(k, -1);
  for (int j = k - 1; j >= 0; --j) {
    result.frames[j] = window_begin + best_f;
    best_f = parent[j][best_f];
  }
  return result;
}

std::pair<std::vector<TokenId>, std::vector<ActivationRecord>> activate_ta(
    const PosteriorMatrix& m, const std::vector<Emission>& emissions,
    const BiasList& bias, const ActivationConfig& cfg) {
  std::vector<TokenId> out;
  std::vector<ActivationRecord> records;
  std::vector<Emission> segment;

  auto flush_segment = [&](std::size_t keep) {
    for (std::size_t i = 0; i < keep; ++i) out.push_back(segment[i].token);
    segment.clear();
  };

  for (const Emission& em : emissions) {
    if (!bias.is_dynamic(em.token)) {
      segment.push_back(em);
      continue;
    }
    const int phrase_index = bias.phrase_index(em.token);
    const BiasPhrase& phrase = bias.phrase(phrase_index);
    const int k = phrase.length();
    const int avail = static_cast<int>(segment.size());

    ActivationRecord rec{phrase_index, 0, em.peak_frame, em.peak_frame,
                         kNegInf, false};
    if (cfg.activation_enabled) {
      const int j_lo = std::max(1, k - cfg.j_slack);
      const int j_hi = std::min(k + cfg.j_slack, avail);
      for (int j = j_lo; j <= j_hi; ++j) {
        const int start = segment[avail - j].peak_frame;
        ConfidenceResult r =
            confidence_search(m, start, em.peak_frame, phrase);
        if (r.score > rec.score) {  // ties keep the smallest j
          rec.score = r.score;
          rec.chosen_j = j;
          rec.window_begin = start;
        }
      }
      rec.applied = rec.score >= k * cfg.threshold;
    } else {
      // Ablation: replace unconditionally with j = k, clipped to the
      // segment; the score is still computed for the audit trail.
      const int j = std::min(k, avail);
      if (j >= 1) {
        rec.chosen_j = j;
        rec.window_begin = segment[avail - j].peak_frame;
        rec.score =
            confidence_search(m, rec.window_begin, em.peak_frame, phrase)
                .score;
        rec.applied = true;
      }
    }

    if (rec.applied) {
      flush_segment(segment.size() - rec.chosen_j);
      out.insert(out.end(), phrase.subwords.begin(), phrase.subwords.end());
    } else {
      flush_segment(segment.size());
    }
    records.push_back(rec);
  }
  flush_segment(segment.size());
  return {std::move(out), std::move(records)};
}

std::vector<TokenId> decode_wr(const PosteriorMatrix& m,
                               const BiasList& bias) {
  std::vector<Emission> emissions = greedy_decode(m);
  std::vector<TokenId> tokens;
  tokens.reserve(emissions.size());
  for (const Emission& em : emissions) tokens.push_back(em.token);
  tokens = labels::merge_consecutive_bias(tokens, bias.base_vocab_size());
  std::vector<TokenId> out;
  for (TokenId id : tokens) {
    if (bias.is_dynamic(id)) {
      const std::vector<TokenId>& sub =
          bias.phrase(bias.phrase_index(id)).subwords;
      out.insert(out.end(), sub.begin(), sub.end());
    } else {
      out.push_back(id);
    }
  }
  return out;
}

Mode parse_mode(const std::string& name) {
  if (name == "greedy") return Mode::kGreedy;
  if (name == "wr") return Mode::kWr;
  if (name == "ta") return Mode::kTa;
  throw Error(ErrorCode::kInvalidSpec,
              "unknown decode mode '" + name + "' (greedy|wr|ta)");
}

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::kGreedy: return "greedy";
    case Mode::kWr: return "wr";
    case Mode::kTa: return "ta";
  }
  return "unknown";
}

DecodeResult decode_utterance(const PosteriorMatrix& m, const BiasList& bias,
                              const Vocabulary& vocab, Mode mode,
                              const ActivationConfig& cfg) {
  DecodeResult result;
  switch (mode) {
    case Mode::kGreedy: {
      for (const Emission& em : greedy_decode(m)) {
        result.tokens.push_back(em.token);
      }
      break;
    }
    case Mode::kWr: {
      result.tokens = decode_wr(m, bias);
      break;
    }
    case Mode::kTa: {
      std::vector<Emission> emissions = greedy_decode(m);
      std::tie(result.tokens, result.records) =
          activate_ta(m, emissions, bias, cfg);
      break;
    }
  }
  result.text = vocab.render(result.tokens);
  return result;
}

}  // namespace dvbias::decode
