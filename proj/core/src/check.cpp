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

#include "dvbias/check.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "dvbias/decode.hpp"
#include "dvbias/score.hpp"

namespace dvbias::check {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

double brute_force_ctc_loss(const nnref::LogPosteriors& lp,
                            std::span<const TokenId> target) {
  const int t_frames = lp.num_frames;
  const int width = lp.width;
  if (t_frames == 0) return target.empty() ? 0.0 : kInf;

  std::vector<TokenId> path(t_frames, 0);
  std::vector<TokenId> collapsed;
  collapsed.reserve(t_frames);
  double total = 0.0;
  while (true) {
    collapsed.clear();
    TokenId prev = -1;
    for (TokenId id : path) {
      if (id != prev && id != kBlankId) collapsed.push_back(id);
      prev = id;
    }
    if (collapsed.size() == target.size() &&
        std::equal(collapsed.begin(), collapsed.end(), target.begin())) {
      double log_path = 0.0;
      for (int t = 0; t < t_frames; ++t) log_path += lp.at(t, path[t]);
      total += std::exp(log_path);
    }
    int pos = t_frames - 1;
    while (pos >= 0 && path[pos] == width - 1) path[pos--] = 0;
    if (pos < 0) break;
    ++path[pos];
  }
  return total > 0.0 ? -std::log(total) : kInf;
}

std::vector<double> finite_difference_gradient(
    const nnref::LogPosteriors& lp, std::span<const TokenId> target,
    const std::vector<labels::PhraseOccurrence>& occurrences,
    const BiasList& bias, const nnref::LossConfig& cfg, double h) {
  nnref::LogPosteriors work = lp;
  std::vector<double> grad(lp.values.size());
  for (std::size_t i = 0; i < lp.values.size(); ++i) {
    const double original = work.values[i];
    work.values[i] = original + h;
    const double up =
        nnref::joint_loss(work, target, occurrences, bias, cfg).loss;
    work.values[i] = original - h;
    const double down =
        nnref::joint_loss(work, target, occurrences, bias, cfg).loss;
    work.values[i] = original;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

namespace {

// Plain row-major matrices and nested-loop arithmetic for the forward
// oracle; nothing here may call into nnref's numerics.
using Mat = std::vector<std::vector<double>>;

Mat zeros(int rows, int cols) {
  return Mat(rows, std::vector<double>(cols, 0.0));
}

Mat from_eigen(const nnref::Matrix& m) {
  Mat out = zeros(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int r = 0; r < static_cast<int>(m.rows()); ++r) {
    for (int c = 0; c < static_cast<int>(m.cols()); ++c) out[r][c] = m(r, c);
  }
  return out;
}

std::vector<double> from_eigen(const nnref::Vector& v) {
  std::vector<double> out(v.size());
  for (int r = 0; r < static_cast<int>(v.size()); ++r) out[r] = v(r);
  return out;
}

Mat matmul(const Mat& a, const Mat& b) {
  const int rows = static_cast<int>(a.size());
  const int inner = static_cast<int>(b.size());
  const int cols = inner == 0 ? 0 : static_cast<int>(b[0].size());
  Mat out = zeros(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int k = 0; k < inner; ++k) acc += a[r][k] * b[k][c];
      out[r][c] = acc;
    }
  }
  return out;
}

Mat add(const Mat& a, const Mat& b) {
  Mat out = a;
  for (std::size_t r = 0; r < out.size(); ++r) {
    for (std::size_t c = 0; c < out[r].size(); ++c) out[r][c] += b[r][c];
  }
  return out;
}

Mat add_bias(const Mat& a, const std::vector<double>& v) {
  Mat out = a;
  for (std::size_t r = 0; r < out.size(); ++r) {
    for (std::size_t c = 0; c < out[r].size(); ++c) out[r][c] += v[r];
  }
  return out;
}

Mat relu(const Mat& a) {
  Mat out = a;
  for (auto& row : out) {
    for (double& x : row) x = x > 0.0 ? x : 0.0;
  }
  return out;
}

Mat feed_forward(const nnref::FeedForward& ff, const Mat& x) {
  Mat hidden = relu(add_bias(matmul(from_eigen(ff.w1), x), from_eigen(ff.b1)));
  return add_bias(matmul(from_eigen(ff.w2), hidden), from_eigen(ff.b2));
}

// One attention head with an unstabilized softmax over key positions.
Mat head_attention(const Mat& q, const Mat& k, const Mat& v) {
  const int d_k = static_cast<int>(q.size());
  const int t_q = static_cast<int>(q[0].size());
  const int t_kv = static_cast<int>(k[0].size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_k));
  Mat out = zeros(d_k, t_q);
  for (int c = 0; c < t_q; ++c) {
    std::vector<double> weights(t_kv);
    double denom = 0.0;
    for (int kv = 0; kv < t_kv; ++kv) {
      double dot = 0.0;
      for (int r = 0; r < d_k; ++r) dot += k[r][kv] * q[r][c];
      weights[kv] = std::exp(dot * scale);
      denom += weights[kv];
    }
    for (int r = 0; r < d_k; ++r) {
      double acc = 0.0;
      for (int kv = 0; kv < t_kv; ++kv) acc += v[r][kv] * weights[kv] / denom;
      out[r][c] = acc;
    }
  }
  return out;
}

Mat multi_head(const nnref::Attention& attn, const Mat& queries,
               const Mat& memory) {
  const int d = static_cast<int>(attn.w_o.rows());
  const int t_q = static_cast<int>(queries[0].size());
  if (memory.empty() || memory[0].empty()) return zeros(d, t_q);
  Mat concat;
  for (std::size_t h = 0; h < attn.w_q.size(); ++h) {
    Mat q = matmul(from_eigen(attn.w_q[h]), queries);
    Mat k = matmul(from_eigen(attn.w_k[h]), memory);
    Mat v = matmul(from_eigen(attn.w_v[h]), memory);
    Mat head = head_attention(q, k, v);
    concat.insert(concat.end(), head.begin(), head.end());
  }
  return add_bias(matmul(from_eigen(attn.w_o), concat), from_eigen(attn.b_o));
}

}  // namespace

ReferenceForward reference_forward(const nnref::ModelParams& params,
                                   const nnref::Matrix& h,
                                   const BiasList& bias) {
  const int d = params.cfg.d;
  const int t_frames = static_cast<int>(h.cols());
  const int v_size = params.cfg.vocab_size;
  const int n = bias.size();

  Mat h_mat = from_eigen(h);

  Mat e_raw = zeros(d, n);
  for (int i = 0; i < n; ++i) {
    const TokenId first = bias.phrase(i).subwords.front();
    for (int r = 0; r < d; ++r) e_raw[r][i] = params.embedding(r, first);
  }
  Mat e = n > 0 ? feed_forward(params.context_ff, e_raw) : zeros(d, 0);

  Mat summary = multi_head(params.bias_attn, h_mat, e);
  Mat z = add(h_mat, summary);
  Mat z1 = add(z, multi_head(params.self_attn, z, z));
  Mat h_ca = add(z1, feed_forward(params.block_ff, z1));
  Mat h_ca_proj =
      add_bias(matmul(from_eigen(params.w_ca), h_ca), from_eigen(params.b_ca));
  Mat h_v = add_bias(matmul(from_eigen(params.w_ctc), add(h_mat, h_ca_proj)),
                     from_eigen(params.b_ctc));

  Mat h_dv = zeros(n, t_frames);
  if (n > 0) {
    const int heads = static_cast<int>(params.w_score_q.size());
    const double scale = 1.0 / std::sqrt(static_cast<double>(params.cfg.d_k));
    for (int head = 0; head < heads; ++head) {
      Mat q = matmul(from_eigen(params.w_score_q[head]), h_ca);
      Mat k = matmul(from_eigen(params.w_score_k[head]), e);
      for (int i = 0; i < n; ++i) {
        for (int t = 0; t < t_frames; ++t) {
          double dot = 0.0;
          for (int r = 0; r < params.cfg.d_k; ++r) dot += k[r][i] * q[r][t];
          h_dv[i][t] += dot * scale;
        }
      }
    }
    for (auto& row : h_dv) {
      for (double& x : row) x /= static_cast<double>(heads);
    }
  }

  ReferenceForward out;
  out.h_ca = h_ca;
  out.h_ca_proj = h_ca_proj;
  out.h_v = h_v;
  out.h_dv = h_dv;
  out.posterior.assign(t_frames, std::vector<double>(v_size + n, 0.0));
  for (int t = 0; t < t_frames; ++t) {
    double denom = 0.0;
    for (int c = 0; c < v_size + n; ++c) {
      const double logit = c < v_size ? h_v[c][t] : h_dv[c - v_size][t];
      out.posterior[t][c] = std::exp(logit);
      denom += out.posterior[t][c];
    }
    for (int c = 0; c < v_size + n; ++c) out.posterior[t][c] /= denom;
  }
  return out;
}

namespace {

double confidence_rec(const PosteriorMatrix& m, std::span<const TokenId> sub,
                      int j, int frame_min, int window_end, double acc) {
  double best = kNegInf;
  const TokenId id = sub[j];
  for (int f = frame_min; f < window_end; ++f) {
    const double acc2 = acc + m.at(f, id);
    if (j + 1 == static_cast<int>(sub.size())) {
      best = std::max(best, acc2);
    } else {
      const int gap = sub[j + 1] == id ? 2 : 1;
      best = std::max(
          best, confidence_rec(m, sub, j + 1, f + gap, window_end, acc2));
    }
  }
  return best;
}

}  // namespace

double brute_force_confidence(const PosteriorMatrix& m, int window_begin,
                              int window_end,
                              std::span<const TokenId> subwords) {
  if (subwords.empty() || window_begin >= window_end) return kNegInf;
  return confidence_rec(m, subwords, 0, window_begin, window_end, 0.0);
}

namespace {

int edit_rec(const std::vector<std::string>& ref,
             const std::vector<std::string>& hyp, std::size_t i,
             std::size_t j) {
  if (i == ref.size()) return static_cast<int>(hyp.size() - j);
  if (j == hyp.size()) return static_cast<int>(ref.size() - i);
  int best = edit_rec(ref, hyp, i + 1, j + 1) + (ref[i] == hyp[j] ? 0 : 1);
  best = std::min(best, edit_rec(ref, hyp, i + 1, j) + 1);
  best = std::min(best, edit_rec(ref, hyp, i, j + 1) + 1);
  return best;
}

}  // namespace

int brute_force_edit_distance(const std::vector<std::string>& ref,
                              const std::vector<std::string>& hyp) {
  return edit_rec(ref, hyp, 0, 0);
}

namespace {

nnref::LogPosteriors random_log_posteriors(int t_frames, int width,
                                           std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  nnref::LogPosteriors lp;
  lp.num_frames = t_frames;
  lp.width = width;
  lp.values.resize(static_cast<std::size_t>(t_frames) * width);
  for (int t = 0; t < t_frames; ++t) {
    double sum = 0.0;
    std::vector<double> row(width);
    for (int c = 0; c < width; ++c) {
      row[c] = unit(rng);
      sum += row[c];
    }
    for (int c = 0; c < width; ++c) lp.at(t, c) = std::log(row[c] / sum);
  }
  return lp;
}

std::vector<TokenId> random_feasible_target(int t_frames, int width,
                                            int max_len,
                                            std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len_dist(0, max_len);
  std::uniform_int_distribution<TokenId> id_dist(1, width - 1);
  std::vector<TokenId> target(len_dist(rng));
  for (TokenId& id : target) id = id_dist(rng);
  // Trim from the back until the repeat-blank rule fits in t_frames.
  while (nnref::min_frames_for_target(target) > t_frames) target.pop_back();
  return target;
}

}  // namespace

SuiteResult run_ctc_loss_suite(int instances, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  SuiteResult result{"ctc-loss-oracle", 0, 0, 0.0, 0.0};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> t_dist(1, 6);
  std::uniform_int_distribution<int> w_dist(2, 5);
  for (int i = 0; i < instances; ++i) {
    const int t_frames = t_dist(rng);
    const int width = w_dist(rng);
    nnref::LogPosteriors lp = random_log_posteriors(t_frames, width, rng);
    std::vector<TokenId> target =
        random_feasible_target(t_frames, width, 3, rng);
    const double got = nnref::ctc_loss(lp, target).loss;
    const double want = brute_force_ctc_loss(lp, target);
    const double err = std::abs(got - want);
    result.max_err = std::max(result.max_err, err);
    ++result.cases;
    if (!(err <= 1e-9)) ++result.failures;
  }
  result.seconds = elapsed(start);
  return result;
}

SuiteResult run_gradient_suite(int instances, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  SuiteResult result{"joint-gradient-fd", 0, 0, 0.0, 0.0};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> t_dist(1, 5);
  std::uniform_int_distribution<int> w_dist(2, 6);
  const nnref::LossConfig cfg;  // defaults 0.3 / 0.05, bias enabled
  for (int i = 0; i < instances; ++i) {
    const int t_frames = t_dist(rng);
    const int width = w_dist(rng);
    const int max_n = std::max(0, std::min(2, width - 2));
    std::uniform_int_distribution<int> n_dist(0, max_n);
    const int n = n_dist(rng);
    const int v_base = width - n;

    std::vector<BiasPhrase> phrases;
    std::uniform_int_distribution<TokenId> sub_dist(1, v_base - 1);
    std::uniform_int_distribution<int> k_dist(1, 2);
    for (int p = 0; p < n; ++p) {
      BiasPhrase phrase;
      phrase.text = "p" + std::to_string(p);
      const int k = k_dist(rng);
      for (int s = 0; s < k; ++s) phrase.subwords.push_back(sub_dist(rng));
      phrases.push_back(std::move(phrase));
    }
    BiasList bias(std::move(phrases), v_base);

    nnref::LogPosteriors lp = random_log_posteriors(t_frames, width, rng);
    std::vector<TokenId> target =
        random_feasible_target(t_frames, width, 3, rng);

    std::vector<labels::PhraseOccurrence> occurrences;
    if (n > 0 && rng() % 2 == 0) {
      std::uniform_int_distribution<int> p_dist(0, n - 1);
      const int p = p_dist(rng);
      occurrences.push_back({p, 0, bias.phrase(p).length()});
      // Keep the concatenated bias target feasible as well.
      std::vector<TokenId> concat = bias.phrase(p).subwords;
      if (nnref::min_frames_for_target(concat) > t_frames) {
        occurrences.clear();
      }
    }

    nnref::LossResult res =
        nnref::joint_loss(lp, target, occurrences, bias, cfg);
    std::vector<double> fd =
        finite_difference_gradient(lp, target, occurrences, bias, cfg, 1e-5);

    ++result.cases;
    double worst = 0.0;
    for (std::size_t idx = 0; idx < fd.size(); ++idx) {
      const double denom =
          std::max({std::abs(res.grad[idx]), std::abs(fd[idx]), 1e-3});
      worst = std::max(worst, std::abs(res.grad[idx] - fd[idx]) / denom);
    }
    result.max_err = std::max(result.max_err, worst);
    if (!(worst < 1e-4)) ++result.failures;
  }
  result.seconds = elapsed(start);
  return result;
}

SuiteResult run_forward_suite(std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  SuiteResult result{"forward-oracle", 0, 0, 0.0, 0.0};
  struct Case {
    int d, d_k, heads, d_ff, v, t, n;
  };
  const Case cases[] = {
      {4, 2, 2, 8, 5, 3, 2},   // the small doubly-seeded reference case
      {8, 4, 2, 16, 8, 8, 8},  // every dimension at the suite maximum
      {6, 3, 3, 8, 7, 5, 0},   // empty bias list
      {2, 2, 1, 4, 3, 1, 1},   // single frame, single head
      {8, 2, 4, 16, 6, 7, 3},
  };
  std::mt19937_64 rng(seed);
  for (const Case& c : cases) {
    nnref::ModelConfig cfg{c.d, c.d_k, c.heads, c.d_ff, c.v};
    nnref::ModelParams params = nnref::ModelParams::seeded(cfg, rng());
    nnref::Matrix h = nnref::random_acoustic(cfg, c.t, rng());

    std::vector<BiasPhrase> phrases;
    std::uniform_int_distribution<TokenId> sub_dist(1, c.v - 1);
    std::uniform_int_distribution<int> k_dist(1, 3);
    for (int i = 0; i < c.n; ++i) {
      BiasPhrase p;
      p.text = "p" + std::to_string(i);
      const int k = k_dist(rng);
      for (int s = 0; s < k; ++s) p.subwords.push_back(sub_dist(rng));
      phrases.push_back(std::move(p));
    }
    BiasList bias(std::move(phrases), c.v);

    nnref::HiddenStates states = nnref::run_hidden(params, h, bias);
    PosteriorMatrix post = nnref::dynamic_softmax(states.h_v, states.h_dv);
    ReferenceForward ref = reference_forward(params, h, bias);

    double err = 0.0;
    for (int r = 0; r < c.d; ++r) {
      for (int t = 0; t < c.t; ++t) {
        err = std::max(err, std::abs(states.h_ca(r, t) - ref.h_ca[r][t]));
        err = std::max(err,
                       std::abs(states.h_ca_proj(r, t) - ref.h_ca_proj[r][t]));
      }
    }
    for (int r = 0; r < c.v; ++r) {
      for (int t = 0; t < c.t; ++t) {
        err = std::max(err, std::abs(states.h_v(r, t) - ref.h_v[r][t]));
      }
    }
    for (int r = 0; r < c.n; ++r) {
      for (int t = 0; t < c.t; ++t) {
        err = std::max(err, std::abs(states.h_dv(r, t) - ref.h_dv[r][t]));
      }
    }
    bool rows_ok = true;
    for (int t = 0; t < c.t; ++t) {
      double sum = 0.0;
      for (int col = 0; col < post.width(); ++col) {
        err = std::max(err, std::abs(post.at(t, col) - ref.posterior[t][col]));
        sum += post.at(t, col);
      }
      if (std::abs(sum - 1.0) > 1e-6) rows_ok = false;
    }
    ++result.cases;
    result.max_err = std::max(result.max_err, err);
    if (!(err <= 1e-10) || !rows_ok) ++result.failures;
  }
  result.seconds = elapsed(start);
  return result;
}

SuiteResult run_confidence_suite(int instances, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  SuiteResult result{"confidence-oracle", 0, 0, 0.0, 0.0};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> t_dist(1, 6);
  std::uniform_int_distribution<int> v_dist(2, 4);
  std::uniform_int_distribution<int> n_dist(0, 2);
  std::uniform_int_distribution<int> k_dist(1, 3);
  for (int i = 0; i < instances; ++i) {
    const int t_frames = t_dist(rng);
    const int v_size = v_dist(rng);
    const int n = n_dist(rng);
    PosteriorMatrix m(t_frames, v_size, n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < t_frames; ++t) {
      double sum = 0.0;
      for (int c = 0; c < m.width(); ++c) {
        m.at(t, c) = unit(rng) + 1e-3;
        sum += m.at(t, c);
      }
      for (int c = 0; c < m.width(); ++c) m.at(t, c) /= sum;
    }

    BiasPhrase phrase;
    phrase.text = "p";
    const int k = k_dist(rng);
    std::uniform_int_distribution<TokenId> sub_dist(1, v_size - 1);
    const bool all_same = rng() % 3 == 0;  // exercise the repeat gap
    const TokenId fixed = sub_dist(rng);
    for (int s = 0; s < k; ++s) {
      phrase.subwords.push_back(all_same ? fixed : sub_dist(rng));
    }

    for (int a = 0; a <= t_frames; ++a) {
      for (int b = a + 1; b <= t_frames; ++b) {
        decode::ConfidenceResult got =
            decode::confidence_search(m, a, b, phrase);
        const double want = brute_force_confidence(m, a, b, phrase.subwords);
        ++result.cases;
        bool ok = got.score == want || (got.score == kNegInf && want == kNegInf);
        if (ok && got.score != kNegInf) {
          // The reported frames must reproduce the score and respect the
          // monotone gap constraints.
          double resum = 0.0;
          int prev_frame = a - 1;
          TokenId prev_id = -1;
          for (std::size_t s = 0; s < got.frames.size(); ++s) {
            const int f = got.frames[s];
            const int gap = phrase.subwords[s] == prev_id ? 2 : 1;
            if (f < a || f >= b || (s > 0 && f - prev_frame < gap)) ok = false;
            resum += m.at(f, phrase.subwords[s]);
            prev_frame = f;
            prev_id = phrase.subwords[s];
          }
          if (resum != got.score) ok = false;
          result.max_err = std::max(result.max_err,
                                    std::abs(got.score - want));
        }
        if (!ok) ++result.failures;
      }
    }
  }
  result.seconds = elapsed(start);
  return result;
}

SuiteResult run_align_suite(int pairs, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  SuiteResult result{"align-oracle", 0, 0, 0.0, 0.0};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len_dist(0, 8);
  std::uniform_int_distribution<int> letter(0, 4);
  auto random_words = [&](int len) {
    std::vector<std::string> words(len);
    for (std::string& w : words) w = std::string(1, 'a' + letter(rng));
    return words;
  };
  for (int i = 0; i < pairs; ++i) {
    const std::vector<std::string> ref = random_words(len_dist(rng));
    const std::vector<std::string> hyp = random_words(len_dist(rng));
    int got = 0;
    for (const score::TraceStep& step : score::align(ref, hyp)) {
      if (step.op != score::EditOp::kMatch) ++got;
    }
    const int want = brute_force_edit_distance(ref, hyp);
    ++result.cases;
    if (got != want) {
      ++result.failures;
      result.max_err = std::max(result.max_err,
                                static_cast<double>(std::abs(got - want)));
    }
  }
  result.seconds = elapsed(start);
  return result;
}

std::vector<SuiteResult> run_all_suites(std::uint64_t seed) {
  return {
      run_ctc_loss_suite(200, seed),
      run_gradient_suite(40, seed + 1),
      run_forward_suite(seed + 2),
      run_confidence_suite(60, seed + 3),
      run_align_suite(2000, seed + 4),
  };
}

}  // namespace dvbias::check
