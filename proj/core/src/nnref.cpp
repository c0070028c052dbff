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

#include "dvbias/nnref.hpp"

#include <cmath>
#include <random>

namespace dvbias::nnref {

namespace {

// Fills column-by-column so the draw order is independent of Eigen's
// storage layout.
void fill_gaussian(Matrix& m, std::mt19937_64& rng, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = dist(rng);
  }
}

void fill_gaussian(Vector& v, std::mt19937_64& rng, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (Eigen::Index r = 0; r < v.size(); ++r) v(r) = dist(rng);
}

FeedForward seeded_ff(int d_in, int d_hidden, int d_out,
                      std::mt19937_64& rng) {
  FeedForward ff;
  ff.w1 = Matrix(d_hidden, d_in);
  ff.b1 = Vector(d_hidden);
  ff.w2 = Matrix(d_out, d_hidden);
  ff.b2 = Vector(d_out);
  fill_gaussian(ff.w1, rng, 1.0 / std::sqrt(static_cast<double>(d_in)));
  fill_gaussian(ff.b1, rng, 0.01);
  fill_gaussian(ff.w2, rng, 1.0 / std::sqrt(static_cast<double>(d_hidden)));
  fill_gaussian(ff.b2, rng, 0.01);
  return ff;
}

Attention seeded_attention(const ModelConfig& cfg, std::mt19937_64& rng) {
  Attention a;
  const double w_std = 1.0 / std::sqrt(static_cast<double>(cfg.d));
  for (int h = 0; h < cfg.heads; ++h) {
    Matrix q(cfg.d_k, cfg.d), k(cfg.d_k, cfg.d), v(cfg.d_k, cfg.d);
    fill_gaussian(q, rng, w_std);
    fill_gaussian(k, rng, w_std);
    fill_gaussian(v, rng, w_std);
    a.w_q.push_back(std::move(q));
    a.w_k.push_back(std::move(k));
    a.w_v.push_back(std::move(v));
  }
  a.w_o = Matrix(cfg.d, cfg.heads * cfg.d_k);
  a.b_o = Vector(cfg.d);
  fill_gaussian(a.w_o, rng,
                1.0 / std::sqrt(static_cast<double>(cfg.heads * cfg.d_k)));
  fill_gaussian(a.b_o, rng, 0.01);
  return a;
}

Matrix apply_ff(const FeedForward& ff, const Matrix& x) {
  Matrix hidden = (ff.w1 * x).colwise() + ff.b1;
  hidden = hidden.cwiseMax(0.0);
  return (ff.w2 * hidden).colwise() + ff.b2;
}

// Scaled dot-product attention for one head: queries q (d_k x T_q),
// keys/values k, v (d_k x T_kv). Softmax is over keys per query.
Matrix head_attention(const Matrix& q, const Matrix& k, const Matrix& v) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.rows()));
  Matrix scores = (k.transpose() * q) * scale;  // T_kv x T_q
  for (Eigen::Index c = 0; c < scores.cols(); ++c) {
    const double m = scores.col(c).maxCoeff();
    Vector ex = (scores.col(c).array() - m).exp();
    scores.col(c) = ex / ex.sum();
  }
  return v * scores;  // d_k x T_q
}

// Multi-head attention: query positions from `queries`, key/value positions
// from `memory`. Returns d x T_q; the zero matrix when memory is empty.
Matrix multi_head(const Attention& attn, const Matrix& queries,
                  const Matrix& memory) {
  const int heads = static_cast<int>(attn.w_q.size());
  const Eigen::Index t_q = queries.cols();
  if (memory.cols() == 0) {
    return Matrix::Zero(attn.w_o.rows(), t_q);
  }
  Matrix concat(attn.w_o.cols(), t_q);
  Eigen::Index row = 0;
  for (int h = 0; h < heads; ++h) {
    Matrix q = attn.w_q[h] * queries;
    Matrix k = attn.w_k[h] * memory;
    Matrix v = attn.w_v[h] * memory;
    concat.middleRows(row, q.rows()) = head_attention(q, k, v);
    row += q.rows();
  }
  return (attn.w_o * concat).colwise() + attn.b_o;
}

}  // namespace

ModelParams ModelParams::seeded(const ModelConfig& cfg, std::uint64_t seed) {
  if (cfg.d <= 0 || cfg.d_k <= 0 || cfg.heads <= 0 || cfg.d_ff <= 0 ||
      cfg.vocab_size <= 0) {
    throw Error(ErrorCode::kInvalidSpec, "model dimensions must be positive");
  }
  std::mt19937_64 rng(seed);
  ModelParams p;
  p.cfg = cfg;

  p.embedding = Matrix(cfg.d, cfg.vocab_size);
  fill_gaussian(p.embedding, rng, 1.0);

  p.context_ff = seeded_ff(cfg.d, cfg.d_ff, cfg.d, rng);
  p.bias_attn = seeded_attention(cfg, rng);
  p.self_attn = seeded_attention(cfg, rng);
  p.block_ff = seeded_ff(cfg.d, cfg.d_ff, cfg.d, rng);

  const double d_std = 1.0 / std::sqrt(static_cast<double>(cfg.d));
  p.w_ca = Matrix(cfg.d, cfg.d);
  p.b_ca = Vector(cfg.d);
  fill_gaussian(p.w_ca, rng, d_std);
  fill_gaussian(p.b_ca, rng, 0.01);

  p.w_ctc = Matrix(cfg.vocab_size, cfg.d);
  p.b_ctc = Vector(cfg.vocab_size);
  fill_gaussian(p.w_ctc, rng, d_std);
  fill_gaussian(p.b_ctc, rng, 0.01);

  for (int h = 0; h < cfg.heads; ++h) {
    Matrix q(cfg.d_k, cfg.d), k(cfg.d_k, cfg.d);
    fill_gaussian(q, rng, d_std);
    fill_gaussian(k, rng, d_std);
    p.w_score_q.push_back(std::move(q));
    p.w_score_k.push_back(std::move(k));
  }
  return p;
}

Matrix context_encode(const BiasList& bias, const ModelParams& params) {
  const int n = bias.size();
  Matrix raw(params.cfg.d, n);
  for (int i = 0; i < n; ++i) {
    // The phrase vector is read off at the first subword position.
    const TokenId first = bias.phrase(i).subwords.front();
    if (first < 0 || first >= params.cfg.vocab_size) {
      throw Error(ErrorCode::kShapeMismatch,
                  "phrase subword id " + std::to_string(first) +
                      " outside embedding table of size " +
                      std::to_string(params.cfg.vocab_size));
    }
    raw.col(i) = params.embedding.col(first);
  }
  return apply_ff(params.context_ff, raw);
}

std::pair<Matrix, Matrix> bias_aware_forward(const Matrix& h, const Matrix& e,
                                             const ModelParams& params) {
  if (h.rows() != params.cfg.d) {
    throw Error(ErrorCode::kShapeMismatch,
                "acoustic rows " + std::to_string(h.rows()) +
                    " != model width " + std::to_string(params.cfg.d));
  }
  if (e.cols() > 0 && e.rows() != params.cfg.d) {
    throw Error(ErrorCode::kShapeMismatch,
                "embedding rows " + std::to_string(e.rows()) +
                    " != model width " + std::to_string(params.cfg.d));
  }
  Matrix summary = multi_head(params.bias_attn, h, e);

  // Fusing block: one self-attention + feed-forward layer with residuals.
  Matrix z = h + summary;
  Matrix z1 = z + multi_head(params.self_attn, z, z);
  Matrix h_ca = z1 + apply_ff(params.block_ff, z1);

  Matrix h_ca_proj = (params.w_ca * h_ca).colwise() + params.b_ca;
  return {std::move(h_ca), std::move(h_ca_proj)};
}

std::pair<Matrix, Matrix> output_layer(const Matrix& h, const Matrix& h_ca,
                                       const Matrix& h_ca_proj,
                                       const Matrix& e,
                                       const ModelParams& params) {
  if (h.cols() != h_ca.cols() || h.cols() != h_ca_proj.cols() ||
      h.rows() != params.cfg.d || h_ca.rows() != params.cfg.d ||
      h_ca_proj.rows() != params.cfg.d) {
    throw Error(ErrorCode::kShapeMismatch,
                "inconsistent hidden state shapes in output layer");
  }
  const Eigen::Index t = h.cols();
  const int n = static_cast<int>(e.cols());
  const int heads = static_cast<int>(params.w_score_q.size());

  Matrix h_v = (params.w_ctc * (h + h_ca_proj)).colwise() + params.b_ctc;

  Matrix h_dv = Matrix::Zero(n, t);
  if (n > 0) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(params.cfg.d_k));
    for (int head = 0; head < heads; ++head) {
      Matrix q = params.w_score_q[head] * h_ca;  // d_k x T
      Matrix k = params.w_score_k[head] * e;     // d_k x n
      h_dv += (k.transpose() * q) * scale;       // n x T
    }
    h_dv /= static_cast<double>(heads);
  }
  return {std::move(h_v), std::move(h_dv)};
}

PosteriorMatrix dynamic_softmax(const Matrix& h_v, const Matrix& h_dv) {
  if (h_dv.rows() > 0 && h_dv.cols() != h_v.cols()) {
    throw Error(ErrorCode::kShapeMismatch,
                "static and dynamic logits disagree on frame count: " +
                    std::to_string(h_v.cols()) + " vs " +
                    std::to_string(h_dv.cols()));
  }
  const int vocab_size = static_cast<int>(h_v.rows());
  const int num_bias = static_cast<int>(h_dv.rows());
  const int t_frames = static_cast<int>(h_v.cols());

  PosteriorMatrix post(t_frames, vocab_size, num_bias);
  Vector logits(vocab_size + num_bias);
  for (int t = 0; t < t_frames; ++t) {
    logits.head(vocab_size) = h_v.col(t);
    if (num_bias > 0) logits.tail(num_bias) = h_dv.col(t);
    const double m = logits.maxCoeff();
    Vector ex = (logits.array() - m).exp();
    const double denom = ex.sum();
    for (int c = 0; c < logits.size(); ++c) post.at(t, c) = ex(c) / denom;
  }
  return post;
}

HiddenStates run_hidden(const ModelParams& params, const Matrix& h,
                        const BiasList& bias) {
  HiddenStates s;
  s.h = h;
  s.e = context_encode(bias, params);
  std::tie(s.h_ca, s.h_ca_proj) = bias_aware_forward(h, s.e, params);
  std::tie(s.h_v, s.h_dv) = output_layer(h, s.h_ca, s.h_ca_proj, s.e, params);
  return s;
}

PosteriorMatrix forward(const ModelParams& params, const Matrix& h,
                        const BiasList& bias) {
  HiddenStates s = run_hidden(params, h, bias);
  return dynamic_softmax(s.h_v, s.h_dv);
}

Matrix random_acoustic(const ModelConfig& cfg, int num_frames,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix h(cfg.d, num_frames);
  fill_gaussian(h, rng, 1.0);
  return h;
}

}  // namespace dvbias::nnref
