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

#ifndef DVBIAS_NNREF_HPP_
#define DVBIAS_NNREF_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "dvbias/types.hpp"

namespace dvbias::nnref {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Shape of the reference biasing network. `d` is the model width, `d_k`
// the per-head attention width, `heads` the attention head count, `d_ff`
// the feed-forward hidden width and `vocab_size` the static output size V.
struct ModelConfig {
  int d = 8;
  int d_k = 4;
  int heads = 2;
  int d_ff = 16;
  int vocab_size = 8;
};

// Two-layer feed-forward block: w2 * relu(w1 * x + b1) + b2.
struct FeedForward {
  Matrix w1;  // d_ff x d_in
  Vector b1;  // d_ff
  Matrix w2;  // d_out x d_ff
  Vector b2;  // d_out
};

// Multi-head attention weights. Heads share nothing; outputs are
// concatenated then mixed by w_o.
struct Attention {
  std::vector<Matrix> w_q;  // per head, d_k x d
  std::vector<Matrix> w_k;  // per head, d_k x d
  std::vector<Matrix> w_v;  // per head, d_k x d
  Matrix w_o;               // d x (heads * d_k)
  Vector b_o;               // d
};

// All parameters of the reference network. Columns are positions
// throughout: a length-T activation sequence is a d x T matrix.
struct ModelParams {
  ModelConfig cfg;

  Matrix embedding;        // d x V, column per subword id
  FeedForward context_ff;  // d -> d, phrase vector head
  Attention bias_attn;     // acoustic queries over phrase embeddings
  Attention self_attn;     // self-attention inside the fusing block
  FeedForward block_ff;    // d -> d, feed-forward inside the fusing block
  Matrix w_ca;             // d x d, projection producing the fused summary
  Vector b_ca;             // d
  Matrix w_ctc;            // V x d, static output layer
  Vector b_ctc;            // V
  std::vector<Matrix> w_score_q;  // per head, d_k x d, dynamic scorer query
  std::vector<Matrix> w_score_k;  // per head, d_k x d, dynamic scorer key

  // Deterministic Gaussian initialization (fan-in scaled), reproducible
  // across platforms for a given seed.
  static ModelParams seeded(const ModelConfig& cfg, std::uint64_t seed);
};

// Intermediate activations of one utterance forward pass.
struct HiddenStates {
  Matrix h;          // d x T, input acoustic sequence
  Matrix e;          // d x n, phrase embeddings (0 columns when n = 0)
  Matrix h_ca;       // d x T, contextualized sequence
  Matrix h_ca_proj;  // d x T, linear projection of h_ca
  Matrix h_v;        // V x T, static logits
  Matrix h_dv;       // n x T, dynamic logits (0 rows when n = 0)
};

// Phrase list encoder: embeds each phrase as the feed-forward image of its
// first subword's embedding. Returns d x n (n = 0 gives 0 columns).
Matrix context_encode(const BiasList& bias, const ModelParams& params);

// Cross-attention of acoustic frames over phrase embeddings, one
// self-attention + feed-forward block with residuals, then a linear
// projection. Returns (h_ca, h_ca_proj), both d x T. With n = 0 the
// cross-attention summary is the zero matrix.
std::pair<Matrix, Matrix> bias_aware_forward(const Matrix& h, const Matrix& e,
                                             const ModelParams& params);

// Static and dynamic logits: h_v = Linear(h + h_ca_proj) of shape V x T;
// h_dv = mean over heads of (w_k e)^T (w_q h_ca) / sqrt(d_k), n x T.
std::pair<Matrix, Matrix> output_layer(const Matrix& h, const Matrix& h_ca,
                                       const Matrix& h_ca_proj,
                                       const Matrix& e,
                                       const ModelParams& params);

// Per-frame softmax over the concatenated (V + n)-way logits; rows of the
// returned posterior matrix sum to 1. h_dv may have zero rows.
PosteriorMatrix dynamic_softmax(const Matrix& h_v, const Matrix& h_dv);

// Full pipeline; also returns all intermediates for inspection.
HiddenStates run_hidden(const ModelParams& params, const Matrix& h,
                        const BiasList& bias);
PosteriorMatrix forward(const ModelParams& params, const Matrix& h,
                        const BiasList& bias);

// Deterministic Gaussian test input, d x T.
Matrix random_acoustic(const ModelConfig& cfg, int num_frames,
                       std::uint64_t seed);

}  // namespace dvbias::nnref

#endif  // DVBIAS_NNREF_HPP_
