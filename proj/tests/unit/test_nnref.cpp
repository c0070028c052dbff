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
#include <vector>

#include "doctest.h"
#include "dvbias/check.hpp"
#include "dvbias/nnref.hpp"
#include "dvbias/types.hpp"
#include "test_util.hpp"

using dvbias::BiasList;
using dvbias::BiasPhrase;
using dvbias::ErrorCode;
using dvbias::PosteriorMatrix;
using dvbias::nnref::Matrix;
using dvbias::nnref::ModelConfig;
using dvbias::nnref::ModelParams;
using testutil::error_code_of;

namespace {

ModelConfig small_config() {
  ModelConfig cfg;
  cfg.d = 4;
  cfg.d_k = 2;
  cfg.heads = 2;
  cfg.d_ff = 8;
  cfg.vocab_size = 6;
  return cfg;
}

BiasList two_phrases() {
  return BiasList({BiasPhrase{"p0", {2, 3}}, BiasPhrase{"p1", {4}}}, 6);
}

}  // namespace

TEST_SUITE("nnref") {

TEST_CASE("posterior rows are distributions over V plus n labels") {
  const ModelConfig cfg = small_config();
  const ModelParams params = ModelParams::seeded(cfg, 7);
  const Matrix h = dvbias::nnref::random_acoustic(cfg, 9, 3);
  const PosteriorMatrix m = dvbias::nnref::forward(params, h, two_phrases());
  CHECK(m.num_frames() == 9);
  CHECK(m.vocab_size() == 6);
  CHECK(m.num_bias() == 2);
  CHECK(dvbias::validate_posteriors(m).ok());
}

TEST_CASE("seeded parameters are reproducible and seed-sensitive") {
  const ModelConfig cfg = small_config();
  const ModelParams a = ModelParams::seeded(cfg, 42);
  const ModelParams b = ModelParams::seeded(cfg, 42);
  const ModelParams c = ModelParams::seeded(cfg, 43);
  CHECK((a.embedding - b.embedding).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.w_ctc - b.w_ctc).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.embedding - c.embedding).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("empty phrase lists shrink the network to its static part") {
  const ModelConfig cfg = small_config();
  const ModelParams params = ModelParams::seeded(cfg, 5);
  const Matrix h = dvbias::nnref::random_acoustic(cfg, 6, 9);
  const dvbias::nnref::HiddenStates hs =
      dvbias::nnref::run_hidden(params, h, BiasList{});
  CHECK(hs.e.cols() == 0);
  CHECK(hs.h_dv.rows() == 0);
  CHECK(hs.h_v.rows() == 6);
  const PosteriorMatrix m = dvbias::nnref::forward(params, h, BiasList{});
  CHECK(m.num_bias() == 0);
  CHECK(m.width() == 6);
  CHECK(dvbias::validate_posteriors(m).ok());
}

TEST_CASE("identical phrases get identical embeddings and logit rows") {
  const ModelConfig cfg = small_config();
  const ModelParams params = ModelParams::seeded(cfg, 11);
  // Phrase embeddings depend on the first subword only, so these collide
  // by construction; their dynamic logit rows must collide too.
  const BiasList bias({BiasPhrase{"p0", {2, 3}},
                       BiasPhrase{"p1", {4}},
                       BiasPhrase{"p2", {2, 3}}},
                      6);
  const Matrix e = dvbias::nnref::context_encode(bias, params);
  REQUIRE(e.cols() == 3);
  CHECK((e.col(0) - e.col(2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((e.col(0) - e.col(1)).cwiseAbs().maxCoeff() > 0.0);

  const Matrix h = dvbias::nnref::random_acoustic(cfg, 5, 2);
  const dvbias::nnref::HiddenStates hs =
      dvbias::nnref::run_hidden(params, h, bias);
  CHECK((hs.h_dv.row(0) - hs.h_dv.row(2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identical scorer heads reduce to a single head") {
  const ModelConfig cfg = small_config();
  ModelParams params = ModelParams::seeded(cfg, 13);
  params.w_score_q[1] = params.w_score_q[0];
  params.w_score_k[1] = params.w_score_k[0];
  const BiasList bias = two_phrases();
  const Matrix h = dvbias::nnref::random_acoustic(cfg, 5, 4);
  const dvbias::nnref::HiddenStates hs =
      dvbias::nnref::run_hidden(params, h, bias);
  const Matrix single = (params.w_score_k[0] * hs.e).transpose() *
                        (params.w_score_q[0] * hs.h_ca) /
                        std::sqrt(static_cast<double>(cfg.d_k));
  CHECK((hs.h_dv - single).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("softmax is invariant to per-frame logit shifts") {
  const ModelConfig cfg = small_config();
  const ModelParams params = ModelParams::seeded(cfg, 17);
  const BiasList bias = two_phrases();
  const Matrix h = dvbias::nnref::random_acoustic(cfg, 4, 6);
  dvbias::nnref::HiddenStates hs = dvbias::nnref::run_hidden(params, h, bias);
  const PosteriorMatrix base = dvbias::nnref::dynamic_softmax(hs.h_v, hs.h_dv);

  Matrix h_v = hs.h_v;
  Matrix h_dv = hs.h_dv;
  h_v.col(2).array() += 3.75;
  h_dv.col(2).array() += 3.75;
  const PosteriorMatrix shifted = dvbias::nnref::dynamic_softmax(h_v, h_dv);
  for (int t = 0; t < base.num_frames(); ++t) {
    for (int c = 0; c < base.width(); ++c) {
      CHECK(shifted.at(t, c) == doctest::Approx(base.at(t, c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("softmax survives logits far outside the exp range") {
  Matrix h_v(2, 1);
  h_v << 800.0, 798.0;
  Matrix h_dv(1, 1);
  h_dv << -750.0;
  const PosteriorMatrix m = dvbias::nnref::dynamic_softmax(h_v, h_dv);
  CHECK(std::isfinite(m.at(0, 0)));
  CHECK(m.at(0, 0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
  CHECK(m.at(0, 2) == doctest::Approx(0.0));
  CHECK(dvbias::validate_posteriors(m).ok());
}

TEST_CASE("mismatched logit widths are rejected") {
  Matrix h_v(3, 4);
  h_v.setZero();
  Matrix h_dv(2, 5);
  h_dv.setZero();
  CHECK(error_code_of([&] { dvbias::nnref::dynamic_softmax(h_v, h_dv); }) ==
        ErrorCode::kShapeMismatch);
}

TEST_CASE("phrase encoder rejects ids outside the embedding table") {
  const ModelConfig cfg = small_config();  // embeddings cover ids 0..5
  const ModelParams params = ModelParams::seeded(cfg, 19);
  const BiasList bias({BiasPhrase{"p", {7}}}, 8);
  CHECK(error_code_of([&] { dvbias::nnref::context_encode(bias, params); }) ==
        ErrorCode::kShapeMismatch);
}

TEST_CASE("mismatched acoustic width is rejected") {
  const ModelConfig cfg = small_config();
  const ModelParams params = ModelParams::seeded(cfg, 23);
  Matrix h(cfg.d + 1, 4);
  h.setZero();
  CHECK(error_code_of([&] {
          dvbias::nnref::forward(params, h, BiasList{});
        }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("forward agrees with the scalar re-implementation") {
  const ModelConfig cfg = small_config();
  const ModelParams params = ModelParams::seeded(cfg, 29);
  const BiasList bias = two_phrases();
  const Matrix h = dvbias::nnref::random_acoustic(cfg, 5, 8);
  const dvbias::nnref::HiddenStates hs =
      dvbias::nnref::run_hidden(params, h, bias);
  const dvbias::check::ReferenceForward ref =
      dvbias::check::reference_forward(params, h, bias);
  double max_err = 0.0;
  for (int r = 0; r < hs.h_ca.rows(); ++r) {
    for (int t = 0; t < hs.h_ca.cols(); ++t) {
      max_err = std::max(max_err, std::abs(hs.h_ca(r, t) - ref.h_ca[r][t]));
      max_err = std::max(max_err,
                         std::abs(hs.h_ca_proj(r, t) - ref.h_ca_proj[r][t]));
    }
  }
  for (int r = 0; r < hs.h_v.rows(); ++r) {
    for (int t = 0; t < hs.h_v.cols(); ++t) {
      max_err = std::max(max_err, std::abs(hs.h_v(r, t) - ref.h_v[r][t]));
    }
  }
  for (int r = 0; r < hs.h_dv.rows(); ++r) {
    for (int t = 0; t < hs.h_dv.cols(); ++t) {
      max_err = std::max(max_err, std::abs(hs.h_dv(r, t) - ref.h_dv[r][t]));
    }
  }
  CHECK(max_err < 1e-10);
}

TEST_CASE("deterministic forward for fixed seed and input") {
  const ModelConfig cfg = small_config();
  const ModelParams params = ModelParams::seeded(cfg, 31);
  const BiasList bias = two_phrases();
  const Matrix h = dvbias::nnref::random_acoustic(cfg, 7, 1);
  const PosteriorMatrix a = dvbias::nnref::forward(params, h, bias);
  const PosteriorMatrix b = dvbias::nnref::forward(params, h, bias);
  CHECK(a.values() == b.values());
}

}  // TEST_SUITE
