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
//
// Microbenchmarks over realistic desk-scale shapes: ~100-frame utterances,
// 64-subword vocabulary, a handful of bias phrases.

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "dvbias/decode.hpp"
#include "dvbias/fixture.hpp"
#include "dvbias/labels.hpp"
#include "dvbias/loss.hpp"
#include "dvbias/score.hpp"
#include "dvbias/types.hpp"

namespace {

dvbias::fixture::FixtureSpec bench_spec() {
  dvbias::fixture::FixtureSpec spec;
  spec.num_utterances = 10;
  spec.bias_prob = 1.0;
  spec.rho = 0.3;
  spec.mode = dvbias::labels::Strategy::kTa;
  spec.seed = 11;
  return spec;
}

const dvbias::fixture::Fixture& bench_fixture() {
  static const dvbias::fixture::Fixture f =
      dvbias::fixture::gen_fixture(bench_spec());
  return f;
}

// Uniform-noise posteriors, normalized per row.
dvbias::PosteriorMatrix noise_posteriors(int frames, int vocab_size,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  dvbias::PosteriorMatrix m(frames, vocab_size, 0);
  for (int t = 0; t < frames; ++t) {
    double sum = 0.0;
    for (int c = 0; c < m.width(); ++c) sum += (m.at(t, c) = unit(rng));
    for (int c = 0; c < m.width(); ++c) m.at(t, c) /= sum;
  }
  return m;
}

void BM_CtcLoss(benchmark::State& state) {
  const auto lp =
      dvbias::nnref::LogPosteriors::from(noise_posteriors(100, 70, 1));
  std::vector<dvbias::TokenId> target;
  for (int i = 0; i < 20; ++i) target.push_back(1 + i % 60);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dvbias::nnref::ctc_loss(lp, target));
  }
}
BENCHMARK(BM_CtcLoss);

void BM_GreedyDecode(benchmark::State& state) {
  const auto& utt = bench_fixture().utterances[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(dvbias::decode::greedy_decode(utt.posteriors));
  }
}
BENCHMARK(BM_GreedyDecode);

void BM_ConfidenceSearch(benchmark::State& state) {
  const auto& f = bench_fixture();
  const auto& utt = f.utterances[0];
  const dvbias::BiasList bias =
      dvbias::BiasList::from_texts(utt.bias_texts, f.vocab);
  const dvbias::BiasPhrase& phrase = bias.phrase(0);
  const int frames = utt.posteriors.num_frames();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dvbias::decode::confidence_search(utt.posteriors, 0, frames, phrase));
  }
}
BENCHMARK(BM_ConfidenceSearch);

void BM_DecodeTa(benchmark::State& state) {
  const auto& f = bench_fixture();
  const auto& utt = f.utterances[1];
  const dvbias::BiasList bias =
      dvbias::BiasList::from_texts(utt.bias_texts, f.vocab);
  const dvbias::decode::ActivationConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dvbias::decode::decode_utterance(
        utt.posteriors, bias, f.vocab, dvbias::decode::Mode::kTa, cfg));
  }
}
BENCHMARK(BM_DecodeTa);

void BM_Align(benchmark::State& state) {
  // Two ~100-word sequences differing in every tenth word.
  std::vector<std::string> ref, hyp;
  for (int i = 0; i < 100; ++i) {
    ref.push_back("w" + std::to_string(i % 23));
    hyp.push_back(i % 10 == 3 ? "x" : ref.back());
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(dvbias::score::align(ref, hyp));
  }
}
BENCHMARK(BM_Align);

void BM_GenFixture(benchmark::State& state) {
  const auto spec = bench_spec();
  for (auto _ : state) {
    benchmark::DoNotOptimize(dvbias::fixture::gen_fixture(spec));
  }
}
BENCHMARK(BM_GenFixture);

}  // namespace

BENCHMARK_MAIN();
