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
// Independent oracle implementations. Everything here is deliberately
// written as straight-line scalar code with exhaustive enumeration where
// feasible, sharing no algorithmic shortcuts with the library under test.

#ifndef DVBIAS_CHECK_HPP_
#define DVBIAS_CHECK_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dvbias/loss.hpp"
#include "dvbias/nnref.hpp"
#include "dvbias/types.hpp"

namespace dvbias::check {

// -log of the summed probability over every frame labeling whose CTC
// collapse equals `target`, by enumerating all width^T labelings in linear
// space. +inf when no labeling matches. Practical for T <= 7, width <= 6.
double brute_force_ctc_loss(const nnref::LogPosteriors& lp,
                            std::span<const TokenId> target);

// Central finite differences of `loss_fn`-style joint loss w.r.t. each
// log-posterior entry, reusing the analytic loss value routine only.
std::vector<double> finite_difference_gradient(
    const nnref::LogPosteriors& lp, std::span<const TokenId> target,
    const std::vector<labels::PhraseOccurrence>& occurrences,
    const BiasList& bias, const nnref::LossConfig& cfg, double h);

// Scalar row-by-row re-implementation of the full forward pass, nested
// loops only, no linear-algebra library and no numerical stabilization.
struct ReferenceForward {
  std::vector<std::vector<double>> h_ca;       // d x T
  std::vector<std::vector<double>> h_ca_proj;  // d x T
  std::vector<std::vector<double>> h_v;        // V x T
  std::vector<std::vector<double>> h_dv;       // n x T
  std::vector<std::vector<double>> posterior;  // T rows of width V+n
};
ReferenceForward reference_forward(const nnref::ModelParams& params,
                                   const nnref::Matrix& h,
                                   const BiasList& bias);

// Maximum, over every strictly increasing frame assignment in
// [window_begin, window_end) obeying the repeat-blank gap, of the
// left-to-right accumulated posterior sum. -inf when none is feasible.
double brute_force_confidence(const PosteriorMatrix& m, int window_begin,
                              int window_end,
                              std::span<const TokenId> subwords);

// Edit distance by plain recursion over both suffixes; no memoization, no
// DP table. Practical for lengths <= 8.
int brute_force_edit_distance(const std::vector<std::string>& ref,
                              const std::vector<std::string>& hyp);

struct SuiteResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  double max_err = 0.0;
  double seconds = 0.0;

  bool ok() const { return failures == 0; }
};

// Each suite draws seeded random instances and compares the library
// against the oracles above. Tolerances are fixed here, not configurable:
// loss 1e-9 absolute, forward 1e-10 absolute, gradient relative 1e-4
// (denominator floored at 1e-3 to keep finite-difference noise on
// near-zero entries from registering), confidence and alignment exact.
SuiteResult run_ctc_loss_suite(int instances, std::uint64_t seed);
SuiteResult run_gradient_suite(int instances, std::uint64_t seed);
SuiteResult run_forward_suite(std::uint64_t seed);
SuiteResult run_confidence_suite(int instances, std::uint64_t seed);
SuiteResult run_align_suite(int pairs, std::uint64_t seed);

// Suites at selfcheck sizes (smaller instance counts, same tolerances).
std::vector<SuiteResult> run_all_suites(std::uint64_t seed);

}  // namespace dvbias::check

#endif  // DVBIAS_CHECK_HPP_
