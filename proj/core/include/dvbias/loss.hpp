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

#ifndef DVBIAS_LOSS_HPP_
#define DVBIAS_LOSS_HPP_

#include <span>
#include <vector>

#include "dvbias/labels.hpp"
#include "dvbias/types.hpp"

namespace dvbias::nnref {

// T x (V + n) natural-log probabilities, row-major. Losses differentiate
// with respect to these entries directly; renormalization is the caller's
// concern.
struct LogPosteriors {
  int num_frames = 0;
  int width = 0;
  std::vector<double> values;

  static LogPosteriors from(const PosteriorMatrix& m);

  double at(int frame, TokenId id) const {
    return values[static_cast<std::size_t>(frame) * width + id];
  }
  double& at(int frame, TokenId id) {
    return values[static_cast<std::size_t>(frame) * width + id];
  }
};

// Loss value plus gradient w.r.t. every log-posterior entry, same layout
// as the input. When the loss is +inf the gradient is all zeros.
struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;  // T x width, row-major
};

struct LossConfig {
  double lambda1 = 0.3;   // CTC term weight
  double lambda2 = 0.05;  // bias term weight
  bool bias_loss_enabled = true;
};

// Number of frames a CTC target needs at minimum: |target| plus one
// mandatory blank per adjacent repeated label.
int min_frames_for_target(std::span<const TokenId> target);

// CTC negative log-likelihood by log-space forward-backward. Target ids
// must lie in (0, width); repeats are allowed and cost an extra frame each.
// Throws INFEASIBLE_TARGET when the target cannot fit in T frames. The
// empty target is the all-blank labeling.
LossResult ctc_loss(const LogPosteriors& lp, std::span<const TokenId> target);

inline LossResult ctc_loss(const LogPosteriors& lp,
                           const labels::TargetSequence& target) {
  return ctc_loss(lp, target.tokens);
}

// CTC loss whose target is the concatenation, in transcript order, of the
// subwords of every occurring phrase. No occurrences: loss 0, zero grad.
LossResult bias_loss(const LogPosteriors& lp,
                     const std::vector<labels::PhraseOccurrence>& occurrences,
                     const BiasList& bias);

// lambda1 * ctc + lambda2 * bias; the bias term is skipped entirely when
// disabled.
LossResult joint_loss(const LogPosteriors& lp,
                      std::span<const TokenId> target,
                      const std::vector<labels::PhraseOccurrence>& occurrences,
                      const BiasList& bias, const LossConfig& cfg);

}  // namespace dvbias::nnref

#endif  // DVBIAS_LOSS_HPP_
