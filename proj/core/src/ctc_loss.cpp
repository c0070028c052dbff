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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dvbias/loss.hpp"

namespace dvbias::nnref {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp2(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

void check_target(const LogPosteriors& lp, std::span<const TokenId> target) {
  for (TokenId id : target) {
    if (id <= kBlankId || id >= lp.width) {
      throw Error(ErrorCode::kShapeMismatch,
                  "target id " + std::to_string(id) +
                      " outside (0, " + std::to_string(lp.width) + ")");
    }
  }
}

}  // namespace

LogPosteriors LogPosteriors::from(const PosteriorMatrix& m) {
  LogPosteriors lp;
  lp.num_frames = m.num_frames();
  lp.width = m.width();
  lp.values.resize(m.values().size());
  for (std::size_t i = 0; i < lp.values.size(); ++i) {
    lp.values[i] = std::log(m.values()[i]);
  }
  return lp;
}

int min_frames_for_target(std::span<const TokenId> target) {
  int frames = static_cast<int>(target.size());
  for (std::size_t i = 1; i < target.size(); ++i) {
    if (target[i] == target[i - 1]) ++frames;
  }
  return frames;
}

LossResult ctc_loss(const LogPosteriors& lp, std::span<const TokenId> target) {
  check_target(lp, target);
  const int t_frames = lp.num_frames;
  const int len = static_cast<int>(target.size());
  if (min_frames_for_target(target) > t_frames) {
    throw Error(ErrorCode::kInfeasibleTarget,
                "target needs " +
                    std::to_string(min_frames_for_target(target)) +
                    " frames but only " + std::to_string(t_frames) +
                    " are available");
  }

  LossResult result;
  result.grad.assign(lp.values.size(), 0.0);
  if (t_frames == 0) {
    // Feasibility above forces an empty target: probability 1, loss 0.
    return result;
  }

  // Extended target [blank, l_1, blank, ..., l_L, blank] of size 2L+1.
  const int s_len = 2 * len + 1;
  auto label_at = [&](int s) -> TokenId {
    return (s % 2 == 0) ? kBlankId : target[s / 2];
  };
  auto skip_allowed = [&](int s) {
    // The s-2 shortcut exists for non-blank states whose previous label
    // differs (a blank is mandatory between repeats).
    return s % 2 == 1 && s >= 2 && label_at(s) != label_at(s - 2);
  };

  // alpha[t][s] includes the emission at frame t; beta[t][s] excludes it.
  std::vector<double> alpha(static_cast<std::size_t>(t_frames) * s_len,
                            kNegInf);
  std::vector<double> beta(static_cast<std::size_t>(t_frames) * s_len,
                           kNegInf);
  auto a = [&](int t, int s) -> double& {
    return alpha[static_cast<std::size_t>(t) * s_len + s];
  };
  auto b = [&](int t, int s) -> double& {
    return beta[static_cast<std::size_t>(t) * s_len + s];
  };

  a(0, 0) = lp.at(0, kBlankId);
  if (s_len > 1) a(0, 1) = lp.at(0, label_at(1));
  for (int t = 1; t < t_frames; ++t) {
    for (int s = 0; s < s_len; ++s) {
      double acc = a(t - 1, s);
      if (s >= 1) acc = logsumexp2(acc, a(t - 1, s - 1));
      if (skip_allowed(s)) acc = logsumexp2(acc, a(t - 1, s - 2));
      if (acc != kNegInf) a(t, s) = acc + lp.at(t, label_at(s));
    }
  }

  double log_p = a(t_frames - 1, s_len - 1);
  if (s_len > 1) log_p = logsumexp2(log_p, a(t_frames - 1, s_len - 2));

  if (log_p == kNegInf) {
    result.loss = std::numeric_limits<double>::infinity();
    return result;
  }
  result.loss = -log_p;

  b(t_frames - 1, s_len - 1) = 0.0;
  if (s_len > 1) b(t_frames - 1, s_len - 2) = 0.0;
  for (int t = t_frames - 2; t >= 0; --t) {
    for (int s = 0; s < s_len; ++s) {
      double acc = b(t + 1, s) == kNegInf
                       ? kNegInf
                       : b(t + 1, s) + lp.at(t + 1, label_at(s));
      if (s + 1 < s_len && b(t + 1, s + 1) != kNegInf) {
        acc = logsumexp2(acc, b(t + 1, s + 1) + lp.at(t + 1, label_at(s + 1)));
      }
      if (s + 2 < s_len && skip_allowed(s + 2) && b(t + 1, s + 2) != kNegInf) {
        acc = logsumexp2(acc, b(t + 1, s + 2) + lp.at(t + 1, label_at(s + 2)));
      }
      b(t, s) = acc;
    }
  }

  // d(-logP)/d lp(t,c) = -exp(lse over {s: label(s)=c} of alpha+beta - logP).
  std::vector<double> per_label(lp.width);
  for (int t = 0; t < t_frames; ++t) {
    std::fill(per_label.begin(), per_label.end(), kNegInf);
    for (int s = 0; s < s_len; ++s) {
      const double g = a(t, s) == kNegInf || b(t, s) == kNegInf
                           ? kNegInf
                           : a(t, s) + b(t, s);
      if (g == kNegInf) continue;
      TokenId c = label_at(s);
      per_label[c] = logsumexp2(per_label[c], g);
    }
    for (TokenId c = 0; c < lp.width; ++c) {
      if (per_label[c] != kNegInf) {
        result.grad[static_cast<std::size_t>(t) * lp.width + c] =
            -std::exp(per_label[c] - log_p);
      }
    }
  }
  return result;
}

LossResult bias_loss(const LogPosteriors& lp,
                     const std::vector<labels::PhraseOccurrence>& occurrences,
                     const BiasList& bias) {
  if (occurrences.empty()) {
    LossResult zero;
    zero.grad.assign(lp.values.size(), 0.0);
    return zero;
  }
  std::vector<labels::PhraseOccurrence> ordered = occurrences;
  std::sort(ordered.begin(), ordered.end(),
            [](const labels::PhraseOccurrence& x,
               const labels::PhraseOccurrence& y) { return x.begin < y.begin; });
  std::vector<TokenId> target;
  for (const labels::PhraseOccurrence& occ : ordered) {
    const std::vector<TokenId>& sub = bias.phrase(occ.phrase).subwords;
    target.insert(target.end(), sub.begin(), sub.end());
  }
  return ctc_loss(lp, target);
}

LossResult joint_loss(const LogPosteriors& lp,
                      std::span<const TokenId> target,
                      const std::vector<labels::PhraseOccurrence>& occurrences,
                      const BiasList& bias, const LossConfig& cfg) {
  if (cfg.lambda1 < 0.0 || cfg.lambda2 < 0.0) {
    throw Error(ErrorCode::kInvalidSpec, "loss weights must be >= 0");
  }
  LossResult ctc = ctc_loss(lp, target);
  LossResult total;
  // A zero weight removes its term even when the term is +inf.
  total.loss = cfg.lambda1 == 0.0 ? 0.0 : cfg.lambda1 * ctc.loss;
  total.grad.resize(lp.values.size());
  for (std::size_t i = 0; i < total.grad.size(); ++i) {
    total.grad[i] = cfg.lambda1 * ctc.grad[i];
  }
  if (cfg.bias_loss_enabled && cfg.lambda2 > 0.0) {
    LossResult b = bias_loss(lp, occurrences, bias);
    total.loss += cfg.lambda2 * b.loss;
    for (std::size_t i = 0; i < total.grad.size(); ++i) {
      total.grad[i] += cfg.lambda2 * b.grad[i];
    }
  }
  return total;
}

}  // namespace dvbias::nnref
