// Copyright 2026 The evsent Authors.
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

#include "evsent/argument_extractor.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evsent {

ArgumentHead ArgumentHead::Create(nn::ParameterStore& store, int head_dim,
                                  int feature_dim, std::mt19937_64& rng) {
  ArgumentHead head;
  head.fusion = nn::FeedForward::Create(store, "argument.fusion",
                                        3 * head_dim + feature_dim, head_dim,
                                        head_dim, rng);
  head.start =
      nn::Linear::Create(store, "argument.start", head_dim, kNumRoles, rng);
  head.end = nn::Linear::Create(store, "argument.end", head_dim, kNumRoles, rng);
  return head;
}

nn::Var ArgumentHead::Condition(nn::Graph& g, nn::Var fused, int trigger_start,
                                int trigger_end, nn::Var position,
                                bool use_trigger_info, double dropout,
                                std::mt19937_64* rng) const {
  const nn::Matrix& f = g.value(fused);
  const int m = static_cast<int>(f.rows());
  if (trigger_start < 0 || trigger_end < trigger_start || trigger_end >= m) {
    throw std::out_of_range("ArgumentHead::Condition: trigger (" +
                            std::to_string(trigger_start) + "," +
                            std::to_string(trigger_end) +
                            ") outside sequence of length " +
                            std::to_string(m));
  }
  nn::Var head, tail, pos;
  if (use_trigger_info) {
    head = nn::RepeatRow(g, fused, trigger_start, m);
    tail = nn::RepeatRow(g, fused, trigger_end, m);
    pos = position;
  } else {
    head = g.Constant(nn::Matrix::Zero(m, f.cols()));
    tail = head;
    pos = g.Constant(nn::Matrix::Zero(m, g.value(position).cols()));
  }
  const nn::Var parts[] = {fused, head, tail, pos};
  return fusion.Apply(g, nn::ConcatCols(g, parts), dropout, rng);
}

nn::Var ArgumentHead::StartLogits(nn::Graph& g, nn::Var conditioned) const {
  return start.Apply(g, conditioned);
}

nn::Var ArgumentHead::EndLogits(nn::Graph& g, nn::Var conditioned) const {
  return end.Apply(g, conditioned);
}

RoleScores ScoreArguments(const nn::Matrix& start_logits,
                          const nn::Matrix& end_logits) {
  auto sigmoid = [](const nn::Matrix& z) {
    nn::Matrix p(z.rows(), z.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      p.data()[i] = nn::Sigmoid(z.data()[i]);
    }
    return p;
  };
  return RoleScores{sigmoid(start_logits), sigmoid(end_logits)};
}

double ArgumentLoss(const std::vector<RoleScores>& scores,
                    const std::vector<RoleTargets>& targets) {
  if (scores.size() != targets.size()) {
    throw std::invalid_argument("ArgumentLoss: one target set per event");
  }
  if (scores.empty()) return 0.0;
  auto bce = [](double p, double y) {
    p = std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
    return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  };
  double total = 0.0;
  for (size_t k = 0; k < scores.size(); ++k) {
    const RoleScores& s = scores[k];
    const RoleTargets& t = targets[k];
    if (s.p_start.rows() != t.start.rows() ||
        s.p_start.cols() != kNumRoles) {
      throw std::invalid_argument("ArgumentLoss: shape mismatch");
    }
    double event_total = 0.0;
    for (Eigen::Index i = 0; i < s.p_start.size(); ++i) {
      event_total += bce(s.p_start.data()[i], t.start.data()[i]) +
                     bce(s.p_end.data()[i], t.end.data()[i]);
    }
    total += event_total / static_cast<double>(s.p_start.size());
  }
  return total / static_cast<double>(scores.size());
}

nn::Var ArgumentLossNode(nn::Graph& g, nn::Var start_logits,
                         nn::Var end_logits, const RoleTargets& targets) {
  const double n = static_cast<double>(g.value(start_logits).size());
  nn::Var total =
      nn::Add(g, nn::BceWithLogitsSum(g, start_logits, targets.start),
              nn::BceWithLogitsSum(g, end_logits, targets.end));
  return nn::Scale(g, total, 1.0 / n);
}

RoleSpans DecodeArguments(const RoleScores& scores,
                          const SpanDecodeConfig& config, int first,
                          int last) {
  const int m = static_cast<int>(scores.p_start.rows());
  first = std::max(first, 0);
  last = std::min(last, m - 1);
  RoleSpans out;
  for (int r = 0; r < kNumRoles; ++r) {
    double best = -1.0;
    for (int i = first; i <= last; ++i) {
      const double ps = scores.p_start(i, r);
      if (ps < config.threshold) continue;
      const int limit = std::min(last, i + config.max_length - 1);
      for (int j = i; j <= limit; ++j) {
        const double pe = scores.p_end(j, r);
        if (pe < config.threshold) continue;
        if (ps * pe > best) {
          best = ps * pe;
          out[static_cast<size_t>(r)] = SpanBounds(i, j);
        }
      }
    }
  }
  return out;
}

RoleSpans DecodeArguments(const RoleScores& scores,
                          const SpanDecodeConfig& config) {
  const int m = static_cast<int>(scores.p_start.rows());
  return DecodeArguments(scores, config, 1, m - 2);
}

}  // namespace evsent
