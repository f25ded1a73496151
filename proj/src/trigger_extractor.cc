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

#include "evsent/trigger_extractor.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evsent {

TriggerHead TriggerHead::Create(nn::ParameterStore& store, int hidden_size,
                                int feature_dim, int head_dim,
                                std::mt19937_64& rng) {
  TriggerHead head;
  head.fusion = nn::FeedForward::Create(store, "trigger.fusion",
                                        hidden_size + 2 * feature_dim,
                                        head_dim, head_dim, rng);
  head.start = nn::Linear::Create(store, "trigger.start", head_dim, 1, rng);
  head.end = nn::Linear::Create(store, "trigger.end", head_dim, 1, rng);
  return head;
}

nn::Var TriggerHead::Fuse(nn::Graph& g, nn::Var encoded, nn::Var pos,
                          nn::Var ner, double dropout,
                          std::mt19937_64* rng) const {
  const nn::Var parts[] = {encoded, pos, ner};
  int width = 0;
  for (nn::Var p : parts) width += static_cast<int>(g.value(p).cols());
  if (width != fusion.hidden.in()) {
    throw std::invalid_argument("TriggerHead::Fuse: input width " +
                                std::to_string(width) + ", expected " +
                                std::to_string(fusion.hidden.in()));
  }
  return fusion.Apply(g, nn::ConcatCols(g, parts), dropout, rng);
}

nn::Var TriggerHead::StartLogits(nn::Graph& g, nn::Var fused) const {
  return start.Apply(g, fused);
}

nn::Var TriggerHead::EndLogits(nn::Graph& g, nn::Var fused) const {
  return end.Apply(g, fused);
}

TriggerScores ScoreTriggers(const nn::Matrix& start_logits,
                            const nn::Matrix& end_logits) {
  TriggerScores s;
  for (Eigen::Index i = 0; i < start_logits.rows(); ++i) {
    s.p_start.push_back(nn::Sigmoid(start_logits(i, 0)));
    s.p_end.push_back(nn::Sigmoid(end_logits(i, 0)));
  }
  return s;
}

namespace {

double ClampedBce(double p, double y) {
  p = std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
  return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

}  // namespace

double TriggerLoss(const TriggerScores& scores, const nn::Matrix& start_targets,
                   const nn::Matrix& end_targets) {
  const size_t m = scores.p_start.size();
  if (scores.p_end.size() != m ||
      static_cast<size_t>(start_targets.rows()) != m ||
      static_cast<size_t>(end_targets.rows()) != m) {
    throw std::invalid_argument("TriggerLoss: length mismatch");
  }
  if (m == 0) return 0.0;
  double total = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    total += ClampedBce(scores.p_start[i], start_targets(r, 0)) +
             ClampedBce(scores.p_end[i], end_targets(r, 0));
  }
  return total / static_cast<double>(m);
}

nn::Var TriggerLossNode(nn::Graph& g, nn::Var start_logits, nn::Var end_logits,
                        const nn::Matrix& start_targets,
                        const nn::Matrix& end_targets,
                        double positive_weight) {
  const double m = static_cast<double>(g.value(start_logits).rows());
  nn::Var total = nn::Add(
      g, nn::BceWithLogitsSum(g, start_logits, start_targets, positive_weight),
      nn::BceWithLogitsSum(g, end_logits, end_targets, positive_weight));
  return nn::Scale(g, total, 1.0 / m);
}

std::vector<SpanBounds> DecodeTriggerSpans(const TriggerScores& scores,
                                           const SpanDecodeConfig& config,
                                           int first, int last) {
  const int m = static_cast<int>(scores.p_start.size());
  first = std::max(first, 0);
  last = std::min(last, m - 1);
  std::vector<int> starts;
  for (int i = first; i <= last; ++i) {
    if (scores.p_start[static_cast<size_t>(i)] >= config.threshold) {
      starts.push_back(i);
    }
  }
  std::vector<SpanBounds> spans;
  for (size_t k = 0; k < starts.size(); ++k) {
    const int i = starts[k];
    int limit = std::min(last, i + config.max_length - 1);
    if (k + 1 < starts.size()) limit = std::min(limit, starts[k + 1] - 1);
    int end = i;
    for (int j = i; j <= limit; ++j) {
      if (scores.p_end[static_cast<size_t>(j)] >= config.threshold) {
        end = j;
        break;
      }
    }
    spans.emplace_back(i, end);
  }
  return spans;
}

std::vector<SpanBounds> DecodeTriggerSpans(const TriggerScores& scores,
                                           const SpanDecodeConfig& config) {
  const int m = static_cast<int>(scores.p_start.size());
  return DecodeTriggerSpans(scores, config, 1, m - 2);
}

}  // namespace evsent
