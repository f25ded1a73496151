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

// Trigger-conditioned argument extraction for the four roles.

#ifndef EVSENT_ARGUMENT_EXTRACTOR_H_
#define EVSENT_ARGUMENT_EXTRACTOR_H_

#include <array>
#include <optional>
#include <random>
#include <vector>

#include "evsent/corpus.h"
#include "evsent/nn/graph.h"
#include "evsent/nn/layers.h"
#include "evsent/nn/parameter.h"
#include "evsent/trigger_extractor.h"

namespace evsent {

// Per-role probabilities; column r of each m x 4 matrix belongs to role r.
struct RoleScores {
  nn::Matrix p_start;
  nn::Matrix p_end;
};

using RoleSpans = std::array<std::optional<SpanBounds>, kNumRoles>;

struct ArgumentHead {
  nn::FeedForward fusion;  // (3D + F) -> D, shared by all roles
  // D -> 4; column r is the affine map of role r.
  nn::Linear start;
  nn::Linear end;

  static ArgumentHead Create(nn::ParameterStore& store, int head_dim,
                             int feature_dim, std::mt19937_64& rng);

  // x^t_i = FFN([x^f_i; x^f_{start}; x^f_{end}; x^position_i]). With
  // `use_trigger_info` false the trigger rows and position embeddings are
  // replaced by zeros of the same width.
  nn::Var Condition(nn::Graph& g, nn::Var fused, int trigger_start,
                    int trigger_end, nn::Var position, bool use_trigger_info,
                    double dropout, std::mt19937_64* rng) const;
  nn::Var StartLogits(nn::Graph& g, nn::Var conditioned) const;
  nn::Var EndLogits(nn::Graph& g, nn::Var conditioned) const;
};

RoleScores ScoreArguments(const nn::Matrix& start_logits,
                          const nn::Matrix& end_logits);

// Mean over events, roles and positions of start plus end cross-entropy.
// `targets[k]` pairs with `scores[k]`; returns 0 for no events.
double ArgumentLoss(const std::vector<RoleScores>& scores,
                    const std::vector<RoleTargets>& targets);

// One event's contribution: (BCE(start) + BCE(end)) / (4 m).
nn::Var ArgumentLossNode(nn::Graph& g, nn::Var start_logits,
                         nn::Var end_logits, const RoleTargets& targets);

// For each role the (i, j), i <= j, j - i + 1 <= max_length, maximizing
// p_start[i] * p_end[j] with both at or above threshold. Ties keep the first
// pair in (i, j) scan order. Positions outside [first, last] are ignored.
RoleSpans DecodeArguments(const RoleScores& scores,
                          const SpanDecodeConfig& config, int first, int last);
RoleSpans DecodeArguments(const RoleScores& scores,
                          const SpanDecodeConfig& config);

}  // namespace evsent

#endif  // EVSENT_ARGUMENT_EXTRACTOR_H_
