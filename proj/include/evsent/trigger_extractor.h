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

// Feature-enhanced trigger extraction: fusion of encoder output with POS/NER
// embeddings, start/end scoring, binary cross-entropy loss and span decoding.
//
// All position vectors here are sequence-indexed (row 0 is [CLS]).

#ifndef EVSENT_TRIGGER_EXTRACTOR_H_
#define EVSENT_TRIGGER_EXTRACTOR_H_

#include <random>
#include <utility>
#include <vector>

#include "evsent/nn/graph.h"
#include "evsent/nn/layers.h"
#include "evsent/nn/parameter.h"

namespace evsent {

// Clamp applied to probabilities inside cross-entropy.
inline constexpr double kProbabilityEpsilon = 1e-7;

struct TriggerScores {
  std::vector<double> p_start;
  std::vector<double> p_end;
};

struct SpanDecodeConfig {
  double threshold = 0.5;
  int max_length = 10;  // tokens, inclusive span
};

// Inclusive (start, end) position pair.
using SpanBounds = std::pair<int, int>;

struct TriggerHead {
  nn::FeedForward fusion;  // (H + 2F) -> D
  nn::Linear start;        // D -> 1
  nn::Linear end;          // D -> 1

  static TriggerHead Create(nn::ParameterStore& store, int hidden_size,
                            int feature_dim, int head_dim,
                            std::mt19937_64& rng);
  int head_dim() const { return fusion.output.out(); }

  // x^f = FFN([x^w; x^pos; x^ner]), m x D.
  nn::Var Fuse(nn::Graph& g, nn::Var encoded, nn::Var pos, nn::Var ner,
               double dropout, std::mt19937_64* rng) const;
  nn::Var StartLogits(nn::Graph& g, nn::Var fused) const;
  nn::Var EndLogits(nn::Graph& g, nn::Var fused) const;
};

// Logistic squashing of m x 1 logit columns.
TriggerScores ScoreTriggers(const nn::Matrix& start_logits,
                            const nn::Matrix& end_logits);

// Mean over positions of start plus end cross-entropy, probabilities clamped
// to [eps, 1 - eps].
double TriggerLoss(const TriggerScores& scores, const nn::Matrix& start_targets,
                   const nn::Matrix& end_targets);

// Graph version computed from logits: (BCE(start) + BCE(end)) / m.
nn::Var TriggerLossNode(nn::Graph& g, nn::Var start_logits, nn::Var end_logits,
                        const nn::Matrix& start_targets,
                        const nn::Matrix& end_targets,
                        double positive_weight = 1.0);

// Pairs each start with the nearest end at or after it, no longer than
// max_length and before the next start; a start without such an end becomes
// a one-token span. Positions outside [first, last] are ignored.
std::vector<SpanBounds> DecodeTriggerSpans(const TriggerScores& scores,
                                           const SpanDecodeConfig& config,
                                           int first, int last);
// Masks the two boundary positions.
std::vector<SpanBounds> DecodeTriggerSpans(const TriggerScores& scores,
                                           const SpanDecodeConfig& config);

}  // namespace evsent

#endif  // EVSENT_TRIGGER_EXTRACTOR_H_
