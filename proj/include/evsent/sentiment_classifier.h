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

// Event representation by max-pooling and three-way polarity classification.
// Class order is fixed as [P, N, O].

#ifndef EVSENT_SENTIMENT_CLASSIFIER_H_
#define EVSENT_SENTIMENT_CLASSIFIER_H_

#include <array>
#include <random>
#include <vector>

#include "evsent/corpus.h"
#include "evsent/nn/graph.h"
#include "evsent/nn/layers.h"
#include "evsent/nn/parameter.h"

namespace evsent {

using PolarityProbs = std::array<double, kNumPolarities>;

struct SentimentHead {
  nn::Linear classifier;  // (D + F) -> 3

  static SentimentHead Create(nn::ParameterStore& store, int head_dim,
                              int feature_dim, std::mt19937_64& rng);

  // Coordinate-wise max of [x^t_i; x^r_i] over rows 1 .. m-2. Throws
  // std::invalid_argument when there is no such row.
  static nn::Var EventRepresentation(nn::Graph& g, nn::Var conditioned,
                                     nn::Var role_embeddings);
  nn::Var Logits(nn::Graph& g, nn::Var representation) const;
};

// Softmax of a 1 x 3 logit row.
PolarityProbs Classify(const nn::Matrix& logits);
Polarity ArgmaxPolarity(const PolarityProbs& probs);

// Mean categorical cross-entropy, probabilities clamped from below; 0 for no
// events.
double SentimentLoss(const std::vector<PolarityProbs>& predictions,
                     const std::vector<int>& gold);

}  // namespace evsent

#endif  // EVSENT_SENTIMENT_CLASSIFIER_H_
