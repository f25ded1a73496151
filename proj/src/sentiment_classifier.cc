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

#include "evsent/sentiment_classifier.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evsent/trigger_extractor.h"

namespace evsent {

SentimentHead SentimentHead::Create(nn::ParameterStore& store, int head_dim,
                                    int feature_dim, std::mt19937_64& rng) {
  SentimentHead head;
  head.classifier = nn::Linear::Create(store, "sentiment.classifier",
                                       head_dim + feature_dim, kNumPolarities,
                                       rng);
  return head;
}

nn::Var SentimentHead::EventRepresentation(nn::Graph& g, nn::Var conditioned,
                                           nn::Var role_embeddings) {
  const int m = static_cast<int>(g.value(conditioned).rows());
  if (m <= 2) {
    throw std::invalid_argument(
        "EventRepresentation: document has no non-special tokens");
  }
  const nn::Var parts[] = {conditioned, role_embeddings};
  return nn::MaxPoolRows(g, nn::ConcatCols(g, parts), 1, m - 2);
}

nn::Var SentimentHead::Logits(nn::Graph& g, nn::Var representation) const {
  return classifier.Apply(g, representation);
}

PolarityProbs Classify(const nn::Matrix& logits) {
  if (logits.size() != kNumPolarities) {
    throw std::invalid_argument("Classify: expected three logits");
  }
  const double mx = logits.maxCoeff();
  PolarityProbs p;
  double denom = 0.0;
  for (int c = 0; c < kNumPolarities; ++c) {
    p[static_cast<size_t>(c)] = std::exp(logits.data()[c] - mx);
    denom += p[static_cast<size_t>(c)];
  }
  for (double& v : p) v /= denom;
  return p;
}

Polarity ArgmaxPolarity(const PolarityProbs& probs) {
  return static_cast<Polarity>(
      std::max_element(probs.begin(), probs.end()) - probs.begin());
}

double SentimentLoss(const std::vector<PolarityProbs>& predictions,
                     const std::vector<int>& gold) {
  if (predictions.size() != gold.size()) {
    throw std::invalid_argument("SentimentLoss: one prediction per event");
  }
  if (gold.empty()) return 0.0;
  double total = 0.0;
  for (size_t k = 0; k < gold.size(); ++k) {
    const double p = predictions[k].at(static_cast<size_t>(gold[k]));
    total -= std::log(std::max(p, kProbabilityEpsilon));
  }
  return total / static_cast<double>(gold.size());
}

}  // namespace evsent
