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

#ifndef EVSENT_NN_LAYERS_H_
#define EVSENT_NN_LAYERS_H_

#include <random>
#include <string>

#include "evsent/nn/graph.h"
#include "evsent/nn/parameter.h"

namespace evsent {
namespace nn {

// y = x W + b with W stored (in x out) and b (1 x out).
struct Linear {
  Parameter* weight = nullptr;
  Parameter* bias = nullptr;

  static Linear Create(ParameterStore& store, const std::string& name,
                       int in, int out, std::mt19937_64& rng);
  Var Apply(Graph& g, Var x) const;
  int in() const { return static_cast<int>(weight->value.rows()); }
  int out() const { return static_cast<int>(weight->value.cols()); }
};

// One hidden layer with GELU and dropout on the hidden activations:
//   FFN(x) = Dropout(GELU(x W1 + b1)) W2 + b2
struct FeedForward {
  Linear hidden;
  Linear output;

  static FeedForward Create(ParameterStore& store, const std::string& name,
                            int in, int hidden_width, int out,
                            std::mt19937_64& rng);
  Var Apply(Graph& g, Var x, double dropout, std::mt19937_64* rng) const;
};

}  // namespace nn
}  // namespace evsent

#endif  // EVSENT_NN_LAYERS_H_
