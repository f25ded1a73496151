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

#include "evsent/nn/layers.h"

namespace evsent {
namespace nn {

Linear Linear::Create(ParameterStore& store, const std::string& name, int in,
                      int out, std::mt19937_64& rng) {
  Linear l;
  l.weight = &store.CreateXavier(name + ".weight", in, out, rng);
  l.bias = &store.Create(name + ".bias", 1, out);
  return l;
}

Var Linear::Apply(Graph& g, Var x) const {
  return AddRowBroadcast(g, MatMul(g, x, g.Param(*weight)), g.Param(*bias));
}

FeedForward FeedForward::Create(ParameterStore& store, const std::string& name,
                                int in, int hidden_width, int out,
                                std::mt19937_64& rng) {
  FeedForward f;
  f.hidden = Linear::Create(store, name + ".hidden", in, hidden_width, rng);
  f.output = Linear::Create(store, name + ".output", hidden_width, out, rng);
  return f;
}

Var FeedForward::Apply(Graph& g, Var x, double dropout,
                       std::mt19937_64* rng) const {
  Var h = Gelu(g, hidden.Apply(g, x));
  h = Dropout(g, h, dropout, rng);
  return output.Apply(g, h);
}

}  // namespace nn
}  // namespace evsent
