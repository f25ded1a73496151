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

#include "evsent/nn/optimizer.h"

#include <cmath>

namespace evsent {
namespace nn {

double GlobalGradNorm(const std::vector<Parameter*>& params) {
  double sq = 0.0;
  for (const Parameter* p : params) {
    if (p->trainable) sq += p->grad.squaredNorm();
  }
  return std::sqrt(sq);
}

double Adam::Step(const std::vector<Parameter*>& params, double grad_scale) {
  ++step_;
  const double norm = GlobalGradNorm(params) * std::abs(grad_scale);
  double scale = grad_scale;
  if (options_.clip_norm > 0 && norm > options_.clip_norm) {
    scale *= options_.clip_norm / norm;
  }
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double step_size =
      options_.learning_rate * std::sqrt(correction2) / correction1;
  for (Parameter* p : params) {
    if (!p->trainable) continue;
    auto g = (p->grad.array() * scale);
    p->m.array() = b1 * p->m.array() + (1.0 - b1) * g;
    p->v.array() = b2 * p->v.array() + (1.0 - b2) * g.square();
    p->value.array() -=
        step_size * p->m.array() /
        (p->v.array().sqrt() + options_.epsilon * std::sqrt(correction2));
  }
  return norm;
}

}  // namespace nn
}  // namespace evsent
