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

#ifndef EVSENT_NN_OPTIMIZER_H_
#define EVSENT_NN_OPTIMIZER_H_

#include <vector>

#include "evsent/nn/parameter.h"

namespace evsent {
namespace nn {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Global gradient norm clip; <= 0 disables clipping.
  double clip_norm = 1.0;
};

// Adam with bias correction. Moment estimates live on the parameters.
class Adam {
 public:
  explicit Adam(AdamOptions options) : options_(options) {}

  // Scales gradients by `grad_scale`, clips and applies one update to every
  // trainable parameter. Returns the global gradient norm before clipping.
  double Step(const std::vector<Parameter*>& params, double grad_scale = 1.0);

  long steps() const { return step_; }
  const AdamOptions& options() const { return options_; }
  void set_learning_rate(double lr) { options_.learning_rate = lr; }

 private:
  AdamOptions options_;
  long step_ = 0;
};

double GlobalGradNorm(const std::vector<Parameter*>& params);

}  // namespace nn
}  // namespace evsent

#endif  // EVSENT_NN_OPTIMIZER_H_
