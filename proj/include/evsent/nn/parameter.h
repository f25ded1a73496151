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

#ifndef EVSENT_NN_PARAMETER_H_
#define EVSENT_NN_PARAMETER_H_

#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace evsent {
namespace nn {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A named trainable tensor with its accumulated gradient and optimizer state.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  // Adam first and second moment estimates.
  Matrix m;
  Matrix v;
  bool trainable = true;

  void ZeroGrad() { grad.setZero(value.rows(), value.cols()); }
};

// Owns parameters by name with stable addresses. Iteration order is the
// creation order, which fixes the checkpoint layout.
class ParameterStore {
 public:
  Parameter& Create(const std::string& name, int rows, int cols);
  // Xavier-uniform initialization for a (fan_in x fan_out) weight.
  Parameter& CreateXavier(const std::string& name, int rows, int cols,
                          std::mt19937_64& rng);
  Parameter& CreateNormal(const std::string& name, int rows, int cols,
                          double stddev, std::mt19937_64& rng);
  Parameter& CreateConstant(const std::string& name, int rows, int cols,
                            double value);

  Parameter* Find(const std::string& name);
  const Parameter* Find(const std::string& name) const;
  Parameter& Get(const std::string& name);

  const std::vector<Parameter*>& all() const { return order_; }
  size_t size() const { return order_.size(); }
  long NumScalars() const;

  void ZeroGrad();
  void SetAll(double value);

 private:
  std::map<std::string, std::unique_ptr<Parameter>> by_name_;
  std::vector<Parameter*> order_;
};

}  // namespace nn
}  // namespace evsent

#endif  // EVSENT_NN_PARAMETER_H_
