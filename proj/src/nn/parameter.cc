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

#include "evsent/nn/parameter.h"

#include <cmath>
#include <stdexcept>

namespace evsent {
namespace nn {

Parameter& ParameterStore::Create(const std::string& name, int rows,
                                  int cols) {
  if (by_name_.count(name) > 0) {
    throw std::logic_error("duplicate parameter: " + name);
  }
  auto param = std::make_unique<Parameter>();
  param->name = name;
  param->value = Matrix::Zero(rows, cols);
  param->grad = Matrix::Zero(rows, cols);
  param->m = Matrix::Zero(rows, cols);
  param->v = Matrix::Zero(rows, cols);
  Parameter* raw = param.get();
  by_name_[name] = std::move(param);
  order_.push_back(raw);
  return *raw;
}

Parameter& ParameterStore::CreateXavier(const std::string& name, int rows,
                                        int cols, std::mt19937_64& rng) {
  Parameter& p = Create(name, rows, cols);
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Eigen::Index i = 0; i < p.value.size(); ++i) {
    p.value.data()[i] = dist(rng);
  }
  return p;
}

Parameter& ParameterStore::CreateNormal(const std::string& name, int rows,
                                        int cols, double stddev,
                                        std::mt19937_64& rng) {
  Parameter& p = Create(name, rows, cols);
  std::normal_distribution<double> dist(0.0, stddev);
  for (Eigen::Index i = 0; i < p.value.size(); ++i) {
    p.value.data()[i] = dist(rng);
  }
  return p;
}

Parameter& ParameterStore::CreateConstant(const std::string& name, int rows,
                                          int cols, double value) {
  Parameter& p = Create(name, rows, cols);
  p.value.setConstant(value);
  return p;
}

Parameter* ParameterStore::Find(const std::string& name) {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second.get();
}

const Parameter* ParameterStore::Find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second.get();
}

Parameter& ParameterStore::Get(const std::string& name) {
  Parameter* p = Find(name);
  if (p == nullptr) throw std::out_of_range("no such parameter: " + name);
  return *p;
}

long ParameterStore::NumScalars() const {
  long total = 0;
  for (const Parameter* p : order_) total += p->value.size();
  return total;
}

void ParameterStore::ZeroGrad() {
  for (Parameter* p : order_) p->ZeroGrad();
}

void ParameterStore::SetAll(double value) {
  for (Parameter* p : order_) p->value.setConstant(value);
}

}  // namespace nn
}  // namespace evsent
