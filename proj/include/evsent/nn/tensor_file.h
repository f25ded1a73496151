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

// Binary tensor container used for every checkpoint.
//
// Layout (all integers little-endian):
//
//   char[4]  magic "EVSW"
//   uint32   format version (currently 1)
//   uint32   tensor count
//   repeated tensor count times:
//     uint32   name length in bytes
//     char[]   name (UTF-8, no terminator)
//     uint8    dtype: 0 = float32, 1 = float64
//     uint32   rank (1 or 2)
//     uint64[] dims, outermost first
//     data     row-major values of the given dtype
//
// Rank-1 tensors load as 1 x N matrices.

#ifndef EVSENT_NN_TENSOR_FILE_H_
#define EVSENT_NN_TENSOR_FILE_H_

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "evsent/nn/parameter.h"

namespace evsent {
namespace nn {

enum class DType : unsigned char { kFloat32 = 0, kFloat64 = 1 };

inline constexpr char kTensorFileMagic[4] = {'E', 'V', 'S', 'W'};
inline constexpr unsigned kTensorFileVersion = 1;

class TensorFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NamedTensor {
  std::string name;
  Matrix value;
  int rank = 2;
};

void WriteTensorFile(const std::string& path,
                     const std::vector<NamedTensor>& tensors,
                     DType dtype = DType::kFloat64);
std::vector<NamedTensor> ReadTensorFile(const std::string& path);

// Saves parameters whose names start with `prefix`, in creation order.
void SaveParameters(const ParameterStore& store, const std::string& path,
                    const std::string& prefix = "");

// Copies tensors from `path` into the store parameters whose names start with
// `prefix`. Each must be present with a matching shape; all mismatches and
// missing tensors are collected into a single TensorFileError naming them.
void LoadParameters(ParameterStore& store, const std::string& path,
                    const std::string& prefix = "");

}  // namespace nn
}  // namespace evsent

#endif  // EVSENT_NN_TENSOR_FILE_H_
