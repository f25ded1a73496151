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

#include "evsent/nn/tensor_file.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace evsent {
namespace nn {
namespace {

static_assert(std::endian::native == std::endian::little,
              "tensor files are little-endian; big-endian hosts unsupported");

template <typename T>
void Put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T Take(std::istream& in, const std::string& path) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw TensorFileError(path + ": truncated tensor file");
  return value;
}

}  // namespace

void WriteTensorFile(const std::string& path,
                     const std::vector<NamedTensor>& tensors, DType dtype) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TensorFileError("cannot open for writing: " + path);
  out.write(kTensorFileMagic, 4);
  Put<uint32_t>(out, kTensorFileVersion);
  Put<uint32_t>(out, static_cast<uint32_t>(tensors.size()));
  for (const NamedTensor& t : tensors) {
    Put<uint32_t>(out, static_cast<uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    Put<uint8_t>(out, static_cast<uint8_t>(dtype));
    if (t.rank == 1) {
      Put<uint32_t>(out, 1);
      Put<uint64_t>(out, static_cast<uint64_t>(t.value.size()));
    } else {
      Put<uint32_t>(out, 2);
      Put<uint64_t>(out, static_cast<uint64_t>(t.value.rows()));
      Put<uint64_t>(out, static_cast<uint64_t>(t.value.cols()));
    }
    for (Eigen::Index i = 0; i < t.value.size(); ++i) {
      if (dtype == DType::kFloat32) {
        Put<float>(out, static_cast<float>(t.value.data()[i]));
      } else {
        Put<double>(out, t.value.data()[i]);
      }
    }
  }
  if (!out) throw TensorFileError("write failed: " + path);
}

std::vector<NamedTensor> ReadTensorFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TensorFileError("tensor file not found: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kTensorFileMagic, 4) != 0) {
    throw TensorFileError(path + ": bad magic, not a tensor file");
  }
  const auto version = Take<uint32_t>(in, path);
  if (version != kTensorFileVersion) {
    throw TensorFileError(path + ": unsupported format version " +
                          std::to_string(version));
  }
  const auto count = Take<uint32_t>(in, path);
  std::vector<NamedTensor> tensors;
  tensors.reserve(count);
  for (uint32_t k = 0; k < count; ++k) {
    NamedTensor t;
    const auto name_len = Take<uint32_t>(in, path);
    t.name.resize(name_len);
    in.read(t.name.data(), name_len);
    const auto dtype = Take<uint8_t>(in, path);
    if (dtype > 1) {
      throw TensorFileError(path + ": tensor '" + t.name + "' has bad dtype");
    }
    const auto rank = Take<uint32_t>(in, path);
    if (rank != 1 && rank != 2) {
      throw TensorFileError(path + ": tensor '" + t.name +
                            "' has unsupported rank " + std::to_string(rank));
    }
    t.rank = static_cast<int>(rank);
    uint64_t rows = 1;
    uint64_t cols = Take<uint64_t>(in, path);
    if (rank == 2) {
      rows = cols;
      cols = Take<uint64_t>(in, path);
    }
    t.value.resize(static_cast<Eigen::Index>(rows),
                   static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < t.value.size(); ++i) {
      t.value.data()[i] = dtype == 0 ? Take<float>(in, path)
                                     : Take<double>(in, path);
    }
    tensors.push_back(std::move(t));
  }
  return tensors;
}

void SaveParameters(const ParameterStore& store, const std::string& path,
                    const std::string& prefix) {
  std::vector<NamedTensor> tensors;
  tensors.reserve(store.size());
  for (const Parameter* p : store.all()) {
    if (p->name.rfind(prefix, 0) != 0) continue;
    tensors.push_back({p->name, p->value, 2});
  }
  WriteTensorFile(path, tensors);
}

void LoadParameters(ParameterStore& store, const std::string& path,
                    const std::string& prefix) {
  std::vector<NamedTensor> tensors = ReadTensorFile(path);
  std::map<std::string, const NamedTensor*> by_name;
  for (const NamedTensor& t : tensors) by_name[t.name] = &t;
  std::vector<std::string> problems;
  std::vector<Parameter*> targets;
  for (Parameter* p : store.all()) {
    if (p->name.rfind(prefix, 0) == 0) targets.push_back(p);
  }
  for (const Parameter* p : targets) {
    auto it = by_name.find(p->name);
    if (it == by_name.end()) {
      problems.push_back(p->name + " (missing)");
      continue;
    }
    const Matrix& v = it->second->value;
    if (v.rows() != p->value.rows() || v.cols() != p->value.cols()) {
      problems.push_back(p->name + " (expected " +
                         std::to_string(p->value.rows()) + "x" +
                         std::to_string(p->value.cols()) + ", found " +
                         std::to_string(v.rows()) + "x" +
                         std::to_string(v.cols()) + ")");
    }
  }
  if (!problems.empty()) {
    std::string msg = path + ": incompatible tensors:";
    for (const std::string& p : problems) msg += " " + p + ";";
    throw TensorFileError(msg);
  }
  for (Parameter* p : targets) p->value = by_name.at(p->name)->value;
}

}  // namespace nn
}  // namespace evsent
