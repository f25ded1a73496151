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

// Flat key = value configuration.
//
// Values resolve, lowest to highest precedence: built-in defaults, a config
// file, environment variables, explicit overrides (command-line flags). The
// environment variable for key "train.batch_size" is EVSENT_TRAIN_BATCH_SIZE.
//
// File syntax: one "key = value" per line; '#' starts a comment.

#ifndef EVSENT_CONFIG_H_
#define EVSENT_CONFIG_H_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "evsent/corpus.h"
#include "evsent/evaluation.h"
#include "evsent/model.h"
#include "evsent/synthetic.h"
#include "json.hpp"

namespace evsent {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  // Every known key with its default value.
  static Config Defaults();

  void LoadFile(const std::string& path);
  void ApplyEnvironment();
  // Throws ConfigError for unknown keys.
  void Set(const std::string& key, const std::string& value);

  const std::string& Get(const std::string& key) const;
  int GetInt(const std::string& key) const;
  double GetDouble(const std::string& key) const;
  bool GetBool(const std::string& key) const;
  uint64_t GetUint64(const std::string& key) const;
  std::vector<double> GetDoubles(const std::string& key) const;
  std::vector<uint64_t> GetSeeds(const std::string& key) const;

  // Where the value of `key` came from: default, file, env or flag.
  const std::string& SourceOf(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  nlohmann::json ToJson() const;  // keys sorted
  std::string ToText() const;     // loadable by LoadFile

  static std::string EnvironmentName(const std::string& key);

 private:
  void SetFrom(const std::string& key, const std::string& value,
               const std::string& source);
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> sources_;
};

ModelConfig ModelConfigFrom(const Config& config);
EvalOptions EvalOptionsFrom(const Config& config);
SynthConfig SynthConfigFrom(const Config& config);
SplitRatios SplitRatiosFrom(const Config& config);

}  // namespace evsent

#endif  // EVSENT_CONFIG_H_
