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

// Command-line entry point: synth, stats, train, eval, predict, agreement
// and gradcheck.
//
// Exit status: 0 success, 1 validation failure, 2 usage error.

#ifndef EVSENT_CLI_H_
#define EVSENT_CLI_H_

#include <iostream>
#include <string>
#include <vector>

#include "evsent/config.h"

namespace evsent {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

// Ablation presets as config overrides: full, pipeline, no-features,
// no-trigger, no-argument, no-trigger-argument.
const std::vector<std::string>& AblationPresets();
// Throws ConfigError for an unknown preset.
void ApplyAblation(const std::string& preset, Config& config);

int RunCli(int argc, char** argv);
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace evsent

#endif  // EVSENT_CLI_H_
