/* Copyright 2026 The DOST Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef DOST_CLI_H_
#define DOST_CLI_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dost/json_writer.h"
#include "dost/model.h"

namespace dost::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kValidation = 2,
  kRuntime = 3,
};

// Training experiment settings: a TrainConfig plus file paths and the
// evaluation threshold. Read from JSON; unknown keys are rejected.
struct ExperimentConfig {
  TrainConfig train;
  double threshold = 0.5;
  std::optional<std::string> rules;
  std::optional<std::string> data;
  std::optional<std::string> out_model;
  std::optional<std::string> out_history;
  std::optional<std::string> out_report;
};

// Throws std::invalid_argument on unknown keys or wrongly typed values.
ExperimentConfig parse_experiment_config(const Json& doc);
ExperimentConfig load_experiment_config(const std::string& path);

// Entry point. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace dost::cli

#endif  // DOST_CLI_H_
