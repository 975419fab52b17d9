// Copyright 2026 The uptomo authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace uptomo {

/// Parsed command line. `command` is one of: plan, simulate, fit,
/// reconstruct, verify, gates.
struct CliOptions {
  std::string command;
  std::filesystem::path config_path;
  std::optional<std::uint64_t> seed;            // overrides noise.master_seed
  std::optional<std::filesystem::path> out_dir; // overrides config output_dir
  bool quiet = false;
};

/// Runs one subcommand end to end.
///
/// Exit codes: 0 success; 1 verification failure (verify only); 2 config or
/// runtime error. Artifacts land under the output directory:
///   plan.json                      measurement schedule
///   patterns/setting_NNNN.csv/.json   simulated patterns + metadata
///   fits/setting_NNNN.fit.json     per-pattern fringe fits
///   report.json                    reconstruction report
///   plotdata/setting_NNNN_{samples,fit}.csv   curves for external plotting
int run_cli(const CliOptions& opts);

}  // namespace uptomo
