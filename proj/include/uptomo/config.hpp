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

#include <json.hpp>

#include "uptomo/forms.hpp"
#include "uptomo/interferometer.hpp"
#include "uptomo/matrix.hpp"
#include "uptomo/reconstruction.hpp"

namespace uptomo {

/// Where the ground-truth transformation comes from, if anywhere. Blind
/// analysis runs (fit / reconstruct over recorded patterns) need none.
struct TruthSource {
  enum class Kind { none, named, file, haar };
  Kind kind = Kind::none;
  std::string name;             // named: gate library key
  std::filesystem::path file;   // file: matrix JSON, resolved at parse time
  std::uint64_t haar_seed = 0;  // haar: sampling seed
};

/// One fully validated run configuration.
struct RunConfig {
  int dim = 0;
  TruthSource truth;
  Protocol protocol = Protocol::compound;
  PhaseGridSpec grid;           // defaults: 24 points over [0, 2*pi)
  double scale = 0.5;
  double coherence = 1.0;
  NoiseConfig noise;            // defaults: noiseless, known phase
  PhaseMode phase_mode = PhaseMode::absolute;
  std::filesystem::path output_dir = "out";
  double tol_mod = 1e-6;        // verification tolerances
  double tol_arg = 1e-6;
};

/// Parses and validates a config JSON object. `base_dir` anchors relative
/// truth-file paths (normally the config file's directory). Unknown keys at
/// any level are rejected; defaults are filled for absent optional keys;
/// referenced files must exist. Throws ConfigError (or DimensionError for a
/// truth file whose dimension contradicts `dim`).
///
/// Recognized keys:
///   dim (int, required), truth (string | {"file": path} | {"haar_seed": n}),
///   protocol ("basic" | "compound"), phase_grid ({count, lo, hi}),
///   scale, coherence, noise ({kind, expected_counts_per_sample,
///   master_seed, phase_offset_mode}), phase_mode, output_dir,
///   tolerances ({modulus, argument}).
RunConfig parse_config_json(const nlohmann::json& j,
                            const std::filesystem::path& base_dir);

/// Reads the file and parses it via parse_config_json with the file's
/// directory as base. Parse failures are reported as ConfigError with the
/// offending location.
RunConfig parse_config(const std::filesystem::path& path);

/// Materializes the configured ground truth; nullopt when none was given.
std::optional<UnitaryMatrix> load_truth(const RunConfig& config);

}  // namespace uptomo
