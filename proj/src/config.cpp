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

#include "uptomo/config.hpp"

#include <initializer_list>
#include <string>

#include "uptomo/errors.hpp"
#include "uptomo/io_util.hpp"

namespace uptomo {
namespace {

void reject_unknown_keys(const nlohmann::json& obj, const std::string& context,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("unknown key '" + key + "' in " + context);
    }
  }
}

TruthSource parse_truth(const nlohmann::json& t, int dim,
                        const std::filesystem::path& base_dir) {
  TruthSource truth;
  if (t.is_string()) {
    truth.kind = TruthSource::Kind::named;
    truth.name = t.get<std::string>();
    if (truth.name != "identity" && truth.name != "fourier" &&
        truth.name != "hadamard4") {
      throw ConfigError("unknown truth gate '" + truth.name +
                        "' (known: identity, fourier, hadamard4)");
    }
    if (truth.name == "hadamard4" && dim != 4) {
      throw ConfigError("truth 'hadamard4' requires dim = 4, config has dim = " +
                        std::to_string(dim));
    }
    return truth;
  }
  if (!t.is_object()) {
    throw ConfigError("'truth' must be a gate name or an object with "
                      "'file' or 'haar_seed'");
  }
  reject_unknown_keys(t, "'truth'", {"file", "haar_seed"});
  if (t.contains("file") == t.contains("haar_seed")) {
    throw ConfigError("'truth' needs exactly one of 'file' or 'haar_seed'");
  }
  if (t.contains("file")) {
    truth.kind = TruthSource::Kind::file;
    std::filesystem::path p = t.at("file").get<std::string>();
    if (p.is_relative()) {
      p = base_dir / p;
    }
    if (!std::filesystem::is_regular_file(p)) {
      throw ConfigError("truth file does not exist: " + p.string());
    }
    // Validate shape now so a bad reference fails at parse time, with a
    // dimension-specific error when it contradicts the configured dim.
    const ComplexMatrix m = read_matrix_file(p);
    if (m.dim() != dim) {
      throw DimensionError("truth file " + p.string() + " holds a " +
                           std::to_string(m.dim()) + "-dimensional matrix, config "
                           "has dim = " + std::to_string(dim));
    }
    truth.file = p;
    return truth;
  }
  truth.kind = TruthSource::Kind::haar;
  truth.haar_seed = t.at("haar_seed").get<std::uint64_t>();
  return truth;
}

NoiseConfig parse_noise(const nlohmann::json& nj, double scale) {
  NoiseConfig noise;
  reject_unknown_keys(nj, "'noise'",
                      {"kind", "expected_counts_per_sample", "master_seed",
                       "phase_offset_mode"});
  if (nj.contains("kind")) {
    const std::string kind = nj.at("kind").get<std::string>();
    if (kind == "none") {
      noise.kind = NoiseKind::none;
    } else if (kind == "poisson") {
      noise.kind = NoiseKind::poisson;
    } else {
      throw ConfigError("noise.kind must be 'none' or 'poisson', got '" + kind + "'");
    }
  }
  if (nj.contains("expected_counts_per_sample")) {
    noise.expected_counts_per_sample =
        nj.at("expected_counts_per_sample").get<double>();
  }
  if (nj.contains("master_seed")) {
    noise.master_seed = nj.at("master_seed").get<std::uint64_t>();
  }
  if (nj.contains("phase_offset_mode")) {
    const std::string mode = nj.at("phase_offset_mode").get<std::string>();
    if (mode == "known") {
      noise.phase_offset_mode = PhaseOffsetMode::known;
    } else if (mode == "hidden") {
      noise.phase_offset_mode = PhaseOffsetMode::hidden;
    } else {
      throw ConfigError("noise.phase_offset_mode must be 'known' or 'hidden', got '" +
                        mode + "'");
    }
  }
  if (noise.kind == NoiseKind::poisson) {
    if (!(noise.expected_counts_per_sample >= 1.0)) {
      throw ConfigError("noise.expected_counts_per_sample must be >= 1 for "
                        "poisson noise");
    }
    if (scale > 0.5) {
      throw ConfigError("poisson noise requires scale <= 0.5 so probabilities "
                        "stay within [0, 1]");
    }
  }
  return noise;
}

}  // namespace

RunConfig parse_config_json(const nlohmann::json& j,
                            const std::filesystem::path& base_dir) {
  if (!j.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  reject_unknown_keys(j, "config",
                      {"dim", "truth", "protocol", "phase_grid", "scale",
                       "coherence", "noise", "phase_mode", "output_dir",
                       "tolerances"});
  try {
    RunConfig cfg;
    if (!j.contains("dim")) {
      throw ConfigError("config is missing required key 'dim'");
    }
    cfg.dim = j.at("dim").get<int>();
    if (cfg.dim < 2) {
      throw ConfigError("dim must be at least 2, got " + std::to_string(cfg.dim));
    }

    if (j.contains("protocol")) {
      const std::string p = j.at("protocol").get<std::string>();
      try {
        cfg.protocol = protocol_from_name(p);
      } catch (const Error&) {
        throw ConfigError("protocol must be 'basic' or 'compound', got '" + p + "'");
      }
    }

    if (j.contains("phase_grid")) {
      const nlohmann::json& g = j.at("phase_grid");
      reject_unknown_keys(g, "'phase_grid'", {"count", "lo", "hi"});
      if (g.contains("count")) cfg.grid.count = g.at("count").get<int>();
      if (g.contains("lo")) cfg.grid.lo = g.at("lo").get<double>();
      if (g.contains("hi")) cfg.grid.hi = g.at("hi").get<double>();
      if (cfg.grid.count < 3) {
        throw ConfigError("phase_grid.count must be at least 3, got " +
                          std::to_string(cfg.grid.count));
      }
      if (!(cfg.grid.hi > cfg.grid.lo)) {
        throw ConfigError("phase_grid.hi must exceed phase_grid.lo");
      }
    }

    if (j.contains("scale")) {
      cfg.scale = j.at("scale").get<double>();
      if (!(cfg.scale > 0.0)) {
        throw ConfigError("scale must be positive");
      }
    }
    if (j.contains("coherence")) {
      cfg.coherence = j.at("coherence").get<double>();
      if (cfg.coherence < 0.0 || cfg.coherence > 1.0) {
        throw ConfigError("coherence must lie in [0, 1]");
      }
    }

    if (j.contains("noise")) {
      cfg.noise = parse_noise(j.at("noise"), cfg.scale);
    }

    if (j.contains("phase_mode")) {
      const std::string m = j.at("phase_mode").get<std::string>();
      try {
        cfg.phase_mode = phase_mode_from_name(m);
      } catch (const Error&) {
        throw ConfigError("phase_mode must be 'absolute' or 'relative', got '" +
                          m + "'");
      }
    }

    // Relative paths in the config resolve against the config's directory,
    // so a config and its artifacts travel together.
    {
      std::filesystem::path dir = cfg.output_dir;
      if (j.contains("output_dir")) {
        dir = j.at("output_dir").get<std::string>();
      }
      cfg.output_dir = dir.is_relative() ? base_dir / dir : dir;
    }

    if (j.contains("tolerances")) {
      const nlohmann::json& t = j.at("tolerances");
      reject_unknown_keys(t, "'tolerances'", {"modulus", "argument"});
      if (t.contains("modulus")) cfg.tol_mod = t.at("modulus").get<double>();
      if (t.contains("argument")) cfg.tol_arg = t.at("argument").get<double>();
      if (!(cfg.tol_mod > 0.0) || !(cfg.tol_arg > 0.0)) {
        throw ConfigError("tolerances must be positive");
      }
    }

    if (j.contains("truth")) {
      cfg.truth = parse_truth(j.at("truth"), cfg.dim, base_dir);
    }

    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config value: ") + e.what());
  }
}

RunConfig parse_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = read_json_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  const std::filesystem::path base =
      path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return parse_config_json(j, base);
}

std::optional<UnitaryMatrix> load_truth(const RunConfig& config) {
  switch (config.truth.kind) {
    case TruthSource::Kind::none:
      return std::nullopt;
    case TruthSource::Kind::named:
      return named_gate(config.truth.name, config.dim);
    case TruthSource::Kind::file:
      return UnitaryMatrix(read_matrix_file(config.truth.file));
    case TruthSource::Kind::haar:
      return haar_random(config.dim, config.truth.haar_seed);
  }
  throw ConfigError("unhandled truth source kind");
}

}  // namespace uptomo
