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

#include "uptomo/interferometer.hpp"

#include <charconv>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

#include "uptomo/errors.hpp"
#include "uptomo/io_util.hpp"
#include "uptomo/rng.hpp"
#include "uptomo/version.hpp"

namespace uptomo {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Stream id reserved for the run-wide hidden phase offset. Setting ids are
// small non-negative integers, so this cannot collide with a noise stream.
constexpr std::uint64_t kHiddenOffsetStream = ~std::uint64_t{0};

void check_pattern_inputs(const UnitaryMatrix& u, const UnitaryMatrix& o, int l,
                          const std::vector<double>& grid) {
  if (u.dim() != o.dim()) {
    throw DimensionError("object transformation is " + std::to_string(u.dim()) +
                         "-dimensional but detection transformation is " +
                         std::to_string(o.dim()) + "-dimensional");
  }
  if (l < 0 || l >= u.dim()) {
    throw ValidationError("projection mode " + std::to_string(l) +
                          " out of range for dimension " + std::to_string(u.dim()));
  }
  if (grid.empty()) {
    throw ValidationError("phase grid is empty");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw ValidationError("phase grid must be strictly increasing");
    }
  }
}

PatternSetting make_setting(const UnitaryMatrix& o, int l) {
  PatternSetting s;
  s.dim = o.dim();
  s.theta = 0.0;  // caller overwrites when the form parameters are known
  s.projection_mode = l;
  return s;
}

}  // namespace

InterferencePattern closed_form_pattern(const UnitaryMatrix& u, const UnitaryMatrix& o,
                                        int l, const std::vector<double>& grid,
                                        double scale, double coherence) {
  check_pattern_inputs(u, o, l, grid);
  if (scale <= 0.0) {
    throw ValidationError("pattern scale must be positive");
  }
  if (coherence < 0.0 || coherence > 1.0) {
    throw ValidationError("coherence must lie in [0, 1]");
  }
  const int n = u.dim();

  // Precompute the per-mode fringe terms: amplitude and phase offset of each
  // sin component. The pattern is their pointwise sum over k.
  std::vector<double> amp(static_cast<std::size_t>(n));
  std::vector<double> off(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const Complex o_lk = o(l, k);
    const Complex u_kl = u(k, l);
    amp[static_cast<std::size_t>(k)] = std::abs(o_lk) * std::abs(u_kl);
    off[static_cast<std::size_t>(k)] = std::arg(u_kl) - std::arg(o_lk);
  }

  InterferencePattern p;
  p.setting = make_setting(o, l);
  p.value_kind = ValueKind::probability;
  p.scale = scale;
  p.coherence = coherence;
  p.samples.reserve(grid.size());
  for (double phi : grid) {
    double fringe = 0.0;
    for (int k = 0; k < n; ++k) {
      fringe += amp[static_cast<std::size_t>(k)] *
                std::sin(phi + off[static_cast<std::size_t>(k)]);
    }
    p.samples.push_back(Sample{phi, scale * (1.0 + coherence * fringe)});
  }
  return p;
}

InterferencePattern statevector_pattern(const UnitaryMatrix& u, const UnitaryMatrix& o,
                                        int l, const std::vector<double>& grid,
                                        double scale) {
  check_pattern_inputs(u, o, l, grid);
  if (scale <= 0.0) {
    throw ValidationError("pattern scale must be positive");
  }
  const int n = u.dim();
  const double branch_norm = 1.0 / std::sqrt(2.0 * n);
  const Complex i_unit{0.0, 1.0};

  // Joint-state amplitude of the second-source branch for detected mode l
  // and undetected mode lp: the pair is emitted mode-correlated, path
  // identity re-expresses the undetected photon in the first source's basis
  // through the conjugated transformation, and the detection operator routes
  // the signal photon through the known transformation (one beam-splitter
  // reflection, hence the factor i).
  std::vector<Complex> object_amp(static_cast<std::size_t>(n));
  for (int lp = 0; lp < n; ++lp) {
    Complex acc{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
      acc += o(l, k) * std::conj(u(k, lp));
    }
    object_amp[static_cast<std::size_t>(lp)] = acc;
  }

  InterferencePattern p;
  p.setting = make_setting(o, l);
  p.value_kind = ValueKind::probability;
  p.scale = scale;
  p.coherence = 1.0;
  p.samples.reserve(grid.size());
  for (double phi : grid) {
    // phi is the combined interferometric phase (idler propagation minus
    // pump and signal phases); the second-source branch carries it with a
    // negative sign through the conjugated alignment relation.
    const Complex branch_phase = i_unit * std::polar(1.0, -phi);
    double total = 0.0;
    for (int lp = 0; lp < n; ++lp) {
      Complex amp = branch_phase * object_amp[static_cast<std::size_t>(lp)];
      if (lp == l) {
        amp += 1.0;  // first-source branch: no transform, no extra phase
      }
      total += std::norm(branch_norm * amp);
    }
    // The raw rate averages 1/N per detection mode; rescale to the
    // closed-form convention so the two routes are directly comparable.
    p.samples.push_back(Sample{phi, scale * n * total});
  }
  return p;
}

double draw_hidden_offset(std::uint64_t master_seed) {
  Rng rng(master_seed, kHiddenOffsetStream);
  return rng.uniform(0.0, kTwoPi);
}

InterferencePattern apply_noise(const InterferencePattern& p, const NoiseConfig& n,
                                std::uint64_t setting_id) {
  InterferencePattern out = p;

  if (n.phase_offset_mode == PhaseOffsetMode::hidden) {
    if (!n.hidden_offset.has_value()) {
      throw ValidationError("hidden phase mode requires a drawn offset");
    }
    // The pattern was generated at phi + offset; restore the nominal labels
    // so downstream analysis sees the shift as an unknown fringe phase.
    for (Sample& s : out.samples) {
      s.phi -= *n.hidden_offset;
    }
  }

  if (n.kind == NoiseKind::poisson) {
    if (p.value_kind != ValueKind::probability) {
      throw ValidationError("counting noise requires probability-valued input");
    }
    if (!(n.expected_counts_per_sample >= 1.0)) {
      throw ValidationError("expected counts per sample must be at least 1");
    }
    constexpr double kClampTol = 1e-12;
    Rng rng(n.master_seed, setting_id);
    for (Sample& s : out.samples) {
      double v = s.value;
      if (v < -kClampTol || v > 1.0 + kClampTol) {
        throw ValidationError("probability value " + format_double(v) +
                              " outside [0, 1]; lower the pattern scale");
      }
      v = std::min(std::max(v, 0.0), 1.0);
      s.value = static_cast<double>(rng.poisson(n.expected_counts_per_sample * v));
    }
    out.value_kind = ValueKind::poisson_counts;
  }

  return out;
}

SimulatedSource::SimulatedSource(UnitaryMatrix truth, MeasurementPlan plan, double scale,
                                 double coherence, NoiseConfig noise)
    : truth_(std::move(truth)),
      plan_(std::move(plan)),
      scale_(scale),
      coherence_(coherence),
      noise_(noise) {
  if (truth_.dim() != plan_.dim) {
    throw DimensionError("plan dimension " + std::to_string(plan_.dim) +
                         " does not match transformation dimension " +
                         std::to_string(truth_.dim()));
  }
  if (noise_.phase_offset_mode == PhaseOffsetMode::hidden &&
      !noise_.hidden_offset.has_value()) {
    noise_.hidden_offset = draw_hidden_offset(noise_.master_seed);
  }
}

InterferencePattern SimulatedSource::operator()(int setting_index) const {
  if (setting_index < 0 ||
      setting_index >= static_cast<int>(plan_.settings.size())) {
    throw ValidationError("setting index " + std::to_string(setting_index) +
                          " out of range for plan with " +
                          std::to_string(plan_.settings.size()) + " settings");
  }
  const Setting& setting = plan_.settings[static_cast<std::size_t>(setting_index)];
  const CompoundForm form =
      plan_.forms[static_cast<std::size_t>(setting.form_index)].with_theta(
          theta_radians(setting.theta));
  const UnitaryMatrix o(compound_form_matrix(form));

  std::vector<double> grid = setting.phase_grid;
  if (noise_.phase_offset_mode == PhaseOffsetMode::hidden) {
    for (double& phi : grid) {
      phi += *noise_.hidden_offset;
    }
  }

  InterferencePattern p = closed_form_pattern(truth_, o, setting.projection_mode,
                                              grid, scale_, coherence_);
  p.setting.pairs = form.pairs();
  p.setting.theta = form.theta();

  if (noise_.kind == NoiseKind::none &&
      noise_.phase_offset_mode == PhaseOffsetMode::known) {
    return p;
  }
  return apply_noise(p, noise_, static_cast<std::uint64_t>(setting_index));
}

void write_pattern_csv(const std::filesystem::path& path, const InterferencePattern& p) {
  std::string body = "phi_rad,value\n";
  for (const Sample& s : p.samples) {
    body += format_double(s.phi);
    body += ',';
    body += format_double(s.value);
    body += '\n';
  }
  write_file_atomic(path, body);
}

std::string value_kind_name(ValueKind k) {
  switch (k) {
    case ValueKind::probability:
      return "probability";
    case ValueKind::expected_counts:
      return "expected_counts";
    case ValueKind::poisson_counts:
      return "poisson_counts";
  }
  throw ValidationError("unknown value kind");
}

ValueKind value_kind_from_name(const std::string& s) {
  if (s == "probability") return ValueKind::probability;
  if (s == "expected_counts") return ValueKind::expected_counts;
  if (s == "poisson_counts") return ValueKind::poisson_counts;
  throw ValidationError("unknown value kind '" + s + "'");
}

namespace {

std::string noise_kind_name(NoiseKind k) {
  return k == NoiseKind::none ? "none" : "poisson";
}

NoiseKind noise_kind_from_name(const std::string& s) {
  if (s == "none") return NoiseKind::none;
  if (s == "poisson") return NoiseKind::poisson;
  throw ValidationError("unknown noise kind '" + s + "'");
}

std::string phase_mode_name(PhaseOffsetMode m) {
  return m == PhaseOffsetMode::known ? "known" : "hidden";
}

PhaseOffsetMode phase_mode_from_name(const std::string& s) {
  if (s == "known") return PhaseOffsetMode::known;
  if (s == "hidden") return PhaseOffsetMode::hidden;
  throw ValidationError("unknown phase offset mode '" + s + "'");
}

}  // namespace

nlohmann::json pattern_sidecar_json(const InterferencePattern& p, int setting_id,
                                    const NoiseConfig& noise) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const ModePair& mp : p.setting.pairs) {
    pairs.push_back({mp.q, mp.r});
  }
  nlohmann::json noise_json = {
      {"kind", noise_kind_name(noise.kind)},
      {"master_seed", noise.master_seed},
      {"phase_offset_mode", phase_mode_name(noise.phase_offset_mode)},
  };
  if (noise.kind == NoiseKind::poisson) {
    noise_json["expected_counts_per_sample"] = noise.expected_counts_per_sample;
  }
  // Note: the hidden offset value itself is intentionally never written; a
  // blind analysis must not be able to recover it from artifacts.
  return nlohmann::json{
      {"schema_version", kSchemaVersion},
      {"setting_id", setting_id},
      {"dim", p.setting.dim},
      {"pairs", pairs},
      {"theta", p.setting.theta},
      {"projection_mode", p.setting.projection_mode},
      {"scale", p.scale},
      {"coherence", p.coherence},
      {"value_kind", value_kind_name(p.value_kind)},
      {"noise", noise_json},
  };
}

void write_pattern_sidecar(const std::filesystem::path& path, const InterferencePattern& p,
                           int setting_id, const NoiseConfig& noise) {
  write_file_atomic(path, pattern_sidecar_json(p, setting_id, noise).dump(2) + "\n");
}

PatternFilePayload read_pattern_files(const std::filesystem::path& csv_path,
                                      const std::filesystem::path& sidecar_path) {
  PatternFilePayload out;

  const nlohmann::json meta = read_json_file(sidecar_path);
  try {
    if (meta.at("schema_version").get<int>() != kSchemaVersion) {
      throw IoError("unsupported schema version in " + sidecar_path.string());
    }
    out.setting_id = meta.at("setting_id").get<int>();
    out.pattern.setting.dim = meta.at("dim").get<int>();
    for (const auto& pr : meta.at("pairs")) {
      if (!pr.is_array() || pr.size() != 2) {
        throw IoError("malformed mode pair in " + sidecar_path.string());
      }
      out.pattern.setting.pairs.push_back(ModePair{pr[0].get<int>(), pr[1].get<int>()});
    }
    out.pattern.setting.theta = meta.at("theta").get<double>();
    out.pattern.setting.projection_mode = meta.at("projection_mode").get<int>();
    out.pattern.scale = meta.at("scale").get<double>();
    out.pattern.coherence = meta.at("coherence").get<double>();
    out.pattern.value_kind = value_kind_from_name(meta.at("value_kind").get<std::string>());
    const nlohmann::json& nj = meta.at("noise");
    out.noise.kind = noise_kind_from_name(nj.at("kind").get<std::string>());
    out.noise.master_seed = nj.at("master_seed").get<std::uint64_t>();
    out.noise.phase_offset_mode =
        phase_mode_from_name(nj.at("phase_offset_mode").get<std::string>());
    if (out.noise.kind == NoiseKind::poisson) {
      out.noise.expected_counts_per_sample =
          nj.at("expected_counts_per_sample").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed pattern sidecar " + sidecar_path.string() + ": " + e.what());
  }

  const std::string csv = read_file(csv_path);
  std::istringstream lines(csv);
  std::string line;
  if (!std::getline(lines, line) || line != "phi_rad,value") {
    throw IoError("pattern file " + csv_path.string() +
                  " missing 'phi_rad,value' header");
  }
  int lineno = 1;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw IoError("pattern file " + csv_path.string() + " line " +
                    std::to_string(lineno) + ": expected two comma-separated fields");
    }
    Sample s;
    const char* first_begin = line.data();
    const char* first_end = line.data() + comma;
    const char* second_begin = line.data() + comma + 1;
    const char* second_end = line.data() + line.size();
    auto r1 = std::from_chars(first_begin, first_end, s.phi);
    auto r2 = std::from_chars(second_begin, second_end, s.value);
    if (r1.ec != std::errc{} || r1.ptr != first_end || r2.ec != std::errc{} ||
        r2.ptr != second_end) {
      throw IoError("pattern file " + csv_path.string() + " line " +
                    std::to_string(lineno) + ": malformed number");
    }
    out.pattern.samples.push_back(s);
  }
  if (out.pattern.samples.empty()) {
    throw IoError("pattern file " + csv_path.string() + " has no samples");
  }
  return out;
}

}  // namespace uptomo
