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
#include <vector>

#include <json.hpp>

#include "uptomo/forms.hpp"
#include "uptomo/matrix.hpp"

namespace uptomo {

enum class ValueKind { probability, expected_counts, poisson_counts };
enum class NoiseKind { none, poisson };
enum class PhaseOffsetMode { known, hidden };

struct NoiseConfig {
  NoiseKind kind = NoiseKind::none;
  double expected_counts_per_sample = 1e6;  // must be >= 1 for poisson
  std::uint64_t master_seed = 0;
  PhaseOffsetMode phase_offset_mode = PhaseOffsetMode::known;
  // Drawn once per run in hidden mode; every pattern of the run is generated
  // at phi + hidden_offset but labeled with phi.
  std::optional<double> hidden_offset;
};

struct Sample {
  double phi = 0.0;  // interferometric phase (radians)
  double value = 0.0;
};

/// Setting metadata carried by each pattern, self-contained so pattern files
/// can be analyzed without the plan in hand.
struct PatternSetting {
  int dim = 0;
  std::vector<ModePair> pairs;  // of the applied known transformation
  double theta = 0.0;
  int projection_mode = 0;
};

/// A sampled single-photon counting-rate curve over the scanned phase.
struct InterferencePattern {
  PatternSetting setting;
  std::vector<Sample> samples;  // strictly increasing in phi
  ValueKind value_kind = ValueKind::probability;
  double scale = 0.5;
  double coherence = 1.0;
};

/// Detection-rate forward model in closed form:
///
///   value(phi) = scale * [1 + coherence * sum_k |O_lk| |U_kl|
///                                   sin(phi + arg U_kl - arg O_lk)]
///
/// U acts on the undetected photon, O on the detected one, l is the
/// projection mode, and phi is the combined interferometric phase. With the
/// default scale = 1/2 all ideal values lie in [0, 1]. coherence in [0, 1]
/// multiplies the interference term (1 = ideal path identity).
InterferencePattern closed_form_pattern(const UnitaryMatrix& u, const UnitaryMatrix& o,
                                        int l, const std::vector<double>& grid,
                                        double scale = 0.5, double coherence = 1.0);

/// Independent oracle for the same counting rate, built from the two-source
/// joint state: expands the photon-pair amplitudes over idler modes and both
/// signal paths, applies the detected-field operator, and sums modulus
/// squares over the undetected modes. The three physical phases are carried
/// separately inside (only their combination can matter) and the result is
/// normalized to the closed-form convention. No analytic shortcut is taken
/// anywhere on this path, so the two routes are genuinely independent.
InterferencePattern statevector_pattern(const UnitaryMatrix& u, const UnitaryMatrix& o,
                                        int l, const std::vector<double>& grid,
                                        double scale = 0.5);

/// Draws the run-wide hidden phase offset from the master seed.
double draw_hidden_offset(std::uint64_t master_seed);

/// Measurement-noise channel.
///
/// kind = none: values unchanged. kind = poisson: each probability value v
/// becomes a Poisson draw with mean expected_counts_per_sample * v, from a
/// stream derived from (master_seed, setting_id) so draws are reproducible
/// and independent of execution order. In hidden phase mode the sample
/// abscissae are relabeled from the generating phases (phi + offset) back to
/// the nominal phi, modeling an interferometer whose global phase is not
/// known to the analysis.
InterferencePattern apply_noise(const InterferencePattern& p, const NoiseConfig& n,
                                std::uint64_t setting_id);

/// Pattern provider backed by the forward model: maps a plan's setting index
/// to a simulated (optionally noisy) pattern. Stateless per call; safe to
/// invoke concurrently for distinct settings.
class SimulatedSource {
 public:
  SimulatedSource(UnitaryMatrix truth, MeasurementPlan plan, double scale = 0.5,
                  double coherence = 1.0, NoiseConfig noise = {});

  InterferencePattern operator()(int setting_index) const;

  const MeasurementPlan& plan() const { return plan_; }
  const NoiseConfig& noise() const { return noise_; }

 private:
  UnitaryMatrix truth_;
  MeasurementPlan plan_;
  double scale_;
  double coherence_;
  NoiseConfig noise_;
};

// --- artifacts -----------------------------------------------------------
//
// Pattern dump: CSV `phi_rad,value`, one row per sample, values formatted to
// full binary64 round-trip precision. The sidecar JSON carries the setting
// metadata and noise provenance.

void write_pattern_csv(const std::filesystem::path& path, const InterferencePattern& p);
nlohmann::json pattern_sidecar_json(const InterferencePattern& p, int setting_id,
                                    const NoiseConfig& noise);
void write_pattern_sidecar(const std::filesystem::path& path, const InterferencePattern& p,
                           int setting_id, const NoiseConfig& noise);

/// Everything recoverable from a pattern dump. The hidden offset, if one was
/// in effect, is deliberately absent from the sidecar and comes back unset.
struct PatternFilePayload {
  InterferencePattern pattern;
  int setting_id = 0;
  NoiseConfig noise;
};

PatternFilePayload read_pattern_files(const std::filesystem::path& csv_path,
                                      const std::filesystem::path& sidecar_path);

std::string value_kind_name(ValueKind k);
ValueKind value_kind_from_name(const std::string& s);

}  // namespace uptomo
