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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "uptomo/forms.hpp"
#include "uptomo/fringe.hpp"
#include "uptomo/interferometer.hpp"
#include "uptomo/matrix.hpp"

namespace uptomo {

/// One matrix element determined by one fitted fringe.
struct ElementEstimate {
  int row = 0;
  int col = 0;
  double modulus = 0.0;    // fitted visibility
  double argument = 0.0;   // in (-pi, pi]
  int source_setting = -1;
  OffsetRule offset = OffsetRule::direct;
};

/// A fitted fringe together with the plan setting it came from.
struct SettingFit {
  int setting_index = -1;
  FringeFit fit;
};

/// Fits of one form's settings, keyed by (rotation angle choice, projection
/// mode).
using FormFits = std::map<std::pair<ThetaChoice, int>, SettingFit>;

/// Turns one form's fitted fringes into matrix-element estimates.
///
/// Rules: a fit at theta = 0 on mode l determines U_ll with argument equal
/// to the fitted phase (whether l is rotated by the form or not). A fit at
/// theta = pi/2 on a rotated mode determines the off-diagonal element of its
/// pair: projecting on l = q gives U_rq with argument = fitted phase + pi
/// (the pattern carries a built-in -pi), projecting on l = r gives U_qr with
/// argument = fitted phase. A visibility below 1e-12 yields modulus 0,
/// argument 0 by convention.
///
/// Throws ValidationError when a required fit is missing, when a fit's
/// visibility exceeds 1 + max_visibility_excess (nonphysical data), or when
/// a theta = pi/2 fit refers to a mode the form does not rotate.
std::vector<ElementEstimate> extract_elements(const CompoundForm& form,
                                              const FormFits& fits,
                                              double max_visibility_excess = 0.1);

/// Collects element estimates into an N x N matrix, averaging duplicates in
/// the complex plane (diagonal elements are re-measured by every form).
class ElementAccumulator {
 public:
  explicit ElementAccumulator(int dim);

  void add(const ElementEstimate& e);

  /// Number of (row, col) slots with at least one estimate.
  int populated_count() const;
  bool complete() const { return populated_count() == dim_ * dim_; }
  int count_at(int row, int col) const;

  /// Entrywise average. Throws ValidationError when any slot is empty.
  ComplexMatrix average() const;

 private:
  int dim_;
  std::vector<Complex> sums_;
  std::vector<int> counts_;
};

enum class PhaseMode { absolute, relative };

std::string phase_mode_name(PhaseMode m);
PhaseMode phase_mode_from_name(const std::string& s);

/// Reference fringe used in relative mode: the fitted phase of this setting
/// is subtracted from every fitted phase, so the result is determined up to
/// one global phase factor.
struct PhaseReference {
  int setting_index = -1;
  int row = 0;  // element the reference setting targets
  int col = 0;
  double visibility = 0.0;
};

/// Maps a plan setting index to its interference pattern. Implementations
/// must be safe for concurrent calls with distinct indices.
using PatternProvider = std::function<InterferencePattern(int)>;

struct ReconstructOptions {
  PhaseMode phase_mode = PhaseMode::absolute;
  std::optional<UnitaryMatrix> truth;  // enables fidelity / error reporting
  std::map<std::string, std::uint64_t> seeds;  // recorded verbatim
  double max_visibility_excess = 0.1;
};

/// Full result of one reconstruction run.
struct ReconstructionReport {
  int dim;
  Protocol protocol;
  ComplexMatrix estimate;   // the assembled matrix, all N^2 entries
  UnitaryMatrix projected;  // nearest unitary to the estimate
  double unitarity_deviation = 0.0;  // of the raw estimate
  PhaseMode phase_mode = PhaseMode::absolute;
  std::optional<PhaseReference> reference;  // present in relative mode
  int settings_used = 0;
  std::map<std::string, std::uint64_t> seeds;
  std::string timestamp;  // ISO 8601 UTC, excluded from determinism checks

  // Present only when the truth matrix was supplied to reconstruct().
  std::optional<double> fidelity_vs_truth;
  std::optional<std::vector<double>> per_element_abs_error;  // row-major N*N
  std::optional<ComplexMatrix> truth;
};

/// Runs every plan setting through the provider, fits the fringes, extracts
/// matrix elements, and assembles the estimate.
///
/// phase_mode absolute trusts the fitted phases directly (valid when the
/// scanned phase grid is exact). phase_mode relative references all phases
/// to the largest-visibility fit (ties broken by lowest setting index), so
/// the estimate equals the true matrix times one unit-modulus scalar.
///
/// When options.truth is set, the report gains fidelity_vs_truth (global-
/// phase invariant overlap of the raw estimate), per-element absolute errors
/// (computed after global-phase alignment in relative mode), and an embedded
/// copy of the truth for later verification.
ReconstructionReport reconstruct(const PatternProvider& source,
                                 const MeasurementPlan& plan,
                                 const ReconstructOptions& options);

struct VerificationResult {
  bool pass = false;
  int checked = 0;
  int failed = 0;
  std::string table;  // human-readable per-element comparison
};

/// Compares a report's estimate against its embedded truth: per element,
/// modulus difference <= tol_mod and shortest angular argument difference
/// <= tol_arg. Argument checks are skipped where the truth modulus is below
/// 10 * tol_mod (the phase of a vanishing element is meaningless). In
/// relative mode the estimate is globally phase-aligned to the truth first.
/// Throws ValidationError when the report carries no truth.
VerificationResult verify_report(const ReconstructionReport& rep, double tol_mod,
                                 double tol_arg);

/// Reads patterns previously written by the simulate stage: for setting i,
/// `<dir>/<setting_file_stem(i)>.csv` and `.json`. Validates the sidecar
/// metadata (setting id, dimension, pairs, theta, projection mode) against
/// the plan before returning a pattern.
class FileSource {
 public:
  FileSource(std::filesystem::path pattern_dir, MeasurementPlan plan);

  InterferencePattern operator()(int setting_index) const;

  const MeasurementPlan& plan() const { return plan_; }

 private:
  std::filesystem::path dir_;
  MeasurementPlan plan_;
};

/// "setting_0007"-style basename shared by pattern, fit, and plot files.
std::string setting_file_stem(int setting_id);

// --- serialization -------------------------------------------------------

nlohmann::json report_to_json(const ReconstructionReport& rep);
ReconstructionReport report_from_json(const nlohmann::json& j);
void write_report_file(const std::filesystem::path& path, const ReconstructionReport& rep);
ReconstructionReport read_report_file(const std::filesystem::path& path);

nlohmann::json fringe_fit_to_json(const FringeFit& fit);
FringeFit fringe_fit_from_json(const nlohmann::json& j);

}  // namespace uptomo
