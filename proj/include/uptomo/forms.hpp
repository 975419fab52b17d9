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

#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "uptomo/matrix.hpp"

namespace uptomo {

/// Unordered mode pair, stored with q < r.
struct ModePair {
  int q = 0;
  int r = 0;
  friend bool operator==(const ModePair&, const ModePair&) = default;
};

/// Two-dimensional rotation by theta acting on modes (q, r) of an
/// N-dimensional space, identity elsewhere:
///   entry (q,q) = entry (r,r) = cos(theta)
///   entry (r,q) = sin(theta),  entry (q,r) = -sin(theta)
class BasicForm {
 public:
  BasicForm(int q, int r, double theta, int dim);

  int q() const { return q_; }
  int r() const { return r_; }
  double theta() const { return theta_; }
  int dim() const { return dim_; }

 private:
  int q_, r_, dim_;
  double theta_;
};

/// Product of basic forms on mutually disjoint mode pairs, all sharing one
/// rotation angle. A basic form is the single-pair case. At most
/// floor(dim/2) pairs fit in an N-dimensional space.
class CompoundForm {
 public:
  CompoundForm(std::vector<ModePair> pairs, double theta, int dim);

  const std::vector<ModePair>& pairs() const { return pairs_; }
  double theta() const { return theta_; }
  int dim() const { return dim_; }

  CompoundForm with_theta(double theta) const;

  /// The pair rotating mode l, or nullptr if no pair touches it.
  const ModePair* pair_of_mode(int l) const;

 private:
  std::vector<ModePair> pairs_;
  double theta_;
  int dim_;
};

UnitaryMatrix basic_form_matrix(const BasicForm& f);

/// Product of the constituent basic-form matrices. Disjoint supports make
/// the factor order irrelevant.
UnitaryMatrix compound_form_matrix(const CompoundForm& c);

// --- measurement planning ------------------------------------------------

enum class Protocol { basic, compound };

/// The two rotation angles the extraction rules need.
enum class ThetaChoice { zero, half_pi };

double theta_radians(ThetaChoice t);

/// How a fitted fringe phase maps to a matrix-element argument:
/// direct — argument equals the fitted phase;
/// minus_pi — the pattern carries a built-in -pi, so argument = phase + pi.
enum class OffsetRule { direct, minus_pi };

/// One measurement: a form at one theta, detection projected onto mode l,
/// the interferometric phase scanned over phase_grid.
struct Setting {
  int form_index = 0;
  ThetaChoice theta = ThetaChoice::zero;
  int projection_mode = 0;
  std::vector<double> phase_grid;
};

/// Which matrix element a setting determines, and under which offset rule.
struct ElementTarget {
  int setting_index = 0;
  int row = 0;
  int col = 0;
  OffsetRule offset = OffsetRule::direct;
};

struct PhaseGridSpec {
  int count = 24;
  double lo = 0.0;
  double hi = 2.0 * std::numbers::pi;  // half-open [lo, hi)
};

std::vector<double> make_phase_grid(const PhaseGridSpec& spec);

/// Complete schedule for one reconstruction run. Canonical ordering: pairs
/// within a form sorted by q, forms sorted lexicographically by their pair
/// lists, settings grouped per form (per pair: theta=0 at l=q, theta=0 at
/// l=r, theta=pi/2 at l=q, theta=pi/2 at l=r; basic protocol additionally
/// scans every unrotated mode at theta=0). Runs over the same plan are
/// byte-reproducible.
struct MeasurementPlan {
  int dim = 0;
  Protocol protocol = Protocol::compound;
  std::vector<CompoundForm> forms;
  std::vector<Setting> settings;
  std::vector<ElementTarget> element_map;
};

/// Builds the measurement plan.
///
/// basic protocol: all N(N-1)/2 single-pair forms, q ascending then r.
/// compound protocol: a round-robin 1-factorization (circle method) giving
/// N-1 forms of N/2 disjoint pairs for even N, and N forms of (N-1)/2 pairs
/// for odd N (one mode idle per round). Every unordered pair is rotated by
/// exactly one form either way.
MeasurementPlan plan_schedule(int dim, Protocol protocol,
                              const PhaseGridSpec& grid = {});

std::string protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& name);

nlohmann::json plan_to_json(const MeasurementPlan& plan);
MeasurementPlan plan_from_json(const nlohmann::json& j);
void write_plan_file(const std::filesystem::path& path, const MeasurementPlan& plan);
MeasurementPlan read_plan_file(const std::filesystem::path& path);

}  // namespace uptomo
