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

#include "uptomo/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <utility>

#include "uptomo/errors.hpp"
#include "uptomo/io_util.hpp"
#include "uptomo/version.hpp"

namespace uptomo {
namespace {

// Below this fitted visibility an element is recorded as exactly zero: the
// phase of a flat fringe is noise, not information.
constexpr double kZeroVisibility = 1e-12;

std::string theta_label(ThetaChoice t) {
  return t == ThetaChoice::zero ? "0" : "pi/2";
}

}  // namespace

std::vector<ElementEstimate> extract_elements(const CompoundForm& form,
                                              const FormFits& fits,
                                              double max_visibility_excess) {
  // Every pair of the form needs all four of its fits before anything is
  // extracted, so a partial run fails loudly instead of returning a subset.
  for (const ModePair& p : form.pairs()) {
    for (ThetaChoice t : {ThetaChoice::zero, ThetaChoice::half_pi}) {
      for (int l : {p.q, p.r}) {
        if (fits.find({t, l}) == fits.end()) {
          throw ValidationError("missing fringe fit for theta=" + theta_label(t) +
                                ", projection mode " + std::to_string(l));
        }
      }
    }
  }

  std::vector<ElementEstimate> out;
  out.reserve(fits.size());
  for (const auto& [key, sf] : fits) {
    const auto& [theta, l] = key;
    const double v = sf.fit.visibility;
    if (v > 1.0 + max_visibility_excess) {
      throw ValidationError("setting " + std::to_string(sf.setting_index) +
                            " (theta=" + theta_label(theta) + ", mode " +
                            std::to_string(l) + "): visibility " + format_double(v) +
                            " exceeds the physical bound 1");
    }

    ElementEstimate e;
    e.source_setting = sf.setting_index;
    if (theta == ThetaChoice::zero) {
      // An unrotated projection mode sees only the diagonal element; this
      // covers both members of each pair and, in the basic protocol, every
      // untouched mode.
      e.row = l;
      e.col = l;
      e.offset = OffsetRule::direct;
    } else {
      const ModePair* pair = form.pair_of_mode(l);
      if (pair == nullptr) {
        throw ValidationError("theta=pi/2 fit for mode " + std::to_string(l) +
                              ", which the form does not rotate");
      }
      e.col = l;
      if (l == pair->q) {
        e.row = pair->r;
        e.offset = OffsetRule::minus_pi;
      } else {
        e.row = pair->q;
        e.offset = OffsetRule::direct;
      }
    }

    if (v < kZeroVisibility) {
      e.modulus = 0.0;
      e.argument = 0.0;
    } else {
      e.modulus = v;
      e.argument = e.offset == OffsetRule::minus_pi
                       ? wrap_angle(sf.fit.phase + std::numbers::pi)
                       : sf.fit.phase;
    }
    out.push_back(e);
  }
  return out;
}

ElementAccumulator::ElementAccumulator(int dim) : dim_(dim) {
  if (dim < 2) {
    throw DimensionError("accumulator dimension must be at least 2");
  }
  sums_.assign(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim),
               Complex{0.0, 0.0});
  counts_.assign(sums_.size(), 0);
}

void ElementAccumulator::add(const ElementEstimate& e) {
  if (e.row < 0 || e.row >= dim_ || e.col < 0 || e.col >= dim_) {
    throw ValidationError("element estimate (" + std::to_string(e.row) + ", " +
                          std::to_string(e.col) + ") out of range for dimension " +
                          std::to_string(dim_));
  }
  const std::size_t idx =
      static_cast<std::size_t>(e.row) * static_cast<std::size_t>(dim_) +
      static_cast<std::size_t>(e.col);
  sums_[idx] += std::polar(e.modulus, e.argument);
  ++counts_[idx];
}

int ElementAccumulator::populated_count() const {
  return static_cast<int>(std::count_if(counts_.begin(), counts_.end(),
                                        [](int c) { return c > 0; }));
}

int ElementAccumulator::count_at(int row, int col) const {
  if (row < 0 || row >= dim_ || col < 0 || col >= dim_) {
    throw ValidationError("element index out of range");
  }
  return counts_[static_cast<std::size_t>(row) * static_cast<std::size_t>(dim_) +
                 static_cast<std::size_t>(col)];
}

ComplexMatrix ElementAccumulator::average() const {
  Cmat m(dim_, dim_);
  for (int r = 0; r < dim_; ++r) {
    for (int c = 0; c < dim_; ++c) {
      const std::size_t idx =
          static_cast<std::size_t>(r) * static_cast<std::size_t>(dim_) +
          static_cast<std::size_t>(c);
      if (counts_[idx] == 0) {
        throw ValidationError("no estimate for element (" + std::to_string(r) +
                              ", " + std::to_string(c) + ")");
      }
      m(r, c) = sums_[idx] / static_cast<double>(counts_[idx]);
    }
  }
  return ComplexMatrix(m);
}

std::string phase_mode_name(PhaseMode m) {
  return m == PhaseMode::absolute ? "absolute" : "relative";
}

PhaseMode phase_mode_from_name(const std::string& s) {
  if (s == "absolute") return PhaseMode::absolute;
  if (s == "relative") return PhaseMode::relative;
  throw ValidationError("unknown phase mode '" + s + "'");
}

ReconstructionReport reconstruct(const PatternProvider& source,
                                 const MeasurementPlan& plan,
                                 const ReconstructOptions& options) {
  const int n = plan.dim;
  const int setting_count = static_cast<int>(plan.settings.size());
  if (setting_count == 0) {
    throw ValidationError("plan has no settings");
  }
  if (options.truth.has_value() && options.truth->dim() != n) {
    throw DimensionError("truth dimension " + std::to_string(options.truth->dim()) +
                         " does not match plan dimension " + std::to_string(n));
  }

  // One element target per setting, and full N^2 coverage across targets;
  // anything else means the plan file was damaged or handcrafted wrong.
  std::map<int, ElementTarget> target_by_setting;
  std::set<std::pair<int, int>> covered;
  for (const ElementTarget& t : plan.element_map) {
    if (!target_by_setting.emplace(t.setting_index, t).second) {
      throw ValidationError("setting " + std::to_string(t.setting_index) +
                            " appears twice in the element map");
    }
    covered.insert({t.row, t.col});
  }
  if (static_cast<int>(covered.size()) != n * n) {
    throw ValidationError("element map covers " + std::to_string(covered.size()) +
                          " of " + std::to_string(n * n) + " matrix elements");
  }

  std::vector<FringeFit> fits;
  fits.reserve(plan.settings.size());
  for (int i = 0; i < setting_count; ++i) {
    try {
      fits.push_back(fit_fringe(source(i)));
    } catch (const FitError& e) {
      throw FitError("setting " + std::to_string(i) + ": " + e.what());
    }
  }

  double shift = 0.0;
  std::optional<PhaseReference> reference;
  if (options.phase_mode == PhaseMode::relative) {
    int best = 0;
    for (int i = 1; i < setting_count; ++i) {
      if (fits[static_cast<std::size_t>(i)].visibility >
          fits[static_cast<std::size_t>(best)].visibility) {
        best = i;
      }
    }
    shift = fits[static_cast<std::size_t>(best)].phase;
    const ElementTarget& t = target_by_setting.at(best);
    reference = PhaseReference{best, t.row, t.col,
                               fits[static_cast<std::size_t>(best)].visibility};
  }

  // Group the (phase-shifted) fits per form and run the extraction rules.
  std::vector<FormFits> per_form(plan.forms.size());
  for (int i = 0; i < setting_count; ++i) {
    const Setting& s = plan.settings[static_cast<std::size_t>(i)];
    FringeFit shifted = fits[static_cast<std::size_t>(i)];
    shifted.phase = wrap_angle(shifted.phase - shift);
    const auto [it, inserted] =
        per_form[static_cast<std::size_t>(s.form_index)].emplace(
            std::pair{s.theta, s.projection_mode}, SettingFit{i, shifted});
    if (!inserted) {
      throw ValidationError("settings " + std::to_string(it->second.setting_index) +
                            " and " + std::to_string(i) +
                            " duplicate the same (form, theta, mode) measurement");
    }
  }

  ElementAccumulator acc(n);
  for (std::size_t f = 0; f < plan.forms.size(); ++f) {
    const std::vector<ElementEstimate> estimates = extract_elements(
        plan.forms[f], per_form[f], options.max_visibility_excess);
    for (const ElementEstimate& e : estimates) {
      const auto it = target_by_setting.find(e.source_setting);
      if (it == target_by_setting.end() || it->second.row != e.row ||
          it->second.col != e.col || it->second.offset != e.offset) {
        throw ValidationError(
            "plan element map disagrees with the extraction rules for setting " +
            std::to_string(e.source_setting) + " (extracted element (" +
            std::to_string(e.row) + ", " + std::to_string(e.col) + "))");
      }
      acc.add(e);
    }
  }

  ComplexMatrix estimate = acc.average();
  UnitaryMatrix projected = nearest_unitary(estimate);
  const double deviation = check_unitarity(estimate, kGateTol).deviation;

  std::optional<double> fid;
  std::optional<std::vector<double>> per_element;
  std::optional<ComplexMatrix> truth_copy;
  if (options.truth.has_value()) {
    const Cmat& t = options.truth->mat();
    fid = overlap_fidelity(estimate, options.truth->matrix());
    Cmat aligned = estimate.mat();
    if (options.phase_mode == PhaseMode::relative) {
      // Remove the gauge freedom before entrywise comparison; the overlap
      // trace supplies the aligning phase. A vanishing trace would mean the
      // reconstruction failed wholesale, in which case raw errors are as
      // informative as any.
      const Complex g = (aligned.adjoint() * t).trace();
      if (std::abs(g) > 1e-12) {
        aligned *= g / std::abs(g);
      }
    }
    std::vector<double> err(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        err[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) +
            static_cast<std::size_t>(c)] = std::abs(aligned(r, c) - t(r, c));
      }
    }
    per_element = std::move(err);
    truth_copy = options.truth->matrix();
  }

  return ReconstructionReport{
      .dim = n,
      .protocol = plan.protocol,
      .estimate = std::move(estimate),
      .projected = std::move(projected),
      .unitarity_deviation = deviation,
      .phase_mode = options.phase_mode,
      .reference = reference,
      .settings_used = setting_count,
      .seeds = options.seeds,
      .timestamp = iso8601_utc_now(),
      .fidelity_vs_truth = fid,
      .per_element_abs_error = std::move(per_element),
      .truth = std::move(truth_copy),
  };
}

VerificationResult verify_report(const ReconstructionReport& rep, double tol_mod,
                                 double tol_arg) {
  if (!rep.truth.has_value()) {
    throw ValidationError("report carries no truth matrix; nothing to verify against");
  }
  const int n = rep.dim;
  const Cmat& t = rep.truth->mat();
  Cmat est = rep.estimate.mat();
  if (rep.phase_mode == PhaseMode::relative) {
    const Complex g = (est.adjoint() * t).trace();
    if (std::abs(g) > 1e-12) {
      est *= g / std::abs(g);
    }
  }

  VerificationResult res;
  std::string& out = res.table;
  out += "element    |truth|     |est|    d(mod)  mod   arg(truth)   arg(est)    d(arg)  arg\n";
  char row[160];
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double tm = std::abs(t(r, c));
      const double em = std::abs(est(r, c));
      const double dm = std::abs(em - tm);
      const bool mod_ok = dm <= tol_mod;
      // A truth element this close to zero has no meaningful phase.
      const bool check_arg = tm >= 10.0 * tol_mod;
      const double ta = std::arg(t(r, c));
      const double ea = std::arg(est(r, c));
      const double da = check_arg ? angular_distance(ea, ta) : 0.0;
      const bool arg_ok = !check_arg || da <= tol_arg;

      ++res.checked;
      if (!mod_ok || !arg_ok) {
        ++res.failed;
      }
      std::snprintf(row, sizeof(row),
                    "U[%d][%d]  %9.6f  %9.6f  %8.1e  %-4s  %9.6f  %9.6f  %8.1e  %s\n",
                    r, c, tm, em, dm, mod_ok ? "ok" : "FAIL", ta, ea, da,
                    !check_arg ? "skip" : (arg_ok ? "ok" : "FAIL"));
      out += row;
    }
  }
  res.pass = res.failed == 0;
  if (res.pass) {
    out += "PASS: all " + std::to_string(res.checked) + " elements within tolerance (mod " +
           format_double(tol_mod) + ", arg " + format_double(tol_arg) + ")\n";
  } else {
    out += "FAIL: " + std::to_string(res.failed) + " of " + std::to_string(res.checked) +
           " elements outside tolerance\n";
  }
  return res;
}

std::string setting_file_stem(int setting_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "setting_%04d", setting_id);
  return std::string(buf);
}

FileSource::FileSource(std::filesystem::path pattern_dir, MeasurementPlan plan)
    : dir_(std::move(pattern_dir)), plan_(std::move(plan)) {
  if (!std::filesystem::is_directory(dir_)) {
    throw IoError("pattern directory does not exist: " + dir_.string());
  }
}

InterferencePattern FileSource::operator()(int setting_index) const {
  if (setting_index < 0 ||
      setting_index >= static_cast<int>(plan_.settings.size())) {
    throw ValidationError("setting index " + std::to_string(setting_index) +
                          " out of range for plan with " +
                          std::to_string(plan_.settings.size()) + " settings");
  }
  const std::string stem = setting_file_stem(setting_index);
  PatternFilePayload payload =
      read_pattern_files(dir_ / (stem + ".csv"), dir_ / (stem + ".json"));

  const Setting& s = plan_.settings[static_cast<std::size_t>(setting_index)];
  const CompoundForm& form = plan_.forms[static_cast<std::size_t>(s.form_index)];
  const PatternSetting& got = payload.pattern.setting;
  if (payload.setting_id != setting_index) {
    throw ValidationError("pattern file " + stem + " carries setting id " +
                          std::to_string(payload.setting_id));
  }
  if (got.dim != plan_.dim) {
    throw ValidationError("pattern " + stem + " has dimension " +
                          std::to_string(got.dim) + ", plan expects " +
                          std::to_string(plan_.dim));
  }
  if (got.pairs != form.pairs()) {
    throw ValidationError("pattern " + stem + " was taken with different mode pairs "
                          "than the plan prescribes");
  }
  if (std::abs(got.theta - theta_radians(s.theta)) > 1e-12) {
    throw ValidationError("pattern " + stem + " was taken at theta=" +
                          format_double(got.theta) + ", plan expects theta=" +
                          format_double(theta_radians(s.theta)));
  }
  if (got.projection_mode != s.projection_mode) {
    throw ValidationError("pattern " + stem + " projects onto mode " +
                          std::to_string(got.projection_mode) + ", plan expects " +
                          std::to_string(s.projection_mode));
  }
  return payload.pattern;
}

// --- serialization -------------------------------------------------------

nlohmann::json report_to_json(const ReconstructionReport& rep) {
  nlohmann::json j{
      {"schema_version", kSchemaVersion},
      {"tool_version", kVersion},
      {"timestamp", rep.timestamp},
      {"dim", rep.dim},
      {"protocol", protocol_name(rep.protocol)},
      {"estimate", matrix_to_json(rep.estimate)},
      {"projected", matrix_to_json(rep.projected.matrix())},
      {"unitarity_deviation", rep.unitarity_deviation},
      {"phase_mode", phase_mode_name(rep.phase_mode)},
      {"settings_used", rep.settings_used},
      {"seeds", rep.seeds},
  };
  if (rep.reference.has_value()) {
    j["reference"] = {
        {"setting", rep.reference->setting_index},
        {"row", rep.reference->row},
        {"col", rep.reference->col},
        {"visibility", rep.reference->visibility},
    };
  }
  if (rep.fidelity_vs_truth.has_value()) {
    j["fidelity_vs_truth"] = *rep.fidelity_vs_truth;
  }
  if (rep.per_element_abs_error.has_value()) {
    j["per_element_abs_error"] = *rep.per_element_abs_error;
  }
  if (rep.truth.has_value()) {
    j["truth"] = matrix_to_json(*rep.truth);
  }
  return j;
}

ReconstructionReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw ValidationError("unsupported report schema version");
    }
    const int dim = j.at("dim").get<int>();
    ComplexMatrix estimate = matrix_from_json(j.at("estimate"));
    UnitaryMatrix projected{matrix_from_json(j.at("projected"))};
    if (estimate.dim() != dim || projected.dim() != dim) {
      throw ValidationError("report matrices do not match the declared dimension");
    }

    std::optional<PhaseReference> reference;
    if (j.contains("reference")) {
      const nlohmann::json& r = j.at("reference");
      reference = PhaseReference{
          r.at("setting").get<int>(), r.at("row").get<int>(),
          r.at("col").get<int>(), r.at("visibility").get<double>()};
    }
    std::optional<double> fid;
    if (j.contains("fidelity_vs_truth")) {
      fid = j.at("fidelity_vs_truth").get<double>();
    }
    std::optional<std::vector<double>> per_element;
    if (j.contains("per_element_abs_error")) {
      per_element = j.at("per_element_abs_error").get<std::vector<double>>();
      if (static_cast<int>(per_element->size()) != dim * dim) {
        throw ValidationError("per-element error list has the wrong length");
      }
    }
    std::optional<ComplexMatrix> truth;
    if (j.contains("truth")) {
      truth = matrix_from_json(j.at("truth"));
      if (truth->dim() != dim) {
        throw ValidationError("embedded truth does not match the declared dimension");
      }
    }

    return ReconstructionReport{
        .dim = dim,
        .protocol = protocol_from_name(j.at("protocol").get<std::string>()),
        .estimate = std::move(estimate),
        .projected = std::move(projected),
        .unitarity_deviation = j.at("unitarity_deviation").get<double>(),
        .phase_mode = phase_mode_from_name(j.at("phase_mode").get<std::string>()),
        .reference = reference,
        .settings_used = j.at("settings_used").get<int>(),
        .seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>(),
        .timestamp = j.at("timestamp").get<std::string>(),
        .fidelity_vs_truth = fid,
        .per_element_abs_error = std::move(per_element),
        .truth = std::move(truth),
    };
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed report JSON: ") + e.what());
  }
}

void write_report_file(const std::filesystem::path& path,
                       const ReconstructionReport& rep) {
  write_file_atomic(path, report_to_json(rep).dump(2) + "\n");
}

ReconstructionReport read_report_file(const std::filesystem::path& path) {
  return report_from_json(read_json_file(path));
}

nlohmann::json fringe_fit_to_json(const FringeFit& fit) {
  return nlohmann::json{
      {"mean_level", fit.mean_level},   {"amplitude", fit.amplitude},
      {"phase", fit.phase},             {"visibility", fit.visibility},
      {"residual_rms", fit.residual_rms},
  };
}

FringeFit fringe_fit_from_json(const nlohmann::json& j) {
  try {
    FringeFit fit;
    fit.mean_level = j.at("mean_level").get<double>();
    fit.amplitude = j.at("amplitude").get<double>();
    fit.phase = j.at("phase").get<double>();
    fit.visibility = j.at("visibility").get<double>();
    fit.residual_rms = j.at("residual_rms").get<double>();
    return fit;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed fringe-fit JSON: ") + e.what());
  }
}

}  // namespace uptomo
