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

#include "uptomo/forms.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "uptomo/errors.hpp"
#include "uptomo/io_util.hpp"
#include "uptomo/version.hpp"

namespace uptomo {

namespace {

void validate_pair(const ModePair& p, int dim, const char* what) {
  if (p.q < 0 || p.r >= dim) {
    throw DimensionError(std::string(what) + ": mode indices (" + std::to_string(p.q) +
                         "," + std::to_string(p.r) + ") out of range for dim " +
                         std::to_string(dim));
  }
  if (p.q >= p.r) {
    throw ValidationError(std::string(what) + ": requires q < r, got (" +
                          std::to_string(p.q) + "," + std::to_string(p.r) + ")");
  }
}

}  // namespace

BasicForm::BasicForm(int q, int r, double theta, int dim)
    : q_(q), r_(r), dim_(dim), theta_(theta) {
  if (dim < 2) {
    throw DimensionError("BasicForm: dim must be >= 2");
  }
  validate_pair(ModePair{q, r}, dim, "BasicForm");
}

CompoundForm::CompoundForm(std::vector<ModePair> pairs, double theta, int dim)
    : pairs_(std::move(pairs)), theta_(theta), dim_(dim) {
  if (dim < 2) {
    throw DimensionError("CompoundForm: dim must be >= 2");
  }
  if (pairs_.empty()) {
    throw ValidationError("CompoundForm: needs at least one pair");
  }
  if (static_cast<int>(pairs_.size()) > dim / 2) {
    throw ValidationError("CompoundForm: " + std::to_string(pairs_.size()) +
                          " pairs exceed floor(dim/2) = " + std::to_string(dim / 2));
  }
  std::set<int> seen;
  for (const auto& p : pairs_) {
    validate_pair(p, dim, "CompoundForm");
    // A mode may be rotated by at most one constituent basic form.
    for (int mode : {p.q, p.r}) {
      if (!seen.insert(mode).second) {
        throw ValidationError("CompoundForm: pairs are not disjoint at mode " +
                              std::to_string(mode));
      }
    }
  }
  std::sort(pairs_.begin(), pairs_.end(),
            [](const ModePair& a, const ModePair& b) { return a.q < b.q; });
}

CompoundForm CompoundForm::with_theta(double theta) const {
  return CompoundForm(pairs_, theta, dim_);
}

const ModePair* CompoundForm::pair_of_mode(int l) const {
  for (const auto& p : pairs_) {
    if (p.q == l || p.r == l) {
      return &p;
    }
  }
  return nullptr;
}

UnitaryMatrix basic_form_matrix(const BasicForm& f) {
  Cmat m = Cmat::Identity(f.dim(), f.dim());
  const double c = std::cos(f.theta());
  const double s = std::sin(f.theta());
  m(f.q(), f.q()) = c;
  m(f.r(), f.r()) = c;
  m(f.r(), f.q()) = s;
  m(f.q(), f.r()) = -s;
  return UnitaryMatrix(ComplexMatrix(std::move(m)));
}

UnitaryMatrix compound_form_matrix(const CompoundForm& c) {
  Cmat product = Cmat::Identity(c.dim(), c.dim());
  for (const auto& p : c.pairs()) {
    const BasicForm f(p.q, p.r, c.theta(), c.dim());
    product = basic_form_matrix(f).mat() * product;
  }
  return UnitaryMatrix(ComplexMatrix(std::move(product)));
}

double theta_radians(ThetaChoice t) {
  return t == ThetaChoice::zero ? 0.0 : std::numbers::pi / 2.0;
}

std::vector<double> make_phase_grid(const PhaseGridSpec& spec) {
  if (spec.count < 3) {
    throw ValidationError("phase grid needs at least 3 points, got " +
                          std::to_string(spec.count));
  }
  if (!(spec.hi > spec.lo)) {
    throw ValidationError("phase grid span must be nonempty");
  }
  std::vector<double> grid(spec.count);
  const double step = (spec.hi - spec.lo) / spec.count;
  for (int i = 0; i < spec.count; ++i) {
    grid[i] = spec.lo + step * i;
  }
  return grid;
}

namespace {

// Round-robin rounds over modes 0..n-1 (circle method). Mode n-1 is the
// fixed pivot for even n; for odd n a virtual dummy partner marks the idle
// mode, which simply drops out of that round.
std::vector<std::vector<ModePair>> one_factorization(int n) {
  const bool odd = (n % 2) != 0;
  const int m = odd ? n + 1 : n;  // dummy index == n when odd
  const int rounds = m - 1;
  std::vector<std::vector<ModePair>> out(rounds);
  for (int t = 0; t < rounds; ++t) {
    auto add = [&](int a, int b) {
      if (a == n || b == n) {
        return;  // dummy pairing: this mode idles for the round
      }
      out[t].push_back(a < b ? ModePair{a, b} : ModePair{b, a});
    };
    add(t, m - 1);
    for (int i = 1; i < m / 2; ++i) {
      add((t + i) % (m - 1), (t - i + (m - 1)) % (m - 1));
    }
  }
  return out;
}

void append_settings_for_form(MeasurementPlan& plan, int form_index,
                              const std::vector<double>& grid) {
  const CompoundForm& form = plan.forms[form_index];
  auto add = [&](ThetaChoice theta, int l, int row, int col, OffsetRule offset) {
    plan.settings.push_back(Setting{form_index, theta, l, grid});
    plan.element_map.push_back(
        ElementTarget{static_cast<int>(plan.settings.size()) - 1, row, col, offset});
  };
  for (const auto& p : form.pairs()) {
    add(ThetaChoice::zero, p.q, p.q, p.q, OffsetRule::direct);
    add(ThetaChoice::zero, p.r, p.r, p.r, OffsetRule::direct);
    add(ThetaChoice::half_pi, p.q, p.r, p.q, OffsetRule::minus_pi);
    add(ThetaChoice::half_pi, p.r, p.q, p.r, OffsetRule::direct);
  }
  if (plan.protocol == Protocol::basic) {
    // Unrotated modes still show the diagonal-element fringe; scan them at
    // theta = 0 so each basic form also re-measures every U_ll.
    for (int l = 0; l < form.dim(); ++l) {
      if (form.pair_of_mode(l) == nullptr) {
        add(ThetaChoice::zero, l, l, l, OffsetRule::direct);
      }
    }
  }
}

}  // namespace

MeasurementPlan plan_schedule(int dim, Protocol protocol, const PhaseGridSpec& grid_spec) {
  if (dim < 2) {
    throw DimensionError("plan_schedule: dim must be >= 2");
  }
  const std::vector<double> grid = make_phase_grid(grid_spec);

  MeasurementPlan plan;
  plan.dim = dim;
  plan.protocol = protocol;

  if (protocol == Protocol::basic) {
    for (int q = 0; q < dim - 1; ++q) {
      for (int r = q + 1; r < dim; ++r) {
        plan.forms.emplace_back(std::vector<ModePair>{{q, r}}, 0.0, dim);
      }
    }
  } else {
    auto rounds = one_factorization(dim);
    for (auto& pairs : rounds) {
      plan.forms.emplace_back(std::move(pairs), 0.0, dim);
    }
    // Canonical order: lexicographic in the (already q-sorted) pair lists.
    std::sort(plan.forms.begin(), plan.forms.end(),
              [](const CompoundForm& a, const CompoundForm& b) {
                return std::lexicographical_compare(
                    a.pairs().begin(), a.pairs().end(), b.pairs().begin(), b.pairs().end(),
                    [](const ModePair& x, const ModePair& y) {
                      return x.q != y.q ? x.q < y.q : x.r < y.r;
                    });
              });
  }

  for (int f = 0; f < static_cast<int>(plan.forms.size()); ++f) {
    append_settings_for_form(plan, f, grid);
  }
  return plan;
}

std::string protocol_name(Protocol p) {
  return p == Protocol::basic ? "basic" : "compound";
}

Protocol protocol_from_name(const std::string& name) {
  if (name == "basic") {
    return Protocol::basic;
  }
  if (name == "compound") {
    return Protocol::compound;
  }
  throw ValidationError("unknown protocol '" + name + "' (expected basic|compound)");
}

namespace {

std::string theta_name(ThetaChoice t) {
  return t == ThetaChoice::zero ? "0" : "pi_over_2";
}

ThetaChoice theta_from_name(const std::string& s) {
  if (s == "0") {
    return ThetaChoice::zero;
  }
  if (s == "pi_over_2") {
    return ThetaChoice::half_pi;
  }
  throw IoError("plan: unknown theta tag '" + s + "'");
}

std::string offset_name(OffsetRule o) {
  return o == OffsetRule::direct ? "direct" : "minus_pi";
}

OffsetRule offset_from_name(const std::string& s) {
  if (s == "direct") {
    return OffsetRule::direct;
  }
  if (s == "minus_pi") {
    return OffsetRule::minus_pi;
  }
  throw IoError("plan: unknown offset rule '" + s + "'");
}

}  // namespace

nlohmann::json plan_to_json(const MeasurementPlan& plan) {
  nlohmann::json forms = nlohmann::json::array();
  for (const auto& form : plan.forms) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : form.pairs()) {
      pairs.push_back({p.q, p.r});
    }
    forms.push_back({{"pairs", std::move(pairs)}});
  }
  // All settings of a generated plan share one grid; store it once.
  nlohmann::json grid = nlohmann::json::array();
  if (!plan.settings.empty()) {
    for (double phi : plan.settings.front().phase_grid) {
      grid.push_back(phi);
    }
  }
  nlohmann::json settings = nlohmann::json::array();
  for (const auto& s : plan.settings) {
    settings.push_back({{"form", s.form_index},
                        {"theta", theta_name(s.theta)},
                        {"l", s.projection_mode}});
  }
  nlohmann::json element_map = nlohmann::json::array();
  for (const auto& t : plan.element_map) {
    element_map.push_back({{"setting", t.setting_index},
                           {"row", t.row},
                           {"col", t.col},
                           {"offset", offset_name(t.offset)}});
  }
  return nlohmann::json{{"schema_version", kSchemaVersion},
                        {"dim", plan.dim},
                        {"protocol", protocol_name(plan.protocol)},
                        {"phase_grid", std::move(grid)},
                        {"forms", std::move(forms)},
                        {"settings", std::move(settings)},
                        {"element_map", std::move(element_map)}};
}

MeasurementPlan plan_from_json(const nlohmann::json& j) {
  try {
    MeasurementPlan plan;
    plan.dim = j.at("dim").get<int>();
    plan.protocol = protocol_from_name(j.at("protocol").get<std::string>());
    std::vector<double> grid = j.at("phase_grid").get<std::vector<double>>();
    for (const auto& jf : j.at("forms")) {
      std::vector<ModePair> pairs;
      for (const auto& jp : jf.at("pairs")) {
        pairs.push_back(ModePair{jp.at(0).get<int>(), jp.at(1).get<int>()});
      }
      plan.forms.emplace_back(std::move(pairs), 0.0, plan.dim);
    }
    for (const auto& js : j.at("settings")) {
      Setting s;
      s.form_index = js.at("form").get<int>();
      s.theta = theta_from_name(js.at("theta").get<std::string>());
      s.projection_mode = js.at("l").get<int>();
      s.phase_grid = grid;
      if (s.form_index < 0 || s.form_index >= static_cast<int>(plan.forms.size())) {
        throw IoError("plan: setting references unknown form " +
                      std::to_string(s.form_index));
      }
      plan.settings.push_back(std::move(s));
    }
    for (const auto& jt : j.at("element_map")) {
      ElementTarget t;
      t.setting_index = jt.at("setting").get<int>();
      t.row = jt.at("row").get<int>();
      t.col = jt.at("col").get<int>();
      t.offset = offset_from_name(jt.at("offset").get<std::string>());
      if (t.setting_index < 0 || t.setting_index >= static_cast<int>(plan.settings.size())) {
        throw IoError("plan: element map references unknown setting " +
                      std::to_string(t.setting_index));
      }
      plan.element_map.push_back(t);
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("plan: malformed JSON: ") + e.what());
  }
}

void write_plan_file(const std::filesystem::path& path, const MeasurementPlan& plan) {
  write_file_atomic(path, plan_to_json(plan).dump(2) + "\n");
}

MeasurementPlan read_plan_file(const std::filesystem::path& path) {
  return plan_from_json(read_json_file(path));
}

}  // namespace uptomo
