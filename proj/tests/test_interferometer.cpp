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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "uptomo/errors.hpp"
#include "uptomo/forms.hpp"
#include "uptomo/interferometer.hpp"
#include "uptomo/matrix.hpp"

namespace fs = std::filesystem;
using uptomo::CompoundForm;
using uptomo::InterferencePattern;
using uptomo::NoiseConfig;
using uptomo::NoiseKind;
using uptomo::PhaseOffsetMode;
using uptomo::UnitaryMatrix;
using uptomo::ValueKind;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> default_grid() { return uptomo::make_phase_grid({}); }

UnitaryMatrix pairing_form_matrix(int dim, std::vector<uptomo::ModePair> pairs,
                                  double theta) {
  return uptomo::compound_form_matrix(CompoundForm(std::move(pairs), theta, dim));
}

double max_value_diff(const InterferencePattern& a, const InterferencePattern& b) {
  REQUIRE(a.samples.size() == b.samples.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    m = std::max(m, std::abs(a.samples[i].value - b.samples[i].value));
  return m;
}

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("uptomo_ifm_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("identity transformations give the bare interference fringe") {
  // U = O = I: value(phi) = 1/2 [1 + sin(phi)].
  const UnitaryMatrix u = uptomo::named_gate("identity", 4);
  const UnitaryMatrix o = uptomo::named_gate("identity", 4);
  const auto grid = default_grid();
  const auto p = uptomo::closed_form_pattern(u, o, 0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(p.samples[i].phi == grid[i]);
    CHECK(std::abs(p.samples[i].value - 0.5 * (1.0 + std::sin(grid[i]))) < 1e-15);
  }
}

TEST_CASE("hadamard4 analytic fringes, unrotated form") {
  const UnitaryMatrix u = uptomo::named_gate("hadamard4", 4);
  const UnitaryMatrix o = pairing_form_matrix(4, {{0, 1}, {2, 3}}, 0.0);
  const auto grid = default_grid();
  SUBCASE("projection on mode 0: half-visibility sine") {
    const auto p = uptomo::closed_form_pattern(u, o, 0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(std::abs(p.samples[i].value -
                     0.5 * (1.0 + 0.5 * std::sin(grid[i]))) <= 1e-12);
  }
  SUBCASE("projection on mode 1: quarter-period shift") {
    const auto p = uptomo::closed_form_pattern(u, o, 1, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(std::abs(p.samples[i].value -
                     0.5 * (1.0 + 0.5 * std::sin(grid[i] + kPi / 2))) <= 1e-12);
  }
}

TEST_CASE("hadamard4 analytic fringe, rotated form") {
  const UnitaryMatrix u = uptomo::named_gate("hadamard4", 4);
  const UnitaryMatrix o = pairing_form_matrix(4, {{0, 1}, {2, 3}}, kPi / 2);
  const auto grid = default_grid();
  const auto p = uptomo::closed_form_pattern(u, o, 2, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(p.samples[i].value -
                   0.5 * (1.0 - 0.5 * std::sin(grid[i] + kPi))) <= 1e-12);
}

TEST_CASE("frozen spot values at phi = 0.7") {
  const UnitaryMatrix u = uptomo::named_gate("hadamard4", 4);
  const std::vector<double> grid = {0.0, 0.7, 1.4};
  const auto unrot = pairing_form_matrix(4, {{0, 1}, {2, 3}}, 0.0);
  const auto rot = pairing_form_matrix(4, {{0, 1}, {2, 3}}, kPi / 2);
  const auto pa = uptomo::closed_form_pattern(u, unrot, 0, grid);
  const auto pc = uptomo::closed_form_pattern(u, unrot, 1, grid);
  const auto pf = uptomo::closed_form_pattern(u, rot, 2, grid);
  CHECK(pa.samples[1].value == doctest::Approx(0.6610544218094228).epsilon(1e-14));
  CHECK(pc.samples[1].value == doctest::Approx(0.691210546821122).epsilon(1e-14));
  CHECK(pf.samples[1].value == doctest::Approx(0.6610544218094228).epsilon(1e-14));
}

TEST_CASE("state-vector route reproduces the analytic fringes") {
  const UnitaryMatrix u = uptomo::named_gate("hadamard4", 4);
  const auto unrot = pairing_form_matrix(4, {{0, 1}, {2, 3}}, 0.0);
  const auto rot = pairing_form_matrix(4, {{0, 1}, {2, 3}}, kPi / 2);
  const auto grid = default_grid();
  const auto pa = uptomo::statevector_pattern(u, unrot, 0, grid);
  const auto pf = uptomo::statevector_pattern(u, rot, 2, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(pa.samples[i].value -
                   0.5 * (1.0 + 0.5 * std::sin(grid[i]))) <= 1e-12);
    CHECK(std::abs(pf.samples[i].value -
                   0.5 * (1.0 - 0.5 * std::sin(grid[i] + kPi))) <= 1e-12);
  }
}

TEST_CASE("closed form and state-vector route agree on random inputs") {
  const auto grid = default_grid();
  for (const int dim : {2, 3, 5}) {
    const auto plan = uptomo::plan_schedule(dim, uptomo::Protocol::compound);
    for (int t = 0; t < 10; ++t) {
      const UnitaryMatrix u = uptomo::haar_random(dim, 100 * dim + t);
      const auto& form = plan.forms[t % plan.forms.size()];
      const double theta = (t % 2 == 0) ? 0.0 : kPi / 2;
      const auto o = uptomo::compound_form_matrix(form.with_theta(theta));
      const int l = t % dim;
      const auto closed = uptomo::closed_form_pattern(u, o, l, grid);
      const auto sv = uptomo::statevector_pattern(u, o, l, grid);
      CHECK(max_value_diff(closed, sv) <= 1e-12);
    }
  }
}

TEST_CASE("unrotated known transformation probes only the diagonal element") {
  const int dim = 5;
  const UnitaryMatrix u = uptomo::haar_random(dim, 17);
  const UnitaryMatrix o = uptomo::named_gate("identity", dim);
  const auto grid = default_grid();
  for (int l = 0; l < dim; ++l) {
    const auto p = uptomo::closed_form_pattern(u, o, l, grid);
    const double mod = std::abs(u(l, l));
    const double arg = std::arg(u(l, l));
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(std::abs(p.samples[i].value -
                     0.5 * (1.0 + mod * std::sin(grid[i] + arg))) <= 1e-12);
  }
}

TEST_CASE("scale multiplies values linearly") {
  const UnitaryMatrix u = uptomo::haar_random(3, 4);
  const UnitaryMatrix o = uptomo::named_gate("identity", 3);
  const auto grid = default_grid();
  const auto p_half = uptomo::closed_form_pattern(u, o, 1, grid, 0.5);
  const auto p_small = uptomo::closed_form_pattern(u, o, 1, grid, 0.17);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(p_small.samples[i].value -
                   (0.17 / 0.5) * p_half.samples[i].value) <= 1e-15);
}

TEST_CASE("coherence attenuates the interference term") {
  const UnitaryMatrix u = uptomo::haar_random(4, 6);
  const UnitaryMatrix o = uptomo::named_gate("identity", 4);
  const auto grid = default_grid();
  const auto full = uptomo::closed_form_pattern(u, o, 2, grid, 0.5, 1.0);
  const auto dim0 = uptomo::closed_form_pattern(u, o, 2, grid, 0.5, 0.0);
  const auto part = uptomo::closed_form_pattern(u, o, 2, grid, 0.5, 0.37);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(dim0.samples[i].value == doctest::Approx(0.5).epsilon(1e-15));
    const double ac_full = full.samples[i].value - 0.5;
    const double ac_part = part.samples[i].value - 0.5;
    CHECK(std::abs(ac_part - 0.37 * ac_full) <= 1e-15);
  }
}

TEST_CASE("pattern generation validates its inputs") {
  const UnitaryMatrix u = uptomo::named_gate("identity", 3);
  const UnitaryMatrix o2 = uptomo::named_gate("identity", 2);
  const auto grid = default_grid();
  CHECK_THROWS_AS((void)uptomo::closed_form_pattern(u, o2, 0, grid),
                  uptomo::DimensionError);
  CHECK_THROWS_AS((void)uptomo::closed_form_pattern(u, u, 3, grid),
                  uptomo::ValidationError);
  CHECK_THROWS_AS((void)uptomo::closed_form_pattern(u, u, -1, grid),
                  uptomo::ValidationError);
  CHECK_THROWS_AS((void)uptomo::closed_form_pattern(u, u, 0, {}),
                  uptomo::ValidationError);
  CHECK_THROWS_AS((void)uptomo::closed_form_pattern(u, u, 0, {0.0, 0.0, 1.0}),
                  uptomo::ValidationError);
  CHECK_THROWS_AS((void)uptomo::closed_form_pattern(u, u, 0, grid, 0.0),
                  uptomo::ValidationError);
  CHECK_THROWS_AS((void)uptomo::closed_form_pattern(u, u, 0, grid, 0.5, 1.5),
                  uptomo::ValidationError);
}

TEST_CASE("draw_hidden_offset is deterministic and lies in [0, 2 pi)") {
  const double a = uptomo::draw_hidden_offset(42);
  const double b = uptomo::draw_hidden_offset(42);
  const double c = uptomo::draw_hidden_offset(43);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a >= 0.0);
  CHECK(a < 2.0 * kPi);
}

TEST_CASE("noise kind none with known phase passes patterns through") {
  const UnitaryMatrix u = uptomo::haar_random(2, 1);
  const auto p = uptomo::closed_form_pattern(u, uptomo::named_gate("identity", 2),
                                             0, default_grid());
  const auto q = uptomo::apply_noise(p, NoiseConfig{}, 0);
  CHECK(q.value_kind == ValueKind::probability);
  for (std::size_t i = 0; i < p.samples.size(); ++i) {
    CHECK(q.samples[i].phi == p.samples[i].phi);
    CHECK(q.samples[i].value == p.samples[i].value);
  }
}

TEST_CASE("poisson noise is reproducible and stream-separated") {
  const UnitaryMatrix u = uptomo::haar_random(2, 2);
  const auto p = uptomo::closed_form_pattern(u, uptomo::named_gate("identity", 2),
                                             0, default_grid());
  NoiseConfig noise;
  noise.kind = NoiseKind::poisson;
  noise.expected_counts_per_sample = 1e6;
  noise.master_seed = 99;
  const auto a = uptomo::apply_noise(p, noise, 5);
  const auto b = uptomo::apply_noise(p, noise, 5);
  const auto c = uptomo::apply_noise(p, noise, 6);
  CHECK(a.value_kind == ValueKind::poisson_counts);
  int diff = 0;
  for (std::size_t i = 0; i < p.samples.size(); ++i) {
    CHECK(a.samples[i].value == b.samples[i].value);
    CHECK(a.samples[i].value >= 0.0);
    CHECK(a.samples[i].value == std::floor(a.samples[i].value));
    if (a.samples[i].value != c.samples[i].value) ++diff;
  }
  CHECK(diff > 0);
}

TEST_CASE("poisson counts average to expected_counts_per_sample times value") {
  // Uniform full-period grid of 1/2 [1 + 1/2 sin] averages to exactly 1/2.
  const UnitaryMatrix u = uptomo::named_gate("hadamard4", 4);
  const auto o = pairing_form_matrix(4, {{0, 1}, {2, 3}}, 0.0);
  const auto p = uptomo::closed_form_pattern(u, o, 0, default_grid());
  NoiseConfig noise;
  noise.kind = NoiseKind::poisson;
  noise.expected_counts_per_sample = 1e6;
  noise.master_seed = 31337;
  double sum = 0.0;
  int n = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto q = uptomo::apply_noise(p, noise, rep);
    for (const auto& s : q.samples) {
      sum += s.value / 1e6;
      ++n;
    }
  }
  // 3 sigma of the mean: sqrt(0.5 / 1e6 / 2400) ~ 1.44e-5.
  CHECK(std::abs(sum / n - 0.5) < 4.5e-5);
}

TEST_CASE("poisson noise validates its inputs") {
  const UnitaryMatrix u = uptomo::named_gate("identity", 2);
  NoiseConfig noise;
  noise.kind = NoiseKind::poisson;
  noise.expected_counts_per_sample = 1e6;
  SUBCASE("values above one are rejected") {
    const auto p =
        uptomo::closed_form_pattern(u, u, 0, default_grid(), 0.6);  // peaks at 1.2
    CHECK_THROWS_AS((void)uptomo::apply_noise(p, noise, 0), uptomo::ValidationError);
  }
  SUBCASE("expected counts below one are rejected") {
    const auto p = uptomo::closed_form_pattern(u, u, 0, default_grid());
    noise.expected_counts_per_sample = 0.5;
    CHECK_THROWS_AS((void)uptomo::apply_noise(p, noise, 0), uptomo::ValidationError);
  }
  SUBCASE("only probability-valued patterns can be resampled") {
    const auto p = uptomo::closed_form_pattern(u, u, 0, default_grid());
    const auto counts = uptomo::apply_noise(p, noise, 0);
    CHECK_THROWS_AS((void)uptomo::apply_noise(counts, noise, 0),
                    uptomo::ValidationError);
  }
}

TEST_CASE("hidden phase mode relabels generating phases back to nominal") {
  const UnitaryMatrix u = uptomo::haar_random(3, 9);
  const UnitaryMatrix o = uptomo::named_gate("identity", 3);
  const auto grid = default_grid();
  const double offset = uptomo::draw_hidden_offset(7);
  std::vector<double> shifted = grid;
  for (double& phi : shifted) phi += offset;
  const auto generated = uptomo::closed_form_pattern(u, o, 1, shifted);
  NoiseConfig noise;
  noise.phase_offset_mode = PhaseOffsetMode::hidden;
  noise.master_seed = 7;
  SUBCASE("offset must be resolved before application") {
    CHECK_THROWS_AS((void)uptomo::apply_noise(generated, noise, 0),
                    uptomo::ValidationError);
  }
  SUBCASE("relabeled abscissae match the nominal grid") {
    noise.hidden_offset = offset;
    const auto q = uptomo::apply_noise(generated, noise, 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(q.samples[i].phi - grid[i]) < 1e-12);
      CHECK(q.samples[i].value == generated.samples[i].value);
    }
  }
}

TEST_CASE("SimulatedSource stamps setting metadata onto each pattern") {
  const int dim = 4;
  const auto plan = uptomo::plan_schedule(dim, uptomo::Protocol::compound);
  const uptomo::SimulatedSource src(uptomo::named_gate("hadamard4", dim), plan);
  const auto p = src(6);  // form 0: settings 0..7, form 1 starts at 8
  CHECK(p.setting.dim == dim);
  CHECK(p.setting.pairs == plan.forms[plan.settings[6].form_index].pairs());
  CHECK(p.setting.theta ==
        doctest::Approx(uptomo::theta_radians(plan.settings[6].theta)));
  CHECK(p.setting.projection_mode == plan.settings[6].projection_mode);
  CHECK(p.samples.size() == plan.settings[6].phase_grid.size());
}

TEST_CASE("SimulatedSource is deterministic and call-order independent") {
  const auto plan = uptomo::plan_schedule(4, uptomo::Protocol::compound);
  NoiseConfig noise;
  noise.kind = NoiseKind::poisson;
  noise.expected_counts_per_sample = 1e4;
  noise.master_seed = 5;
  const UnitaryMatrix u = uptomo::haar_random(4, 3);
  const uptomo::SimulatedSource a(u, plan, 0.5, 1.0, noise);
  const uptomo::SimulatedSource b(u, plan, 0.5, 1.0, noise);
  (void)b(1);  // perturb call order on b
  (void)b(11);
  const auto pa = a(3);
  const auto pb = b(3);
  for (std::size_t i = 0; i < pa.samples.size(); ++i) {
    CHECK(pa.samples[i].phi == pb.samples[i].phi);
    CHECK(pa.samples[i].value == pb.samples[i].value);
  }
}

TEST_CASE("SimulatedSource hidden mode keeps nominal labels, shifts values") {
  const auto plan = uptomo::plan_schedule(4, uptomo::Protocol::compound);
  const UnitaryMatrix u = uptomo::haar_random(4, 21);
  NoiseConfig noise;
  noise.phase_offset_mode = PhaseOffsetMode::hidden;
  noise.master_seed = 77;
  const uptomo::SimulatedSource src(u, plan, 0.5, 1.0, noise);
  const double offset = uptomo::draw_hidden_offset(77);
  const auto p = src(0);
  const auto& setting = plan.settings[0];
  const auto o = uptomo::compound_form_matrix(
      plan.forms[setting.form_index].with_theta(uptomo::theta_radians(setting.theta)));
  std::vector<double> shifted = setting.phase_grid;
  for (double& phi : shifted) phi += offset;
  const auto expect =
      uptomo::closed_form_pattern(u, o, setting.projection_mode, shifted);
  for (std::size_t i = 0; i < p.samples.size(); ++i) {
    CHECK(std::abs(p.samples[i].phi - setting.phase_grid[i]) < 1e-12);
    CHECK(std::abs(p.samples[i].value - expect.samples[i].value) <= 1e-12);
  }
}

TEST_CASE("SimulatedSource validates dimensions and indices") {
  const auto plan = uptomo::plan_schedule(4, uptomo::Protocol::compound);
  CHECK_THROWS_AS(
      uptomo::SimulatedSource(uptomo::named_gate("identity", 3), plan),
      uptomo::DimensionError);
  const uptomo::SimulatedSource src(uptomo::named_gate("identity", 4), plan);
  CHECK_THROWS_AS((void)src(-1), uptomo::Error);
  CHECK_THROWS_AS((void)src(int(plan.settings.size())), uptomo::Error);
}

TEST_CASE("pattern CSV and sidecar round trip bit-exactly") {
  const fs::path dir = temp_dir("roundtrip");
  const UnitaryMatrix u = uptomo::haar_random(4, 12);
  const auto plan = uptomo::plan_schedule(4, uptomo::Protocol::compound);
  NoiseConfig noise;
  noise.kind = NoiseKind::poisson;
  noise.expected_counts_per_sample = 12345;
  noise.master_seed = 88;
  const uptomo::SimulatedSource src(u, plan, 0.5, 1.0, noise);
  const auto p = src(2);
  uptomo::write_pattern_csv(dir / "p.csv", p);
  uptomo::write_pattern_sidecar(dir / "p.json", p, 2, noise);
  const auto back = uptomo::read_pattern_files(dir / "p.csv", dir / "p.json");
  CHECK(back.setting_id == 2);
  CHECK(back.pattern.value_kind == ValueKind::poisson_counts);
  CHECK(back.pattern.setting.dim == 4);
  CHECK(back.pattern.setting.pairs == p.setting.pairs);
  CHECK(back.pattern.setting.theta == p.setting.theta);
  CHECK(back.pattern.setting.projection_mode == p.setting.projection_mode);
  CHECK(back.pattern.scale == p.scale);
  CHECK(back.noise.kind == NoiseKind::poisson);
  CHECK(back.noise.expected_counts_per_sample == 12345.0);
  CHECK(back.noise.master_seed == 88);
  REQUIRE(back.pattern.samples.size() == p.samples.size());
  for (std::size_t i = 0; i < p.samples.size(); ++i) {
    CHECK(back.pattern.samples[i].phi == p.samples[i].phi);
    CHECK(back.pattern.samples[i].value == p.samples[i].value);
  }
  fs::remove_all(dir);
}

TEST_CASE("the hidden offset never appears in the sidecar") {
  NoiseConfig noise;
  noise.phase_offset_mode = PhaseOffsetMode::hidden;
  noise.master_seed = 4;
  noise.hidden_offset = uptomo::draw_hidden_offset(4);
  const UnitaryMatrix u = uptomo::named_gate("identity", 2);
  const auto p =
      uptomo::closed_form_pattern(u, u, 0, default_grid());
  const auto j = uptomo::pattern_sidecar_json(p, 0, noise);
  REQUIRE(j.contains("noise"));
  CHECK_FALSE(j["noise"].contains("hidden_offset"));
  CHECK(j["noise"]["phase_offset_mode"] == "hidden");
  CHECK_FALSE(j.dump().find("hidden_offset") != std::string::npos);
}

TEST_CASE("malformed pattern files are rejected") {
  const fs::path dir = temp_dir("malformed");
  const UnitaryMatrix u = uptomo::named_gate("identity", 2);
  const auto p = uptomo::closed_form_pattern(u, u, 0, default_grid());
  uptomo::write_pattern_sidecar(dir / "good.json", p, 0, NoiseConfig{});
  SUBCASE("wrong CSV header") {
    std::ofstream(dir / "bad.csv") << "phase,count\n0.0,0.5\n";
    CHECK_THROWS_AS(
        (void)uptomo::read_pattern_files(dir / "bad.csv", dir / "good.json"),
        uptomo::IoError);
  }
  SUBCASE("non-numeric row") {
    std::ofstream(dir / "bad.csv") << "phi_rad,value\n0.0,half\n";
    CHECK_THROWS_AS(
        (void)uptomo::read_pattern_files(dir / "bad.csv", dir / "good.json"),
        uptomo::IoError);
  }
  SUBCASE("no samples") {
    std::ofstream(dir / "bad.csv") << "phi_rad,value\n";
    CHECK_THROWS_AS(
        (void)uptomo::read_pattern_files(dir / "bad.csv", dir / "good.json"),
        uptomo::IoError);
  }
  SUBCASE("sidecar is not JSON") {
    uptomo::write_pattern_csv(dir / "good.csv", p);
    std::ofstream(dir / "bad.json") << "not json";
    CHECK_THROWS_AS(
        (void)uptomo::read_pattern_files(dir / "good.csv", dir / "bad.json"),
        uptomo::IoError);
  }
  fs::remove_all(dir);
}

TEST_CASE("value kind names round trip") {
  for (const ValueKind k : {ValueKind::probability, ValueKind::expected_counts,
                            ValueKind::poisson_counts}) {
    CHECK(uptomo::value_kind_from_name(uptomo::value_kind_name(k)) == k);
  }
  CHECK_THROWS_AS((void)uptomo::value_kind_from_name("volts"), uptomo::Error);
}
