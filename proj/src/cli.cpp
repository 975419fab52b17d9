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

#include "uptomo/cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "uptomo/config.hpp"
#include "uptomo/errors.hpp"
#include "uptomo/io_util.hpp"
#include "uptomo/reconstruction.hpp"
#include "uptomo/version.hpp"

namespace uptomo {
namespace {

namespace fs = std::filesystem;

/// Loads the plan from the output directory when present (validating it
/// against the config), otherwise builds it fresh and optionally persists it.
MeasurementPlan obtain_plan(const RunConfig& cfg, bool write_if_built) {
  const fs::path plan_path = cfg.output_dir / "plan.json";
  if (fs::is_regular_file(plan_path)) {
    MeasurementPlan plan = read_plan_file(plan_path);
    if (plan.dim != cfg.dim) {
      throw ConfigError("plan on disk has dim " + std::to_string(plan.dim) +
                        ", config has dim " + std::to_string(cfg.dim));
    }
    if (plan.protocol != cfg.protocol) {
      throw ConfigError("plan on disk uses the " + protocol_name(plan.protocol) +
                        " protocol, config requests " + protocol_name(cfg.protocol));
    }
    return plan;
  }
  MeasurementPlan plan = plan_schedule(cfg.dim, cfg.protocol, cfg.grid);
  if (write_if_built) {
    write_plan_file(plan_path, plan);
  }
  return plan;
}

std::string format_matrix(const Cmat& m) {
  std::string out;
  char buf[64];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out += "  ";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%+.6f%+.6fi", m(r, c).real(), m(r, c).imag());
      out += buf;
      out += c + 1 < m.cols() ? "  " : "\n";
    }
  }
  return out;
}

void write_fit_file(const fs::path& path, int setting_id, const FringeFit& fit) {
  nlohmann::json j{
      {"schema_version", kSchemaVersion},
      {"setting_id", setting_id},
      {"fit", fringe_fit_to_json(fit)},
  };
  write_file_atomic(path, j.dump(2) + "\n");
}

void write_plot_data(const fs::path& dir, int setting_id,
                     const InterferencePattern& pattern, const FringeFit& fit) {
  const std::string stem = setting_file_stem(setting_id);
  write_pattern_csv(dir / (stem + "_samples.csv"), pattern);

  // Dense fitted curve across the sampled phase range for overlay plots.
  constexpr int kDense = 241;
  const double lo = pattern.samples.front().phi;
  const double hi = pattern.samples.back().phi;
  std::string body = "phi_rad,value\n";
  for (int i = 0; i < kDense; ++i) {
    const double phi =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kDense - 1);
    const double value = fit.mean_level + fit.amplitude * std::sin(phi + fit.phase);
    body += format_double(phi);
    body += ',';
    body += format_double(value);
    body += '\n';
  }
  write_file_atomic(dir / (stem + "_fit.csv"), body);
}

std::map<std::string, std::uint64_t> collect_seeds(const RunConfig& cfg) {
  std::map<std::string, std::uint64_t> seeds;
  if (cfg.noise.kind == NoiseKind::poisson ||
      cfg.noise.phase_offset_mode == PhaseOffsetMode::hidden) {
    seeds["noise_master"] = cfg.noise.master_seed;
  }
  if (cfg.truth.kind == TruthSource::Kind::haar) {
    seeds["truth_haar"] = cfg.truth.haar_seed;
  }
  return seeds;
}

int cmd_plan(const RunConfig& cfg, bool quiet) {
  const MeasurementPlan plan = plan_schedule(cfg.dim, cfg.protocol, cfg.grid);
  const fs::path path = cfg.output_dir / "plan.json";
  write_plan_file(path, plan);
  if (!quiet) {
    std::cout << "plan: " << plan.forms.size() << " forms, " << plan.settings.size()
              << " settings (" << protocol_name(plan.protocol) << ", dim "
              << plan.dim << ") -> " << path.string() << "\n";
  }
  return 0;
}

int cmd_simulate(const RunConfig& cfg, bool quiet) {
  const std::optional<UnitaryMatrix> truth = load_truth(cfg);
  if (!truth.has_value()) {
    throw ConfigError("simulate requires a truth source in the config");
  }
  const MeasurementPlan plan = obtain_plan(cfg, /*write_if_built=*/true);
  const SimulatedSource source(*truth, plan, cfg.scale, cfg.coherence, cfg.noise);
  const fs::path dir = cfg.output_dir / "patterns";
  for (int i = 0; i < static_cast<int>(plan.settings.size()); ++i) {
    const InterferencePattern p = source(i);
    const std::string stem = setting_file_stem(i);
    write_pattern_csv(dir / (stem + ".csv"), p);
    write_pattern_sidecar(dir / (stem + ".json"), p, i, cfg.noise);
  }
  if (!quiet) {
    std::cout << "simulate: " << plan.settings.size() << " patterns -> "
              << dir.string() << "\n";
  }
  return 0;
}

int cmd_fit(const RunConfig& cfg, bool quiet) {
  const fs::path plan_path = cfg.output_dir / "plan.json";
  if (!fs::is_regular_file(plan_path)) {
    throw ConfigError("no plan at " + plan_path.string() + "; run plan or simulate first");
  }
  const MeasurementPlan plan = read_plan_file(plan_path);
  const FileSource source(cfg.output_dir / "patterns", plan);
  const fs::path dir = cfg.output_dir / "fits";
  for (int i = 0; i < static_cast<int>(plan.settings.size()); ++i) {
    const FringeFit fit = fit_fringe(source(i));
    write_fit_file(dir / (setting_file_stem(i) + ".fit.json"), i, fit);
  }
  if (!quiet) {
    std::cout << "fit: " << plan.settings.size() << " fringe fits -> "
              << dir.string() << "\n";
  }
  return 0;
}

int cmd_reconstruct(const RunConfig& cfg, bool quiet) {
  const MeasurementPlan plan = obtain_plan(cfg, /*write_if_built=*/true);
  const std::optional<UnitaryMatrix> truth = load_truth(cfg);

  const fs::path patterns_dir = cfg.output_dir / "patterns";
  const bool from_files = fs::is_directory(patterns_dir);
  PatternProvider provider;
  if (from_files) {
    provider = FileSource(patterns_dir, plan);
  } else {
    if (!truth.has_value()) {
      throw ConfigError("reconstruct needs recorded patterns under " +
                        patterns_dir.string() + " or a truth source to simulate");
    }
    provider = SimulatedSource(*truth, plan, cfg.scale, cfg.coherence, cfg.noise);
  }

  // Materialize every pattern once; reconstruction and plot emission then
  // see identical data.
  std::vector<InterferencePattern> patterns;
  patterns.reserve(plan.settings.size());
  for (int i = 0; i < static_cast<int>(plan.settings.size()); ++i) {
    patterns.push_back(provider(i));
  }
  const PatternProvider cached = [&patterns](int i) {
    return patterns.at(static_cast<std::size_t>(i));
  };

  ReconstructOptions options;
  options.phase_mode = cfg.phase_mode;
  options.truth = truth;
  options.seeds = collect_seeds(cfg);
  const ReconstructionReport report = reconstruct(cached, plan, options);

  const fs::path report_path = cfg.output_dir / "report.json";
  write_report_file(report_path, report);
  const fs::path plot_dir = cfg.output_dir / "plotdata";
  for (int i = 0; i < static_cast<int>(patterns.size()); ++i) {
    write_plot_data(plot_dir, i, patterns[static_cast<std::size_t>(i)],
                    fit_fringe(patterns[static_cast<std::size_t>(i)]));
  }

  if (!quiet) {
    std::cout << "reconstruct: " << report.settings_used << " settings ("
              << (from_files ? "recorded patterns" : "forward model") << "), "
              << "unitarity deviation " << format_double(report.unitarity_deviation);
    if (report.fidelity_vs_truth.has_value()) {
      std::cout << ", fidelity " << format_double(*report.fidelity_vs_truth);
    }
    std::cout << " -> " << report_path.string() << "\n";
  }
  return 0;
}

int cmd_verify(const RunConfig& cfg, bool quiet) {
  const fs::path report_path = cfg.output_dir / "report.json";
  if (!fs::is_regular_file(report_path)) {
    throw ConfigError("no report at " + report_path.string() +
                      "; run reconstruct first");
  }
  const ReconstructionReport report = read_report_file(report_path);
  if (!report.truth.has_value()) {
    throw ConfigError("report has no embedded truth (blind run); nothing to "
                      "verify against");
  }
  const VerificationResult result = verify_report(report, cfg.tol_mod, cfg.tol_arg);
  if (!quiet) {
    std::cout << result.table;
  }
  return result.pass ? 0 : 1;
}

int cmd_gates(const RunConfig& cfg) {
  std::vector<std::string> names{"identity", "fourier"};
  if (cfg.dim == 4) {
    names.emplace_back("hadamard4");
  }
  for (const std::string& name : names) {
    const UnitaryMatrix g = named_gate(name, cfg.dim);
    std::cout << name << " (dim " << cfg.dim << ")\n" << format_matrix(g.mat());
  }
  return 0;
}

}  // namespace

int run_cli(const CliOptions& opts) {
  try {
    RunConfig cfg = parse_config(opts.config_path);
    if (opts.out_dir.has_value()) {
      cfg.output_dir = *opts.out_dir;
    }
    if (opts.seed.has_value()) {
      cfg.noise.master_seed = *opts.seed;
    }

    if (opts.command == "plan") return cmd_plan(cfg, opts.quiet);
    if (opts.command == "simulate") return cmd_simulate(cfg, opts.quiet);
    if (opts.command == "fit") return cmd_fit(cfg, opts.quiet);
    if (opts.command == "reconstruct") return cmd_reconstruct(cfg, opts.quiet);
    if (opts.command == "verify") return cmd_verify(cfg, opts.quiet);
    if (opts.command == "gates") return cmd_gates(cfg);
    throw ConfigError("unknown command '" + opts.command + "'");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace uptomo
