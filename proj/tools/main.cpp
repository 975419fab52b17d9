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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "uptomo/cli.hpp"
#include "uptomo/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"uptomo " + std::string(uptomo::kVersion) +
               " — undetected-photon interferometry simulator and "
               "unitary-process tomography pipeline"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"plan", "write the measurement schedule for the configured protocol"},
      {"simulate", "generate interference patterns for every plan setting"},
      {"fit", "fit fringes to recorded patterns"},
      {"reconstruct", "assemble the transformation estimate and report"},
      {"verify", "compare a report against its embedded truth"},
      {"gates", "print the built-in gate library"},
  };

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool quiet = false;
  std::vector<CLI::Option*> seed_opts;
  std::vector<CLI::Option*> out_opts;

  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    // Existence is checked by the config loader so a missing file reports
    // through the standard error path (exit code 2) like any config error.
    sub->add_option("--config", config_path, "run configuration JSON")
        ->required();
    seed_opts.push_back(
        sub->add_option("--seed", seed, "override the noise master seed"));
    out_opts.push_back(
        sub->add_option("--out", out_dir, "override the output directory"));
    sub->add_flag("--quiet", quiet, "suppress progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage error
    return 2;
  }

  uptomo::CliOptions opts;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (app.get_subcommands().front()->get_name() == commands[i].first) {
      opts.command = commands[i].first;
      if (seed_opts[i]->count() > 0) {
        opts.seed = seed;
      }
      if (out_opts[i]->count() > 0) {
        opts.out_dir = out_dir;
      }
    }
  }
  opts.config_path = config_path;
  opts.quiet = quiet;
  return uptomo::run_cli(opts);
}
