// Copyright 2026 The maglev-nmpc Authors
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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "maglev/errors.hpp"
#include "maglev_app/commands.hpp"
#include "maglev_app/config.hpp"

int main(int argc, char** argv) {
  using namespace maglev::app;

  CLI::App app{"Two-mass maglev EMS nonlinear MPC simulation suite"};
  app.set_version_flag("--version", "maglev_nmpc 0.1.0");

  std::string verb;
  CliOptions opts;
  std::string controllers;
  bool printDefaults = false;

  app.add_option("verb", verb, "equilibrium | simulate | compare | spectrum")
      ->check(CLI::IsMember({"equilibrium", "simulate", "compare", "spectrum"}));
  app.add_option("--config", opts.config, "scenario config file");
  app.add_option("--out", opts.out, "output directory")->capture_default_str();
  app.add_option("--seed", opts.seed, "guideway irregularity seed (overrides scenario.seed)");
  app.add_option("--controllers", controllers, "comma-separated controller names");
  app.add_option("--set", opts.overrides, "override a config key, e.g. --set scenario.duration=5");
  app.add_option("--log", opts.log, "ride-log CSV analysed by `spectrum`");
  app.add_flag("--json", opts.json, "machine-readable output");
  app.add_flag("--print-defaults", printDefaults, "print every config key with its default and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  if (printDefaults) {
    std::cout << defaults_table();
    return kSuccess;
  }
  if (verb.empty()) {
    std::cerr << "error: a verb is required\n" << app.help();
    return kConfigError;
  }
  if (!controllers.empty()) {
    opts.controllers = split_list(controllers);
  }
  return run_verb(verb, opts, std::cout, std::cerr);
}
