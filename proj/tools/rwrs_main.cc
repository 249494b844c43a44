// Copyright 2026 The rwrs-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// rwrs: command line front end for the experiment runner.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rwrs/runner.h"

namespace {

struct CommonFlags {
  std::string config;
  rwrs::RunOverrides overrides;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "Experiment config (JSON)")->required();
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&flags](const std::uint64_t& v) { flags.overrides.seed = v; },
      "Override the config seed");
  cmd->add_option_function<std::int64_t>(
      "--replicas", [&flags](const std::int64_t& v) { flags.overrides.replicas = v; },
      "Override the replica count");
  cmd->add_option_function<std::string>(
      "--out", [&flags](const std::string& v) { flags.overrides.out = v; },
      "Override the output directory");
  cmd->add_option_function<unsigned>(
      "--workers", [&flags](const unsigned& v) { flags.overrides.workers = v; },
      "Worker threads (0 = all cores)");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

int plot_data(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<rwrs::TailEstimate> tails;
  try {
    for (const auto& input : inputs) {
      std::filesystem::path path(input);
      if (std::filesystem::is_directory(path)) path /= "tail.csv";
      const auto more = rwrs::read_tail_csv(read_text(path));
      tails.insert(tails.end(), more.begin(), more.end());
    }
    const std::string csv = rwrs::plot_data_csv(tails);
    if (out.empty() || out == "-") {
      std::cout << csv;
    } else {
      const std::filesystem::path target(out);
      if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
      rwrs::write_file_atomic(target, csv);
    }
  } catch (const std::exception& e) {
    std::cerr << "rwrs: plotdata: " << e.what() << "\n";
    return rwrs::kExitValidation;
  }
  return rwrs::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo laboratory for random walks in random scenery"};
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* help;
    rwrs::ExperimentKind kind;
  };
  const Entry entries[] = {
      {"simulate", "Per-replica T, V^2, L_2^2, W and decomposition parts",
       rwrs::ExperimentKind::kSimulate},
      {"clt", "Samples of W and their KS distance to the standard normal",
       rwrs::ExperimentKind::kClt},
      {"tail", "Tail probabilities P(W >= y) with Wilson intervals and rates",
       rwrs::ExperimentKind::kTail},
      {"bounds", "Monte Carlo checks of the concentration inequalities",
       rwrs::ExperimentKind::kBounds},
      {"regen", "Regeneration epochs on the tree and their tails",
       rwrs::ExperimentKind::kRegeneration},
      {"green", "Green's function of the lattice walk at the origin", rwrs::ExperimentKind::kGreen},
      {"confine", "Spectral decay rate of the walk confined to a ball",
       rwrs::ExperimentKind::kConfinement},
      {"oracle", "Enumeration oracle against plain and tilted Monte Carlo",
       rwrs::ExperimentKind::kOracle},
  };
  std::vector<CommonFlags> flags(std::size(entries));
  std::vector<CLI::App*> commands;
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    commands.push_back(app.add_subcommand(entries[i].name, entries[i].help));
    add_common_flags(commands.back(), flags[i]);
  }

  std::vector<std::string> plot_inputs;
  std::string plot_out;
  CLI::App* plot = app.add_subcommand("plotdata", "Plot-ready CSV from tail.csv files");
  plot->add_option("inputs", plot_inputs, "tail.csv files or tail output directories")->required();
  plot->add_option("--out", plot_out, "Output CSV (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? rwrs::kExitOk : rwrs::kExitValidation;
  }

  if (plot->parsed()) return plot_data(plot_inputs, plot_out);
  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (commands[i]->parsed()) {
      return rwrs::run_from_file(entries[i].kind, flags[i].config, flags[i].overrides, std::cerr);
    }
  }
  return rwrs::kExitValidation;
}
