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

// Configuration-driven experiment runner behind the `rwrs` command line tool.
//
// A config is one JSON object. Common keys:
//   "experiment": simulate | clt | tail | bounds | regeneration | green |
//                 confinement | oracle-crosscheck
//   "theorem":    optional; one of none, tree-upper, tree-lower, tree,
//                 lattice-upper. The distribution must satisfy its moment
//                 preconditions.
//   "graph":      {"graph": "tree" | "lattice", "d": int}
//   "distribution": see SceneryDistribution's JSON form.
//   "n", "y" (number or list), "replicas", "seed", "workers", "output".
// Experiment-specific settings live under a key named after the experiment.
// The annotated examples in configs/ document every field.

#ifndef RWRS_RUNNER_H_
#define RWRS_RUNNER_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rwrs/estimators.h"
#include "rwrs/graph.h"
#include "rwrs/scenery.h"

namespace rwrs {

// Invalid configuration or violated theorem precondition (exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

enum class ExperimentKind {
  kSimulate,
  kClt,
  kTail,
  kBounds,
  kRegeneration,
  kGreen,
  kConfinement,
  kOracle,
};

std::string experiment_name(ExperimentKind kind);
// Accepts the config names above and the subcommand aliases regen, confine
// and oracle.
std::optional<ExperimentKind> parse_experiment(std::string_view name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSimulate;
  std::string theorem = "none";
  Graph graph = Graph::tree(2);
  SceneryDistribution distribution = SceneryDistribution::gaussian();
  std::int64_t n = 1000;
  std::vector<double> ys = {2.0};
  std::int64_t replicas = 1000;
  std::uint64_t seed = 0;
  // 0 means every available core.
  unsigned workers = 0;
  std::string output = "out";
  // The experiment-specific object, defaults filled in.
  nlohmann::json settings = nlohmann::json::object();
};

// Throws ConfigError on unknown keys, wrong types or out-of-range values.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

// Moment preconditions of the declared theorem and graph requirements of the
// experiment. Throws ConfigError naming the violated condition.
void validate_config(const ExperimentConfig& config);

struct OutputFile {
  std::string name;
  std::string contents;
};

struct RunResult {
  nlohmann::json summary = nlohmann::json::object();
  std::vector<OutputFile> files;
};

// Runs a validated config. Pure: nothing is written.
RunResult run_experiment(const ExperimentConfig& config);

// Writes every file, summary.json and manifest.json under config.output.
// Each file is written to a temporary name and renamed into place.
void write_outputs(const ExperimentConfig& config, const RunResult& result);

// Shortest decimal that round-trips; "nan", "inf" and "-inf" otherwise.
std::string format_double(double value);

void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// CSV of tail estimates, one row per y, readable by read_tail_csv.
std::string tail_csv(std::span<const TailEstimate> tails);
std::vector<TailEstimate> read_tail_csv(std::string_view text);

// Plot-ready projection: y, log p_hat, rate, CI and the counts behind them.
// Throws std::invalid_argument on empty input.
std::string plot_data_csv(std::span<const TailEstimate> tails);

// Loads, validates, runs and writes. Messages go to `err`; returns the exit code.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> replicas;
  std::optional<std::string> out;
  std::optional<unsigned> workers;
};
int run_from_file(ExperimentKind kind, const std::filesystem::path& config_path,
                  const RunOverrides& overrides, std::ostream& err);

}  // namespace rwrs

#endif  // RWRS_RUNNER_H_
