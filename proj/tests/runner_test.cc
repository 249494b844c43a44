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

#include "rwrs/runner.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace rwrs {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rwrs_runner_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path write_config(const fs::path& dir, const json& config) {
  const fs::path path = dir / "config.json";
  std::ofstream(path) << config.dump(2);
  return path;
}

json clt_config(const fs::path& out) {
  return {{"experiment", "clt"},
          {"graph", {{"graph", "tree"}, {"d", 2}}},
          {"distribution", {{"kind", "gaussian"}}},
          {"n", 300},
          {"replicas", 200},
          {"seed", 17},
          {"output", out.string()}};
}

TEST(FormatDoubleTest, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(-0.0), "-0");
  EXPECT_EQ(format_double(1e300), "1e+300");
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
  for (double v : {1.0 / 3.0, 6.02214076e23, 5e-324, 0.30000000000000004}) {
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  }
}

TEST(ConfigTest, DefaultsAndRoundTrip) {
  const auto c = parse_config({{"experiment", "confine"},
                               {"graph", {{"graph", "lattice"}, {"d", 3}}},
                               {"_note", "annotations are ignored"}});
  EXPECT_EQ(c.kind, ExperimentKind::kConfinement);
  EXPECT_EQ(c.settings["radii"], json({3, 5, 8}));
  EXPECT_EQ(c.theorem, "none");
  const auto again = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
}

TEST(ConfigTest, RejectsMalformedConfigs) {
  EXPECT_THROW(parse_config({{"experiment", "nope"}}), ConfigError);
  EXPECT_THROW(parse_config({{"experiment", "clt"}, {"replica", 10}}), ConfigError);
  EXPECT_THROW(parse_config({{"experiment", "clt"}, {"n", "many"}}), ConfigError);
  EXPECT_THROW(parse_config({{"experiment", "clt"}, {"n", 0}}), ConfigError);
  EXPECT_THROW(parse_config({{"experiment", "clt"}, {"theorem", "theorem-9"}}), ConfigError);
  EXPECT_THROW(parse_config({{"experiment", "bounds"}, {"bounds", json::object()}}), ConfigError);
  EXPECT_THROW(parse_config({{"experiment", "bounds"}, {"bounds", {{"max", {{"xs", {1}}, {"q", 2}}}}}}),
               ConfigError);
  EXPECT_THROW(parse_config({{"experiment", "clt"}, {"graph", {{"graph", "torus"}, {"d", 2}}}}),
               ConfigError);
}

ExperimentConfig with_theorem(const std::string& theorem, const Graph& graph,
                              const SceneryDistribution& dist) {
  ExperimentConfig c;
  c.kind = ExperimentKind::kClt;
  c.theorem = theorem;
  c.graph = graph;
  c.distribution = dist;
  return c;
}

TEST(ValidationTest, TheoremMomentPreconditions) {
  const auto pareto = SceneryDistribution::symmetric_pareto;
  try {
    validate_config(with_theorem("theorem-1", Graph::tree(8), pareto(3)));
    FAIL() << "expected a ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("Eξ⁴ < ∞"), std::string::npos) << e.what();
  }
  try {
    validate_config(with_theorem("tree", Graph::tree(8), pareto(5)));
    FAIL() << "expected a ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("Eξ⁶ < ∞"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(validate_config(with_theorem("tree-upper", Graph::tree(8), pareto(5))));
  EXPECT_NO_THROW(validate_config(with_theorem("tree", Graph::tree(8), pareto(7))));
  EXPECT_NO_THROW(validate_config(with_theorem("none", Graph::tree(8), pareto(1.5))));
  EXPECT_THROW(validate_config(with_theorem("lattice-upper", Graph::tree(8),
                                            SceneryDistribution::gaussian())),
               ConfigError);
  EXPECT_THROW(validate_config(with_theorem("theorem-2", Graph::lattice(3), pareto(4))),
               ConfigError);
}

TEST(ValidationTest, ExperimentRequirements) {
  auto c = parse_config({{"experiment", "green"}, {"graph", {{"graph", "tree"}, {"d", 3}}}});
  EXPECT_THROW(validate_config(c), ConfigError);
  c = parse_config({{"experiment", "oracle"}, {"graph", {{"graph", "tree"}, {"d", 2}}}});
  EXPECT_THROW(validate_config(c), ConfigError);
  c = parse_config({{"experiment", "oracle"},
                    {"graph", {{"graph", "tree"}, {"d", 2}}},
                    {"distribution", {{"kind", "rademacher"}}},
                    {"oracle", {{"range", 30}}}});
  EXPECT_THROW(validate_config(c), ConfigError);
  c = parse_config({{"experiment", "tail"}, {"replicas", 999}});
  EXPECT_THROW(validate_config(c), ConfigError);
  c = parse_config({{"experiment", "bounds"},
                    {"graph", {{"graph", "tree"}, {"d", 3}}},
                    {"distribution", {{"kind", "symmetric_pareto"}, {"params", {{"alpha", 3}}}}},
                    {"bounds", {{"scenery_count", {{"m", 4}, {"xs", {1}}}}}}});
  EXPECT_THROW(validate_config(c), ConfigError);
}

TEST(RunFromFileTest, CltWritesSamplesSummaryAndManifest) {
  const auto dir = scratch_dir("clt");
  const auto out = dir / "out";
  std::ostringstream err;
  ASSERT_EQ(run_from_file(ExperimentKind::kClt, write_config(dir, clt_config(out)), {}, err), kExitOk)
      << err.str();
  const std::string csv = read_text(out / "w_samples.csv");
  EXPECT_EQ(csv.rfind("replica,seed,W\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 201);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  const auto summary = json::parse(read_text(out / "summary.json"));
  EXPECT_GT(summary["ks_statistic"].get<double>(), 0.0);
  EXPECT_LT(summary["ks_statistic"].get<double>(), 0.2);
  const auto manifest = json::parse(read_text(out / "manifest.json"));
  EXPECT_EQ(manifest["config"]["seed"], 17);
  EXPECT_EQ(manifest["config"]["experiment"], "clt");
  EXPECT_TRUE(manifest.contains("version"));
  EXPECT_EQ(manifest["files"].size(), 2u);
  for (const auto& entry : fs::directory_iterator(out)) {
    EXPECT_NE(entry.path().extension(), ".tmp");
  }
}

TEST(RunFromFileTest, IdenticalConfigsGiveIdenticalBytes) {
  const auto dir = scratch_dir("determinism");
  std::ostringstream err;
  RunOverrides one;
  one.workers = 1;
  one.out = (dir / "a").string();
  RunOverrides three = one;
  three.workers = 3;
  three.out = (dir / "b").string();
  RunOverrides again = one;
  again.out = (dir / "c").string();
  json config = clt_config(dir);
  config["experiment"] = "simulate";
  config["graph"] = {{"graph", "tree"}, {"d", 3}};
  const auto path = write_config(dir, config);
  for (const auto& o : {one, three, again}) {
    ASSERT_EQ(run_from_file(ExperimentKind::kSimulate, path, o, err), kExitOk) << err.str();
  }
  const auto a = read_text(dir / "a" / "per_replica.csv");
  EXPECT_EQ(a, read_text(dir / "b" / "per_replica.csv"));
  EXPECT_EQ(a, read_text(dir / "c" / "per_replica.csv"));
  EXPECT_EQ(a.rfind("seed,n,T,V2,silt2,W,T1,T2,T3,V21,V22,V23\n", 0), 0u);
}

TEST(RunFromFileTest, ExitCodes) {
  const auto dir = scratch_dir("exit");
  std::ostringstream err;
  json bad = clt_config(dir / "out");
  bad["experiment"] = "tail";
  bad["theorem"] = "theorem-1";
  bad["graph"] = {{"graph", "tree"}, {"d", 8}};
  bad["distribution"] = {{"kind", "symmetric_pareto"}, {"params", {{"alpha", 3}}}};
  bad["replicas"] = 1000;
  EXPECT_EQ(run_from_file(ExperimentKind::kTail, write_config(dir, bad), {}, err), kExitValidation);
  EXPECT_NE(err.str().find("Eξ⁴ < ∞"), std::string::npos) << err.str();
  EXPECT_FALSE(fs::exists(dir / "out"));

  err.str("");
  EXPECT_EQ(run_from_file(ExperimentKind::kGreen, write_config(dir, clt_config(dir / "out")), {}, err),
            kExitValidation);
  EXPECT_NE(err.str().find("subcommand"), std::string::npos);

  std::ofstream(dir / "broken.json") << "{\"experiment\": ";
  EXPECT_EQ(run_from_file(ExperimentKind::kClt, dir / "broken.json", {}, err), kExitValidation);
  EXPECT_EQ(run_from_file(ExperimentKind::kClt, dir / "missing.json", {}, err), kExitValidation);

  // An output path that is a regular file fails at run time.
  std::ofstream(dir / "occupied") << "x";
  RunOverrides o;
  o.out = (dir / "occupied").string();
  EXPECT_EQ(run_from_file(ExperimentKind::kClt, write_config(dir, clt_config(dir / "out")), o, err),
            kExitRuntime);
}

TEST(TailCsvTest, RoundTripIsLossless) {
  std::vector<TailEstimate> tails = {make_tail_estimate(Graph::tree(2), 10000, 2.0, 51, 2000),
                                     make_tail_estimate(Graph::lattice(3), 10000, 2.5, 7, 3000),
                                     make_tail_estimate(Graph::tree(2), 10000, 4.0, 0, 2000)};
  const auto back = read_tail_csv(tail_csv(tails));
  ASSERT_EQ(back.size(), tails.size());
  const auto same = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
  for (std::size_t i = 0; i < tails.size(); ++i) {
    EXPECT_EQ(back[i].y, tails[i].y);
    EXPECT_EQ(back[i].hits, tails[i].hits);
    EXPECT_EQ(back[i].replicas, tails[i].replicas);
    EXPECT_TRUE(same(back[i].p_hat, tails[i].p_hat));
    EXPECT_TRUE(same(back[i].ci_low, tails[i].ci_low));
    EXPECT_TRUE(same(back[i].ci_high, tails[i].ci_high));
    EXPECT_TRUE(same(back[i].rate, tails[i].rate));
    EXPECT_TRUE(same(back[i].lattice_rate, tails[i].lattice_rate));
    EXPECT_EQ(back[i].insufficient, tails[i].insufficient);
  }
  EXPECT_THROW(read_tail_csv("a,b\n1,2\n"), std::invalid_argument);
}

TEST(PlotDataTest, RowsPerEstimateAndNanRate) {
  std::vector<TailEstimate> tails = {make_tail_estimate(Graph::tree(2), 10000, 2.0, 51, 2000),
                                     make_tail_estimate(Graph::tree(2), 10000, 3.0, 4, 2000),
                                     make_tail_estimate(Graph::tree(2), 10000, 4.0, 0, 2000)};
  const std::string csv = plot_data_csv(tails);
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "y,log_p_hat,rate,lattice_rate,ci_low,ci_high,log_ci_low,log_ci_high,hits,replicas");
  EXPECT_EQ(lines[1].substr(0, 2), "2,");
  EXPECT_EQ(lines[1].substr(2, lines[1].find(',', 2) - 2), format_double(std::log(51.0 / 2000)));
  EXPECT_EQ(lines[3].rfind("4,nan,nan,", 0), 0u) << lines[3];
  EXPECT_THROW(plot_data_csv(std::span<const TailEstimate>{}), std::invalid_argument);
}

TEST(ExperimentNamesTest, AliasesResolve) {
  EXPECT_EQ(parse_experiment("regen"), ExperimentKind::kRegeneration);
  EXPECT_EQ(parse_experiment("confine"), ExperimentKind::kConfinement);
  EXPECT_EQ(parse_experiment("oracle"), ExperimentKind::kOracle);
  EXPECT_EQ(parse_experiment("oracle-crosscheck"), ExperimentKind::kOracle);
  EXPECT_FALSE(parse_experiment("plotdata").has_value());
  for (auto k : {ExperimentKind::kSimulate, ExperimentKind::kClt, ExperimentKind::kTail,
                 ExperimentKind::kBounds, ExperimentKind::kRegeneration, ExperimentKind::kGreen,
                 ExperimentKind::kConfinement, ExperimentKind::kOracle}) {
    EXPECT_EQ(parse_experiment(experiment_name(k)), k);
  }
}

}  // namespace
}  // namespace rwrs
