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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <system_error>

#include "rwrs/bounds.h"
#include "rwrs/exact_sum.h"
#include "rwrs/parallel.h"
#include "rwrs/regeneration.h"
#include "rwrs/rwrs_stats.h"

#ifndef RWRS_VERSION
#define RWRS_VERSION "unknown"
#endif

namespace rwrs {
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::map<std::string, ExperimentKind, std::less<>>& experiment_names() {
  static const std::map<std::string, ExperimentKind, std::less<>> names = {
      {"simulate", ExperimentKind::kSimulate},
      {"clt", ExperimentKind::kClt},
      {"tail", ExperimentKind::kTail},
      {"bounds", ExperimentKind::kBounds},
      {"regeneration", ExperimentKind::kRegeneration},
      {"regen", ExperimentKind::kRegeneration},
      {"green", ExperimentKind::kGreen},
      {"confinement", ExperimentKind::kConfinement},
      {"confine", ExperimentKind::kConfinement},
      {"oracle-crosscheck", ExperimentKind::kOracle},
      {"oracle", ExperimentKind::kOracle},
  };
  return names;
}

// Moment orders a theorem needs, in the order they are checked, and the
// graph family it is stated for.
struct TheoremRequirement {
  std::vector<int> moments;
  std::optional<GraphKind> graph;
};

const std::map<std::string, TheoremRequirement, std::less<>>& theorem_requirements() {
  static const std::map<std::string, TheoremRequirement, std::less<>> table = {
      {"none", {{}, std::nullopt}},
      {"tree", {{4, 6}, GraphKind::kTree}},
      {"theorem-1", {{4, 6}, GraphKind::kTree}},
      {"tree-upper", {{4}, GraphKind::kTree}},
      {"theorem-1.1", {{4}, GraphKind::kTree}},
      {"tree-lower", {{6}, GraphKind::kTree}},
      {"theorem-1.2", {{6}, GraphKind::kTree}},
      {"lattice-upper", {{4}, GraphKind::kLattice}},
      {"theorem-2", {{4}, GraphKind::kLattice}},
  };
  return table;
}

std::string moment_condition(int order) {
  return order == 4 ? "Eξ⁴ < ∞" : "Eξ⁶ < ∞";
}

template <class T>
T get_field(const json& j, const char* key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

std::vector<double> number_list(const json& j, const char* key,
                                const std::vector<double>& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  return get_field<std::vector<double>>(j, key, fallback);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

// Settings objects only accept the listed keys; keys starting with '_' are
// annotations.
void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  require(j.is_object(), where + " must be a JSON object");
  const std::set<std::string, std::less<>> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : j.items()) {
    if (!key.empty() && key[0] == '_') continue;
    require(allowed.count(key) > 0, "unknown key '" + key + "' in " + where);
  }
}

std::string settings_key(ExperimentKind kind) {
  return kind == ExperimentKind::kOracle ? "oracle" : experiment_name(kind);
}

std::string describe(const SceneryDistribution& dist) {
  const json params = json(dist)["params"];
  if (params.empty()) return dist.name();
  std::string out = dist.name() + "(";
  bool first = true;
  for (const auto& [k, v] : params.items()) {
    out += (first ? "" : ", ") + k + "=" + (v.is_number() ? format_double(v.get<double>()) : v.dump());
    first = false;
  }
  return out + ")";
}

json settings_with_defaults(const ExperimentConfig& c, const json& given) {
  const std::string where = settings_key(c.kind) + " settings";
  switch (c.kind) {
    case ExperimentKind::kSimulate:
    case ExperimentKind::kClt:
    case ExperimentKind::kTail:
      check_keys(given, where, {});
      return json::object();
    case ExperimentKind::kBounds: {
      check_keys(given, where,
                 {"levelset", "heavy_mass", "max", "silt", "scenery_count", "lattice_heavy_mass"});
      json s = json::object();
      if (given.contains("levelset")) {
        const json& g = given["levelset"];
        check_keys(g, "bounds.levelset", {"n", "beta", "points"});
        json points = json::array();
        for (const json& p : get_field<json>(g, "points", json::array())) {
          check_keys(p, "bounds.levelset.points", {"t", "u"});
          points.push_back({{"t", get_field<double>(p, "t", 0)}, {"u", get_field<double>(p, "u", 0)}});
        }
        require(!points.empty(), "bounds.levelset needs at least one point");
        const double beta = c.graph.is_tree() && c.graph.d >= 3 ? lambda_d(c.graph.d) / 2 : kNaN;
        s["levelset"] = {{"n", get_field<std::int64_t>(g, "n", c.n)},
                         {"beta", get_field<double>(g, "beta", beta)},
                         {"points", points}};
      }
      if (given.contains("heavy_mass")) {
        const json& g = given["heavy_mass"];
        check_keys(g, "bounds.heavy_mass", {"n", "us"});
        s["heavy_mass"] = {{"n", get_field<std::int64_t>(g, "n", c.n)},
                           {"us", number_list(g, "us", {})}};
        require(!s["heavy_mass"]["us"].empty(), "bounds.heavy_mass needs at least one u");
      }
      if (given.contains("max")) {
        const json& g = given["max"];
        check_keys(g, "bounds.max", {"n", "xs"});
        s["max"] = {{"n", get_field<std::int64_t>(g, "n", c.n)}, {"xs", number_list(g, "xs", {})}};
        require(!s["max"]["xs"].empty(), "bounds.max needs at least one x");
      }
      if (given.contains("silt")) {
        const json& g = given["silt"];
        check_keys(g, "bounds.silt", {"ns", "q", "B"});
        s["silt"] = {{"ns", get_field<std::vector<std::int64_t>>(g, "ns", {c.n})},
                     {"q", get_field<int>(g, "q", 2)},
                     {"B", get_field<double>(g, "B", 2.0)}};
        require(!s["silt"]["ns"].empty(), "bounds.silt needs at least one n");
      }
      if (given.contains("scenery_count")) {
        const json& g = given["scenery_count"];
        check_keys(g, "bounds.scenery_count", {"n", "y", "m", "xs"});
        s["scenery_count"] = {{"n", get_field<std::int64_t>(g, "n", c.n)},
                              {"y", get_field<double>(g, "y", c.ys.front())},
                              {"m", get_field<double>(g, "m", 4.0)},
                              {"xs", number_list(g, "xs", {})}};
        require(!s["scenery_count"]["xs"].empty(), "bounds.scenery_count needs at least one x");
      }
      if (given.contains("lattice_heavy_mass")) {
        const json& g = given["lattice_heavy_mass"];
        check_keys(g, "bounds.lattice_heavy_mass", {"n", "ys"});
        s["lattice_heavy_mass"] = {{"n", get_field<std::int64_t>(g, "n", c.n)},
                                   {"ys", number_list(g, "ys", c.ys)}};
      }
      require(!s.empty(), "bounds settings list no lemma");
      return s;
    }
    case ExperimentKind::kRegeneration:
      check_keys(given, where, {"walks", "inspect_every", "k_min", "k_max", "ratio_k_max"});
      return {{"walks", get_field<std::int64_t>(given, "walks", c.replicas)},
              {"inspect_every", get_field<std::int64_t>(given, "inspect_every", 100)},
              {"k_min", get_field<std::int64_t>(given, "k_min", 20)},
              {"k_max", get_field<std::int64_t>(given, "k_max", 40)},
              {"ratio_k_max", get_field<std::int64_t>(given, "ratio_k_max", 10)}};
    case ExperimentKind::kGreen:
      check_keys(given, where, {"horizon", "silt_n", "silt_replicas"});
      return {{"horizon", get_field<std::int64_t>(given, "horizon", c.n)},
              {"silt_n", get_field<std::int64_t>(given, "silt_n", 0)},
              {"silt_replicas", get_field<std::int64_t>(given, "silt_replicas", 200)}};
    case ExperimentKind::kConfinement:
      check_keys(given, where, {"radii", "tolerance"});
      return {{"radii", get_field<std::vector<int>>(given, "radii", {3, 5, 8})},
              {"tolerance", get_field<double>(given, "tolerance", 1e-10)}};
    case ExperimentKind::kOracle:
      check_keys(given, where, {"range", "repetitions", "sigma_factor"});
      return {{"range", get_field<std::int64_t>(given, "range", 12)},
              {"repetitions", get_field<std::int64_t>(given, "repetitions", 100)},
              {"sigma_factor", get_field<double>(given, "sigma_factor", 1.5)}};
  }
  return json::object();
}

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      if (!first) text_ += ',';
      text_ += h;
      first = false;
    }
    text_ += '\n';
  }
  Csv& operator<<(double v) { return field(format_double(v)); }
  Csv& operator<<(std::int64_t v) { return field(std::to_string(v)); }
  Csv& operator<<(std::uint64_t v) { return field(std::to_string(v)); }
  Csv& operator<<(int v) { return field(std::to_string(v)); }
  Csv& operator<<(bool v) { return field(v ? "1" : "0"); }
  Csv& operator<<(std::string_view v) { return field(v); }
  void end_row() {
    text_ += '\n';
    fresh_ = true;
  }
  const std::string& text() const { return text_; }

 private:
  Csv& field(std::string_view v) {
    if (!fresh_) text_ += ',';
    text_ += v;
    fresh_ = false;
    return *this;
  }
  std::string text_;
  bool fresh_ = true;
};

struct MeanVar {
  double mean = kNaN;
  double variance = kNaN;
};

MeanVar mean_var(std::span<const double> values) {
  if (values.empty()) return {};
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  const double mean = sum.value() / static_cast<double>(values.size());
  CompensatedSum sq;
  for (double v : values) sq.add((v - mean) * (v - mean));
  const double var = values.size() > 1 ? sq.value() / static_cast<double>(values.size() - 1) : kNaN;
  return {mean, var};
}

RunResult run_simulate(const ExperimentConfig& c) {
  struct Row {
    std::uint64_t seed;
    RwrsSummary s;
    std::array<double, 3> T;
    std::array<double, 3> V2;
  };
  std::vector<Row> rows(static_cast<std::size_t>(c.replicas));
  const double y = c.ys.front();
  const bool tree = c.graph.is_tree();
  const bool decomposable = c.n >= 3 && (!tree || c.graph.d >= 3) && y > 0;
  parallel_blocks(rows.size(), c.workers, [&](unsigned, std::size_t begin, std::size_t end) {
    ReplicaSimulator sim(c.graph, c.distribution, c.n);
    for (std::size_t r = begin; r < end; ++r) {
      Row& row = rows[r];
      row.seed = replica_seed(c.seed, r);
      row.s = sim.run(row.seed);
      row.T.fill(kNaN);
      row.V2.fill(kNaN);
      if (decomposable) {
        const auto dec = tree ? decompose_tree(sim.ledger(), sim.scenery(), y, lambda_d(c.graph.d))
                              : decompose_lattice(sim.ledger(), sim.scenery(), y, c.graph.d);
        row.T = dec.T;
        row.V2 = dec.V2;
      }
    }
  });
  Csv csv({"seed", "n", "T", "V2", "silt2", "W", "T1", "T2", "T3", "V21", "V22", "V23"});
  std::vector<double> ws;
  CompensatedSum silt;
  for (const Row& row : rows) {
    csv << row.seed << row.s.n << row.s.T << row.s.V2 << row.s.silt2 << row.s.W;
    for (double t : row.T) csv << t;
    for (double v : row.V2) csv << v;
    csv.end_row();
    if (row.s.defined) ws.push_back(row.s.W);
    silt.add(static_cast<double>(row.s.silt2) / static_cast<double>(row.s.n));
  }
  const auto mv = mean_var(ws);
  RunResult out;
  out.summary = {{"replicas", c.replicas},
                 {"defined", ws.size()},
                 {"W_mean", mv.mean},
                 {"W_variance", mv.variance},
                 {"silt2_over_n_mean", silt.value() / static_cast<double>(rows.size())},
                 {"decomposition_y", decomposable ? json(y) : json(nullptr)}};
  out.files.push_back({"per_replica.csv", csv.text()});
  return out;
}

RunResult run_clt(const ExperimentConfig& c) {
  const auto summaries =
      simulate_summaries(c.graph, c.distribution, c.n, c.replicas, c.seed, c.workers);
  Csv csv({"replica", "seed", "W"});
  std::vector<double> ws;
  for (std::size_t r = 0; r < summaries.size(); ++r) {
    csv << static_cast<std::int64_t>(r) << replica_seed(c.seed, r) << summaries[r].W;
    csv.end_row();
    if (summaries[r].defined) ws.push_back(summaries[r].W);
  }
  const auto mv = mean_var(ws);
  RunResult out;
  out.summary = {{"replicas", c.replicas},
                 {"defined", ws.size()},
                 {"ks_statistic", ws.empty() ? kNaN : ks_distance_normal(ws)},
                 {"ks_critical_95", ws.empty() ? kNaN : 1.358 / std::sqrt(static_cast<double>(ws.size()))},
                 {"W_mean", mv.mean},
                 {"W_variance", mv.variance}};
  out.files.push_back({"w_samples.csv", csv.text()});
  return out;
}

RunResult run_tail(const ExperimentConfig& c) {
  const auto tails = tail_mc(c.graph, c.distribution, c.n, c.ys, c.replicas, c.seed, c.workers);
  RunResult out;
  out.summary = {{"tails", tails}};
  if (c.graph.is_tree() && c.graph.d >= 3) {
    const auto cd = c_d(lambda_d(c.graph.d));
    out.summary["lambda_d"] = lambda_d(c.graph.d);
    out.summary["c_d"] = cd.effective ? json(cd.value) : json(nullptr);
    out.summary["c_d_effective"] = cd.effective;
  }
  out.files.push_back({"tail.csv", tail_csv(tails)});
  return out;
}

std::vector<double> doubles(const json& j) { return j.get<std::vector<double>>(); }

RunResult run_bounds(const ExperimentConfig& c) {
  const json& s = c.settings;
  std::vector<BoundCheck> checks;
  const auto lemma_seed = [&](std::uint64_t k) {
    return derive_seed(c.seed, StreamTag::kReplica, 0x6c656d6d61000000ULL + k);
  };
  const auto append = [&](std::vector<BoundCheck> more) {
    checks.insert(checks.end(), more.begin(), more.end());
  };
  if (s.contains("levelset")) {
    const json& g = s["levelset"];
    std::vector<LevelSetPoint> points;
    for (const json& p : g["points"]) points.push_back({p["t"].get<double>(), p["u"].get<double>()});
    append(check_levelset(c.graph.d, g["n"].get<std::int64_t>(), g["beta"].get<double>(), points,
                          c.replicas, lemma_seed(1), c.workers));
  }
  if (s.contains("heavy_mass")) {
    const json& g = s["heavy_mass"];
    append(check_heavy_mass(c.graph.d, g["n"].get<std::int64_t>(), doubles(g["us"]), c.replicas,
                            lemma_seed(2), c.workers));
  }
  if (s.contains("max")) {
    const json& g = s["max"];
    append(check_max(c.graph, g["n"].get<std::int64_t>(), doubles(g["xs"]), c.replicas,
                     lemma_seed(3), c.workers));
  }
  if (s.contains("silt")) {
    const json& g = s["silt"];
    append(check_silt(c.graph, g["ns"].get<std::vector<std::int64_t>>(), g["q"].get<int>(),
                      g["B"].get<double>(), c.replicas, lemma_seed(4), c.workers));
  }
  if (s.contains("scenery_count")) {
    const json& g = s["scenery_count"];
    append(check_scenery_count(c.graph, c.distribution, g["n"].get<std::int64_t>(),
                               g["y"].get<double>(), g["m"].get<double>(), doubles(g["xs"]),
                               c.replicas, lemma_seed(5), c.workers));
  }
  if (s.contains("lattice_heavy_mass")) {
    const json& g = s["lattice_heavy_mass"];
    append(check_lattice_heavy_mass(c.graph.d, g["n"].get<std::int64_t>(), doubles(g["ys"]),
                                    c.replicas, lemma_seed(6), c.workers));
  }
  Csv csv({"lemma", "point", "hits", "replicas", "p_hat", "ci_low", "ci_high", "rhs", "holds",
           "calibration"});
  std::map<std::string, int> point;
  bool all = true;
  for (const auto& b : checks) {
    csv << b.lemma << point[b.lemma]++ << b.hits << b.replicas << b.p_hat << b.ci_low << b.ci_high
        << b.rhs << b.holds << b.calibration;
    csv.end_row();
    all = all && b.holds;
  }
  RunResult out;
  out.summary = {{"all_hold", all}, {"checks", checks}};
  out.files.push_back({"bounds.csv", csv.text()});
  return out;
}

RunResult run_regeneration(const ExperimentConfig& c) {
  const json& s = c.settings;
  const int d = c.graph.d;
  const auto sample = collect_epochs(d, c.n, s["walks"].get<std::int64_t>(), c.seed,
                                     s["inspect_every"].get<std::int64_t>(), c.workers);
  const auto k_min = s["k_min"].get<std::int64_t>();
  const auto k_max = s["k_max"].get<std::int64_t>();
  const auto epochs = static_cast<std::int64_t>(sample.later.size());
  std::vector<std::int64_t> sorted = sample.later;
  std::sort(sorted.begin(), sorted.end());
  Csv csv({"k", "survivors", "epochs", "p_hat", "ci_low", "ci_high", "rate"});
  double min_rate = kNaN;
  bool rate_defined = true;
  for (std::int64_t k = 1; k <= k_max; ++k) {
    const auto survivors = static_cast<std::int64_t>(
        sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), k));
    const double p = epochs > 0 ? static_cast<double>(survivors) / static_cast<double>(epochs) : kNaN;
    const Interval ci = epochs > 0 ? wilson_interval(survivors, epochs) : Interval{kNaN, kNaN};
    const double rate = p > 0 ? -std::log(p) / static_cast<double>(k) : kNaN;
    csv << k << survivors << epochs << p << ci.low << ci.high << rate;
    csv.end_row();
    if (k >= k_min) {
      if (std::isnan(rate)) {
        rate_defined = false;
      } else if (std::isnan(min_rate) || rate < min_rate) {
        min_rate = rate;
      }
    }
  }
  Csv ratio_csv({"k", "p_first", "p_later", "ratio"});
  if (!sample.first.empty() && !sample.later.empty()) {
    for (const auto& r : epoch_ratio_trend(sample.first, sample.later,
                                           s["ratio_k_max"].get<std::int64_t>())) {
      ratio_csv << r.k << r.p_first << r.p_later << r.ratio;
      ratio_csv.end_row();
    }
  }
  RunResult out;
  out.summary = {{"d", d},
                 {"n", c.n},
                 {"walks", sample.walks},
                 {"epochs", epochs},
                 {"first_epochs", sample.first.size()},
                 {"censored_walks", sample.censored_walks},
                 {"s_d_lower_bound", s_d_lower_bound(d)},
                 {"epoch_chernoff_exponent", epoch_chernoff_exponent(d)},
                 {"lambda_d", lambda_d(d)},
                 {"min_rate_in_range", min_rate},
                 {"rate_defined_in_range", rate_defined},
                 {"k_min", k_min},
                 {"k_max", k_max},
                 {"inspected", sample.inspected},
                 {"disjoint", sample.disjoint}};
  if (!sample.later.empty()) {
    out.summary["empirical_mgf_at_lambda_d"] = empirical_epoch_mgf(sample.later, lambda_d(d));
  }
  out.summary["lag1_pairs"] = sample.lag_leads.size();
  const double lag1 = lag_correlation(sample.lag_leads, sample.lag_follows);
  if (!std::isnan(lag1)) {
    out.summary["lag1_correlation"] = lag1;
  }
  out.files.push_back({"epochs.csv", csv.text()});
  out.files.push_back({"epoch_ratio.csv", ratio_csv.text()});
  return out;
}

RunResult run_green(const ExperimentConfig& c) {
  const json& s = c.settings;
  const int d = c.graph.d;
  const auto g = green_function_mc(d, s["horizon"].get<std::int64_t>(), c.replicas, c.seed, c.workers);
  RunResult out;
  out.summary = {{"estimate", g},
                 {"exact", lattice_green_exact(d)},
                 {"escape_probability", lattice_escape_probability(d)}};
  const auto silt_n = s["silt_n"].get<std::int64_t>();
  if (silt_n > 0) {
    const auto summaries =
        simulate_summaries(c.graph, c.distribution, silt_n, s["silt_replicas"].get<std::int64_t>(),
                           derive_seed(c.seed, StreamTag::kReplica, 0x73696c74ULL), c.workers);
    CompensatedSum sum;
    for (const auto& r : summaries) sum.add(static_cast<double>(r.silt2) / static_cast<double>(silt_n));
    const double mean = sum.value() / static_cast<double>(summaries.size());
    out.summary["silt2_over_n_mean"] = mean;
    out.summary["two_g_minus_one"] = 2 * g.g_hat - 1;
    out.summary["silt_relative_gap"] = std::abs(mean / (2 * g.g_hat - 1) - 1);
  }
  Csv csv({"d", "horizon", "replicas", "g_hat", "std_error", "ci_low", "ci_high", "short_horizon",
           "g_short", "horizon_gap", "gap_std_error"});
  csv << d << g.horizon << g.replicas << g.g_hat << g.std_error << g.ci_low << g.ci_high
      << g.short_horizon << g.g_short << g.horizon_gap << g.gap_std_error;
  csv.end_row();
  out.files.push_back({"green.csv", csv.text()});
  return out;
}

RunResult run_confinement(const ExperimentConfig& c) {
  const json& s = c.settings;
  Csv csv({"d", "R", "states", "lambda", "decay_rate", "R2_decay_rate", "iterations", "residual"});
  std::vector<ConfinementResult> results;
  for (int R : s["radii"].get<std::vector<int>>()) {
    const auto r = confinement_rate(c.graph.d, R, s["tolerance"].get<double>());
    csv << r.d << r.R << r.states << r.lambda << r.decay_rate
        << static_cast<double>(R) * R * r.decay_rate << r.iterations << r.residual;
    csv.end_row();
    results.push_back(r);
  }
  RunResult out;
  out.summary = {{"results", results}};
  out.files.push_back({"confinement.csv", csv.text()});
  return out;
}

RunResult run_oracle(const ExperimentConfig& c) {
  const json& s = c.settings;
  const auto rows = oracle_crosscheck(c.distribution, c.graph.d, s["range"].get<std::int64_t>(),
                                      s["sigma_factor"].get<double>(),
                                      s["repetitions"].get<std::int64_t>(), c.replicas, c.seed,
                                      c.workers);
  Csv csv({"repetition", "range", "n", "a", "exact", "plain_p_hat", "plain_std_error", "theta",
           "is_p_hat", "is_std_error", "plain_agrees", "is_agrees", "zero_tilt_identical"});
  std::int64_t plain = 0, tilted = 0, identical = 0;
  for (const auto& r : rows) {
    csv << r.repetition << r.range << r.n << r.a << r.exact << r.plain.p_hat << r.plain.std_error
        << r.tilted.theta << r.tilted.p_hat << r.tilted.std_error << r.plain_agrees
        << r.tilted_agrees << r.zero_tilt_identical;
    csv.end_row();
    plain += r.plain_agrees;
    tilted += r.tilted_agrees;
    identical += r.zero_tilt_identical;
  }
  const auto count = static_cast<double>(rows.size());
  RunResult out;
  out.summary = {{"repetitions", rows.size()},
                 {"plain_agreement", static_cast<double>(plain) / count},
                 {"is_agreement", static_cast<double>(tilted) / count},
                 {"zero_tilt_identical", identical == static_cast<std::int64_t>(rows.size())}};
  out.files.push_back({"oracle.csv", csv.text()});
  return out;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

constexpr std::string_view kTailHeader =
    "y,hits,replicas,p_hat,ci_low,ci_high,rate,lattice_rate,insufficient";

}  // namespace

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSimulate: return "simulate";
    case ExperimentKind::kClt: return "clt";
    case ExperimentKind::kTail: return "tail";
    case ExperimentKind::kBounds: return "bounds";
    case ExperimentKind::kRegeneration: return "regeneration";
    case ExperimentKind::kGreen: return "green";
    case ExperimentKind::kConfinement: return "confinement";
    case ExperimentKind::kOracle: return "oracle-crosscheck";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment(std::string_view name) {
  const auto& names = experiment_names();
  const auto it = names.find(name);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

ExperimentConfig parse_config(const json& j) {
  require(j.is_object(), "config must be a JSON object");
  ExperimentConfig c;
  require(j.contains("experiment"), "config needs an 'experiment' field");
  const auto kind = parse_experiment(get_field<std::string>(j, "experiment", ""));
  require(kind.has_value(), "unknown experiment '" + j["experiment"].dump() + "'");
  c.kind = *kind;
  const std::string key = settings_key(c.kind);
  for (const auto& [k, v] : j.items()) {
    if (!k.empty() && k[0] == '_') continue;
    static const std::set<std::string, std::less<>> common = {
        "experiment", "theorem", "graph", "distribution", "n", "y", "replicas",
        "seed", "workers", "output", "description"};
    require(common.count(k) > 0 || k == key, "unknown key '" + k + "' in config");
  }
  c.theorem = get_field<std::string>(j, "theorem", "none");
  require(theorem_requirements().count(c.theorem) > 0, "unknown theorem '" + c.theorem + "'");
  try {
    if (j.contains("graph")) c.graph = j.at("graph").get<Graph>();
    if (j.contains("distribution")) c.distribution = j.at("distribution").get<SceneryDistribution>();
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.n = get_field<std::int64_t>(j, "n", c.n);
  c.ys = number_list(j, "y", c.ys);
  c.replicas = get_field<std::int64_t>(j, "replicas", c.replicas);
  c.seed = get_field<std::uint64_t>(j, "seed", c.seed);
  c.workers = get_field<unsigned>(j, "workers", c.workers);
  c.output = get_field<std::string>(j, "output", c.output);
  require(c.n >= 1, "n must be >= 1");
  require(c.replicas >= 1, "replicas must be >= 1");
  require(!c.ys.empty(), "y needs at least one value");
  c.settings = settings_with_defaults(c, get_field<json>(j, key.c_str(), json::object()));
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j = {{"experiment", experiment_name(c.kind)},
            {"theorem", c.theorem},
            {"graph", c.graph},
            {"distribution", c.distribution},
            {"n", c.n},
            {"y", c.ys},
            {"replicas", c.replicas},
            {"seed", c.seed},
            {"workers", c.workers},
            {"output", c.output}};
  if (!c.settings.empty()) j[settings_key(c.kind)] = c.settings;
  return j;
}

void validate_config(const ExperimentConfig& c) {
  const auto& req = theorem_requirements().at(c.theorem);
  if (req.graph && *req.graph != c.graph.kind) {
    throw ConfigError(c.theorem + " is stated for " +
                      (*req.graph == GraphKind::kTree ? "trees" : "lattices") +
                      " but the config uses " + (c.graph.is_tree() ? "a tree" : "a lattice"));
  }
  for (int m : req.moments) {
    if (!c.distribution.has_finite_moment(m)) {
      throw ConfigError(c.theorem + " needs " + moment_condition(m) + ", which " +
                        describe(c.distribution) + " violates");
    }
  }
  const bool tree = c.graph.is_tree();
  const int d = c.graph.d;
  switch (c.kind) {
    case ExperimentKind::kSimulate:
    case ExperimentKind::kClt:
      break;
    case ExperimentKind::kTail:
      require(c.replicas >= 1000, "tail estimation needs replicas >= 1000");
      break;
    case ExperimentKind::kBounds: {
      const json& s = c.settings;
      for (const char* lemma : {"levelset", "heavy_mass"}) {
        if (s.contains(lemma)) require(tree && d >= 3, std::string(lemma) + " needs a tree with d >= 3");
      }
      if (s.contains("levelset")) {
        const double beta = s["levelset"]["beta"].get<double>();
        require(beta > 0 && beta <= lambda_d(d) / 2, "levelset needs beta in (0, lambda_d / 2]");
      }
      if (s.contains("lattice_heavy_mass")) {
        require(!tree && d >= 3, "lattice_heavy_mass needs a lattice with d >= 3");
      }
      if (s.contains("silt")) {
        const int q = s["silt"]["q"].get<int>();
        require(q == 2 || (tree && q == 3), "silt needs q = 2, or q = 3 on a tree");
        require(s["silt"]["B"].get<double>() > 0, "silt needs B > 0");
      }
      if (s.contains("scenery_count")) {
        const double m = s["scenery_count"]["m"].get<double>();
        require(c.distribution.has_finite_moment(m),
                "scenery_count needs E|xi|^m < infinity, which " + describe(c.distribution) +
                    " violates for m = " + format_double(m));
        require(s["scenery_count"]["n"].get<std::int64_t>() >= 3, "scenery_count needs n >= 3");
      }
      break;
    }
    case ExperimentKind::kRegeneration:
      require(tree, "regeneration needs a tree");
      require(c.n >= 2, "regeneration needs n >= 2");
      require(c.settings["walks"].get<std::int64_t>() >= 1, "regeneration needs walks >= 1");
      require(c.settings["k_min"].get<std::int64_t>() >= 1 &&
                  c.settings["k_min"].get<std::int64_t>() <= c.settings["k_max"].get<std::int64_t>(),
              "regeneration needs 1 <= k_min <= k_max");
      break;
    case ExperimentKind::kGreen:
      require(!tree && d >= 3, "green needs a lattice with d >= 3");
      require(c.settings["horizon"].get<std::int64_t>() >= 10, "green needs horizon >= 10");
      break;
    case ExperimentKind::kConfinement:
      require(!tree && d == 3, "confinement needs the lattice with d = 3");
      for (int R : c.settings["radii"].get<std::vector<int>>()) {
        require(R >= 1 && R <= 12, "confinement radii must lie in [1, 12]");
      }
      break;
    case ExperimentKind::kOracle: {
      require(tree, "oracle-crosscheck needs a tree");
      require(c.distribution.finite_support().has_value() && c.distribution.has_mgf(),
              "oracle-crosscheck needs a scenery law with finite support");
      const auto range = c.settings["range"].get<std::int64_t>();
      const auto atoms = c.distribution.finite_support()->size();
      require(range >= 1 && static_cast<double>(range) * std::log2(static_cast<double>(atoms)) <= 24,
              "oracle-crosscheck range too large to enumerate");
      require(c.settings["repetitions"].get<std::int64_t>() >= 1, "oracle-crosscheck needs repetitions >= 1");
      break;
    }
  }
}

RunResult run_experiment(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::kSimulate: return run_simulate(c);
    case ExperimentKind::kClt: return run_clt(c);
    case ExperimentKind::kTail: return run_tail(c);
    case ExperimentKind::kBounds: return run_bounds(c);
    case ExperimentKind::kRegeneration: return run_regeneration(c);
    case ExperimentKind::kGreen: return run_green(c);
    case ExperimentKind::kConfinement: return run_confinement(c);
    case ExperimentKind::kOracle: return run_oracle(c);
  }
  throw std::logic_error("unhandled experiment kind");
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_outputs(const ExperimentConfig& c, const RunResult& result) {
  const std::filesystem::path dir(c.output);
  std::filesystem::create_directories(dir);
  json files = json::array();
  const auto emit = [&](const std::string& name, const std::string& contents) {
    write_file_atomic(dir / name, contents);
    files.push_back({{"name", name}, {"bytes", contents.size()}, {"fnv1a64", hex(fnv1a(contents))}});
  };
  for (const auto& f : result.files) emit(f.name, f.contents);
  emit("summary.json", result.summary.dump(2) + "\n");
  const json manifest = {{"tool", "rwrs"},
                         {"version", RWRS_VERSION},
                         {"experiment", experiment_name(c.kind)},
                         {"config", config_to_json(c)},
                         {"seeds",
                          {{"experiment", c.seed},
                           {"replica_rule", "replica r uses derive_seed(seed, replica, r)"}}},
                         {"files", files}};
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::string tail_csv(std::span<const TailEstimate> tails) {
  Csv csv({"y", "hits", "replicas", "p_hat", "ci_low", "ci_high", "rate", "lattice_rate",
           "insufficient"});
  for (const auto& t : tails) {
    csv << t.y << t.hits << t.replicas << t.p_hat << t.ci_low << t.ci_high << t.rate
        << t.lattice_rate << t.insufficient;
    csv.end_row();
  }
  return csv.text();
}

std::vector<TailEstimate> read_tail_csv(std::string_view text) {
  std::vector<TailEstimate> out;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kTailHeader) {
    throw std::invalid_argument("not a tail CSV: expected header '" + std::string(kTailHeader) + "'");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 9) throw std::invalid_argument("tail CSV row has " + std::to_string(f.size()) + " fields");
    TailEstimate t;
    t.y = parse_double(f[0]);
    t.hits = parse_int(f[1]);
    t.replicas = parse_int(f[2]);
    t.p_hat = parse_double(f[3]);
    t.ci_low = parse_double(f[4]);
    t.ci_high = parse_double(f[5]);
    t.rate = parse_double(f[6]);
    t.lattice_rate = parse_double(f[7]);
    t.insufficient = parse_int(f[8]) != 0;
    out.push_back(t);
  }
  return out;
}

std::string plot_data_csv(std::span<const TailEstimate> tails) {
  if (tails.empty()) throw std::invalid_argument("plot data needs at least one tail estimate");
  const auto log_or_nan = [](double p) { return p > 0 ? std::log(p) : kNaN; };
  Csv csv({"y", "log_p_hat", "rate", "lattice_rate", "ci_low", "ci_high", "log_ci_low",
           "log_ci_high", "hits", "replicas"});
  for (const auto& t : tails) {
    csv << t.y << log_or_nan(t.p_hat) << t.rate << t.lattice_rate << t.ci_low << t.ci_high
        << log_or_nan(t.ci_low) << log_or_nan(t.ci_high) << t.hits << t.replicas;
    csv.end_row();
  }
  return csv.text();
}

int run_from_file(ExperimentKind kind, const std::filesystem::path& config_path,
                  const RunOverrides& overrides, std::ostream& err) {
  ExperimentConfig config;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config " + config_path.string());
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    require(j.is_object(), "config must be a JSON object");
    if (j.contains("experiment")) {
      const auto declared = parse_experiment(get_field<std::string>(j, "experiment", ""));
      require(declared.has_value(), "unknown experiment " + j["experiment"].dump());
      require(*declared == kind, "config declares experiment '" + experiment_name(*declared) +
                                     "' but the subcommand runs '" + experiment_name(kind) + "'");
    }
    j["experiment"] = experiment_name(kind);
    if (overrides.seed) j["seed"] = *overrides.seed;
    if (overrides.replicas) j["replicas"] = *overrides.replicas;
    if (overrides.out) j["output"] = *overrides.out;
    if (overrides.workers) j["workers"] = *overrides.workers;
    config = parse_config(j);
    validate_config(config);
  } catch (const std::exception& e) {
    err << "rwrs: invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  }
  try {
    write_outputs(config, run_experiment(config));
  } catch (const std::exception& e) {
    err << "rwrs: " << experiment_name(kind) << " failed: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace rwrs
