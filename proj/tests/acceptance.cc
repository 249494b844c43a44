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

// Acceptance harness: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance --only 3   run criterion 3 (repeatable)
//   acceptance --list     list the criteria
//
// Exit status is 0 when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rwrs/bounds.h"
#include "rwrs/estimators.h"
#include "rwrs/local_time.h"
#include "rwrs/parallel.h"
#include "rwrs/regeneration.h"
#include "rwrs/rwrs_stats.h"
#include "rwrs/scenery.h"
#include "rwrs/walk.h"

#ifndef RWRS_GOLDEN_DIR
#define RWRS_GOLDEN_DIR "tests/golden"
#endif

namespace {

using namespace rwrs;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[1024];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

constexpr std::uint64_t kSeed = 20261016;

std::uint64_t criterion_seed(int id) { return derive_seed(kSeed, StreamTag::kReplica, id); }

// Brute-force local-time statistics from a sorted copy of the trace.
struct BruteStats {
  std::int64_t mass = 0;
  std::int64_t silt2 = 0;
  Wide silt3 = 0;
  std::int64_t max = 0;
  std::int64_t range = 0;
};

BruteStats brute_stats(const WalkTrace& trace) {
  std::vector<SiteId> sites(trace.sites().begin(), trace.sites().end());
  std::sort(sites.begin(), sites.end());
  BruteStats b;
  for (std::size_t i = 0; i < sites.size();) {
    std::size_t j = i;
    while (j < sites.size() && sites[j] == sites[i]) ++j;
    const auto l = static_cast<std::int64_t>(j - i);
    b.mass += l;
    b.silt2 += l * l;
    b.silt3 += static_cast<Wide>(l) * l * l;
    b.max = std::max(b.max, l);
    ++b.range;
    i = j;
  }
  return b;
}

Outcome c1_exact_identities() {
  Philox pick(criterion_seed(1));
  const std::vector<SceneryDistribution> laws = {
      SceneryDistribution::gaussian(), SceneryDistribution::rademacher(),
      SceneryDistribution::symmetric_pareto(2.5), SceneryDistribution::uniform_centered(3)};
  std::int64_t instances = 0, failures = 0;
  double worst_t = 0;
  std::string first_failure;
  const auto fail = [&](const std::string& what) {
    if (failures++ == 0) first_failure = what;
  };
  for (int graph_kind = 0; graph_kind < 2; ++graph_kind) {
    for (int i = 0; i < 1000; ++i) {
      const int d = graph_kind == 0 ? 2 + static_cast<int>(pick.below(7)) : 3 + static_cast<int>(pick.below(3));
      const Graph graph = graph_kind == 0 ? Graph::tree(d) : Graph::lattice(d);
      const std::int64_t n = 3 + pick.below(3000);
      const auto& law = laws[pick.below(static_cast<std::uint32_t>(laws.size()))];
      const std::uint64_t seed = pick.next_u64();
      const auto trace = run_walk(graph, n, seed);
      const auto ledger = build_ledger(trace);
      const auto scenery = sample_assignment(law, trace, derive_seed(seed, StreamTag::kScenery));
      const auto summary = compute_summary(ledger, scenery.values);
      const double t_time = time_ordered_sum(trace, scenery.values);
      const double rel = std::abs(t_time - summary.T) / std::max(summary.abs_scale, 1e-300);
      worst_t = std::max(worst_t, rel);
      const std::string where = graph.name() + " n=" + std::to_string(n);
      if (!(rel <= 1e-12)) fail("T mismatch on " + where);
      const auto brute = brute_stats(trace);
      if (ledger.mass() != n + 1 || brute.mass != n + 1) fail("mass on " + where);
      if (ledger.silt2() != brute.silt2 || ledger.silt3() != brute.silt3 ||
          ledger.max_local_time() != brute.max || ledger.range() != brute.range) {
        fail("ledger statistics on " + where);
      }
      const double y = 0.5 + 4.0 * pick.uniform();
      if (graph.is_tree() && d >= 3) {
        for (auto cut : {SceneryCut::kOneSided, SceneryCut::kTwoSided}) {
          if (!decompose_tree(ledger, scenery.values, y, lambda_d(d), cut).identities_exact()) {
            fail("tree decomposition on " + where);
          }
        }
      } else if (!graph.is_tree()) {
        for (auto cut : {SceneryCut::kOneSided, SceneryCut::kTwoSided}) {
          if (!decompose_lattice(ledger, scenery.values, y, d, cut).identities_exact()) {
            fail("lattice decomposition on " + where);
          }
        }
      }
      ++instances;
    }
  }
  return {failures == 0,
          fmt("%lld instances, %lld failures, worst relative T gap %.2e%s", static_cast<long long>(instances),
              static_cast<long long>(failures), worst_t,
              failures ? (", first: " + first_failure).c_str() : "")};
}

Outcome c2_self_normalization() {
  std::int64_t checked = 0, failures = 0;
  double worst = 0;
  for (const Graph& graph : {Graph::tree(2), Graph::tree(5), Graph::lattice(3)}) {
    for (int i = 0; i < 200; ++i) {
      const std::uint64_t seed = replica_seed(criterion_seed(2), static_cast<std::uint64_t>(checked));
      const auto trace = run_walk(graph, 500 + 10 * i, seed);
      const auto ledger = build_ledger(trace);
      const auto scenery =
          sample_assignment(SceneryDistribution::gaussian(), trace, derive_seed(seed, StreamTag::kScenery));
      const double w = compute_summary(ledger, scenery.values).W;
      for (double c : {1e-6, 1.0, 1e6}) {
        std::vector<double> scaled = scenery.values;
        for (double& x : scaled) x *= c;
        const double wc = compute_summary(ledger, scaled).W;
        const double rel = std::abs(wc - w) / std::max(std::abs(w), 1e-300);
        worst = std::max(worst, rel);
        failures += !(rel <= 1e-10);
      }
      std::vector<double> negated = scenery.values;
      for (double& x : negated) x = -x;
      failures += compute_summary(ledger, negated).W != -w;
      ++checked;
    }
  }
  return {failures == 0, fmt("%lld walks x 3 scales + negation, %lld failures, worst relative change %.2e",
                             static_cast<long long>(checked), static_cast<long long>(failures), worst)};
}

Outcome c3_clt() {
  std::string detail;
  bool pass = true;
  for (const Graph& graph : {Graph::tree(2), Graph::lattice(3)}) {
    const auto summaries = simulate_summaries(graph, SceneryDistribution::gaussian(), 10000, 5000,
                                              criterion_seed(3));
    std::vector<double> ws;
    for (const auto& s : summaries) {
      if (s.defined) ws.push_back(s.W);
    }
    const double ks = ks_distance_normal(ws);
    pass = pass && ks < 0.05 && ws.size() == summaries.size();
    detail += fmt("%sKS(%s) = %.4f", detail.empty() ? "" : ", ", graph.name().c_str(), ks);
  }
  return {pass, detail + " (threshold 0.05, n = 10^4, 5000 replicas)"};
}

Outcome c4_cramer() {
  const auto t = tail_mc(Graph::tree(2), SceneryDistribution::gaussian(), 10000, 2.0, 100000,
                         criterion_seed(4));
  const double ratio = t.p_hat / normal_upper_tail(2.0);
  return {ratio >= 0.6 && ratio <= 1.5,
          fmt("p_hat = %.5f [%.5f, %.5f], ratio to 1 - Phi(2) = %.3f (window [0.6, 1.5])", t.p_hat,
              t.ci_low, t.ci_high, ratio)};
}

Outcome c5_green() {
  const auto g = green_function_mc(3, 100000, 4000, criterion_seed(5));
  const double consistency = std::abs(g.g_hat - g.g_short) / g.g_hat;
  const std::int64_t n = 100000;
  const int walks = 200;
  std::vector<double> ratio(walks);
  parallel_blocks(ratio.size(), default_workers(), [&](unsigned, std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const auto ledger = build_ledger(run_walk(Graph::lattice(3), n, replica_seed(criterion_seed(50), r)));
      ratio[r] = static_cast<double>(ledger.silt2()) / static_cast<double>(n);
    }
  });
  double mean = 0;
  for (double v : ratio) mean += v / walks;
  const double target = 2 * g.g_hat - 1;
  const double gap = std::abs(mean / target - 1);
  return {consistency <= 0.01 && gap <= 0.05,
          fmt("G(1e5) = %.4f +- %.4f, G(1e4) = %.4f, relative gap %.4f (<= 0.01); mean L2^2/n = %.4f vs "
              "2G - 1 = %.4f, relative gap %.4f (<= 0.05); exact G = %.6f",
              g.g_hat, g.std_error, g.g_short, consistency, mean, target, gap, lattice_green_exact(3))};
}

Outcome c6_escape() {
  bool pass = true;
  std::string detail;
  for (int d : {2, 4, 8}) {
    const auto e = escape_frequency_mc(d, 2000, 100000, derive_seed(criterion_seed(6), StreamTag::kWalk, d));
    const double z = (e.p_hat - e.expected) / e.std_error;
    pass = pass && std::abs(z) <= 3.0;
    detail += fmt("%sd=%d: %.5f vs %.5f (z = %+.2f)", detail.empty() ? "" : ", ", d, e.p_hat, e.expected, z);
  }
  return {pass, detail};
}

Outcome c7_regeneration() {
  const int d = 8;
  const auto sample = collect_epochs(d, 20000, 200, criterion_seed(7), 10);
  std::vector<std::int64_t> sorted = sample.later;
  std::sort(sorted.begin(), sorted.end());
  const double bound = 0.9 * s_d_lower_bound(d);
  double min_rate = std::numeric_limits<double>::infinity();
  std::int64_t min_k = 0;
  for (std::int64_t k = 20; k <= 40; ++k) {
    const auto survivors = sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), k);
    const double p = static_cast<double>(survivors) / static_cast<double>(sorted.size());
    const double rate = p > 0 ? -std::log(p) / static_cast<double>(k) : std::numeric_limits<double>::infinity();
    if (rate < min_rate) {
      min_rate = rate;
      min_k = k;
    }
  }
  const bool enough = sorted.size() >= 100000;
  const bool disjoint = sample.inspected > 0 && sample.disjoint == sample.inspected;
  return {enough && disjoint && min_rate >= bound,
          fmt("%zu epochs; min over k in [20, 40] of -log P(theta >= k) / k = %.4f at k = %lld, needs >= "
              "0.9 * %.4f = %.4f (Chernoff exponent %.4f); disjoint epochs on %lld of %lld inspected traces",
              sorted.size(), min_rate, static_cast<long long>(min_k), s_d_lower_bound(d), bound,
              epoch_chernoff_exponent(d), static_cast<long long>(sample.disjoint),
              static_cast<long long>(sample.inspected))};
}

Outcome c8_oracle() {
  const auto rows = oracle_crosscheck(SceneryDistribution::rademacher(), 2, 12, 1.5, 100, 4000, criterion_seed(8));
  int plain = 0, tilted = 0, identical = 0;
  std::int64_t max_range = 0;
  for (const auto& r : rows) {
    plain += r.plain_agrees;
    tilted += r.tilted_agrees;
    identical += r.zero_tilt_identical;
    max_range = std::max(max_range, r.range);
  }
  const int total = static_cast<int>(rows.size());
  return {plain * 100 >= 95 * total && tilted * 100 >= 95 * total && identical == total && max_range <= 12,
          fmt("plain MC within 3 SE in %d/%d, IS within 3 SE in %d/%d, theta = 0 identical in %d/%d", plain,
              total, tilted, total, identical, total)};
}

nlohmann::json load_golden(const std::string& name) {
  std::ifstream in(std::string(RWRS_GOLDEN_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing golden file " + name);
  return nlohmann::json::parse(in);
}

Outcome c9_bounds() {
  const int d = 8;
  const std::int64_t n = 2000;
  const std::int64_t replicas = 2000;
  const std::uint64_t seed = criterion_seed(9);
  const std::vector<LevelSetPoint> points = {{40, 10}, {60, 3}, {80, 2}};
  const std::vector<double> us = {1, 20, 100};
  const std::vector<double> xs_max = {3, 5, 7};
  const std::vector<std::int64_t> ns = {500, 1000, 2000};
  const std::vector<double> xs_count = {1, 2, 3};
  std::vector<std::pair<std::string, std::vector<BoundCheck>>> runs;
  runs.emplace_back("levelset", check_levelset(d, n, lambda_d(d) / 2, points, replicas, seed + 1));
  runs.emplace_back("heavy_mass", check_heavy_mass(d, n, us, replicas, seed + 2));
  runs.emplace_back("max", check_max(Graph::tree(d), n, xs_max, replicas, seed + 3));
  runs.emplace_back("silt", check_silt(Graph::tree(d), ns, 2, 1.45, replicas, seed + 4));
  runs.emplace_back("scenery_count", check_scenery_count(Graph::tree(d), SceneryDistribution::gaussian(), n,
                                                         3.0, 4.0, xs_count, replicas, seed + 5));
  const auto golden = load_golden("bounds_rhs.json");
  bool pass = true;
  std::string detail;
  int points_held = 0, points_total = 0, golden_equal = 0;
  for (const auto& [lemma, checks] : runs) {
    const auto& g = golden.at(lemma);
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const auto& b = checks[i];
      ++points_total;
      points_held += b.holds;
      const double expected = g.at("rhs").at(i).get<double>();
      const double reference = g.at("reference").at(i).get<double>();
      const bool equal = b.rhs == expected;
      const bool near_reference = std::abs(b.rhs / reference - 1) <= 1e-12;
      golden_equal += equal;
      if (!b.holds || !equal || !near_reference) {
        pass = false;
        detail += fmt("; %s[%zu]: hits %lld, rhs %.17g vs golden %.17g (reference %.17g), ci_low %.4g",
                      lemma.c_str(), i, static_cast<long long>(b.hits), b.rhs, expected, reference, b.ci_low);
      }
    }
    if (g.contains("calibration_hits") && g["calibration_hits"].get<std::int64_t>() != checks[0].hits) {
      pass = false;
      detail += fmt("; %s calibration hits %lld vs frozen %lld", lemma.c_str(),
                    static_cast<long long>(checks[0].hits),
                    static_cast<long long>(g["calibration_hits"].get<std::int64_t>()));
    }
  }
  return {pass, fmt("%d/%d points hold, %d/%d RHS equal to golden", points_held, points_total, golden_equal,
                    points_total) + detail};
}

Outcome c10_confinement() {
  std::vector<double> scaled;
  std::vector<double> lambdas;
  std::string detail;
  for (int R : {3, 5, 8}) {
    const auto c = confinement_rate(3, R);
    lambdas.push_back(c.lambda);
    scaled.push_back(R * R * c.decay_rate);
    detail += fmt("%sR=%d: lambda %.6f, R^2 (-log lambda) %.4f", detail.empty() ? "" : ", ", R, c.lambda,
                  scaled.back());
  }
  const bool increasing = lambdas[0] < lambdas[1] && lambdas[1] < lambdas[2];
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  return {increasing && *hi <= 2 * *lo, detail};
}

Outcome c11_contrast() {
  const auto pareto = SceneryDistribution::symmetric_pareto(5);
  const std::int64_t replicas = 1000000;
  const auto lattice = tail_mc(Graph::lattice(3), pareto, 10000, 3.0, replicas, criterion_seed(11));
  const auto tree = tail_mc(Graph::tree(8), pareto, 10000, 3.0, replicas, criterion_seed(111));
  const double pooled = static_cast<double>(lattice.hits + tree.hits) / (2.0 * static_cast<double>(replicas));
  const double se = std::sqrt(pooled * (1 - pooled) * 2.0 / static_cast<double>(replicas));
  const double z = se > 0 ? (lattice.p_hat - tree.p_hat) / se : 0.0;
  return {z >= 1.645,
          fmt("lattice Z^3 p_hat = %.3e [%.3e, %.3e], tree T_8 p_hat = %.3e [%.3e, %.3e], one-sided z = %+.2f "
              "(needs >= 1.645)",
              lattice.p_hat, lattice.ci_low, lattice.ci_high, tree.p_hat, tree.ci_low, tree.ci_high, z)};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "exact identities", c1_exact_identities},
    {2, "self-normalization invariance", c2_self_normalization},
    {3, "CLT for W", c3_clt},
    {4, "Cramer range at y = 2", c4_cramer},
    {5, "Green's function", c5_green},
    {6, "escape probability", c6_escape},
    {7, "regeneration tails", c7_regeneration},
    {8, "oracle equivalence", c8_oracle},
    {9, "bound domination", c9_bounds},
    {10, "confinement scaling", c10_confinement},
    {11, "tree/lattice contrast", c11_contrast},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--list") {
      for (const auto& c : kCriteria) std::cout << c.id << " " << c.name << "\n";
      return 0;
    }
    if (arg == "--only" && i + 1 < argc) {
      only.insert(std::atoi(argv[++i]));
      continue;
    }
    std::cerr << "usage: acceptance [--list] [--only N]...\n";
    return 2;
  }
  bool all = true;
  for (const auto& c : kCriteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "C" << c.id << " " << c.name << " (" << fmt("%.1f", secs)
              << " s): " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
