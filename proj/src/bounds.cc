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

#include "rwrs/bounds.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "rwrs/estimators.h"
#include "rwrs/local_time.h"
#include "rwrs/parallel.h"
#include "rwrs/regeneration.h"
#include "rwrs/walk.h"

namespace rwrs {
namespace {

// Runs `replicas` walks (the walks of simulate_summaries under the same seed)
// and stores `width` statistics per replica from fn(trace, ledger, rs, row).
template <class Fn>
std::vector<double> per_replica(const Graph& graph, std::int64_t n, std::int64_t replicas,
                                std::uint64_t seed, unsigned workers, std::size_t width,
                                Fn fn) {
  if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(replicas) * width);
  parallel_blocks(static_cast<std::size_t>(replicas), workers,
                  [&](unsigned, std::size_t begin, std::size_t end) {
                    WalkTrace trace;
                    LocalTimeLedger ledger;
                    for (std::size_t r = begin; r < end; ++r) {
                      const std::uint64_t rs = replica_seed(seed, r);
                      Philox rng = walk_stream(rs);
                      run_walk(graph, n, rng, trace);
                      build_ledger(trace, ledger);
                      fn(trace, ledger, rs, out.data() + r * width);
                    }
                  });
  return out;
}

std::int64_t count_at_least(const std::vector<double>& rows, std::size_t width,
                            std::size_t column, double threshold) {
  std::int64_t hits = 0;
  for (std::size_t i = column; i < rows.size(); i += width) hits += rows[i] >= threshold;
  return hits;
}

void require_tree_lambda(int d) {
  if (d < 3) throw std::invalid_argument("tree bounds need d >= 3 (lambda_d > 0)");
}

}  // namespace

BoundCheck make_bound_check(std::string lemma, nlohmann::json params, std::int64_t hits,
                            std::int64_t replicas, double rhs, bool calibration) {
  BoundCheck b;
  b.lemma = std::move(lemma);
  b.params = std::move(params);
  b.hits = hits;
  b.replicas = replicas;
  b.p_hat = static_cast<double>(hits) / static_cast<double>(replicas);
  const Interval ci = wilson_interval(hits, replicas);
  b.ci_low = ci.low;
  b.ci_high = ci.high;
  b.rhs = rhs;
  b.holds = rhs >= b.ci_low;
  b.calibration = calibration;
  return b;
}

double levelset_rhs(double n, double beta, double t, double u, double M) {
  return std::exp(M * n * std::exp(-beta * t / 2.0) - beta * t * u);
}

double heavy_mass_rhs(double M, double lambda, double u) {
  return M * std::exp(-lambda * u / 2.0);
}

double max_rhs(double n, double c1, double x) { return n * std::exp(-c1 * (x - 1.0)); }

double tree_max_constant(int d) {
  const double p_o = escape_probability(d);
  return -std::log(1.0 - static_cast<double>(d) / (d + 1.0) * p_o);
}

double lattice_max_constant(int d) {
  return -std::log(1.0 - lattice_escape_probability(d));
}

double max_constant(const Graph& graph) {
  return graph.is_tree() ? tree_max_constant(graph.d) : lattice_max_constant(graph.d);
}

double silt_rhs(double c, double n, double exponent) {
  return std::exp(-c * std::pow(n, exponent));
}

double lattice_t_star(double y, double n, int d) {
  const double dd = d;
  return std::pow(y, 4.0 / (dd + 2.0)) * std::pow(std::log(n), dd / (dd + 2.0));
}

double lattice_speed(double y, double n, int d) {
  const double dd = d;
  return std::pow(y, 2.0 * dd / (dd + 2.0)) * std::pow(std::log(n), 2.0 / (dd + 2.0));
}

double lattice_heavy_mass_rhs(double C, double y, double n, int d) {
  return std::exp(-C * lattice_speed(y, n, d));
}

double scenery_count_rhs(double abs_moment_m, double n, double y, double m, double x) {
  const double log_n = std::log(n);
  const double base = std::numbers::e * abs_moment_m * std::pow(y, m) *
                      std::pow(log_n, 2.0 * m) / (x * std::pow(n, m / 2.0 - 1.0));
  return std::pow(base, x);
}

std::vector<BoundCheck> check_levelset(int d, std::int64_t n, double beta,
                                       std::span<const LevelSetPoint> points,
                                       std::int64_t replicas, std::uint64_t seed,
                                       unsigned workers) {
  require_tree_lambda(d);
  if (!(beta > 0) || beta > lambda_d(d) / 2.0) {
    throw std::invalid_argument("beta must lie in (0, lambda_d / 2]");
  }
  const std::size_t width = points.size();
  const auto rows = per_replica(
      Graph::tree(d), n, replicas, seed, workers, width,
      [&](const WalkTrace&, const LocalTimeLedger& ledger, std::uint64_t, double* row) {
        for (std::size_t i = 0; i < width; ++i) {
          row[i] = static_cast<double>(ledger.level_set_size(points[i].t));
        }
      });
  std::vector<BoundCheck> out;
  for (std::size_t i = 0; i < width; ++i) {
    const auto& p = points[i];
    const double rhs = levelset_rhs(static_cast<double>(n), beta, p.t, p.u);
    out.push_back(make_bound_check(
        "levelset",
        {{"graph", Graph::tree(d)}, {"n", n}, {"beta", beta}, {"t", p.t}, {"u", p.u}, {"M", 1.0}},
        count_at_least(rows, width, i, p.u), replicas, rhs));
  }
  return out;
}

std::vector<BoundCheck> check_heavy_mass(int d, std::int64_t n, std::span<const double> us,
                                         std::int64_t replicas, std::uint64_t seed,
                                         unsigned workers) {
  require_tree_lambda(d);
  if (us.empty()) throw std::invalid_argument("check_heavy_mass needs at least one u");
  const double lambda = lambda_d(d);
  const double threshold = 4.0 / lambda * std::log(static_cast<double>(n));
  const auto rows = per_replica(
      Graph::tree(d), n, replicas, seed, workers, 2,
      [&](const WalkTrace&, const LocalTimeLedger& ledger, std::uint64_t, double* row) {
        row[0] = static_cast<double>(ledger.heavy_mass(threshold));
        row[1] = static_cast<double>(ledger.max_local_time());
      });
  double max_lt = 0;
  for (std::size_t i = 1; i < rows.size(); i += 2) max_lt = std::max(max_lt, rows[i]);
  std::vector<BoundCheck> out;
  double M = 0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    const std::int64_t hits = count_at_least(rows, 2, 0, us[i]);
    if (i == 0) M = wilson_interval(hits, replicas).high * std::exp(lambda * us[0] / 2.0);
    BoundCheck b = make_bound_check(
        "heavy_mass",
        {{"graph", Graph::tree(d)}, {"n", n}, {"u", us[i]}, {"lambda", lambda}, {"M", M}},
        hits, replicas, heavy_mass_rhs(M, lambda, us[i]), i == 0);
    b.diagnostics = {{"threshold", threshold}, {"max_local_time_seen", max_lt}};
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<BoundCheck> check_max(const Graph& graph, std::int64_t n,
                                  std::span<const double> xs, std::int64_t replicas,
                                  std::uint64_t seed, unsigned workers) {
  const double c1 = max_constant(graph);
  const auto rows = per_replica(
      graph, n, replicas, seed, workers, 1,
      [&](const WalkTrace&, const LocalTimeLedger& ledger, std::uint64_t, double* row) {
        row[0] = static_cast<double>(ledger.max_local_time());
      });
  std::vector<BoundCheck> out;
  for (double x : xs) {
    out.push_back(make_bound_check("max", {{"graph", graph}, {"n", n}, {"x", x}, {"c1", c1}},
                                   count_at_least(rows, 1, 0, x), replicas,
                                   max_rhs(static_cast<double>(n), c1, x)));
  }
  return out;
}

std::vector<BoundCheck> check_silt(const Graph& graph, std::span<const std::int64_t> ns,
                                   int q, double B, std::int64_t replicas,
                                   std::uint64_t seed, unsigned workers) {
  if (q != 2 && q != 3) throw std::invalid_argument("q must be 2 or 3");
  if (!graph.is_tree() && q != 2) throw std::invalid_argument("lattice silt check needs q = 2");
  if (ns.empty()) throw std::invalid_argument("check_silt needs at least one n");
  if (!(B > 0)) throw std::invalid_argument("B must be > 0");
  const double exponent = graph.is_tree() ? 1.0 / q : 1.0 / 3.0;
  std::vector<BoundCheck> out;
  double c = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const std::int64_t n = ns[i];
    const auto rows = per_replica(
        graph, n, replicas, derive_seed(seed, StreamTag::kReplica, static_cast<std::uint64_t>(n)),
        workers, 1,
        [&](const WalkTrace&, const LocalTimeLedger& ledger, std::uint64_t, double* row) {
          row[0] = static_cast<double>(ledger.silt(q));
        });
    const auto nd = static_cast<double>(n);
    const std::int64_t hits = count_at_least(rows, 1, 0, B * nd);
    if (i == 0) c = -std::log(wilson_interval(hits, replicas).high) / std::pow(nd, exponent);
    double mean = 0;
    for (double v : rows) mean += v / nd;
    mean /= static_cast<double>(rows.size());
    BoundCheck b = make_bound_check(
        "silt",
        {{"graph", graph}, {"n", n}, {"q", q}, {"B", B}, {"c", c}, {"exponent", exponent}},
        hits, replicas, silt_rhs(c, nd, exponent), i == 0);
    b.diagnostics = {{"mean_silt_over_n", mean}};
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<BoundCheck> check_lattice_heavy_mass(int d, std::int64_t n,
                                                 std::span<const double> ys,
                                                 std::int64_t replicas,
                                                 std::uint64_t seed, unsigned workers) {
  const Graph graph = Graph::lattice(d);
  if (d < 3) throw std::invalid_argument("lattice heavy-mass check needs d >= 3");
  if (ys.empty()) throw std::invalid_argument("check_lattice_heavy_mass needs at least one y");
  const auto nd = static_cast<double>(n);
  struct Shells {
    double t_star;
    int K;
  };
  std::vector<Shells> shells;
  std::size_t width = 0;
  for (double y : ys) {
    const double t_star = lattice_t_star(y, nd, d);
    const double ratio = lattice_speed(y, nd, d) / t_star;
    const int K = std::max(0, static_cast<int>(std::ceil(std::log2(ratio))) - 1);
    shells.push_back({t_star, K});
    width += 1 + static_cast<std::size_t>(K) + 1;
  }
  const auto rows = per_replica(
      graph, n, replicas, seed, workers, width,
      [&](const WalkTrace&, const LocalTimeLedger& ledger, std::uint64_t, double* row) {
        std::size_t col = 0;
        for (const auto& s : shells) {
          double mass = 0;
          double* shell = row + col + 1;
          std::fill(shell, shell + s.K + 1, 0.0);
          for (std::int64_t l : ledger.counts()) {
            const auto ld = static_cast<double>(l);
            if (ld <= s.t_star) continue;
            mass += ld;
            const int k = static_cast<int>(std::floor(std::log2(ld / s.t_star)));
            if (k <= s.K && ld <= std::ldexp(s.t_star, k + 1)) shell[k] += 1;
          }
          row[col] = mass;
          col += 1 + static_cast<std::size_t>(s.K) + 1;
        }
      });
  std::vector<BoundCheck> out;
  double C = 0;
  std::size_t col = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double y = ys[i];
    const std::int64_t hits = count_at_least(rows, width, col, y * y);
    if (i == 0) C = -std::log(wilson_interval(hits, replicas).high) / lattice_speed(y, nd, d);
    BoundCheck b = make_bound_check(
        "lattice_heavy_mass",
        {{"graph", graph}, {"n", n}, {"y", y}, {"C1", C}, {"t_star", shells[i].t_star}}, hits,
        replicas, lattice_heavy_mass_rhs(C, y, nd, d), i == 0);
    nlohmann::json mean_shells = nlohmann::json::array();
    for (int k = 0; k <= shells[i].K; ++k) {
      double sum = 0;
      for (std::size_t r = 0; r < static_cast<std::size_t>(replicas); ++r) {
        sum += rows[r * width + col + 1 + static_cast<std::size_t>(k)];
      }
      mean_shells.push_back(sum / static_cast<double>(replicas));
    }
    b.diagnostics = {{"K", shells[i].K}, {"mean_shell_sizes", mean_shells}};
    out.push_back(std::move(b));
    col += 1 + static_cast<std::size_t>(shells[i].K) + 1;
  }
  return out;
}

std::vector<BoundCheck> check_scenery_count(const Graph& graph,
                                            const SceneryDistribution& dist,
                                            std::int64_t n, double y, double m,
                                            std::span<const double> xs,
                                            std::int64_t replicas, std::uint64_t seed,
                                            unsigned workers) {
  if (n < 3) throw std::invalid_argument("scenery count check needs n >= 3");
  if (!(y > 0)) throw std::invalid_argument("y must be > 0");
  const double moment = dist.abs_moment(m);
  const auto nd = static_cast<double>(n);
  const double log_n = std::log(nd);
  const double cut = std::sqrt(nd) / (y * log_n * log_n);
  const bool strict = graph.is_tree();
  const auto rows = per_replica(
      graph, n, replicas, seed, workers, 1,
      [&](const WalkTrace& trace, const LocalTimeLedger&, std::uint64_t rs, double* row) {
        std::vector<double> scenery;
        sample_assignment(dist, trace, derive_seed(rs, StreamTag::kScenery), scenery);
        std::int64_t outside = 0;
        for (double xi : scenery) outside += strict ? std::abs(xi) >= cut : std::abs(xi) > cut;
        row[0] = static_cast<double>(outside);
      });
  std::vector<BoundCheck> out;
  for (double x : xs) {
    BoundCheck b = make_bound_check(
        "scenery_count",
        {{"graph", graph}, {"distribution", dist}, {"n", n}, {"y", y}, {"m", m}, {"x", x}},
        count_at_least(rows, 1, 0, x), replicas, scenery_count_rhs(moment, nd, y, m, x));
    b.diagnostics = {{"scenery_threshold", cut}};
    out.push_back(std::move(b));
  }
  return out;
}

void to_json(nlohmann::json& j, const BoundCheck& b) {
  j = {{"lemma", b.lemma},     {"params", b.params},   {"hits", b.hits},
       {"replicas", b.replicas}, {"p_hat", b.p_hat},   {"ci_low", b.ci_low},
       {"ci_high", b.ci_high}, {"rhs", b.rhs},         {"holds", b.holds},
       {"calibration", b.calibration}, {"diagnostics", b.diagnostics}};
}

}  // namespace rwrs
