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

// Right-hand sides of the local-time and scenery concentration inequalities,
// and Monte Carlo checkers that compare them with empirical probabilities.
//
// Constants whose existence is proved but whose value is not (M, c_q, C_1)
// are calibrated at the first parameter point of a sweep, from the upper
// Wilson limit there, and then held fixed for the remaining points. A bound
// holds at a point when its right-hand side is at least the lower Wilson
// limit of the empirical probability.

#ifndef RWRS_BOUNDS_H_
#define RWRS_BOUNDS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rwrs/graph.h"
#include "rwrs/scenery.h"

namespace rwrs {

struct BoundCheck {
  std::string lemma;
  nlohmann::json params;
  std::int64_t hits = 0;
  std::int64_t replicas = 0;
  double p_hat = 0;
  double ci_low = 0;
  double ci_high = 0;
  double rhs = 0;
  bool holds = false;
  // The point that fixed the sweep's constant.
  bool calibration = false;
  nlohmann::json diagnostics = nlohmann::json::object();
};

BoundCheck make_bound_check(std::string lemma, nlohmann::json params, std::int64_t hits,
                            std::int64_t replicas, double rhs, bool calibration = false);

// exp(M n e^{-beta t / 2} - beta t u).
double levelset_rhs(double n, double beta, double t, double u, double M = 1.0);
// M exp(-lambda u / 2).
double heavy_mass_rhs(double M, double lambda, double u);
// n exp(-c1 (x - 1)).
double max_rhs(double n, double c1, double x);
// -log(1 - (d / (d + 1)) p_o) with p_o = (d - 1) / d, i.e. log((d + 1) / 2).
double tree_max_constant(int d);
// -log(1 - p_esc) with p_esc = 1 / G(0), the no-return probability on Z^d.
double lattice_max_constant(int d);
double max_constant(const Graph& graph);
// exp(-c n^exponent).
double silt_rhs(double c, double n, double exponent);
// y^{4/(d+2)} (log n)^{d/(d+2)}.
double lattice_t_star(double y, double n, int d);
// y^{2d/(d+2)} (log n)^{2/(d+2)}.
double lattice_speed(double y, double n, int d);
// exp(-C lattice_speed(y, n, d)).
double lattice_heavy_mass_rhs(double C, double y, double n, int d);
// (e E|xi|^m y^m log^{2m} n / (x n^{m/2 - 1}))^x.
double scenery_count_rhs(double abs_moment_m, double n, double y, double m, double x);

struct LevelSetPoint {
  double t = 0;
  double u = 0;
};

// P(L_n(t) >= u) on the tree T_d, d >= 3, with M = 1. Requires
// beta in (0, lambda_d / 2].
std::vector<BoundCheck> check_levelset(int d, std::int64_t n, double beta,
                                       std::span<const LevelSetPoint> points,
                                       std::int64_t replicas, std::uint64_t seed,
                                       unsigned workers = 0);

// P(sum_{l(v) >= (4 / lambda_d) log n} l(v) >= u) on T_d, d >= 3; M is
// calibrated at us[0].
std::vector<BoundCheck> check_heavy_mass(int d, std::int64_t n, std::span<const double> us,
                                         std::int64_t replicas, std::uint64_t seed,
                                         unsigned workers = 0);

// P(L_{n,inf} >= x) with c1 = max_constant(graph).
std::vector<BoundCheck> check_max(const Graph& graph, std::int64_t n,
                                  std::span<const double> xs, std::int64_t replicas,
                                  std::uint64_t seed, unsigned workers = 0);

// P(L_{n,q}^q >= B n) along increasing n, against exp(-c n^{1/q}) on the tree
// and exp(-c n^{1/3}) on Z^d (q = 2 only); c is calibrated at ns[0].
std::vector<BoundCheck> check_silt(const Graph& graph, std::span<const std::int64_t> ns,
                                   int q, double B, std::int64_t replicas,
                                   std::uint64_t seed, unsigned workers = 0);

// P(sum_{l(z) > t_*} l(z) >= y^2) on Z^d against exp(-C_1 y^{2d/(d+2)}
// (log n)^{2/(d+2)}), C_1 calibrated at ys[0]. Diagnostics hold the mean
// size of each dyadic shell {2^k t_* < l <= 2^{k+1} t_*}.
std::vector<BoundCheck> check_lattice_heavy_mass(int d, std::int64_t n,
                                                 std::span<const double> ys,
                                                 std::int64_t replicas,
                                                 std::uint64_t seed,
                                                 unsigned workers = 0);

// P(|E^c| >= x) with the two-sided scenery cut of the graph's decomposition.
// Requires E|xi|^m < infinity.
std::vector<BoundCheck> check_scenery_count(const Graph& graph,
                                            const SceneryDistribution& dist,
                                            std::int64_t n, double y, double m,
                                            std::span<const double> xs,
                                            std::int64_t replicas, std::uint64_t seed,
                                            unsigned workers = 0);

void to_json(nlohmann::json& j, const BoundCheck& b);

}  // namespace rwrs

#endif  // RWRS_BOUNDS_H_
