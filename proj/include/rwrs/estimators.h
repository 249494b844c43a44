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

// Monte Carlo estimators: replica simulation of W, tail probabilities with
// Wilson intervals, the exact enumeration oracle, conditional importance
// sampling, the Green's function at the origin, the confinement eigenvalue
// and the escape and epoch samplers of the tree walk.

#ifndef RWRS_ESTIMATORS_H_
#define RWRS_ESTIMATORS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "rwrs/graph.h"
#include "rwrs/local_time.h"
#include "rwrs/rwrs_stats.h"
#include "rwrs/scenery.h"
#include "rwrs/walk.h"

namespace rwrs {

inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
  double low = 0;
  double high = 0;
};

// Wilson score interval for a binomial proportion. Throws for trials < 1 or
// successes outside [0, trials].
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z = kZ95);

// Standard normal CDF and upper tail.
double normal_cdf(double x);
double normal_upper_tail(double x);

// Kolmogorov-Smirnov distance between the empirical law of `samples` and
// N(0, 1). NaN entries are rejected.
double ks_distance_normal(std::span<const double> samples);

// P(W >= y) from `replicas` independent walks and sceneries.
struct TailEstimate {
  double y = 0;
  std::int64_t hits = 0;
  std::int64_t replicas = 0;
  double p_hat = 0;
  double ci_low = 0;
  double ci_high = 0;
  // y^{-2} log p_hat.
  double rate = 0;
  // y^{-2d/(d+2)} (log n)^{-2/(d+2)} log p_hat; NaN on the tree.
  double lattice_rate = 0;
  // p_hat == 0: rates are NaN and nothing can be asserted.
  bool insufficient = false;
};

TailEstimate make_tail_estimate(const Graph& graph, std::int64_t n, double y,
                                std::int64_t hits, std::int64_t replicas);

// Seed of replica r under experiment seed `seed`.
inline std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t r) {
  return derive_seed(seed, StreamTag::kReplica, r);
}

// One replica at a time with reusable buffers. The walk is drawn from
// walk_stream(rs) and the scenery from the keyed streams of
// derive_seed(rs, kScenery), rs = replica_seed(seed, r).
class ReplicaSimulator {
 public:
  ReplicaSimulator(const Graph& graph, const SceneryDistribution& dist, std::int64_t n);

  const RwrsSummary& run(std::uint64_t replica_seed);

  const WalkTrace& trace() const { return trace_; }
  const LocalTimeLedger& ledger() const { return ledger_; }
  std::span<const double> scenery() const { return scenery_; }
  const RwrsSummary& summary() const { return summary_; }

 private:
  Graph graph_;
  SceneryDistribution dist_;
  std::int64_t n_;
  WalkTrace trace_;
  LocalTimeLedger ledger_;
  std::vector<double> scenery_;
  RwrsSummary summary_;
};

// Summaries of replicas 0..replicas-1, in replica order.
std::vector<RwrsSummary> simulate_summaries(const Graph& graph,
                                            const SceneryDistribution& dist,
                                            std::int64_t n, std::int64_t replicas,
                                            std::uint64_t seed, unsigned workers = 0);

// Tail estimates for every y on the same replicas, so p_hat is
// non-increasing in y. Undefined W counts as a miss.
std::vector<TailEstimate> tail_from_summaries(const Graph& graph, std::int64_t n,
                                              std::span<const RwrsSummary> summaries,
                                              std::span<const double> ys);

// Requires replicas >= 1000.
std::vector<TailEstimate> tail_mc(const Graph& graph, const SceneryDistribution& dist,
                                  std::int64_t n, std::span<const double> ys,
                                  std::int64_t replicas, std::uint64_t seed,
                                  unsigned workers = 0);
TailEstimate tail_mc(const Graph& graph, const SceneryDistribution& dist, std::int64_t n,
                     double y, std::int64_t replicas, std::uint64_t seed,
                     unsigned workers = 0);

// c_d = (1 - sqrt(24 / lambda))^2. Effective only for lambda > 24; value is
// 0 at lambda = 24 and NaN below. lambda = +infinity gives 1.
struct UpperRateConstant {
  double value = 0;
  bool effective = false;
};
UpperRateConstant c_d(double lambda);

// Exact P(T >= a) and P(W >= y) given the walk, summing product weights over
// all |support|^range scenery assignments. Requires a finite support and
// |support|^range <= 2^24; throws std::invalid_argument otherwise.
double enumerate_tail_T(const LocalTimeLedger& ledger, const SceneryDistribution& dist,
                        double a);
double enumerate_tail_W(const LocalTimeLedger& ledger, const SceneryDistribution& dist,
                        double y);

// Estimate of P(T >= a | walk).
struct ConditionalTail {
  double a = 0;
  double theta = 0;
  std::int64_t replicas = 0;
  double p_hat = 0;
  double std_error = 0;
  // Per-sample variance of the weighted indicator.
  double variance = 0;
  double ci_low = 0;
  double ci_high = 0;
};

// Plain Monte Carlo over fresh sceneries on the ledger's sites. Replica r
// draws xi(s) for the visited sites in SiteId order from
// Philox(derive_seed(seed, kTilted, r)).
ConditionalTail tail_mc_conditional(const LocalTimeLedger& ledger,
                                    const SceneryDistribution& dist, double a,
                                    std::int64_t replicas, std::uint64_t seed);

// Importance sampling: xi(s) is drawn from the law tilted by theta l(s) and
// the indicator is weighted by exp(-theta T + sum_s psi(theta l(s))), psi the
// log-MGF. Uses the same streams as tail_mc_conditional, so theta = 0
// reproduces it exactly. Throws std::domain_error without an MGF.
ConditionalTail tail_is_conditional(const LocalTimeLedger& ledger,
                                    const SceneryDistribution& dist, double a,
                                    double theta, std::int64_t replicas,
                                    std::uint64_t seed);

// The tilt whose tilted mean of T equals a (0 when a <= 0).
double optimal_tilt(const LocalTimeLedger& ledger, const SceneryDistribution& dist,
                    double a);

// Mean number of visits to the origin at times 0..horizon on Z^d, and the
// same on the prefix 0..horizon/10 of the same walks.
struct GreenEstimate {
  int d = 3;
  std::int64_t horizon = 0;
  std::int64_t replicas = 0;
  double g_hat = 0;
  double std_error = 0;
  double ci_low = 0;
  double ci_high = 0;
  std::int64_t short_horizon = 0;
  double g_short = 0;
  // Mean visits in (horizon/10, horizon] and its standard error.
  double horizon_gap = 0;
  double gap_std_error = 0;
};
// Throws for d < 3, horizon < 10 or replicas < 2.
GreenEstimate green_function_mc(int d, std::int64_t horizon, std::int64_t replicas,
                                std::uint64_t seed, unsigned workers = 0);

// G(0) for the simple random walk on Z^d, d >= 3: Watson's closed form for
// d = 3 and int_0^inf (e^{-t/d} I_0(t/d))^d dt otherwise.
double lattice_green_exact(int d);

// Probability of no return to the start on Z^d: 1/G(0).
double lattice_escape_probability(int d);

// Principal eigenvalue of the walk kernel restricted to {z in Z^d : |z| <= R}.
struct ConfinementResult {
  int d = 3;
  int R = 0;
  std::int64_t states = 0;
  double lambda = 0;
  // -log lambda.
  double decay_rate = 0;
  int iterations = 0;
  double residual = 0;
};
// Power iteration on (I + P) / 2, whose top eigenvalue is (1 + lambda) / 2;
// the lazy form removes the -lambda eigenvalue of the bipartite kernel.
// Requires d == 3 and 1 <= R <= 12.
ConfinementResult confinement_rate(int d, int R, double tolerance = 1e-10);

// Sites of {z in Z^d : |z| <= R} in lexicographic order.
std::vector<std::vector<int>> ball_sites(int d, int R);

// Fraction of tree walks from the root that do not return within `horizon`.
struct EscapeEstimate {
  int d = 2;
  std::int64_t horizon = 0;
  std::int64_t replicas = 0;
  std::int64_t escapes = 0;
  double p_hat = 0;
  double std_error = 0;
  double expected = 0;
};
EscapeEstimate escape_frequency_mc(int d, std::int64_t horizon, std::int64_t replicas,
                                   std::uint64_t seed, unsigned workers = 0);

// Regeneration epochs pooled from independent tree walks.
struct EpochSample {
  int d = 3;
  std::int64_t n = 0;
  std::int64_t walks = 0;
  // theta_1 of each walk with at least one complete epoch.
  std::vector<std::int64_t> first;
  // theta_k, k >= 2, complete epochs only.
  std::vector<std::int64_t> later;
  // Consecutive complete epochs (theta_k, theta_{k+1}), k >= 2, within a walk.
  std::vector<std::int64_t> lag_leads;
  std::vector<std::int64_t> lag_follows;
  std::int64_t censored_walks = 0;
  // Walks whose epoch vertex sets were checked, and how many were disjoint.
  std::int64_t inspected = 0;
  std::int64_t disjoint = 0;
};
// Every `inspect_every`-th walk is checked for vertex-disjoint epochs
// (0 disables the check).
EpochSample collect_epochs(int d, std::int64_t n, std::int64_t walks, std::uint64_t seed,
                           std::int64_t inspect_every = 0, unsigned workers = 0);

// A tree walk on T_d cut at the longest prefix whose range is `range`.
// Throws when the walk from `seed` does not reach that range in 64 * range steps.
LocalTimeLedger ledger_with_range(int d, std::int64_t range, std::uint64_t seed);

// One comparison of plain MC and tilted IS against the enumeration oracle on
// a range-limited instance, at threshold a = sigma_factor * sqrt(Var(T | walk)).
struct OracleComparison {
  std::int64_t repetition = 0;
  std::int64_t range = 0;
  std::int64_t n = 0;
  double a = 0;
  double exact = 0;
  ConditionalTail plain;
  ConditionalTail tilted;
  bool plain_agrees = false;
  bool tilted_agrees = false;
  // IS at theta = 0 reproduced plain MC bit for bit on the same streams.
  bool zero_tilt_identical = false;
};

// Agreement means |estimate - exact| <= 3 standard errors. Requires a law
// with finite support and an MGF.
std::vector<OracleComparison> oracle_crosscheck(const SceneryDistribution& dist, int d,
                                                std::int64_t range, double sigma_factor,
                                                std::int64_t repetitions,
                                                std::int64_t replicas, std::uint64_t seed,
                                                unsigned workers = 0);

void to_json(nlohmann::json& j, const TailEstimate& t);
void to_json(nlohmann::json& j, const ConditionalTail& t);
void to_json(nlohmann::json& j, const GreenEstimate& g);
void to_json(nlohmann::json& j, const ConfinementResult& c);
void to_json(nlohmann::json& j, const EscapeEstimate& e);
void to_json(nlohmann::json& j, const OracleComparison& o);

}  // namespace rwrs

#endif  // RWRS_ESTIMATORS_H_
