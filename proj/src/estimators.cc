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

#include "rwrs/estimators.h"

#include <Eigen/Sparse>
#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "rwrs/exact_sum.h"
#include "rwrs/parallel.h"
#include "rwrs/regeneration.h"

namespace rwrs {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_or_nan(double p) { return p > 0 ? std::log(p) : kNaN; }

// Mean and standard error of a sample given its sum and sum of squares.
struct MeanSe {
  double mean;
  double se;
  double variance;
};

MeanSe mean_se(double sum, double sum_sq, std::int64_t count) {
  const auto m = static_cast<double>(count);
  const double mean = sum / m;
  const double var = count > 1 ? std::max(0.0, (sum_sq - m * mean * mean) / (m - 1)) : 0.0;
  return {mean, std::sqrt(var / m), var};
}

// e^{-x} I_0(x) without overflow.
double scaled_bessel_i0(double x) {
  if (x < 500) return std::exp(-x) * boost::math::cyl_bessel_i(0, x);
  const double r = 1.0 / (8.0 * x);
  const double series = 1.0 + r + 4.5 * r * r + 37.5 * r * r * r;
  return series / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  if (trials < 1) throw std::invalid_argument("wilson_interval needs trials >= 1");
  if (successes < 0 || successes > trials) {
    throw std::invalid_argument("successes must lie in [0, trials]");
  }
  const auto n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  Interval out{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  // Keep p inside the interval despite rounding at the endpoints.
  out.low = std::min(out.low, p);
  out.high = std::max(out.high, p);
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double normal_upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double ks_distance_normal(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("ks_distance_normal needs samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double x : sorted) {
    if (std::isnan(x)) throw std::invalid_argument("ks_distance_normal got NaN");
  }
  std::sort(sorted.begin(), sorted.end());
  const auto m = static_cast<double>(sorted.size());
  double dist = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i]);
    dist = std::max({dist, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return dist;
}

TailEstimate make_tail_estimate(const Graph& graph, std::int64_t n, double y,
                                std::int64_t hits, std::int64_t replicas) {
  TailEstimate t;
  t.y = y;
  t.hits = hits;
  t.replicas = replicas;
  t.p_hat = static_cast<double>(hits) / static_cast<double>(replicas);
  const Interval ci = wilson_interval(hits, replicas);
  t.ci_low = ci.low;
  t.ci_high = ci.high;
  t.insufficient = hits == 0;
  const double log_p = log_or_nan(t.p_hat);
  t.rate = log_p / (y * y);
  if (graph.is_tree()) {
    t.lattice_rate = kNaN;
  } else {
    const double d = graph.d;
    t.lattice_rate = log_p * std::pow(y, -2.0 * d / (d + 2.0)) *
                     std::pow(std::log(static_cast<double>(n)), -2.0 / (d + 2.0));
  }
  return t;
}

ReplicaSimulator::ReplicaSimulator(const Graph& graph, const SceneryDistribution& dist,
                                   std::int64_t n)
    : graph_(graph), dist_(dist), n_(n) {
  if (n < 1) throw std::invalid_argument("replica walks need n >= 1");
}

const RwrsSummary& ReplicaSimulator::run(std::uint64_t rs) {
  Philox rng = walk_stream(rs);
  run_walk(graph_, n_, rng, trace_);
  build_ledger(trace_, ledger_);
  sample_assignment(dist_, trace_, derive_seed(rs, StreamTag::kScenery), scenery_);
  summary_ = compute_summary(ledger_, scenery_);
  return summary_;
}

std::vector<RwrsSummary> simulate_summaries(const Graph& graph,
                                            const SceneryDistribution& dist,
                                            std::int64_t n, std::int64_t replicas,
                                            std::uint64_t seed, unsigned workers) {
  if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
  std::vector<RwrsSummary> out(static_cast<std::size_t>(replicas));
  parallel_blocks(out.size(), workers, [&](unsigned, std::size_t begin, std::size_t end) {
    ReplicaSimulator sim(graph, dist, n);
    for (std::size_t r = begin; r < end; ++r) out[r] = sim.run(replica_seed(seed, r));
  });
  return out;
}

std::vector<TailEstimate> tail_from_summaries(const Graph& graph, std::int64_t n,
                                              std::span<const RwrsSummary> summaries,
                                              std::span<const double> ys) {
  if (summaries.empty()) throw std::invalid_argument("no replicas to estimate from");
  std::vector<TailEstimate> out;
  out.reserve(ys.size());
  for (double y : ys) {
    std::int64_t hits = 0;
    for (const auto& s : summaries) hits += s.defined && s.W >= y;
    out.push_back(make_tail_estimate(graph, n, y, hits,
                                     static_cast<std::int64_t>(summaries.size())));
  }
  return out;
}

std::vector<TailEstimate> tail_mc(const Graph& graph, const SceneryDistribution& dist,
                                  std::int64_t n, std::span<const double> ys,
                                  std::int64_t replicas, std::uint64_t seed,
                                  unsigned workers) {
  if (replicas < 1000) throw std::invalid_argument("tail_mc needs replicas >= 1000");
  const auto summaries = simulate_summaries(graph, dist, n, replicas, seed, workers);
  return tail_from_summaries(graph, n, summaries, ys);
}

TailEstimate tail_mc(const Graph& graph, const SceneryDistribution& dist, std::int64_t n,
                     double y, std::int64_t replicas, std::uint64_t seed,
                     unsigned workers) {
  const double ys[] = {y};
  return tail_mc(graph, dist, n, ys, replicas, seed, workers).front();
}

UpperRateConstant c_d(double lambda) {
  if (std::isinf(lambda) && lambda > 0) return {1.0, true};
  if (!(lambda >= 24.0)) return {kNaN, false};
  const double root = 1.0 - std::sqrt(24.0 / lambda);
  return {root * root, lambda > 24.0};
}

namespace {

// Calls visit(T, V2, weight) for every scenery assignment on the visited
// sites, accumulating T and V2 in SiteId order as compute_summary does.
template <class Visit>
void enumerate_assignments(const LocalTimeLedger& ledger, const SceneryDistribution& dist,
                           Visit visit) {
  const auto atoms = dist.finite_support();
  if (!atoms) throw std::invalid_argument("enumeration needs a finite-support scenery");
  std::vector<double> weights;
  const auto counts = ledger.counts();
  for (std::int64_t c : counts) {
    if (c > 0) weights.push_back(static_cast<double>(c));
  }
  const std::size_t k = atoms->size();
  const double log_states = static_cast<double>(weights.size()) * std::log2(static_cast<double>(k));
  if (log_states > 24.0 + 1e-9) {
    throw std::invalid_argument("enumeration instance too large: |support|^range > 2^24");
  }
  std::vector<std::size_t> digit(weights.size(), 0);
  while (true) {
    CompensatedSum t, v2;
    double prob = 1.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const Atom& atom = (*atoms)[digit[i]];
      t.add(weights[i] * atom.value);
      v2.add(weights[i] * atom.value * atom.value);
      prob *= atom.probability;
    }
    visit(t.value(), v2.value(), prob);
    std::size_t i = 0;
    while (i < digit.size() && ++digit[i] == k) digit[i++] = 0;
    if (i == digit.size()) break;
  }
}

}  // namespace

double enumerate_tail_T(const LocalTimeLedger& ledger, const SceneryDistribution& dist,
                        double a) {
  CompensatedSum p;
  enumerate_assignments(ledger, dist, [&](double T, double, double w) {
    if (T >= a) p.add(w);
  });
  return p.value();
}

double enumerate_tail_W(const LocalTimeLedger& ledger, const SceneryDistribution& dist,
                        double y) {
  CompensatedSum p;
  const std::int64_t n = ledger.steps();
  const std::int64_t silt2 = ledger.silt2();
  enumerate_assignments(ledger, dist, [&](double T, double V2, double w) {
    const double W = self_normalized(T, V2, silt2, n);
    if (!std::isnan(W) && W >= y) p.add(w);
  });
  return p.value();
}

namespace {

ConditionalTail conditional_estimate(const LocalTimeLedger& ledger,
                                     const SceneryDistribution& dist, double a,
                                     double theta, bool tilted, std::int64_t replicas,
                                     std::uint64_t seed) {
  if (replicas < 2) throw std::invalid_argument("replicas must be >= 2");
  std::vector<double> ells;
  for (std::int64_t c : ledger.counts()) {
    if (c > 0) ells.push_back(static_cast<double>(c));
  }
  double log_norm = 0;
  if (tilted) {
    if (!dist.has_mgf()) {
      throw std::domain_error("importance sampling needs a scenery with an MGF");
    }
    CompensatedSum psi;
    for (double l : ells) psi.add(dist.log_mgf(theta * l));
    log_norm = psi.value();
    if (!std::isfinite(log_norm)) throw std::domain_error("tilt outside the MGF domain");
  }
  CompensatedSum sum, sum_sq;
  for (std::int64_t r = 0; r < replicas; ++r) {
    Philox rng(derive_seed(seed, StreamTag::kTilted, static_cast<std::uint64_t>(r)));
    CompensatedSum t;
    for (double l : ells) {
      const double xi = tilted ? dist.sample_tilted(theta * l, rng) : dist.sample(rng);
      t.add(l * xi);
    }
    const double T = t.value();
    if (T < a) continue;
    const double w = tilted ? std::exp(-theta * T + log_norm) : 1.0;
    sum.add(w);
    sum_sq.add(w * w);
  }
  const MeanSe m = mean_se(sum.value(), sum_sq.value(), replicas);
  ConditionalTail out;
  out.a = a;
  out.theta = tilted ? theta : 0.0;
  out.replicas = replicas;
  out.p_hat = m.mean;
  out.std_error = m.se;
  out.variance = m.variance;
  out.ci_low = std::max(0.0, m.mean - kZ95 * m.se);
  out.ci_high = std::min(1.0, m.mean + kZ95 * m.se);
  return out;
}

}  // namespace

ConditionalTail tail_mc_conditional(const LocalTimeLedger& ledger,
                                    const SceneryDistribution& dist, double a,
                                    std::int64_t replicas, std::uint64_t seed) {
  return conditional_estimate(ledger, dist, a, 0.0, false, replicas, seed);
}

ConditionalTail tail_is_conditional(const LocalTimeLedger& ledger,
                                    const SceneryDistribution& dist, double a,
                                    double theta, std::int64_t replicas,
                                    std::uint64_t seed) {
  return conditional_estimate(ledger, dist, a, theta, true, replicas, seed);
}

double optimal_tilt(const LocalTimeLedger& ledger, const SceneryDistribution& dist,
                    double a) {
  if (!dist.has_mgf()) throw std::domain_error("optimal_tilt needs a scenery with an MGF");
  if (a <= 0) return 0.0;
  std::vector<double> ells;
  for (std::int64_t c : ledger.counts()) {
    if (c > 0) ells.push_back(static_cast<double>(c));
  }
  // Tilted mean of T: sum_s l(s) psi'(theta l(s)), psi' by central differences.
  const auto tilted_mean = [&](double theta) {
    double m = 0;
    for (double l : ells) {
      const double t = theta * l;
      const double h = 1e-5 * std::max(1.0, std::abs(t));
      m += l * (dist.log_mgf(t + h) - dist.log_mgf(t - h)) / (2.0 * h);
    }
    return m;
  };
  double hi = 1.0 / static_cast<double>(ledger.max_local_time());
  while (tilted_mean(hi) < a) {
    hi *= 2.0;
    if (hi > 1e3) return hi;
  }
  const auto result = boost::math::tools::bisect(
      [&](double theta) { return tilted_mean(theta) - a; }, 0.0, hi,
      boost::math::tools::eps_tolerance<double>(40));
  return 0.5 * (result.first + result.second);
}

GreenEstimate green_function_mc(int d, std::int64_t horizon, std::int64_t replicas,
                                std::uint64_t seed, unsigned workers) {
  if (d < 3) throw std::invalid_argument("green_function_mc needs d >= 3");
  if (horizon < 10) throw std::invalid_argument("green_function_mc needs horizon >= 10");
  if (replicas < 2) throw std::invalid_argument("green_function_mc needs replicas >= 2");
  const std::int64_t short_horizon = horizon / 10;
  std::vector<std::int64_t> full(static_cast<std::size_t>(replicas));
  std::vector<std::int64_t> early(full.size());
  parallel_blocks(full.size(), workers, [&](unsigned, std::size_t begin, std::size_t end) {
    std::vector<std::int32_t> z(static_cast<std::size_t>(d));
    for (std::size_t r = begin; r < end; ++r) {
      Philox rng = walk_stream(replica_seed(seed, r));
      std::fill(z.begin(), z.end(), 0);
      int nonzero = 0;
      std::int64_t visits = 1;
      std::int64_t visits_early = 1;
      for (std::int64_t k = 1; k <= horizon; ++k) {
        const std::uint32_t j = rng.below(static_cast<std::uint32_t>(2 * d));
        std::int32_t& c = z[j >> 1];
        const std::int32_t before = c;
        c += (j & 1u) ? -1 : 1;
        nonzero += (c != 0) - (before != 0);
        if (nonzero == 0) {
          ++visits;
          if (k <= short_horizon) ++visits_early;
        }
      }
      full[r] = visits;
      early[r] = visits_early;
    }
  });
  double s = 0, s2 = 0, g = 0, g2 = 0, e = 0;
  for (std::size_t r = 0; r < full.size(); ++r) {
    const auto v = static_cast<double>(full[r]);
    const auto gap = static_cast<double>(full[r] - early[r]);
    s += v;
    s2 += v * v;
    g += gap;
    g2 += gap * gap;
    e += static_cast<double>(early[r]);
  }
  const MeanSe m = mean_se(s, s2, replicas);
  const MeanSe gap = mean_se(g, g2, replicas);
  GreenEstimate out;
  out.d = d;
  out.horizon = horizon;
  out.replicas = replicas;
  out.g_hat = m.mean;
  out.std_error = m.se;
  out.ci_low = m.mean - kZ95 * m.se;
  out.ci_high = m.mean + kZ95 * m.se;
  out.short_horizon = short_horizon;
  out.g_short = e / static_cast<double>(replicas);
  out.horizon_gap = gap.mean;
  out.gap_std_error = gap.se;
  return out;
}

double lattice_green_exact(int d) {
  if (d < 3) throw std::invalid_argument("the walk is recurrent for d < 3");
  if (d == 3) {
    using boost::math::tgamma;
    return std::sqrt(6.0) / (32.0 * std::pow(std::numbers::pi, 3)) * tgamma(1.0 / 24) *
           tgamma(5.0 / 24) * tgamma(7.0 / 24) * tgamma(11.0 / 24);
  }
  const double dd = d;
  const auto f = [dd](double t) { return std::pow(scaled_bessel_i0(t / dd), dd); };
  const double head = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, 50.0, 15, 1e-13);
  boost::math::quadrature::exp_sinh<double> tail;
  return head + tail.integrate([&](double t) { return f(50.0 + t); }, 1e-13);
}

double lattice_escape_probability(int d) { return 1.0 / lattice_green_exact(d); }

std::vector<std::vector<int>> ball_sites(int d, int R) {
  if (d < 1 || R < 0) throw std::invalid_argument("ball_sites needs d >= 1, R >= 0");
  std::vector<std::vector<int>> out;
  std::vector<int> z(static_cast<std::size_t>(d), -R);
  while (true) {
    long long norm2 = 0;
    for (int c : z) norm2 += static_cast<long long>(c) * c;
    if (norm2 <= static_cast<long long>(R) * R) out.push_back(z);
    std::size_t i = z.size();
    while (i > 0 && z[i - 1] == R) z[--i] = -R;
    if (i == 0) break;
    ++z[i - 1];
  }
  return out;
}

ConfinementResult confinement_rate(int d, int R, double tolerance) {
  if (d != 3) throw std::invalid_argument("confinement_rate supports d = 3 only");
  if (R < 1 || R > 12) throw std::invalid_argument("confinement_rate needs 1 <= R <= 12");
  const auto sites = ball_sites(d, R);
  std::map<std::vector<int>, int> index;
  for (std::size_t i = 0; i < sites.size(); ++i) index.emplace(sites[i], static_cast<int>(i));
  const double w = 1.0 / (2.0 * d);
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    entries.emplace_back(static_cast<int>(i), static_cast<int>(i), 0.5);
    for (int axis = 0; axis < d; ++axis) {
      for (int sign : {1, -1}) {
        auto z = sites[i];
        z[static_cast<std::size_t>(axis)] += sign;
        const auto it = index.find(z);
        if (it != index.end()) entries.emplace_back(static_cast<int>(i), it->second, 0.5 * w);
      }
    }
  }
  const auto states = static_cast<Eigen::Index>(sites.size());
  Eigen::SparseMatrix<double> lazy(states, states);
  lazy.setFromTriplets(entries.begin(), entries.end());

  Eigen::VectorXd v = Eigen::VectorXd::Ones(states).normalized();
  Eigen::VectorXd next(states);
  double mu = 0;
  double residual = 1;
  int it = 0;
  constexpr int kMaxIterations = 2'000'000;
  while (it < kMaxIterations) {
    next = lazy * v;
    ++it;
    mu = v.dot(next);
    residual = (next - mu * v).norm();
    if (residual <= tolerance) break;
    v = next.normalized();
  }
  if (residual > tolerance) throw std::runtime_error("power iteration did not converge");
  ConfinementResult out;
  out.d = d;
  out.R = R;
  out.states = states;
  out.lambda = 2.0 * mu - 1.0;
  out.decay_rate = -std::log(out.lambda);
  out.iterations = it;
  out.residual = residual;
  return out;
}

EscapeEstimate escape_frequency_mc(int d, std::int64_t horizon, std::int64_t replicas,
                                   std::uint64_t seed, unsigned workers) {
  const Graph graph = Graph::tree(d);
  if (replicas < 2) throw std::invalid_argument("escape_frequency_mc needs replicas >= 2");
  std::vector<char> escaped(static_cast<std::size_t>(replicas));
  parallel_blocks(escaped.size(), workers, [&](unsigned, std::size_t begin, std::size_t end) {
    WalkTrace trace;
    for (std::size_t r = begin; r < end; ++r) {
      Philox rng = walk_stream(replica_seed(seed, r));
      run_walk(graph, horizon, rng, trace);
      const auto levels = trace.levels();
      escaped[r] = std::find(levels.begin() + 1, levels.end(), 0) == levels.end();
    }
  });
  EscapeEstimate out;
  out.d = d;
  out.horizon = horizon;
  out.replicas = replicas;
  out.escapes = std::count(escaped.begin(), escaped.end(), 1);
  out.p_hat = static_cast<double>(out.escapes) / static_cast<double>(replicas);
  out.expected = escape_probability(d);
  out.std_error = std::sqrt(out.expected * (1 - out.expected) / static_cast<double>(replicas));
  return out;
}

EpochSample collect_epochs(int d, std::int64_t n, std::int64_t walks, std::uint64_t seed,
                           std::int64_t inspect_every, unsigned workers) {
  const Graph graph = Graph::tree(d);
  if (walks < 1) throw std::invalid_argument("collect_epochs needs walks >= 1");
  struct PerWalk {
    std::vector<std::int64_t> epochs;
    bool censored = false;
    bool inspected = false;
    bool disjoint = false;
  };
  std::vector<PerWalk> per(static_cast<std::size_t>(walks));
  parallel_blocks(per.size(), workers, [&](unsigned, std::size_t begin, std::size_t end) {
    WalkTrace trace;
    for (std::size_t r = begin; r < end; ++r) {
      Philox rng = walk_stream(replica_seed(seed, r));
      run_walk(graph, n, rng, trace);
      const RegenerationRecord record = detect_regenerations(trace.levels());
      const auto complete = record.complete_epochs();
      per[r].epochs.assign(complete.begin(), complete.end());
      per[r].censored = record.censored;
      if (inspect_every > 0 && static_cast<std::int64_t>(r) % inspect_every == 0) {
        per[r].inspected = true;
        per[r].disjoint = epochs_vertex_disjoint(trace, record);
      }
    }
  });
  EpochSample out;
  out.d = d;
  out.n = n;
  out.walks = walks;
  for (const auto& p : per) {
    if (!p.epochs.empty()) {
      out.first.push_back(p.epochs.front());
      out.later.insert(out.later.end(), p.epochs.begin() + 1, p.epochs.end());
      for (std::size_t k = 2; k < p.epochs.size(); ++k) {
        out.lag_leads.push_back(p.epochs[k - 1]);
        out.lag_follows.push_back(p.epochs[k]);
      }
    }
    out.censored_walks += p.censored;
    out.inspected += p.inspected;
    out.disjoint += p.inspected && p.disjoint;
  }
  return out;
}

LocalTimeLedger ledger_with_range(int d, std::int64_t range, std::uint64_t seed) {
  if (range < 1) throw std::invalid_argument("range must be >= 1");
  const auto trace = run_walk(Graph::tree(d), 64 * range, seed);
  LocalTimeLedger ledger;
  for (SiteId s : trace.sites()) {
    if (ledger.count(s) == 0 && ledger.range() == range) return ledger;
    ledger.record_visit(s);
  }
  if (ledger.range() < range) throw std::runtime_error("walk did not reach the requested range");
  return ledger;
}

std::vector<OracleComparison> oracle_crosscheck(const SceneryDistribution& dist, int d,
                                                std::int64_t range, double sigma_factor,
                                                std::int64_t repetitions,
                                                std::int64_t replicas, std::uint64_t seed,
                                                unsigned workers) {
  if (!dist.finite_support()) {
    throw std::invalid_argument("oracle cross-check needs a law with finite support");
  }
  if (!dist.has_mgf()) throw std::domain_error("oracle cross-check needs an MGF");
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  std::vector<OracleComparison> out(static_cast<std::size_t>(repetitions));
  const double m2 = dist.moment(2);
  parallel_blocks(out.size(), workers, [&](unsigned, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint64_t rs = replica_seed(seed, i);
      const auto ledger = ledger_with_range(d, range, rs);
      OracleComparison& c = out[i];
      c.repetition = static_cast<std::int64_t>(i);
      c.range = ledger.range();
      c.n = ledger.steps();
      c.a = sigma_factor * std::sqrt(static_cast<double>(ledger.silt2()) * m2);
      c.exact = enumerate_tail_T(ledger, dist, c.a);
      const std::uint64_t mc_seed = derive_seed(rs, StreamTag::kTilted);
      c.plain = tail_mc_conditional(ledger, dist, c.a, replicas, mc_seed);
      const auto zero = tail_is_conditional(ledger, dist, c.a, 0.0, replicas, mc_seed);
      c.zero_tilt_identical = zero.p_hat == c.plain.p_hat && zero.std_error == c.plain.std_error;
      c.tilted = tail_is_conditional(ledger, dist, c.a, optimal_tilt(ledger, dist, c.a),
                                     replicas, mc_seed);
      c.plain_agrees = std::abs(c.plain.p_hat - c.exact) <= 3 * c.plain.std_error;
      c.tilted_agrees = std::abs(c.tilted.p_hat - c.exact) <= 3 * c.tilted.std_error;
    }
  });
  return out;
}

void to_json(nlohmann::json& j, const TailEstimate& t) {
  j = {{"y", t.y},           {"hits", t.hits},       {"replicas", t.replicas},
       {"p_hat", t.p_hat},   {"ci_low", t.ci_low},   {"ci_high", t.ci_high},
       {"insufficient", t.insufficient}};
  j["rate"] = std::isnan(t.rate) ? nlohmann::json(nullptr) : nlohmann::json(t.rate);
  j["lattice_rate"] =
      std::isnan(t.lattice_rate) ? nlohmann::json(nullptr) : nlohmann::json(t.lattice_rate);
}

void to_json(nlohmann::json& j, const ConditionalTail& t) {
  j = {{"a", t.a},           {"theta", t.theta},         {"replicas", t.replicas},
       {"p_hat", t.p_hat},   {"std_error", t.std_error}, {"variance", t.variance},
       {"ci_low", t.ci_low}, {"ci_high", t.ci_high}};
}

void to_json(nlohmann::json& j, const GreenEstimate& g) {
  j = {{"d", g.d},
       {"horizon", g.horizon},
       {"replicas", g.replicas},
       {"g_hat", g.g_hat},
       {"std_error", g.std_error},
       {"ci_low", g.ci_low},
       {"ci_high", g.ci_high},
       {"short_horizon", g.short_horizon},
       {"g_short", g.g_short},
       {"horizon_gap", g.horizon_gap},
       {"gap_std_error", g.gap_std_error}};
}

void to_json(nlohmann::json& j, const ConfinementResult& c) {
  j = {{"d", c.d},
       {"R", c.R},
       {"states", c.states},
       {"lambda", c.lambda},
       {"decay_rate", c.decay_rate},
       {"scaled_rate", c.R * c.R * c.decay_rate},
       {"iterations", c.iterations},
       {"residual", c.residual}};
}

void to_json(nlohmann::json& j, const EscapeEstimate& e) {
  j = {{"d", e.d},           {"horizon", e.horizon},     {"replicas", e.replicas},
       {"escapes", e.escapes}, {"p_hat", e.p_hat},       {"std_error", e.std_error},
       {"expected", e.expected}};
}

void to_json(nlohmann::json& j, const OracleComparison& o) {
  j = {{"repetition", o.repetition},     {"range", o.range},
       {"n", o.n},                       {"a", o.a},
       {"exact", o.exact},               {"plain", o.plain},
       {"tilted", o.tilted},             {"plain_agrees", o.plain_agrees},
       {"tilted_agrees", o.tilted_agrees}, {"zero_tilt_identical", o.zero_tilt_identical}};
}

}  // namespace rwrs
