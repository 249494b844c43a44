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

#include "rwrs/rwrs_stats.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rwrs {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_scenery(const LocalTimeLedger& ledger, std::span<const double> scenery) {
  if (scenery.size() < ledger.counts().size()) {
    throw std::invalid_argument("scenery does not cover the visited sites");
  }
}

double scenery_threshold(double n, double y) {
  const double log_n = std::log(n);
  return std::sqrt(n) / (y * log_n * log_n);
}

template <class InLocal, class InScenery>
Decomposition decompose(const LocalTimeLedger& ledger, std::span<const double> scenery,
                        double local_threshold, double xi_threshold,
                        InLocal in_local, InScenery in_scenery) {
  Decomposition out;
  out.local_threshold = local_threshold;
  out.scenery_threshold = xi_threshold;
  const auto counts = ledger.counts();
  for (std::size_t s = 0; s < counts.size(); ++s) {
    const std::int64_t l = counts[s];
    if (l == 0) continue;
    const double xi = scenery[s];
    int cell = 2;
    if (in_local(l)) cell = in_scenery(xi) ? 0 : 1;
    const auto ld = static_cast<double>(l);
    const double sq = xi * xi;
    const double sq_err = std::fma(xi, xi, -sq);
    for (ExactSum* acc : {&out.T_exact[cell], &out.T_total_exact}) {
      acc->add_product(ld, xi);
    }
    for (ExactSum* acc : {&out.V2_exact[cell], &out.V2_total_exact}) {
      acc->add_product(ld, sq_err);
      acc->add_product(ld, sq);
    }
    ++out.population[cell];
    out.mass[cell] += l;
  }
  for (int c = 0; c < 3; ++c) {
    out.T[c] = out.T_exact[c].value();
    out.V2[c] = out.V2_exact[c].value();
  }
  out.T_total = out.T_total_exact.value();
  out.V2_total = out.V2_total_exact.value();
  return out;
}

void check_common(const LocalTimeLedger& ledger, std::span<const double> scenery,
                  double y) {
  require_scenery(ledger, scenery);
  if (!(y > 0)) throw std::invalid_argument("y must be > 0");
  if (ledger.steps() < 3) throw std::invalid_argument("decomposition needs n >= 3");
}

}  // namespace

double self_normalized(double T, double V2, std::int64_t silt2, std::int64_t n) {
  if (!(V2 > 0) || silt2 <= 0) return kNaN;
  return T * std::sqrt(static_cast<double>(n + 1)) /
         (std::sqrt(V2) * std::sqrt(static_cast<double>(silt2)));
}

RwrsSummary compute_summary(const LocalTimeLedger& ledger,
                            std::span<const double> scenery) {
  require_scenery(ledger, scenery);
  CompensatedSum t, v2, scale;
  const auto counts = ledger.counts();
  for (std::size_t s = 0; s < counts.size(); ++s) {
    if (counts[s] == 0) continue;
    const auto l = static_cast<double>(counts[s]);
    const double xi = scenery[s];
    t.add(l * xi);
    v2.add(l * xi * xi);
    scale.add(l * std::abs(xi));
  }
  RwrsSummary out;
  out.n = ledger.steps();
  out.T = t.value();
  out.V2 = v2.value();
  out.silt2 = ledger.silt2();
  out.abs_scale = scale.value();
  out.W = self_normalized(out.T, out.V2, out.silt2, out.n);
  out.defined = !std::isnan(out.W);
  return out;
}

double time_ordered_sum(const WalkTrace& trace, std::span<const double> scenery) {
  CompensatedSum sum;
  for (SiteId s : trace.sites()) sum.add(scenery[s]);
  return sum.value();
}

double time_ordered_square_sum(const WalkTrace& trace,
                               std::span<const double> scenery) {
  CompensatedSum sum;
  for (SiteId s : trace.sites()) sum.add(scenery[s] * scenery[s]);
  return sum.value();
}

bool Decomposition::identities_exact() const {
  ExactSum t = T_total_exact;
  ExactSum v = V2_total_exact;
  for (int c = 0; c < 3; ++c) {
    t.subtract(T_exact[c]);
    v.subtract(V2_exact[c]);
  }
  return t.is_zero() && v.is_zero();
}

Decomposition decompose_tree(const LocalTimeLedger& ledger,
                             std::span<const double> scenery, double y,
                             double lambda, SceneryCut cut) {
  if (!(lambda > 0)) {
    throw std::invalid_argument("lambda_d must be > 0 (tree decompositions need d >= 3)");
  }
  check_common(ledger, scenery, y);
  const auto n = static_cast<double>(ledger.steps());
  const double local = 4.0 / lambda * std::log(n);
  const double xi_cut = scenery_threshold(n, y);
  const auto in_local = [local](std::int64_t l) { return static_cast<double>(l) < local; };
  if (cut == SceneryCut::kTwoSided) {
    return decompose(ledger, scenery, local, xi_cut, in_local,
                     [xi_cut](double xi) { return std::abs(xi) < xi_cut; });
  }
  return decompose(ledger, scenery, local, xi_cut, in_local,
                   [xi_cut](double xi) { return xi < xi_cut; });
}

Decomposition decompose_lattice(const LocalTimeLedger& ledger,
                                std::span<const double> scenery, double y, int d,
                                SceneryCut cut) {
  if (d < 3) throw std::invalid_argument("lattice decomposition needs d >= 3");
  check_common(ledger, scenery, y);
  const auto n = static_cast<double>(ledger.steps());
  const double dd = d;
  const double local = std::pow(y, 4.0 / (dd + 2.0)) * std::pow(std::log(n), dd / (dd + 2.0));
  const double xi_cut = scenery_threshold(n, y);
  const auto in_local = [local](std::int64_t l) { return static_cast<double>(l) <= local; };
  if (cut == SceneryCut::kTwoSided) {
    return decompose(ledger, scenery, local, xi_cut, in_local,
                     [xi_cut](double xi) { return std::abs(xi) <= xi_cut; });
  }
  return decompose(ledger, scenery, local, xi_cut, in_local,
                   [xi_cut](double xi) { return xi <= xi_cut; });
}

NagaevQuantities nagaev_quantities(const LocalTimeLedger& ledger,
                                   const SceneryDistribution& dist, double y) {
  if (!dist.has_finite_moment(4)) {
    throw MomentError("Nagaev quantities need E xi^4 < infinity");
  }
  if (!dist.has_finite_moment(6)) {
    throw MomentError("Nagaev quantities need E|xi|^6 < infinity");
  }
  if (y < 0) throw std::invalid_argument("y must be >= 0");
  const auto n = static_cast<double>(ledger.steps());
  const auto silt2 = static_cast<double>(ledger.silt2());
  const auto silt3 = static_cast<double>(ledger.silt3());
  const double m2 = dist.moment(2);
  const double m3 = dist.moment(3);
  const double m4 = dist.moment(4);

  NagaevQuantities q;
  q.b = y * std::sqrt(silt2) / n;
  const double b = q.b;
  q.eta_mean = -b * b * m2;
  q.eta_variance = 4 * b * b * m2 - 4 * b * b * b * m3 + b * b * b * b * (m4 - m2 * m2);
  if (b == 0.0) {
    q.degenerate = true;
    q.Q = kNaN;
    q.x = kNaN;
    return q;
  }
  const double root = std::sqrt(1.0 + b * b * m2);
  const std::array<double, 2> kinks = {(1.0 - root) / b, (1.0 + root) / b};
  q.eta_abs_third = expectation(
      dist,
      [b, m2](double x) {
        const double c = 2 * b * x - b * b * x * x + b * b * m2;
        return std::abs(c * c * c);
      },
      kinks);
  q.M2 = silt2 * q.eta_variance;
  q.Gamma = silt3 * q.eta_abs_third;
  const double M = std::sqrt(q.M2);
  q.Q = q.Gamma / (M * M * M);
  q.x = 2.0 * y * y * silt2 / (n * M);
  return q;
}

}  // namespace rwrs
