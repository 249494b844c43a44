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

// RWRS sums and the self-normalized statistic
//
//   T = sum_v l(v) xi(v),  V^2 = sum_v l(v) xi(v)^2,
//   W = T sqrt(n + 1) / (V L_2),  L_2^2 = sum_v l(v)^2,
//
// with the ledger's mass n + 1 in place of n so that |W| <= sqrt(n + 1)
// holds exactly by Cauchy-Schwarz. Thresholds inside the decompositions use
// the step count n and natural logarithms.

#ifndef RWRS_RWRS_STATS_H_
#define RWRS_RWRS_STATS_H_

#include <array>
#include <cstdint>
#include <span>

#include "rwrs/exact_sum.h"
#include "rwrs/local_time.h"
#include "rwrs/scenery.h"
#include "rwrs/walk.h"

namespace rwrs {

struct RwrsSummary {
  std::int64_t n = 0;
  double T = 0;
  double V2 = 0;
  std::int64_t silt2 = 0;
  // NaN when V2 == 0.
  double W = 0;
  bool defined = false;
  // sum_v l(v) |xi(v)|, the natural scale for rounding comparisons on T.
  double abs_scale = 0;
};

// W from its ingredients; NaN when V2 == 0.
double self_normalized(double T, double V2, std::int64_t silt2, std::int64_t n);

// `scenery` is indexed by SiteId and must cover every visited site.
RwrsSummary compute_summary(const LocalTimeLedger& ledger,
                            std::span<const double> scenery);

// sum_{k=0}^n xi(S_k) and sum_{k=0}^n xi(S_k)^2 in time order.
double time_ordered_sum(const WalkTrace& trace, std::span<const double> scenery);
double time_ordered_square_sum(const WalkTrace& trace,
                               std::span<const double> scenery);

// One-sided cuts follow the definitions (xi(v) below the threshold); the
// two-sided variant compares |xi(v)| and matches the scenery-count lemma.
enum class SceneryCut { kOneSided, kTwoSided };

// Cells: 0 = small local time and small scenery, 1 = small local time and
// large scenery, 2 = large local time.
struct Decomposition {
  std::array<double, 3> T{};
  std::array<double, 3> V2{};
  double T_total = 0;
  double V2_total = 0;
  std::array<ExactSum, 3> T_exact;
  std::array<ExactSum, 3> V2_exact;
  ExactSum T_total_exact;
  ExactSum V2_total_exact;
  std::array<std::int64_t, 3> population{};
  // sum of l(v) over each cell.
  std::array<std::int64_t, 3> mass{};
  double local_threshold = 0;
  double scenery_threshold = 0;

  // T_1 + T_2 + T_3 == T and V_1^2 + V_2^2 + V_3^2 == V^2 in exact arithmetic.
  bool identities_exact() const;
};

// L = {l(v) < (4 / lambda) log n}, E = {xi(v) < sqrt(n) / (y log^2 n)}.
// Requires lambda > 0, y > 0, n >= 3.
Decomposition decompose_tree(const LocalTimeLedger& ledger,
                             std::span<const double> scenery, double y,
                             double lambda, SceneryCut cut = SceneryCut::kOneSided);

// L = {l(z) <= y^{4/(d+2)} (log n)^{d/(d+2)}},
// E = {xi(z) <= sqrt(n) / (y log^2 n)}. Requires d >= 3, y > 0, n >= 3.
Decomposition decompose_lattice(const LocalTimeLedger& ledger,
                                std::span<const double> scenery, double y, int d,
                                SceneryCut cut = SceneryCut::kOneSided);

// eta(v) = 2 b xi(v) - b^2 xi(v)^2 with b = y L_2 / n, and
//   M^2   = sum l^2 E(eta - E eta)^2,
//   Gamma = sum l^3 E|eta - E eta|^3,
//   Q = Gamma / M^3,  x = 2 y^2 L_2^2 / (n M).
struct NagaevQuantities {
  double b = 0;
  double eta_mean = 0;
  double eta_variance = 0;
  double eta_abs_third = 0;
  double M2 = 0;
  double Gamma = 0;
  double Q = 0;
  double x = 0;
  // b == 0: M and Gamma vanish and Q, x are NaN.
  bool degenerate = false;
};

// The variance uses the closed form
//   4 b^2 E xi^2 - 4 b^3 E xi^3 + b^4 (E xi^4 - (E xi^2)^2),
// and E|eta - E eta|^3 is integrated against the scenery law. Throws
// MomentError unless E xi^4 and E|xi|^6 are finite.
NagaevQuantities nagaev_quantities(const LocalTimeLedger& ledger,
                                   const SceneryDistribution& dist, double y);

}  // namespace rwrs

#endif  // RWRS_RWRS_STATS_H_
