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

// Regeneration times of the tree walk.
//
// A time n >= 1 is a regeneration time when |S_n| exceeds every earlier level
// and the level |S_{n-1}| is never visited again. The second clause looks
// into the future, so detection runs offline over a finished trace: a time is
// accepted when the clause holds on the observed window and at least one step
// is observed after it. A record level reached exactly at the horizon cannot
// be assessed; it is dropped and the record is marked censored.

#ifndef RWRS_REGENERATION_H_
#define RWRS_REGENERATION_H_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rwrs/walk.h"

namespace rwrs {

struct RegenerationRecord {
  std::vector<std::int64_t> taus;
  // epochs[0] = taus[0], epochs[k] = taus[k] - taus[k-1].
  std::vector<std::int64_t> epochs;
  bool censored = false;

  // Epochs usable as i.i.d.-style samples: the last one is dropped when the
  // record is censored.
  std::span<const std::int64_t> complete_epochs() const;
};

// Throws std::invalid_argument when fewer than two levels are given.
RegenerationRecord detect_regenerations(std::span<const std::int32_t> levels);

// (1/3) log((d+1)/3) + 1/3 - 1/(d+1), the proved lower bound on the
// exponential-moment exponent s_d of the epochs. Zero at d = 2.
double s_d_lower_bound(int d);
// (1/3) log((d+1)/3) - 1/3 + 1/(d+1): the exponent of the Chernoff bound
// P(Bin(k, 1/(d+1)) >= k/3) <= exp(-k * exponent). Zero at d = 2.
double epoch_chernoff_exponent(int d);
// Half of s_d_lower_bound(d); the operative lambda_d.
double lambda_d(int d);
// Probability that the walk started at the root never returns: (d-1)/d.
double escape_probability(int d);

// Sample mean of exp(lambda * theta). Throws on an empty sample or lambda < 0.
double empirical_epoch_mgf(std::span<const std::int64_t> epochs, double lambda);

// Fraction of epochs with theta >= k.
double epoch_survival(std::span<const std::int64_t> epochs, std::int64_t k);

std::map<std::int64_t, std::int64_t> epoch_histogram(
    std::span<const std::int64_t> epochs);

// True when the vertex sets visited during [tau_{k-1}, tau_k), with tau_0 = 0
// and a final segment [tau_J, n], are pairwise disjoint.
bool epochs_vertex_disjoint(const WalkTrace& trace,
                            const RegenerationRecord& record);

// Pearson correlation of the pairs (leads[i], follows[i]). NaN with fewer than
// two pairs or when either side is constant; throws on a size mismatch.
double lag_correlation(std::span<const std::int64_t> leads,
                       std::span<const std::int64_t> follows);

// P(theta_1 = k) against P(theta_j = k, j >= 2) for k = 1..k_max, from two
// pools of samples. ratio is NaN where the first-epoch frequency is zero.
struct EpochRatio {
  std::int64_t k = 0;
  double p_first = 0;
  double p_later = 0;
  double ratio = 0;
};
std::vector<EpochRatio> epoch_ratio_trend(std::span<const std::int64_t> first,
                                          std::span<const std::int64_t> later,
                                          std::int64_t k_max);

}  // namespace rwrs

#endif  // RWRS_REGENERATION_H_
