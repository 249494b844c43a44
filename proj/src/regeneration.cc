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

#include "rwrs/regeneration.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rwrs {

std::span<const std::int64_t> RegenerationRecord::complete_epochs() const {
  std::span<const std::int64_t> all(epochs);
  if (censored && !all.empty()) return all.first(all.size() - 1);
  return all;
}

RegenerationRecord detect_regenerations(std::span<const std::int32_t> levels) {
  if (levels.size() < 2) {
    throw std::invalid_argument("regeneration detection needs at least two levels");
  }
  const std::size_t last = levels.size() - 1;
  // suffix_min[k] = min(levels[k..last])
  std::vector<std::int32_t> suffix_min(levels.size());
  suffix_min[last] = levels[last];
  for (std::size_t k = last; k-- > 0;) {
    suffix_min[k] = std::min(levels[k], suffix_min[k + 1]);
  }

  RegenerationRecord record;
  std::int32_t prefix_max = levels[0];
  for (std::size_t k = 1; k <= last; ++k) {
    const bool fresh = levels[k] > prefix_max;
    prefix_max = std::max(prefix_max, levels[k]);
    if (!fresh || suffix_min[k] <= levels[k - 1]) continue;
    if (k == last) {
      record.censored = true;
      continue;
    }
    const auto tau = static_cast<std::int64_t>(k);
    record.epochs.push_back(record.taus.empty() ? tau : tau - record.taus.back());
    record.taus.push_back(tau);
  }
  return record;
}

double s_d_lower_bound(int d) {
  if (d < 2) throw std::invalid_argument("branching must be >= 2");
  const double dd = d;
  return std::log((dd + 1.0) / 3.0) / 3.0 + 1.0 / 3.0 - 1.0 / (dd + 1.0);
}

double epoch_chernoff_exponent(int d) {
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  const double dd = d;
  return std::log((dd + 1.0) / 3.0) / 3.0 - 1.0 / 3.0 + 1.0 / (dd + 1.0);
}

double lambda_d(int d) { return s_d_lower_bound(d) / 2.0; }

double escape_probability(int d) {
  if (d < 2) throw std::invalid_argument("branching must be >= 2");
  return static_cast<double>(d - 1) / d;
}

double empirical_epoch_mgf(std::span<const std::int64_t> epochs, double lambda) {
  if (epochs.empty()) throw std::invalid_argument("no epochs");
  if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
  double sum = 0;
  for (auto theta : epochs) sum += std::exp(lambda * static_cast<double>(theta));
  return sum / static_cast<double>(epochs.size());
}

double epoch_survival(std::span<const std::int64_t> epochs, std::int64_t k) {
  if (epochs.empty()) throw std::invalid_argument("no epochs");
  const auto hits = std::count_if(epochs.begin(), epochs.end(),
                                  [k](std::int64_t t) { return t >= k; });
  return static_cast<double>(hits) / static_cast<double>(epochs.size());
}

std::map<std::int64_t, std::int64_t> epoch_histogram(
    std::span<const std::int64_t> epochs) {
  std::map<std::int64_t, std::int64_t> hist;
  for (auto theta : epochs) ++hist[theta];
  return hist;
}

bool epochs_vertex_disjoint(const WalkTrace& trace,
                            const RegenerationRecord& record) {
  const auto sites = trace.sites();
  std::vector<std::uint32_t> owner(trace.site_count(),
                                   std::numeric_limits<std::uint32_t>::max());
  std::size_t next_tau = 0;
  std::uint32_t segment = 0;
  for (std::size_t k = 0; k < sites.size(); ++k) {
    if (next_tau < record.taus.size() &&
        static_cast<std::int64_t>(k) == record.taus[next_tau]) {
      ++segment;
      ++next_tau;
    }
    auto& o = owner[sites[k]];
    if (o == std::numeric_limits<std::uint32_t>::max()) {
      o = segment;
    } else if (o != segment) {
      return false;
    }
  }
  return true;
}

double lag_correlation(std::span<const std::int64_t> leads,
                       std::span<const std::int64_t> follows) {
  if (leads.size() != follows.size()) {
    throw std::invalid_argument("lag_correlation needs equally many leads and follows");
  }
  const auto count = static_cast<double>(leads.size());
  if (leads.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mean_x = 0;
  double mean_y = 0;
  for (std::size_t i = 0; i < leads.size(); ++i) {
    mean_x += static_cast<double>(leads[i]);
    mean_y += static_cast<double>(follows[i]);
  }
  mean_x /= count;
  mean_y /= count;
  double sxx = 0;
  double syy = 0;
  double sxy = 0;
  for (std::size_t i = 0; i < leads.size(); ++i) {
    const double dx = static_cast<double>(leads[i]) - mean_x;
    const double dy = static_cast<double>(follows[i]) - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0 || syy == 0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

std::vector<EpochRatio> epoch_ratio_trend(std::span<const std::int64_t> first,
                                          std::span<const std::int64_t> later,
                                          std::int64_t k_max) {
  if (first.empty() || later.empty()) throw std::invalid_argument("no epochs");
  std::vector<EpochRatio> out;
  for (std::int64_t k = 1; k <= k_max; ++k) {
    EpochRatio r;
    r.k = k;
    r.p_first = static_cast<double>(std::count(first.begin(), first.end(), k)) /
                static_cast<double>(first.size());
    r.p_later = static_cast<double>(std::count(later.begin(), later.end(), k)) /
                static_cast<double>(later.size());
    r.ratio = r.p_first > 0 ? r.p_later / r.p_first
                            : std::numeric_limits<double>::quiet_NaN();
    out.push_back(r);
  }
  return out;
}

}  // namespace rwrs
