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

#ifndef RWRS_LOCAL_TIME_H_
#define RWRS_LOCAL_TIME_H_

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "rwrs/graph.h"
#include "rwrs/walk.h"

namespace rwrs {

using Wide = unsigned __int128;

// Visit counts per site with exact running aggregates. Positions
// S_0, ..., S_n are each counted once, so the total mass is n + 1.
class LocalTimeLedger {
 public:
  // l(s): m -> m + 1.
  void record_visit(SiteId s) {
    if (s >= counts_.size()) counts_.resize(static_cast<std::size_t>(s) + 1, 0);
    const std::int64_t m = counts_[s]++;
    if (m == 0) ++range_;
    silt2_ += 2 * m + 1;
    silt3_ += static_cast<Wide>(3 * m * m + 3 * m + 1);
    if (m + 1 > max_lt_) max_lt_ = m + 1;
    ++mass_;
  }

  void reserve(std::size_t sites) { counts_.reserve(sites); }
  void clear();

  // Time n: the number of recorded positions minus one.
  std::int64_t steps() const { return mass_ - 1; }
  std::int64_t mass() const { return mass_; }
  std::int64_t count(SiteId s) const { return s < counts_.size() ? counts_[s] : 0; }
  std::span<const std::int64_t> counts() const { return counts_; }
  std::int64_t range() const { return range_; }
  std::int64_t silt2() const { return silt2_; }
  Wide silt3() const { return silt3_; }
  std::int64_t max_local_time() const { return max_lt_; }

  // sum_v l(v)^q for q in {2, 3}.
  Wide silt(int q) const;

  // #{v : l(v) > t}, strict.
  std::int64_t level_set_size(double t) const;

  // Sum of l(v) over v with l(v) >= threshold.
  std::int64_t heavy_mass(double threshold) const;

  // {n, range, silt2, silt3, max_lt}
  nlohmann::json summary_json() const;

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t mass_ = 0;
  std::int64_t range_ = 0;
  std::int64_t silt2_ = 0;
  Wide silt3_ = 0;
  std::int64_t max_lt_ = 0;
};

LocalTimeLedger build_ledger(const WalkTrace& trace);
void build_ledger(const WalkTrace& trace, LocalTimeLedger& out);

// Ledger keyed directly by VertexId, for walks assembled vertex by vertex.
class VertexLedger {
 public:
  void record_visit(const VertexId& v);
  std::int64_t count(const VertexId& v) const;
  const LocalTimeLedger& ledger() const { return ledger_; }
  const std::vector<VertexId>& sites() const { return vertices_; }

 private:
  LocalTimeLedger ledger_;
  std::unordered_map<VertexId, SiteId, VertexIdHash> index_;
  std::vector<VertexId> vertices_;
};

std::string to_string(Wide value);

}  // namespace rwrs

#endif  // RWRS_LOCAL_TIME_H_
