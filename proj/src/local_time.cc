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

#include "rwrs/local_time.h"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace rwrs {

void LocalTimeLedger::clear() {
  counts_.clear();
  mass_ = 0;
  range_ = 0;
  silt2_ = 0;
  silt3_ = 0;
  max_lt_ = 0;
}

Wide LocalTimeLedger::silt(int q) const {
  if (q == 2) return static_cast<Wide>(silt2_);
  if (q == 3) return silt3_;
  throw std::invalid_argument("self-intersection exponent must be 2 or 3");
}

std::int64_t LocalTimeLedger::level_set_size(double t) const {
  if (t < 0) throw std::invalid_argument("level-set threshold must be >= 0");
  return std::count_if(counts_.begin(), counts_.end(),
                       [t](std::int64_t c) { return c > 0 && c > t; });
}

std::int64_t LocalTimeLedger::heavy_mass(double threshold) const {
  if (!(threshold > 0)) throw std::invalid_argument("heavy-mass threshold must be > 0");
  std::int64_t mass = 0;
  for (std::int64_t c : counts_) {
    if (c >= threshold) mass += c;
  }
  return mass;
}

std::string to_string(Wide value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  return {digits.rbegin(), digits.rend()};
}

nlohmann::json LocalTimeLedger::summary_json() const {
  nlohmann::json j;
  j["n"] = steps();
  j["range"] = range_;
  j["silt2"] = silt2_;
  if (silt3_ <= std::numeric_limits<std::uint64_t>::max()) {
    j["silt3"] = static_cast<std::uint64_t>(silt3_);
  } else {
    j["silt3"] = to_string(silt3_);
  }
  j["max_lt"] = max_lt_;
  return j;
}

void build_ledger(const WalkTrace& trace, LocalTimeLedger& out) {
  out.clear();
  out.reserve(trace.site_count());
  for (SiteId s : trace.sites()) out.record_visit(s);
}

LocalTimeLedger build_ledger(const WalkTrace& trace) {
  LocalTimeLedger ledger;
  build_ledger(trace, ledger);
  return ledger;
}

void VertexLedger::record_visit(const VertexId& v) {
  auto [it, inserted] = index_.try_emplace(v, static_cast<SiteId>(vertices_.size()));
  if (inserted) vertices_.push_back(v);
  ledger_.record_visit(it->second);
}

std::int64_t VertexLedger::count(const VertexId& v) const {
  auto it = index_.find(v);
  return it == index_.end() ? 0 : ledger_.count(it->second);
}

}  // namespace rwrs
