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

#include "rwrs/walk.h"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>

namespace rwrs {

LatticeVertex step_lattice(const LatticeVertex& current, Philox& rng) {
  const auto d = static_cast<std::uint32_t>(current.coords.size());
  const std::uint32_t direction = rng.below(2 * d);
  LatticeVertex next = current;
  next.coords[direction / 2] += (direction % 2 == 0) ? 1 : -1;
  return next;
}

TreeVertex step_tree(const TreeVertex& current, int d, Philox& rng) {
  TreeVertex next = current;
  if (current.path.empty()) {
    next.path.push_back(rng.below(static_cast<std::uint32_t>(d)));
    return next;
  }
  const std::uint32_t j = rng.below(static_cast<std::uint32_t>(d) + 1);
  if (j == static_cast<std::uint32_t>(d)) {
    next.path.pop_back();
  } else {
    next.path.push_back(j);
  }
  return next;
}

// --- TreeSites -------------------------------------------------------------

void TreeSites::reset(int d) {
  d_ = d;
  children_.clear();
  parent_.clear();
  child_index_.clear();
  level_.clear();
  key_.clear();
  children_.assign(static_cast<std::size_t>(d_), kNoSite);
  parent_.push_back(kNoSite);
  child_index_.push_back(0);
  level_.push_back(0);
  key_.push_back(kTreeRootKey);
}

SiteId TreeSites::add(SiteId parent, std::uint32_t index) {
  const auto id = static_cast<SiteId>(parent_.size());
  if (id == kNoSite) throw std::length_error("tree site table full");
  children_.insert(children_.end(), static_cast<std::size_t>(d_), kNoSite);
  parent_.push_back(parent);
  child_index_.push_back(index);
  level_.push_back(level_[parent] + 1);
  key_.push_back(tree_child_key(key_[parent], index));
  return id;
}

TreeVertex TreeSites::vertex(SiteId s) const {
  TreeVertex v;
  v.path.resize(static_cast<std::size_t>(level_[s]));
  for (SiteId cur = s; cur != root(); cur = parent_[cur]) {
    v.path[static_cast<std::size_t>(level_[cur]) - 1] = child_index_[cur];
  }
  return v;
}

// --- LatticeSites ----------------------------------------------------------

void LatticeSites::reset(int d, std::int64_t radius) {
  d_ = d;
  bits_ = std::bit_width(static_cast<std::uint64_t>(std::max<std::int64_t>(radius, 1))) + 1;
  packed_ = bits_ * d_ <= 64 && radius < std::numeric_limits<std::int32_t>::max();
  origin_code_ = 0;
  if (packed_) {
    const std::uint64_t offset = std::uint64_t{1} << (bits_ - 1);
    for (int i = 0; i < d_; ++i) origin_code_ += offset << (i * bits_);
  }
  const std::size_t capacity = 1024;
  slot_code_.assign(capacity, 0);
  slot_site_.assign(capacity, kNoSite);
  mask_ = capacity - 1;
  fallback_.clear();
  coords_.clear();
  key_.clear();
}

SiteId LatticeSites::add(const std::int32_t* coords) {
  const auto id = static_cast<SiteId>(key_.size());
  if (id == kNoSite) throw std::length_error("lattice site table full");
  coords_.insert(coords_.end(), coords, coords + d_);
  key_.push_back(lattice_key(coords, d_));
  return id;
}

void LatticeSites::grow() {
  std::vector<std::uint64_t> codes(slot_code_.size() * 2, 0);
  std::vector<SiteId> sites(slot_site_.size() * 2, kNoSite);
  const std::uint64_t mask = codes.size() - 1;
  for (std::size_t i = 0; i < slot_site_.size(); ++i) {
    if (slot_site_[i] == kNoSite) continue;
    std::uint64_t h = mix64(slot_code_[i]) & mask;
    while (sites[h] != kNoSite) h = (h + 1) & mask;
    codes[h] = slot_code_[i];
    sites[h] = slot_site_[i];
  }
  slot_code_.swap(codes);
  slot_site_.swap(sites);
  mask_ = mask;
}

SiteId LatticeSites::intern(std::uint64_t code, const std::int32_t* coords) {
  if (!packed_) {
    std::vector<std::int32_t> key(coords, coords + d_);
    auto it = fallback_.find(key);
    if (it != fallback_.end()) return it->second;
    const SiteId id = add(coords);
    fallback_.emplace(std::move(key), id);
    return id;
  }
  std::uint64_t h = mix64(code) & mask_;
  while (slot_site_[h] != kNoSite) {
    if (slot_code_[h] == code) return slot_site_[h];
    h = (h + 1) & mask_;
  }
  const SiteId id = add(coords);
  slot_code_[h] = code;
  slot_site_[h] = id;
  if (2 * key_.size() > slot_site_.size()) grow();
  return id;
}

// --- WalkTrace -------------------------------------------------------------

std::size_t WalkTrace::site_count() const {
  return graph_.is_tree() ? tree_.size() : lattice_.size();
}

VertexId WalkTrace::site_vertex(SiteId s) const {
  if (s >= site_count()) throw std::out_of_range("unknown site");
  if (graph_.is_tree()) return tree_.vertex(s);
  const auto c = lattice_.coords(s);
  return LatticeVertex{{c.begin(), c.end()}};
}

std::uint64_t WalkTrace::site_key(SiteId s) const {
  return graph_.is_tree() ? tree_.key(s) : lattice_.key(s);
}

std::vector<VertexId> WalkTrace::vertices() const {
  std::vector<VertexId> out;
  out.reserve(sites_.size());
  for (SiteId s : sites_) out.push_back(site_vertex(s));
  return out;
}

WalkTrace run_walk(const Graph& graph, std::int64_t n, std::uint64_t seed) {
  WalkTrace trace;
  Philox rng = walk_stream(seed);
  run_walk(graph, n, rng, trace);
  return trace;
}

void run_walk(const Graph& graph, std::int64_t n, Philox& rng, WalkTrace& out) {
  if (n < 1) throw std::invalid_argument("walk needs at least one step");
  if (n >= static_cast<std::int64_t>(kNoSite)) {
    throw std::invalid_argument("walk too long for 32-bit site ids");
  }
  out.graph_ = graph;
  out.steps_ = n;
  out.sites_.resize(static_cast<std::size_t>(n) + 1);
  SiteId* sites = out.sites_.data();

  if (graph.is_tree()) {
    out.levels_.resize(static_cast<std::size_t>(n) + 1);
    std::int32_t* levels = out.levels_.data();
    TreeSites& table = out.tree_;
    table.reset(graph.d);
    const auto d = static_cast<std::uint32_t>(graph.d);
    SiteId cur = table.root();
    sites[0] = cur;
    levels[0] = 0;
    for (std::int64_t k = 1; k <= n; ++k) {
      if (cur == table.root()) {
        cur = table.child(cur, rng.below(d));
      } else {
        const std::uint32_t j = rng.below(d + 1);
        cur = (j == d) ? table.parent(cur) : table.child(cur, j);
      }
      sites[k] = cur;
      levels[k] = table.level(cur);
    }
    return;
  }

  out.levels_.clear();
  LatticeSites& table = out.lattice_;
  table.reset(graph.d, n);
  const auto two_d = static_cast<std::uint32_t>(2 * graph.d);
  std::vector<std::int32_t> coords(static_cast<std::size_t>(graph.d), 0);
  std::vector<std::uint64_t> strides(static_cast<std::size_t>(graph.d));
  for (int i = 0; i < graph.d; ++i) strides[i] = table.axis_stride(i);
  std::uint64_t code = table.origin_code();
  sites[0] = table.intern(code, coords.data());
  for (std::int64_t k = 1; k <= n; ++k) {
    const std::uint32_t direction = rng.below(two_d);
    const std::uint32_t axis = direction >> 1;
    if ((direction & 1u) == 0) {
      ++coords[axis];
      code += strides[axis];
    } else {
      --coords[axis];
      code -= strides[axis];
    }
    sites[k] = table.intern(code, coords.data());
  }
}

}  // namespace rwrs
