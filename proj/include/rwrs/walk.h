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

// Simple random walk engines on Z^d and the rooted d-ary tree.
//
// A trace stores the walk as a sequence of dense site ids, assigned in order
// of first visit, together with a site table that recovers the exact VertexId
// of every site. Tree sites live in a trie (parent pointer plus child slots),
// lattice sites in an open-addressing table over packed coordinates, so a
// step costs O(1) regardless of how deep or far the walk has gone.
//
// Neighbour order. On Z^d, direction index i in [0, 2d) moves along axis i/2,
// in the + direction when i is even: (+e1, -e1, ..., +ed, -ed). On the tree,
// the root draws a child uniformly from [0, d); any other vertex draws
// j in [0, d] and moves to child j when j < d, to its parent when j == d.

#ifndef RWRS_WALK_H_
#define RWRS_WALK_H_

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "rwrs/graph.h"
#include "rwrs/rng.h"

namespace rwrs {

using SiteId = std::uint32_t;
inline constexpr SiteId kNoSite = 0xffffffffu;

LatticeVertex step_lattice(const LatticeVertex& current, Philox& rng);
TreeVertex step_tree(const TreeVertex& current, int d, Philox& rng);

class TreeSites {
 public:
  void reset(int d);

  SiteId root() const { return 0; }
  // Returns the child site, creating it on first visit.
  SiteId child(SiteId parent, std::uint32_t index) {
    const std::size_t slot = static_cast<std::size_t>(parent) * d_ + index;
    if (children_[slot] == kNoSite) {
      const SiteId id = add(parent, index);
      children_[slot] = id;
    }
    return children_[slot];
  }
  SiteId parent(SiteId s) const { return parent_[s]; }
  std::int32_t level(SiteId s) const { return level_[s]; }
  std::uint64_t key(SiteId s) const { return key_[s]; }
  std::size_t size() const { return parent_.size(); }
  TreeVertex vertex(SiteId s) const;

 private:
  SiteId add(SiteId parent, std::uint32_t index);

  int d_ = 2;
  std::vector<SiteId> children_;
  std::vector<SiteId> parent_;
  std::vector<std::uint32_t> child_index_;
  std::vector<std::int32_t> level_;
  std::vector<std::uint64_t> key_;
};

class LatticeSites {
 public:
  // `radius` bounds every coordinate the walk can reach (its step count).
  void reset(int d, std::int64_t radius);

  bool packed() const { return packed_; }
  // Packed key of the origin and the key increment for a unit move on `axis`.
  std::uint64_t origin_code() const { return origin_code_; }
  std::uint64_t axis_stride(int axis) const {
    return packed_ ? std::uint64_t{1} << (axis * bits_) : 0;
  }

  // Finds or inserts the site at `coords`; `code` is its packed key when
  // packed() and ignored otherwise.
  SiteId intern(std::uint64_t code, const std::int32_t* coords);

  std::span<const std::int32_t> coords(SiteId s) const {
    return {coords_.data() + static_cast<std::size_t>(s) * d_,
            static_cast<std::size_t>(d_)};
  }
  std::uint64_t key(SiteId s) const { return key_[s]; }
  std::size_t size() const { return key_.size(); }

 private:
  SiteId add(const std::int32_t* coords);
  void grow();

  struct VectorHash {
    std::size_t operator()(const std::vector<std::int32_t>& v) const {
      return lattice_key(v.data(), static_cast<int>(v.size()));
    }
  };

  int d_ = 3;
  bool packed_ = true;
  int bits_ = 0;
  std::uint64_t origin_code_ = 0;
  std::vector<std::uint64_t> slot_code_;
  std::vector<SiteId> slot_site_;
  std::uint64_t mask_ = 0;
  std::unordered_map<std::vector<std::int32_t>, SiteId, VectorHash> fallback_;
  std::vector<std::int32_t> coords_;
  std::vector<std::uint64_t> key_;
};

// Immutable after construction; safe to read from several threads.
class WalkTrace {
 public:
  const Graph& graph() const { return graph_; }
  std::int64_t steps() const { return steps_; }
  std::span<const SiteId> sites() const { return sites_; }
  // levels()[k] = |S_k| on the tree; empty on the lattice.
  std::span<const std::int32_t> levels() const { return levels_; }
  std::size_t site_count() const;

  VertexId vertex(std::size_t k) const { return site_vertex(sites_.at(k)); }
  VertexId site_vertex(SiteId s) const;
  std::uint64_t site_key(SiteId s) const;
  std::vector<VertexId> vertices() const;

 private:
  friend void run_walk(const Graph&, std::int64_t, Philox&, WalkTrace&);

  Graph graph_;
  std::int64_t steps_ = 0;
  std::vector<SiteId> sites_;
  std::vector<std::int32_t> levels_;
  TreeSites tree_;
  LatticeSites lattice_;
};

// n steps from the origin/root with the walk stream of `seed`. The trace is a
// pure function of (graph, n, seed). Throws std::invalid_argument for n < 1.
WalkTrace run_walk(const Graph& graph, std::int64_t n, std::uint64_t seed);

// Same walk law, drawing from `rng` and reusing the buffers of `out`.
void run_walk(const Graph& graph, std::int64_t n, Philox& rng, WalkTrace& out);

// The generator run_walk(graph, n, seed) draws from.
inline Philox walk_stream(std::uint64_t seed) {
  return Philox(seed, static_cast<std::uint64_t>(StreamTag::kWalk));
}

}  // namespace rwrs

#endif  // RWRS_WALK_H_
