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

#ifndef RWRS_GRAPH_H_
#define RWRS_GRAPH_H_

#include <compare>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace rwrs {

enum class GraphKind { kLattice, kTree };

// Z^d (d >= 3) or the rooted d-ary tree (d >= 2): the root has d children,
// every other vertex has a parent and d children.
struct Graph {
  GraphKind kind = GraphKind::kTree;
  int d = 2;

  static Graph lattice(int d);
  static Graph tree(int d);

  bool is_tree() const { return kind == GraphKind::kTree; }
  // Number of neighbours of a non-root vertex.
  int degree() const { return is_tree() ? d + 1 : 2 * d; }
  std::string name() const;

  friend bool operator==(const Graph&, const Graph&) = default;
};

void to_json(nlohmann::json& j, const Graph& g);
void from_json(const nlohmann::json& j, Graph& g);

struct LatticeVertex {
  std::vector<std::int32_t> coords;
  friend auto operator<=>(const LatticeVertex&, const LatticeVertex&) = default;
};

// Child-index path from the root; the empty path is the root.
struct TreeVertex {
  std::vector<std::uint32_t> path;
  std::size_t level() const { return path.size(); }
  friend auto operator<=>(const TreeVertex&, const TreeVertex&) = default;
};

using VertexId = std::variant<LatticeVertex, TreeVertex>;

VertexId origin(const Graph& g);
bool is_valid_vertex(const Graph& g, const VertexId& v);
bool are_neighbors(const Graph& g, const VertexId& a, const VertexId& b);

// 64-bit key naming a vertex independently of any walk. Used to key
// per-vertex random streams; identity comparisons always use VertexId itself.
std::uint64_t vertex_key(const VertexId& v);
std::uint64_t lattice_key(const std::int32_t* coords, int d);
constexpr std::uint64_t kTreeRootKey = 0x74726565726f6f74ULL;
std::uint64_t tree_child_key(std::uint64_t parent_key, std::uint32_t child);

struct VertexIdHash {
  std::size_t operator()(const VertexId& v) const { return vertex_key(v); }
};

std::string to_string(const VertexId& v);

}  // namespace rwrs

#endif  // RWRS_GRAPH_H_
