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

#include "rwrs/graph.h"

#include <cstdlib>
#include <stdexcept>

#include "rwrs/rng.h"

namespace rwrs {

Graph Graph::lattice(int d) {
  if (d < 1) throw std::invalid_argument("lattice dimension must be >= 1");
  return Graph{GraphKind::kLattice, d};
}

Graph Graph::tree(int d) {
  if (d < 2) throw std::invalid_argument("tree branching must be >= 2");
  return Graph{GraphKind::kTree, d};
}

std::string Graph::name() const {
  return (is_tree() ? "tree" : "lattice") + std::string("-d") +
         std::to_string(d);
}

void to_json(nlohmann::json& j, const Graph& g) {
  j = nlohmann::json{{"graph", g.is_tree() ? "tree" : "lattice"}, {"d", g.d}};
}

void from_json(const nlohmann::json& j, Graph& g) {
  const auto kind = j.at("graph").get<std::string>();
  const int d = j.at("d").get<int>();
  if (kind == "tree") {
    g = Graph::tree(d);
  } else if (kind == "lattice") {
    g = Graph::lattice(d);
  } else {
    throw std::invalid_argument("unknown graph kind '" + kind + "'");
  }
}

VertexId origin(const Graph& g) {
  if (g.is_tree()) return TreeVertex{};
  return LatticeVertex{std::vector<std::int32_t>(g.d, 0)};
}

bool is_valid_vertex(const Graph& g, const VertexId& v) {
  if (g.is_tree()) {
    const auto* t = std::get_if<TreeVertex>(&v);
    if (t == nullptr) return false;
    for (auto c : t->path) {
      if (c >= static_cast<std::uint32_t>(g.d)) return false;
    }
    return true;
  }
  const auto* z = std::get_if<LatticeVertex>(&v);
  return z != nullptr && static_cast<int>(z->coords.size()) == g.d;
}

bool are_neighbors(const Graph& g, const VertexId& a, const VertexId& b) {
  if (!is_valid_vertex(g, a) || !is_valid_vertex(g, b)) return false;
  if (g.is_tree()) {
    const auto& pa = std::get<TreeVertex>(a).path;
    const auto& pb = std::get<TreeVertex>(b).path;
    const auto& shorter = pa.size() < pb.size() ? pa : pb;
    const auto& longer = pa.size() < pb.size() ? pb : pa;
    if (longer.size() != shorter.size() + 1) return false;
    for (std::size_t i = 0; i < shorter.size(); ++i) {
      if (shorter[i] != longer[i]) return false;
    }
    return true;
  }
  const auto& za = std::get<LatticeVertex>(a).coords;
  const auto& zb = std::get<LatticeVertex>(b).coords;
  long distance = 0;
  for (std::size_t i = 0; i < za.size(); ++i) {
    distance += std::labs(static_cast<long>(za[i]) - zb[i]);
  }
  return distance == 1;
}

std::uint64_t lattice_key(const std::int32_t* coords, int d) {
  std::uint64_t h = 0x6c61747469636500ULL + static_cast<std::uint64_t>(d);
  for (int i = 0; i < d; ++i) {
    h = mix64(h ^ static_cast<std::uint32_t>(coords[i]));
  }
  return h;
}

std::uint64_t tree_child_key(std::uint64_t parent_key, std::uint32_t child) {
  return mix64(parent_key + 0x9e3779b97f4a7c15ULL * (child + 1ULL));
}

std::uint64_t vertex_key(const VertexId& v) {
  if (const auto* t = std::get_if<TreeVertex>(&v)) {
    std::uint64_t key = kTreeRootKey;
    for (auto c : t->path) key = tree_child_key(key, c);
    return key;
  }
  const auto& z = std::get<LatticeVertex>(v).coords;
  return lattice_key(z.data(), static_cast<int>(z.size()));
}

std::string to_string(const VertexId& v) {
  std::string out = "(";
  auto append = [&out](const auto& seq) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i > 0) out += ",";
      out += std::to_string(seq[i]);
    }
  };
  if (const auto* t = std::get_if<TreeVertex>(&v)) {
    append(t->path);
  } else {
    append(std::get<LatticeVertex>(v).coords);
  }
  return out + ")";
}

}  // namespace rwrs
