#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cutforest/cut_algebra.hpp"

namespace cutforest {

// A tree vertex is an orientation: one chosen half-space per {C, C*} pair,
// upward closed under inclusion (equivalently: chosen sides pairwise
// intersect).  Bit w set means the canonical representative side of wall w is
// chosen.
using OrientationMask = uint64_t;

// Tree dual to a nested complement-closed system: vertices are the
// consistent orientations, edges connect orientations differing on exactly
// one wall, and nu sends each graph vertex to the orientation picking the
// side containing it.
struct StructureTree {
  NestedSystem system;
  std::vector<OrientationMask> vertices;  // ascending mask order
  struct TreeEdge {
    int wall;
    int a, b;  // vertex indices; a chooses the representative side of wall
  };
  std::vector<TreeEdge> edges;
  std::vector<int> nu;  // graph vertex -> tree vertex index
  int level = 0;

  std::size_t wall_count() const { return system.size(); }

  Cut half_space(int wall, bool rep_side) const {
    return rep_side ? system.reps[wall] : system.reps[wall].complement();
  }

  // The half-space of `wall` chosen by orientation `v`.
  Cut chosen(int v, int wall) const { return half_space(wall, (vertices[v] >> wall) & 1); }

  int find_vertex(OrientationMask m) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), m);
    require(it != vertices.end() && *it == m, "orientation is not a tree vertex");
    return (int)(it - vertices.begin());
  }

  std::vector<std::vector<std::pair<int, int>>> adjacency() const {  // (neighbor, edge idx)
    std::vector<std::vector<std::pair<int, int>>> adj(vertices.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      adj[edges[e].a].push_back({edges[e].b, (int)e});
      adj[edges[e].b].push_back({edges[e].a, (int)e});
    }
    return adj;
  }

  // Tree vertices lying in the rep-side half of `wall` (the orientations
  // choosing that side).
  Bitset half_tree(int wall, bool rep_side) const {
    Bitset out(vertices.size());
    for (std::size_t v = 0; v < vertices.size(); ++v)
      if (((vertices[v] >> wall) & 1) == (rep_side ? 1u : 0u)) out.set(v);
    return out;
  }

  bool in_nu_image(int tree_vertex) const {
    for (int t : nu)
      if (t == tree_vertex) return true;
    return false;
  }

  // Graph vertices mapping to the given tree vertex.
  std::vector<int> nu_preimage(int tree_vertex) const {
    std::vector<int> out;
    for (std::size_t x = 0; x < nu.size(); ++x)
      if (nu[x] == tree_vertex) out.push_back((int)x);
    return out;
  }

  std::vector<int> path_between(int u, int v) const {  // edge indices along [u,v]
    auto adj = adjacency();
    std::vector<int> parent(vertices.size(), -1), parent_edge(vertices.size(), -1);
    std::vector<int> queue{u};
    parent[u] = u;
    for (std::size_t i = 0; i < queue.size(); ++i)
      for (auto [w, e] : adj[queue[i]])
        if (parent[w] < 0) {
          parent[w] = queue[i];
          parent_edge[w] = e;
          queue.push_back(w);
        }
    std::vector<int> out;
    for (int x = v; x != u; x = parent[x]) out.push_back(parent_edge[x]);
    std::reverse(out.begin(), out.end());
    return out;
  }

  std::string to_dot() const {
    std::ostringstream os;
    os << "graph structure_tree {\n";
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      os << "  v" << v << " [label=\"";
      auto pre = nu_preimage((int)v);
      if (pre.empty())
        os << "*";
      else
        for (std::size_t i = 0; i < pre.size(); ++i)
          os << (i ? "," : "") << system.graph.id(pre[i]);
      os << "\"];\n";
    }
    for (auto& e : edges) {
      os << "  v" << e.a << " -- v" << e.b << " [label=\"";
      auto ids = system.reps[e.wall].ids();
      for (std::size_t i = 0; i < ids.size(); ++i) os << (i ? "," : "") << ids[i];
      os << "\"];\n";
    }
    os << "}\n";
    return os.str();
  }
};

namespace detail {

// Orientation consistency = all chosen half-spaces pairwise intersect.
// disjoint[2w + s] holds bit (2u + t) when side s of wall w misses side t of
// wall u.
struct OrientationChecker {
  int m;
  std::vector<std::vector<uint64_t>> disjoint;  // [side][word] bitmask over sides

  explicit OrientationChecker(const NestedSystem& sys) : m((int)sys.size()) {
    std::vector<Bitset> sides;
    for (auto& r : sys.reps) {
      sides.push_back(r.inside());
      sides.push_back(~r.inside());
    }
    int s = 2 * m;
    disjoint.assign(s, std::vector<uint64_t>((s + 63) / 64, 0));
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j)
        if (i / 2 != j / 2 && !sides[i].intersects(sides[j]))
          disjoint[i][j >> 6] |= 1ull << (j & 63);
  }

  bool consistent(OrientationMask mask) const {
    // gather chosen side ids, test each against the disjointness rows
    for (int w = 0; w < m; ++w) {
      int side = 2 * w + (((mask >> w) & 1) ? 0 : 1);
      for (int u = w + 1; u < m; ++u) {
        int other = 2 * u + (((mask >> u) & 1) ? 0 : 1);
        if ((disjoint[side][other >> 6] >> (other & 63)) & 1) return false;
      }
    }
    return true;
  }
};

}  // namespace detail

inline OrientationMask nu_mask(const NestedSystem& sys, int graph_vertex) {
  OrientationMask m = 0;
  for (std::size_t w = 0; w < sys.size(); ++w)
    if (sys.reps[w].contains(graph_vertex)) m |= 1ull << w;
  return m;
}

// Tree dual to a nested system.  Vertices are found by flip-BFS from the
// vertex orientations nu(x); for a finite nested system this reaches every
// consistent orientation.  The tree property is verified, not assumed.
inline StructureTree build_tree(const NestedSystem& system) {
  require(system.size() <= 62, "too many walls for orientation masks");
  if (auto w = system.crossing_witness())
    throw precondition_error("system is not nested: members " + std::to_string(w->first) +
                             " and " + std::to_string(w->second) + " cross");
  int m = (int)system.size();
  detail::OrientationChecker checker(system);

  std::set<OrientationMask> seen;
  std::vector<OrientationMask> queue;
  for (std::size_t x = 0; x < system.graph.vertex_count(); ++x) {
    OrientationMask mk = nu_mask(system, (int)x);
    check_internal(checker.consistent(mk), "vertex orientation inconsistent");
    if (seen.insert(mk).second) queue.push_back(mk);
  }
  for (std::size_t i = 0; i < queue.size(); ++i) {
    OrientationMask cur = queue[i];
    for (int w = 0; w < m; ++w) {
      OrientationMask flip = cur ^ (1ull << w);
      if (!seen.count(flip) && checker.consistent(flip)) {
        seen.insert(flip);
        queue.push_back(flip);
      }
    }
  }

  StructureTree t;
  t.system = system;
  t.level = system.level;
  t.vertices.assign(seen.begin(), seen.end());
  for (std::size_t v = 0; v < t.vertices.size(); ++v)
    for (int w = 0; w < m; ++w) {
      OrientationMask other = t.vertices[v] ^ (1ull << w);
      if (other > t.vertices[v] && seen.count(other)) {
        int o = t.find_vertex(other);
        bool v_has_rep = (t.vertices[v] >> w) & 1;
        t.edges.push_back({w, v_has_rep ? (int)v : o, v_has_rep ? o : (int)v});
      }
    }
  check_internal(t.edges.size() + 1 == t.vertices.size(),
                 "orientation graph is not a tree: |E| != |V| - 1");
  // connectivity: BFS reached everything from the seeds, and a connected
  // graph with |E| = |V| - 1 is a tree; still verify reachability from one
  // vertex to rule out a disconnected union
  {
    auto adj = t.adjacency();
    std::vector<char> vis(t.vertices.size(), 0);
    std::vector<int> st{0};
    vis[0] = 1;
    std::size_t cnt = 1;
    while (!st.empty()) {
      int v = st.back();
      st.pop_back();
      for (auto [u, e] : adj[v])
        if (!vis[u]) {
          vis[u] = 1;
          ++cnt;
          st.push_back(u);
        }
    }
    check_internal(cnt == t.vertices.size(), "orientation graph is disconnected");
  }

  t.nu.resize(system.graph.vertex_count());
  for (std::size_t x = 0; x < system.graph.vertex_count(); ++x)
    t.nu[x] = t.find_vertex(nu_mask(system, (int)x));
  return t;
}

// Structure tree of the graph at level n: the tree of the canonical nested
// generators, with nu.
inline StructureTree structure_tree(const Graph& g, int n, int aut_guard = 10) {
  return build_tree(extract_nested_generators(g, n, aut_guard));
}

// Tree automorphism induced by a graph automorphism: the permutation maps
// wall pairs to wall pairs, hence orientations to orientations.
inline std::vector<int> induced_tree_automorphism(const StructureTree& t,
                                                  const std::vector<int>& perm) {
  int m = (int)t.wall_count();
  std::vector<int> wall_image(m);
  std::vector<bool> flips(m);  // true when sigma(rep) is the complement side
  for (int w = 0; w < m; ++w) {
    Cut img = apply_permutation(perm, t.system.reps[w]);
    Cut rep = t.system.canonical_rep(img);
    auto idx = t.system.find_pair(rep);
    require(idx.has_value(), "permutation does not preserve the wall set");
    wall_image[w] = *idx;
    flips[w] = !(img == t.system.reps[*idx]);
  }
  std::vector<int> out(t.vertices.size());
  for (std::size_t v = 0; v < t.vertices.size(); ++v) {
    OrientationMask img = 0;
    for (int w = 0; w < m; ++w) {
      bool chose_rep = (t.vertices[v] >> w) & 1;
      if (chose_rep != flips[w]) img |= 1ull << wall_image[w];
    }
    out[v] = t.find_vertex(img);
  }
  return out;
}

}  // namespace cutforest
