#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cutforest/graph.hpp"
#include "cutforest/rewriting.hpp"

namespace cutforest {

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = (int)i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace detail

// Verdict of an H-finiteness check: the number of H-orbits met, and whether
// that count is conclusive inside the truncation.  Inconclusive is a value,
// not an error.
struct FinitenessReport {
  bool conclusive = false;
  int orbit_count = 0;
  std::vector<int> orbit_labels;
};

// Truncated coset graph of a group over a subgroup H: vertices are cosets gH
// out to S-word radius `radius`, edges are the pairs {gH, gsH}.  Everything
// a consumer may rely on exactly lives inside `interior_radius`; the rest is
// boundary and marked unreliable.
struct Arena {
  GroupOracle oracle;
  std::vector<std::string> h_gens;
  std::vector<char> s_letters;
  int radius = 0;
  int interior_radius = 0;
  int h_sample_radius = 0;

  Graph graph;
  std::vector<std::string> rep;  // vertex -> coset representative normal form
  std::vector<int> level;
  int base = 0;
  Bitset interior, boundary;

  std::vector<std::string> h_ball;  // sampled H elements, identity first

  std::vector<int> vertex_orbit, edge_orbit;              // H-orbit labels
  std::vector<bool> vertex_orbit_closed, edge_orbit_closed;  // closed inside interior

  std::map<std::string, int> coset_index;                 // canon rep -> vertex
  std::map<std::pair<int, int>, int> edge_index;

  std::optional<int> vertex_of(const std::string& word) const {
    auto it = coset_index.find(oracle.coset_canon(word));
    return it == coset_index.end() ? std::nullopt : std::optional<int>(it->second);
  }

  std::optional<int> find_edge(int u, int v) const {
    auto it = edge_index.find({std::min(u, v), std::max(u, v)});
    return it == edge_index.end() ? std::nullopt : std::optional<int>(it->second);
  }

  // left translation g . (xH) = (gx)H
  std::optional<int> act_vertex_left(const std::string& word, int v) const {
    return vertex_of(oracle.multiply(word, rep[v]));
  }

  // right translation by w on elements, defined on vertices when H is
  // trivial or w normalizes H; used by the cubing side (right G-action)
  std::optional<int> act_vertex_right(const std::string& word, int v) const {
    return vertex_of(oracle.multiply(rep[v], word));
  }

  bool edge_is_interior(int e) const {
    return interior.test(graph.edge(e).u) && interior.test(graph.edge(e).v);
  }

  // Left-translate a cut by transporting its coboundary and re-deciding the
  // sides from translated sample vertices.  This reconstructs the translate
  // of the underlying infinite cut inside the truncation instead of
  // translating the truncated vertex set pointwise.  Left multiplication is
  // a graph map, so the transport is sound; right multiplication is not, and
  // right translates go through right_translate below.
  Cut act_cut(const std::string& word, const Cut& a) const {
    a.check_graph(graph);
    auto act = [&](int v) { return act_vertex_left(word, v); };
    std::set<int> moved_edges;
    std::vector<std::string> lost;
    for (int e : coboundary(graph, a)) {
      auto u2 = act(graph.edge(e).u), v2 = act(graph.edge(e).v);
      if (!u2 || !v2) {
        lost.push_back(graph.id(!u2 ? graph.edge(e).u : graph.edge(e).v));
        continue;
      }
      auto e2 = find_edge(*u2, *v2);
      if (!e2) {
        lost.push_back(graph.id(graph.edge(e).u));
        continue;
      }
      moved_edges.insert(*e2);
    }
    if (!lost.empty()) {
      std::string msg = "translation pushes the coboundary outside the truncation; lost:";
      for (auto& s : lost) msg += " " + s;
      throw truncation_error(msg);
    }
    // components of the graph with the translated coboundary removed
    std::size_t n = graph.vertex_count();
    detail::UnionFind uf(n);
    for (std::size_t e = 0; e < graph.edge_count(); ++e)
      if (!moved_edges.count((int)e)) uf.unite(graph.edge((int)e).u, graph.edge((int)e).v);
    std::vector<int> claim(n, -1);  // component root -> 0 (A*), 1 (A)
    std::vector<int> owner(n, -1);
    bool conflict = false;
    for (std::size_t v = 0; v < n; ++v) {
      auto img = act((int)v);
      if (!img) continue;
      int root = uf.find(*img);
      int side = a.contains((int)v) ? 1 : 0;
      if (owner[root] < 0)
        owner[root] = side;
      else if (owner[root] != side)
        conflict = true;
    }
    if (conflict)
      throw truncation_error("translated sides collide; the true coboundary leaves the truncation");
    Bitset out(n);
    std::vector<std::string> unclaimed;
    for (std::size_t v = 0; v < n; ++v) {
      int side = owner[uf.find((int)v)];
      if (side < 0) unclaimed.push_back(graph.id((int)v));
      if (side == 1) out.set(v);
    }
    if (!unclaimed.empty()) {
      std::string msg = "translation leaves components unclaimed; lost:";
      for (auto& s : unclaimed) msg += " " + s;
      throw truncation_error(msg);
    }
    return Cut(graph, out);
  }

  Cut act_left_cut(const std::string& word, const Cut& a) const { return act_cut(word, a); }

  // Right translate A.w decided by pullback: x lies in A.w iff x w^-1 lies
  // in A.  Vertices whose pullback leaves the truncation are undecidable and
  // reported in `uncertain`.
  struct RightTranslate {
    Cut set;
    Bitset uncertain;
  };

  RightTranslate right_translate(const std::string& word, const Cut& a) const {
    a.check_graph(graph);
    std::string winv = oracle.inverse(word);
    Bitset bits(graph.vertex_count()), uncertain(graph.vertex_count());
    for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
      auto pulled = act_vertex_right(winv, (int)v);
      if (!pulled)
        uncertain.set(v);
      else if (a.contains(*pulled))
        bits.set(v);
    }
    return {Cut(graph, bits), uncertain};
  }

  // H-orbit count of a vertex set or edge set, with the truncation-honest
  // verdict: conclusive only when every interior member of every met orbit
  // has all its sampled H-images inside the truncation.
  FinitenessReport h_finiteness_of_vertices(const Bitset& s) const {
    std::set<int> labels;
    for (auto v : s.bits()) labels.insert(vertex_orbit[v]);
    FinitenessReport r;
    r.orbit_labels.assign(labels.begin(), labels.end());
    r.orbit_count = (int)labels.size();
    r.conclusive = true;
    for (int l : labels)
      if (!vertex_orbit_closed[l]) r.conclusive = false;
    return r;
  }

  FinitenessReport h_finiteness_of_edges(const std::vector<int>& edges) const {
    std::set<int> labels;
    for (int e : edges) labels.insert(edge_orbit[e]);
    FinitenessReport r;
    r.orbit_labels.assign(labels.begin(), labels.end());
    r.orbit_count = (int)labels.size();
    r.conclusive = true;
    for (int l : labels)
      if (!edge_orbit_closed[l]) r.conclusive = false;
    return r;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["group"] = oracle.name;
    j["radius"] = radius;
    j["interior_radius"] = interior_radius;
    j["graph"] = graph.to_json();
    auto lv = nlohmann::json::array();
    for (std::size_t v = 0; v < level.size(); ++v) lv.push_back(level[v]);
    j["levels"] = lv;
    auto bd = nlohmann::json::array();
    for (auto v : boundary.bits()) bd.push_back(graph.id((int)v));
    j["boundary"] = bd;
    return j;
  }
};

inline FinitenessReport is_h_finite(const Arena& a, const Bitset& vertices) {
  return a.h_finiteness_of_vertices(vertices);
}

inline FinitenessReport is_h_finite(const Arena& a, const std::vector<int>& edges) {
  return a.h_finiteness_of_edges(edges);
}

inline std::string display_id(const std::string& rep) { return rep.empty() ? "1" : rep; }

// Build the truncated coset graph by breadth-first search from the coset H.
// Neighbor enumeration sweeps representative * h * s over a sampled H-ball,
// which is exhaustive for the shipped fixtures at the default sample radius.
inline Arena build_coset_graph(const GroupOracle& oracle, const std::vector<std::string>& h_gens,
                               const std::vector<char>& s_letters, int radius,
                               int h_sample_radius = -1) {
  require(radius >= 2, "arena radius must be >= 2");
  require(oracle.coset_canon != nullptr, "oracle must provide a coset representative function");
  check_oracle(oracle, std::min(2 * radius, 8));

  Arena a;
  a.oracle = oracle;
  a.h_gens = h_gens;
  a.s_letters = s_letters;
  a.radius = radius;
  a.interior_radius = radius - 1;
  a.h_sample_radius = h_sample_radius > 0 ? h_sample_radius : radius + 2;

  // sampled H elements
  std::vector<char> h_letters;
  for (auto& w : h_gens)
    for (char c : w) {
      if (std::find(h_letters.begin(), h_letters.end(), c) == h_letters.end()) h_letters.push_back(c);
      char inv = oracle.letter_inverse.at(c);
      if (std::find(h_letters.begin(), h_letters.end(), inv) == h_letters.end())
        h_letters.push_back(inv);
    }
  a.h_ball = oracle.ball(a.h_sample_radius, h_letters);
  for (auto& h : a.h_ball)
    check_internal(oracle.in_h(h), "H generator word leaves the subgroup");

  std::vector<char> s_dirs = oracle.letters_with_inverses(s_letters);

  // search from the coset H; a vertex's level is the S-word length of its
  // canonical representative, and the truncation keeps levels <= radius
  std::vector<std::string> reps{oracle.coset_canon("")};
  std::vector<int> level{0};
  std::map<std::string, int> index{{reps[0], 0}};
  std::vector<std::pair<int, int>> edges;
  std::set<std::pair<int, int>> edge_seen;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    for (auto& h : a.h_ball)
      for (char s : s_dirs) {
        std::string target = oracle.coset_canon(reps[i] + h + std::string(1, s));
        if ((int)target.size() > radius) continue;
        auto it = index.find(target);
        int t;
        if (it == index.end()) {
          t = (int)reps.size();
          reps.push_back(target);
          level.push_back((int)target.size());
          index.emplace(target, t);
        } else {
          t = it->second;
        }
        if (t == (int)i) continue;  // gsH = gH gives no loop
        std::pair<int, int> key{std::min((int)i, t), std::max((int)i, t)};
        if (edge_seen.insert(key).second) edges.push_back(key);
      }
  }

  std::vector<std::string> ids;
  for (auto& r : reps) ids.push_back(display_id(r));
  std::vector<std::tuple<std::string, std::string, int>> edge_list;
  for (auto& [u, v] : edges) edge_list.emplace_back(ids[u], ids[v], 1);
  a.graph = Graph::make(ids, edge_list, ids[0]);
  a.rep = reps;
  a.level = level;
  a.base = 0;
  a.interior = Bitset(reps.size());
  a.boundary = Bitset(reps.size());
  for (std::size_t v = 0; v < reps.size(); ++v) {
    if (level[v] <= a.interior_radius) a.interior.set(v);
    if (level[v] == radius) a.boundary.set(v);
  }
  for (auto& r : reps) a.coset_index.emplace(r, a.coset_index.size());
  for (std::size_t e = 0; e < a.graph.edge_count(); ++e)
    a.edge_index[{a.graph.edge((int)e).u, a.graph.edge((int)e).v}] = (int)e;

  // base is stabilized by every H generator
  for (auto& h : h_gens) {
    auto img = a.act_vertex_left(h, a.base);
    check_internal(img && *img == a.base, "an H generator moves the base coset");
  }

  // H-orbit structure under the generator actions, transitively closed
  // within the truncation
  detail::UnionFind vuf(reps.size()), euf(a.graph.edge_count());
  std::vector<std::string> h_dirs;
  for (auto& h : h_gens) {
    h_dirs.push_back(oracle.normalize(h));
    h_dirs.push_back(oracle.inverse(h));
  }
  std::vector<std::vector<std::optional<int>>> vimg(h_dirs.size());
  for (std::size_t k = 0; k < h_dirs.size(); ++k) {
    vimg[k].resize(reps.size());
    for (std::size_t v = 0; v < reps.size(); ++v) {
      vimg[k][v] = a.act_vertex_left(h_dirs[k], (int)v);
      if (vimg[k][v]) vuf.unite((int)v, *vimg[k][v]);
    }
    for (std::size_t e = 0; e < a.graph.edge_count(); ++e) {
      auto u2 = vimg[k][a.graph.edge((int)e).u], v2 = vimg[k][a.graph.edge((int)e).v];
      if (u2 && v2)
        if (auto e2 = a.find_edge(*u2, *v2)) euf.unite((int)e, *e2);
    }
  }
  a.vertex_orbit.resize(reps.size());
  for (std::size_t v = 0; v < reps.size(); ++v) a.vertex_orbit[v] = vuf.find((int)v);
  a.edge_orbit.resize(a.graph.edge_count());
  for (std::size_t e = 0; e < a.graph.edge_count(); ++e) a.edge_orbit[e] = euf.find((int)e);

  a.vertex_orbit_closed.assign(reps.size(), true);
  for (std::size_t v = 0; v < reps.size(); ++v)
    if (a.interior.test(v))
      for (std::size_t k = 0; k < h_dirs.size(); ++k)
        if (!vimg[k][v]) a.vertex_orbit_closed[a.vertex_orbit[v]] = false;
  a.edge_orbit_closed.assign(a.graph.edge_count(), true);
  for (std::size_t e = 0; e < a.graph.edge_count(); ++e)
    if (a.edge_is_interior((int)e))
      for (std::size_t k = 0; k < h_dirs.size(); ++k) {
        auto u2 = vimg[k][a.graph.edge((int)e).u], v2 = vimg[k][a.graph.edge((int)e).v];
        if (!u2 || !v2 || !a.find_edge(*u2, *v2)) a.edge_orbit_closed[a.edge_orbit[e]] = false;
      }
  return a;
}

// H\X: vertices and edges are the H-orbits inside the truncation.  Loops
// (edges within one vertex orbit) vanish in the quotient; they never carry
// cut weight.
struct QuotientGraph {
  Graph graph;
  std::vector<int> vertex_proj;  // arena vertex -> quotient vertex
  std::vector<int> edge_proj;    // arena edge -> quotient edge, -1 for loops
  std::vector<int> q_level;      // min arena level per quotient vertex
  int interior_radius = 0;

  Bitset preimage(const Cut& q_cut, std::size_t arena_vertices) const {
    Bitset out(arena_vertices);
    for (std::size_t v = 0; v < vertex_proj.size(); ++v)
      if (q_cut.contains(vertex_proj[v])) out.set(v);
    return out;
  }
};

inline QuotientGraph quotient_graph(const Arena& a) {
  // orbits intersecting the interior must be closed for the quotient to be
  // trustworthy there
  for (std::size_t v = 0; v < a.rep.size(); ++v)
    if (a.interior.test(v) && !a.vertex_orbit_closed[a.vertex_orbit[v]])
      throw truncation_error("an H-orbit meeting the interior is not closed; grow the radius");

  std::vector<int> label_to_q;
  std::vector<int> q_of_label(a.rep.size(), -1);
  std::vector<std::string> ids;
  std::vector<int> q_level;
  for (std::size_t v = 0; v < a.rep.size(); ++v) {
    int l = a.vertex_orbit[v];
    if (q_of_label[l] < 0) {
      q_of_label[l] = (int)ids.size();
      ids.push_back("[" + display_id(a.rep[l]) + "]");
      q_level.push_back(a.level[v]);
    }
    q_level[q_of_label[l]] = std::min(q_level[q_of_label[l]], a.level[v]);
  }
  QuotientGraph q;
  q.vertex_proj.resize(a.rep.size());
  for (std::size_t v = 0; v < a.rep.size(); ++v) q.vertex_proj[v] = q_of_label[a.vertex_orbit[v]];

  std::map<std::pair<int, int>, int> qedges;
  std::vector<std::tuple<std::string, std::string, int>> edge_list;
  q.edge_proj.assign(a.graph.edge_count(), -1);
  for (std::size_t e = 0; e < a.graph.edge_count(); ++e) {
    int qu = q.vertex_proj[a.graph.edge((int)e).u], qv = q.vertex_proj[a.graph.edge((int)e).v];
    if (qu == qv) continue;  // loop
    std::pair<int, int> key{std::min(qu, qv), std::max(qu, qv)};
    auto it = qedges.find(key);
    if (it == qedges.end()) {
      it = qedges.emplace(key, (int)edge_list.size()).first;
      edge_list.emplace_back(ids[key.first], ids[key.second], 1);
    }
    q.edge_proj[e] = it->second;
  }
  q.graph = Graph::make(ids, edge_list, ids[q.vertex_proj[a.base]]);
  q.q_level = q_level;
  q.interior_radius = a.interior_radius;
  return q;
}

// Registry of named arena fixtures: group, subgroup and generating set.
struct ArenaFixture {
  GroupOracle oracle;
  std::vector<std::string> h_gens;
  std::vector<char> s_letters;
};

inline ArenaFixture arena_fixture(const std::string& name) {
  GroupOracle o = group_fixture(name);
  return {o, o.h_generators, o.s_letters};
}

inline Arena build_fixture_arena(const std::string& name, int radius,
                                 std::optional<std::vector<std::string>> h_override = std::nullopt) {
  auto fx = arena_fixture(name);
  auto h = h_override.value_or(fx.h_gens);
  GroupOracle o = fx.oracle;
  if (h.empty()) {
    // trivial subgroup: cosets are elements
    o.h_member = [](const std::string& w) { return w.empty(); };
    o.coset_canon = o.normalize;
  }
  return build_coset_graph(o, h, fx.s_letters, radius);
}

}  // namespace cutforest
