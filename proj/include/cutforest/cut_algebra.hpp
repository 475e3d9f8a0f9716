#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "cutforest/graph.hpp"

namespace cutforest {

// The four corners A∩B, A∩B*, A*∩B, A*∩B* and the nestedness verdict.
// Nested means at least one corner is empty.
struct CornerReport {
  std::array<Cut, 4> corners;     // A∩B, A∩B*, A*∩B, A*∩B*
  std::array<bool, 4> empty;
  bool nested;
};

inline CornerReport corner_analysis(const Cut& a, const Cut& b) {
  a.check_same_graph(b);
  Cut ac = a.complement(), bc = b.complement();
  CornerReport r{{a & b, a & bc, ac & b, ac & bc}, {}, false};
  for (int i = 0; i < 4; ++i) r.empty[i] = r.corners[i].is_empty();
  r.nested = r.empty[0] || r.empty[1] || r.empty[2] || r.empty[3];
  return r;
}

inline bool nested(const Cut& a, const Cut& b) { return corner_analysis(a, b).nested; }

// Complement-closed family of pairwise nested cuts, stored as one canonical
// representative per {C, C*} pair: the side not containing the base vertex.
struct NestedSystem {
  Graph graph;
  std::vector<Cut> reps;
  int level = 0;

  std::size_t size() const { return reps.size(); }

  Cut canonical_rep(const Cut& c) const {
    return c.contains(graph.base_or_default()) ? c.complement() : c;
  }

  // Index of the pair containing c (as either side), if it is a member.
  std::optional<int> find_pair(const Cut& c) const {
    Cut r = canonical_rep(c);
    for (std::size_t i = 0; i < reps.size(); ++i)
      if (reps[i] == r) return (int)i;
    return std::nullopt;
  }

  // Verify every two members are nested; returns a witness crossing pair on
  // failure.
  std::optional<std::pair<int, int>> crossing_witness() const {
    for (std::size_t i = 0; i < reps.size(); ++i)
      for (std::size_t j = i + 1; j < reps.size(); ++j)
        if (!nested(reps[i], reps[j])) return std::make_pair((int)i, (int)j);
    return std::nullopt;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["level"] = level;
    auto members = nlohmann::json::array();
    for (auto& c : reps) members.push_back(c.ids());
    j["members"] = members;
    return j;
  }
};

// Number of {C, C*} pairs in the system not nested with a.
inline int mu(const Cut& a, const NestedSystem& system) {
  a.check_graph(system.graph);
  int m = 0;
  for (auto& c : system.reps)
    if (!nested(a, c)) ++m;
  return m;
}

// All cuts with 0 < |A| < |V| and weight <= n, one canonical representative
// per {A, A*} pair, ordered by (weight, size, bitset value).
inline std::vector<Cut> enumerate_cuts(const Graph& g, int n, bool require_both_sides_connected) {
  require(n >= 1, "cut weight bound must be >= 1");
  std::size_t nv = g.vertex_count();
  require(nv <= (std::size_t)(24 * guard_scale()),
          "vertex count exceeds the cut enumeration guard");
  int base = g.base_or_default();
  std::vector<int> free_vertices;
  for (std::size_t v = 0; v < nv; ++v)
    if ((int)v != base) free_vertices.push_back((int)v);

  std::vector<Cut> out;
  uint64_t limit = 1ull << free_vertices.size();
  for (uint64_t mask = 1; mask < limit; ++mask) {
    Bitset b(nv);
    for (std::size_t i = 0; i < free_vertices.size(); ++i)
      if ((mask >> i) & 1) b.set(free_vertices[i]);
    Cut c(g, b);
    if (cut_weight(g, c) > n) continue;
    if (require_both_sides_connected && !both_sides_connected(g, c)) continue;
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(), [&](const Cut& x, const Cut& y) {
    int wx = cut_weight(g, x), wy = cut_weight(g, y);
    if (wx != wy) return wx < wy;
    if (x.size() != y.size()) return x.size() < y.size();
    return x.inside() < y.inside();
  });
  return out;
}

// Closure of the generators (plus the empty set) under symmetric difference
// and intersection.  Complements of proper generators are seeded so the
// {C, C*} pair semantics carry through.
inline std::vector<Cut> ring_closure(const Graph& g, const std::vector<Cut>& generators,
                                     std::size_t size_limit = 1u << 20) {
  require(generators.size() <= (std::size_t)(40 * guard_scale()), "too many ring generators");
  require(g.vertex_count() <= (std::size_t)(16 * guard_scale()),
          "graph too large for ring closure");
  std::set<Bitset> seen;
  std::vector<Bitset> elems;
  auto add = [&](const Bitset& b) {
    if (seen.insert(b).second) elems.push_back(b);
  };
  add(Bitset(g.vertex_count()));
  for (auto& c : generators) {
    c.check_graph(g);
    add(c.inside());
    if (c.is_proper()) add((~c.inside()));
  }
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      add(elems[i] ^ elems[j]);
      add(elems[i] & elems[j]);
      require(elems.size() <= size_limit, "ring closure exceeded the size limit");
    }
  }
  std::vector<Cut> out;
  for (auto& b : seen) out.emplace_back(g, b);
  return out;
}

// All capacity-preserving automorphisms; when a base vertex is designated it
// must be fixed.  Exhaustive backtracking, fixtures only.
inline std::vector<std::vector<int>> automorphisms(const Graph& g, int guard = 10) {
  std::size_t n = g.vertex_count();
  require(n <= (std::size_t)(guard * guard_scale()), "graph too large for automorphism search");

  // capacity between u,v or 0
  auto cap = [&](int u, int v) -> int {
    for (auto [w, e] : g.neighbors(u))
      if (w == v) return g.edge(e).capacity;
    return 0;
  };
  std::vector<int> degree(n, 0);
  for (std::size_t v = 0; v < n; ++v) degree[v] = (int)g.neighbors(v).size();

  std::vector<std::vector<int>> out;
  std::vector<int> perm(n, -1);
  std::vector<bool> used(n, false);
  auto backtrack = [&](auto&& self, std::size_t v) -> void {
    if (v == n) {
      out.push_back(perm);
      return;
    }
    for (std::size_t w = 0; w < n; ++w) {
      if (used[w] || degree[v] != degree[w]) continue;
      if (g.base() && (int)v == *g.base() && (int)w != *g.base()) continue;
      if (g.base() && (int)w == *g.base() && (int)v != *g.base()) continue;
      bool ok = true;
      for (std::size_t u = 0; u < v && ok; ++u)
        if (cap((int)v, (int)u) != cap((int)w, perm[u])) ok = false;
      if (!ok) continue;
      perm[v] = (int)w;
      used[w] = true;
      self(self, v + 1);
      used[w] = false;
      perm[v] = -1;
    }
  };
  backtrack(backtrack, 0);
  return out;
}

inline Cut apply_permutation(const std::vector<int>& perm, const Cut& c) {
  Bitset b(c.graph().vertex_count());
  for (auto v : c.inside().bits()) b.set(perm[v]);
  return Cut(c.graph(), b);
}

// Greedy closure fell short: the uncovered weight-<=n cuts are reported
// instead of silently returning a non-generating system.
struct generation_failure : error {
  std::vector<Cut> uncovered;
  explicit generation_failure(std::vector<Cut> unc)
      : error("nested generator extraction did not cover " + std::to_string(unc.size()) +
              " cut(s) of bounded weight"),
        uncovered(std::move(unc)) {}
};

// Nested, automorphism-invariant generating set for the ring of weight-<=n
// cuts.  Candidates of weight w are processed in stages so that the level-i
// output is a prefix of the level-j output for i <= j; within a stage the
// order is (crossing count against the weight-<=w candidate pool, canonical
// bitset order) and whole automorphism orbits are accepted or rejected
// atomically.
inline NestedSystem extract_nested_generators(const Graph& g, int n, int aut_guard = 10) {
  require(n >= 1, "level must be >= 1");
  auto auts = automorphisms(g, aut_guard);
  std::vector<Cut> accepted;
  std::vector<Cut> pool;  // candidates of weight <= current stage

  auto orbit_of = [&](const Cut& rep) {
    NestedSystem tmp{g, {}, 0};
    std::vector<Cut> orb;
    std::set<Bitset> seen;
    for (auto& p : auts) {
      Cut img = tmp.canonical_rep(apply_permutation(p, rep));
      if (seen.insert(img.inside()).second) orb.push_back(img);
    }
    std::sort(orb.begin(), orb.end(),
              [](const Cut& x, const Cut& y) { return x.inside() < y.inside(); });
    return orb;
  };

  for (int w = 1; w <= n; ++w) {
    std::vector<Cut> stage;
    NestedSystem conv{g, {}, 0};
    for (auto& c : enumerate_cuts(g, w, true))
      if (cut_weight(g, c) == w) {
        pool.push_back(conv.canonical_rep(c));
        stage.push_back(pool.back());
      }
    std::vector<std::pair<int, std::size_t>> order;  // (mu against pool, stage idx)
    for (std::size_t i = 0; i < stage.size(); ++i) {
      int m = 0;
      for (auto& p : pool)
        if (!nested(stage[i], p)) ++m;
      order.emplace_back(m, i);
    }
    std::stable_sort(order.begin(), order.end(), [&](auto& x, auto& y) {
      if (x.first != y.first) return x.first < y.first;
      return stage[x.second].inside() < stage[y.second].inside();
    });

    std::set<Bitset> processed;
    for (auto& [m, idx] : order) {
      const Cut& cand = stage[idx];
      if (processed.count(cand.inside())) continue;
      auto orb = orbit_of(cand);
      for (auto& o : orb) processed.insert(o.inside());
      bool ok = true;
      for (std::size_t i = 0; i < orb.size() && ok; ++i) {
        for (std::size_t j = i + 1; j < orb.size() && ok; ++j)
          if (!nested(orb[i], orb[j])) ok = false;
        for (auto& acc : accepted)
          if (!nested(orb[i], acc)) {
            ok = false;
            break;
          }
      }
      if (ok)
        for (auto& o : orb) accepted.push_back(o);
    }
  }

  NestedSystem system{g, accepted, n};
  // The ring generated by the system is exactly the family of cuts that
  // split no fiber of the side-assignment map, so coverage of every
  // weight-<=n cut reduces to a fiber-splitting scan (the full closure can
  // be exponential).
  std::vector<int> fiber(g.vertex_count(), 0);
  {
    std::map<std::vector<bool>, int> classes;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      std::vector<bool> sig;
      for (auto& c : accepted) sig.push_back(c.contains((int)v));
      fiber[v] = classes.emplace(std::move(sig), (int)classes.size()).first->second;
    }
  }
  std::vector<Cut> uncovered;
  for (auto& c : enumerate_cuts(g, n, false)) {
    bool splits = false;
    for (std::size_t x = 0; x < g.vertex_count() && !splits; ++x)
      for (std::size_t y = x + 1; y < g.vertex_count() && !splits; ++y)
        if (fiber[x] == fiber[y] && c.contains((int)x) != c.contains((int)y)) splits = true;
    if (splits) uncovered.push_back(c);
  }
  if (!uncovered.empty()) throw generation_failure(std::move(uncovered));
  return system;
}

}  // namespace cutforest
