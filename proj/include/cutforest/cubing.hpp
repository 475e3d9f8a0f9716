#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cutforest/arena.hpp"
#include "cutforest/relative.hpp"
#include "cutforest/structure_tree.hpp"

namespace cutforest {

// ---------------------------------------------------------------------------
// The metric space M of sets almost equal to a base point.  A point is the
// finite set of H-coset labels on which it differs from the base; the base
// itself is the empty delta.

struct LabelUniverse {
  std::vector<std::string> labels;

  std::size_t size() const { return labels.size(); }
  int index_of(const std::string& l) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == l) return (int)i;
    throw precondition_error("unknown coset label: " + l);
  }
};

struct MetricPoint {
  uint64_t delta = 0;  // bit i set: differs from the base on universe label i

  bool operator==(const MetricPoint& o) const { return delta == o.delta; }
  bool operator<(const MetricPoint& o) const { return delta < o.delta; }
};

inline int metric_d(const MetricPoint& p, const MetricPoint& q) {
  return std::popcount(p.delta ^ q.delta);
}

// Gromov products are half-integers in general; on M every triangle
// perimeter is even, so they are integers there.
struct HalfInteger {
  int twice = 0;
  double value() const { return twice / 2.0; }
};

inline HalfInteger gromov_product(const MetricPoint& base, const MetricPoint& b,
                                  const MetricPoint& c) {
  return {metric_d(base, b) + metric_d(base, c) - metric_d(b, c)};
}

struct HyperbolicityVerdict {
  bool ok = true;
  std::array<int, 4> witness{-1, -1, -1, -1};  // (base, b, c, d)
};

// (B.C)_A >= min{(B.D)_A, (C.D)_A} over all ordered quadruples.
inline HyperbolicityVerdict zero_hyperbolicity_check(const std::vector<MetricPoint>& pts) {
  require(pts.size() >= 4, "need at least four points");
  HyperbolicityVerdict v;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = 0; b < pts.size(); ++b)
      for (std::size_t c = 0; c < pts.size(); ++c)
        for (std::size_t d = 0; d < pts.size(); ++d) {
          int bc = gromov_product(pts[a], pts[b], pts[c]).twice;
          int bd = gromov_product(pts[a], pts[b], pts[d]).twice;
          int cd = gromov_product(pts[a], pts[c], pts[d]).twice;
          if (bc < std::min(bd, cd)) {
            v.ok = false;
            v.witness = {(int)a, (int)b, (int)c, (int)d};
            return v;
          }
        }
  return v;
}

// ---------------------------------------------------------------------------
// Balls in the graph Gamma: points of M within a radius of a center, edges
// between points at distance one, each tagged with its coset label.

struct GammaBall {
  LabelUniverse universe;
  MetricPoint center;
  int radius = 0;
  std::vector<MetricPoint> vertices;  // sorted by delta
  struct Edge {
    int u, v;
    int label;
  };
  std::vector<Edge> edges;

  int find(const MetricPoint& p) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), p);
    require(it != vertices.end() && *it == p, "point is outside the ball");
    return (int)(it - vertices.begin());
  }

  std::vector<std::vector<std::pair<int, int>>> adjacency() const {
    std::vector<std::vector<std::pair<int, int>>> adj(vertices.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      adj[edges[e].u].push_back({edges[e].v, (int)e});
      adj[edges[e].v].push_back({edges[e].u, (int)e});
    }
    return adj;
  }

  std::string to_dot() const {
    static const char* palette[] = {"red",    "blue",   "brown", "green", "orange", "purple",
                                    "cyan",   "magenta", "gray",  "olive", "pink",   "navy"};
    std::ostringstream os;
    os << "graph gamma_ball {\n";
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      os << "  v" << v << " [label=\"";
      bool first = true;
      for (std::size_t i = 0; i < universe.size(); ++i)
        if ((vertices[v].delta >> i) & 1) {
          os << (first ? "" : "+") << universe.labels[i];
          first = false;
        }
      if (first) os << "A";
      os << "\"];\n";
    }
    for (auto& e : edges)
      os << "  v" << e.u << " -- v" << e.v << " [color=" << palette[e.label % 12] << ", label=\""
         << universe.labels[e.label] << "\"];\n";
    os << "}\n";
    return os.str();
  }
};

inline GammaBall gamma_ball(const MetricPoint& center, int radius, const LabelUniverse& universe) {
  require(radius >= 0 && radius <= 4 * guard_scale(), "gamma ball radius guard");
  require(universe.size() <= (std::size_t)(12 * guard_scale()), "gamma ball universe guard");
  GammaBall ball;
  ball.universe = universe;
  ball.center = center;
  ball.radius = radius;
  uint64_t limit = 1ull << universe.size();
  for (uint64_t m = 0; m < limit; ++m)
    if (std::popcount(m ^ center.delta) <= radius) ball.vertices.push_back({m});
  std::sort(ball.vertices.begin(), ball.vertices.end());
  for (std::size_t v = 0; v < ball.vertices.size(); ++v)
    for (std::size_t i = 0; i < universe.size(); ++i) {
      MetricPoint flip{ball.vertices[v].delta ^ (1ull << i)};
      if (flip.delta > ball.vertices[v].delta) {
        auto it = std::lower_bound(ball.vertices.begin(), ball.vertices.end(), flip);
        if (it != ball.vertices.end() && *it == flip)
          ball.edges.push_back({(int)v, (int)(it - ball.vertices.begin()), (int)i});
      }
    }
  return ball;
}

struct GeodesicReport {
  long count = 0;
  std::vector<int> cube_vertices;  // ball indices lying on some geodesic
};

inline GeodesicReport geodesics(const GammaBall& ball, int u, int v) {
  GeodesicReport rep;
  int dist = metric_d(ball.vertices[u], ball.vertices[v]);
  auto adj = ball.adjacency();
  std::function<long(int)> count = [&](int x) -> long {
    if (x == v) return 1;
    long total = 0;
    for (auto [w, e] : adj[x])
      if (metric_d(ball.vertices[w], ball.vertices[v]) ==
          metric_d(ball.vertices[x], ball.vertices[v]) - 1)
        total += count(w);
    return total;
  };
  rep.count = count(u);
  for (std::size_t x = 0; x < ball.vertices.size(); ++x)
    if (metric_d(ball.vertices[u], ball.vertices[x]) + metric_d(ball.vertices[x], ball.vertices[v]) ==
        dist)
      rep.cube_vertices.push_back((int)x);
  return rep;
}

struct HyperplaneReport {
  std::vector<int> edge_ids;
  Bitset side_base;     // vertices agreeing with the center on the label
  Bitset side_flipped;  // vertices differing from the center on the label
  bool disconnects_exactly = false;
};

inline HyperplaneReport hyperplane(const GammaBall& ball, int label) {
  require(label >= 0 && (std::size_t)label < ball.universe.size(), "unknown coset label");
  HyperplaneReport rep;
  rep.side_base = Bitset(ball.vertices.size());
  rep.side_flipped = Bitset(ball.vertices.size());
  for (std::size_t e = 0; e < ball.edges.size(); ++e)
    if (ball.edges[e].label == label) rep.edge_ids.push_back((int)e);
  for (std::size_t v = 0; v < ball.vertices.size(); ++v) {
    bool differs = ((ball.vertices[v].delta ^ ball.center.delta) >> label) & 1;
    (differs ? rep.side_flipped : rep.side_base).set(v);
  }
  detail::UnionFind uf(ball.vertices.size());
  std::set<int> removed(rep.edge_ids.begin(), rep.edge_ids.end());
  for (std::size_t e = 0; e < ball.edges.size(); ++e)
    if (!removed.count((int)e)) uf.unite(ball.edges[e].u, ball.edges[e].v);
  rep.disconnects_exactly = true;
  for (std::size_t u = 0; u < ball.vertices.size(); ++u)
    for (std::size_t v = u + 1; v < ball.vertices.size(); ++v) {
      bool same_side = rep.side_base.test(u) == rep.side_base.test(v);
      if (same_side != (uf.find((int)u) == uf.find((int)v))) rep.disconnects_exactly = false;
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Half-space systems and the Sageev graph

struct HalfSpaceSystem {
  Graph graph;                            // the ambient arena graph
  std::vector<Cut> walls;                 // one chosen side per pair
  std::vector<std::string> labels;        // wall names (group words for orbit systems)
  std::vector<std::string> delta_labels;  // coset label the wall contributes to deltas
  std::vector<std::string> rejected;      // walls dropped for ambiguous inclusion
  std::optional<Arena> arena;             // present for orbit systems

  std::size_t size() const { return walls.size(); }
};

namespace detail {

// A pair of listed half-spaces is ambiguous when inclusion restricted to the
// interior disagrees with inclusion over the whole truncation.
inline bool ambiguous_pair(const Bitset& interior, const Bitset& x, const Bitset& y) {
  bool full = x.is_subset_of(y);
  bool restricted = ((x & interior) & ~y).none();
  return full != restricted;
}

}  // namespace detail

// Orbit system: the translates {gA} over the word list, deduplicated as
// pairs.  The delta label of the wall gA is the coset of g^-1.  Walls whose
// inclusion relations are truncation-ambiguous are rejected by name, deepest
// coboundary first.
inline HalfSpaceSystem half_space_system(const Arena& arena, const Cut& base_cut,
                                         const std::vector<std::string>& words) {
  HalfSpaceSystem sys;
  sys.graph = arena.graph;
  sys.arena = arena;
  std::set<Bitset> seen;
  auto key = [&](const Cut& c) {
    Bitset x = c.inside(), y = ~c.inside();
    return x < y ? x : y;
  };
  for (auto& g : words) {
    try {
      Cut img = arena.act_left_cut(g, base_cut);
      if (!seen.insert(key(img)).second) continue;
      sys.walls.push_back(img);
      sys.labels.push_back(display_id(arena.oracle.normalize(g)));
      sys.delta_labels.push_back(display_id(arena.oracle.coset_canon(arena.oracle.inverse(g))));
    } catch (const truncation_error&) {
    }
  }
  require(!sys.walls.empty(), "no wall translates survive inside the truncation");

  // drop ambiguous walls, deepest coboundary first, until the inclusion
  // oracle is exact
  auto depth = [&](const Cut& c) {
    int d = 0;
    for (int e : coboundary(arena.graph, c))
      d = std::max({d, arena.level[arena.graph.edge(e).u], arena.level[arena.graph.edge(e).v]});
    return d;
  };
  auto find_ambiguous = [&]() -> std::optional<std::pair<std::size_t, std::size_t>> {
    for (std::size_t i = 0; i < sys.size(); ++i)
      for (std::size_t j = 0; j < sys.size(); ++j) {
        if (i == j) continue;
        for (bool si : {true, false})
          for (bool sj : {true, false}) {
            Bitset x = si ? sys.walls[i].inside() : ~sys.walls[i].inside();
            Bitset y = sj ? sys.walls[j].inside() : ~sys.walls[j].inside();
            if (detail::ambiguous_pair(arena.interior, x, y)) return std::make_pair(i, j);
          }
      }
    return std::nullopt;
  };
  while (auto pair = find_ambiguous()) {
    auto [i, j] = *pair;
    std::size_t victim = depth(sys.walls[i]) >= depth(sys.walls[j]) ? i : j;
    sys.rejected.push_back(sys.labels[victim]);
    sys.walls.erase(sys.walls.begin() + (long)victim);
    sys.labels.erase(sys.labels.begin() + (long)victim);
    sys.delta_labels.erase(sys.delta_labels.begin() + (long)victim);
  }
  require(!sys.walls.empty(), "every wall translate was truncation-ambiguous");
  require(sys.size() <= (std::size_t)(16 * guard_scale()), "too many wall pairs");
  return sys;
}

// Explicit system from named cuts, for combinatorial fixtures.
inline HalfSpaceSystem explicit_half_space_system(const Graph& g, std::vector<Cut> walls,
                                                  std::vector<std::string> labels) {
  require(walls.size() == labels.size(), "one label per wall");
  require(walls.size() <= (std::size_t)(16 * guard_scale()), "too many wall pairs");
  HalfSpaceSystem sys;
  sys.graph = g;
  sys.walls = std::move(walls);
  sys.labels = labels;
  sys.delta_labels = std::move(labels);
  for (auto& w : sys.walls) {
    w.check_graph(g);
    require(w.is_proper(), "half-spaces must be proper");
  }
  return sys;
}

// All orientations satisfying the Sageev conditions: exactly one side per
// pair, and upward closure under inclusion, which for a complement-closed
// family is pairwise intersection of the chosen sides.
struct SageevGraph {
  HalfSpaceSystem system;
  std::vector<OrientationMask> vertices;  // sorted
  struct Edge {
    int u, v;
    int wall;
  };
  std::vector<Edge> edges;
  std::vector<int> component;
  std::vector<int> principal;  // per graph vertex: index of V_g
  int principal_component = -1;

  int find(OrientationMask m) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), m);
    require(it != vertices.end() && *it == m, "orientation is not a Sageev vertex");
    return (int)(it - vertices.begin());
  }

  bool in_principal_component(int v) const { return component[v] == principal_component; }
};

inline SageevGraph sageev_vertices(const HalfSpaceSystem& sys) {
  require(sys.size() <= (std::size_t)(16 * guard_scale()), "too many wall pairs");
  int m = (int)sys.size();
  std::vector<Bitset> rep(m), comp(m);
  for (int w = 0; w < m; ++w) {
    rep[w] = sys.walls[w].inside();
    comp[w] = ~rep[w];
  }
  SageevGraph out;
  out.system = sys;
  for (OrientationMask mask = 0; mask < (1ull << m); ++mask) {
    bool ok = true;
    for (int i = 0; i < m && ok; ++i)
      for (int j = i + 1; j < m && ok; ++j) {
        const Bitset& a = ((mask >> i) & 1) ? rep[i] : comp[i];
        const Bitset& b = ((mask >> j) & 1) ? rep[j] : comp[j];
        if (!a.intersects(b)) ok = false;
      }
    if (ok) out.vertices.push_back(mask);
  }
  detail::UnionFind uf(out.vertices.size());
  for (std::size_t v = 0; v < out.vertices.size(); ++v)
    for (int w = 0; w < m; ++w) {
      OrientationMask flip = out.vertices[v] ^ (1ull << w);
      if (flip > out.vertices[v]) {
        auto it = std::lower_bound(out.vertices.begin(), out.vertices.end(), flip);
        if (it != out.vertices.end() && *it == flip) {
          int o = (int)(it - out.vertices.begin());
          out.edges.push_back({(int)v, o, w});
          uf.unite((int)v, o);
        }
      }
    }
  out.component.resize(out.vertices.size());
  for (std::size_t v = 0; v < out.vertices.size(); ++v) out.component[v] = uf.find((int)v);

  for (std::size_t x = 0; x < sys.graph.vertex_count(); ++x) {
    OrientationMask mk = 0;
    for (int w = 0; w < m; ++w)
      if (sys.walls[w].contains((int)x)) mk |= 1ull << w;
    out.principal.push_back(out.find(mk));
  }
  out.principal_component = out.component[out.principal[0]];
  for (int p : out.principal)
    check_internal(out.component[p] == out.principal_component,
                   "principal vertices fall into different components");
  return out;
}

inline LabelUniverse wall_universe(const HalfSpaceSystem& sys) {
  LabelUniverse u;
  u.labels = sys.delta_labels;
  return u;
}

// A_V = {x | x^-1 A in V}: the metric point whose delta names the walls
// where V differs from the principal vertex of the base coset.
struct VertexPointReport {
  MetricPoint point;
  bool principal_component = true;
};

inline VertexPointReport vertex_to_set(const SageevGraph& sg, int vertex) {
  int base_vertex = sg.system.arena ? sg.system.arena->base : sg.system.graph.base_or_default();
  OrientationMask base_mask = sg.vertices[sg.principal[base_vertex]];
  VertexPointReport rep;
  rep.point.delta = sg.vertices[vertex] ^ base_mask;
  rep.principal_component = sg.in_principal_component(vertex);
  return rep;
}

// ---------------------------------------------------------------------------
// Z-trees from 0-hyperbolic integer metrics

struct ZTree {
  int point_count = 0;  // input points are nodes 0..point_count-1
  std::vector<std::vector<std::pair<int, int>>> adj;  // (node, integer length)
  std::vector<std::vector<int>> dist;

  std::size_t node_count() const { return adj.size(); }

  std::vector<int> high_degree_nodes() const {  // the degree > 2 skeleton
    std::vector<int> out;
    for (std::size_t v = 0; v < adj.size(); ++v)
      if (adj[v].size() > 2) out.push_back((int)v);
    return out;
  }
};

namespace detail {

inline void ztree_recompute_dist(ZTree& t) {
  std::size_t n = t.adj.size();
  t.dist.assign(n, std::vector<int>(n, 0));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<int> order{(int)s};
    std::vector<char> seen(n, 0);
    seen[s] = 1;
    for (std::size_t i = 0; i < order.size(); ++i)
      for (auto [w, len] : t.adj[order[i]])
        if (!seen[w]) {
          seen[w] = 1;
          t.dist[s][w] = t.dist[s][order[i]] + len;
          order.push_back(w);
        }
  }
}

}  // namespace detail

// The unique Z-tree containing the given integer metric, built by iterative
// insertion along Gromov products from the first point.  Inputs must satisfy
// the 4-point condition and have even triangle perimeters; both are checked
// with witnesses.
inline ZTree build_z_tree(const std::vector<std::vector<int>>& d) {
  std::size_t n = d.size();
  require(n >= 1, "need at least one point");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      require(d[i][j] == d[j][i], "metric is not symmetric");
      require((i == j) == (d[i][j] == 0), "metric has coincident or degenerate points");
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        require((d[i][j] + d[j][k] + d[i][k]) % 2 == 0,
                "odd triangle perimeter: no Z-tree embeds these points");
        require(d[i][k] <= d[i][j] + d[j][k], "triangle inequality fails");
      }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t e = 0; e < n; ++e) {
          int bc = d[a][b] + d[a][c] - d[b][c];
          int bd = d[a][b] + d[a][e] - d[b][e];
          int cd = d[a][c] + d[a][e] - d[c][e];
          if (bc < std::min(bd, cd))
            throw precondition_error("metric is not 0-hyperbolic; witness quadruple (" +
                                     std::to_string(a) + "," + std::to_string(b) + "," +
                                     std::to_string(c) + "," + std::to_string(e) + ")");
        }

  ZTree t;
  t.point_count = (int)n;
  t.adj.resize(n);
  // distances from every node (point or steiner) to every input point
  std::vector<std::vector<int>> to_point;
  for (std::size_t i = 0; i < n; ++i) to_point.push_back(d[i]);

  auto link = [&](int u, int v, int len) {
    t.adj[u].push_back({v, len});
    t.adj[v].push_back({u, len});
  };
  auto unlink = [&](int u, int v) {
    auto& row = t.adj[u];
    for (std::size_t i = 0; i < row.size(); ++i)
      if (row[i].first == v) {
        row.erase(row.begin() + (long)i);
        return;
      }
  };

  for (std::size_t x = 1; x < n; ++x) {
    if (x == 1) {
      link(0, 1, d[0][1]);
      continue;
    }
    // deepest Gromov product from the base point picks the attachment depth
    int alpha = -1, best = -1;
    for (std::size_t u = 0; u < x; ++u) {
      int gp = (d[0][x] + d[0][u] - d[u][x]) / 2;
      if (gp > alpha) {
        alpha = gp;
        best = (int)u;
      }
    }
    // walk from the base toward `best`, splitting an edge if alpha falls
    // inside one
    int prev = -1, cur = 0, depth = 0, attach = -1;
    while (attach < 0) {
      if (depth == alpha) {
        attach = cur;
        break;
      }
      int next = -1, len = 0;
      for (auto [w, l] : t.adj[cur])
        if (w != prev && to_point[w][best] == to_point[cur][best] - l) {
          next = w;
          len = l;
          break;
        }
      check_internal(next >= 0, "walk toward the attachment point failed");
      if (depth + len > alpha) {
        int off = alpha - depth;
        int s = (int)t.adj.size();
        t.adj.push_back({});
        unlink(cur, next);
        unlink(next, cur);
        link(cur, s, off);
        link(s, next, len - off);
        std::vector<int> row(n, 0);
        for (std::size_t p = 0; p < n; ++p)
          row[p] = std::min(to_point[cur][p] + off, to_point[next][p] + (len - off));
        to_point.push_back(std::move(row));
        attach = s;
      } else {
        depth += len;
        prev = cur;
        cur = next;
      }
    }
    int tail = d[0][x] - alpha;
    if (tail == 0) {
      // the new point sits exactly on an existing steiner node: splice it in
      check_internal(attach >= (int)n, "distinct input points collapse in the tree");
      for (auto [w, l] : t.adj[attach]) {
        unlink(w, attach);
        link((int)x, w, l);
      }
      t.adj[attach].clear();
      to_point[attach] = d[x];  // dead node, kept in place to preserve indices
    } else {
      link(attach, (int)x, tail);
    }
  }

  // drop dead steiner nodes left by splices
  {
    std::vector<int> remap(t.adj.size(), -1);
    std::vector<std::vector<std::pair<int, int>>> fresh;
    for (std::size_t v = 0; v < t.adj.size(); ++v)
      if (v < n || !t.adj[v].empty()) {
        remap[v] = (int)fresh.size();
        fresh.push_back(t.adj[v]);
      }
    for (auto& row : fresh)
      for (auto& [w, l] : row) w = remap[w];
    t.adj = std::move(fresh);
  }

  detail::ztree_recompute_dist(t);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      check_internal(t.dist[i][j] == d[i][j], "tree distances disagree with the input metric");
  return t;
}

inline ZTree build_z_tree(const std::vector<MetricPoint>& pts) {
  std::vector<std::vector<int>> d(pts.size(), std::vector<int>(pts.size(), 0));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) d[i][j] = metric_d(pts[i], pts[j]);
  return build_z_tree(d);
}

// ---------------------------------------------------------------------------
// From a tree with a sampled group action back to an almost invariant set:
// A = {g | e points at g.v}, with the H-finiteness of every A + Ax certified
// on the samples.

struct AlmostInvariantReport {
  Cut set;  // G[e, v] as a set of sampled cosets
  bool proper = false;
  struct GeneratorDifference {
    std::string generator;
    int undefined = 0;  // samples whose right translate leaves the truncation
    FinitenessReport finiteness;
  };
  std::vector<GeneratorDifference> differences;
  bool right_stabilized = true;  // A k = A for sampled k fixing v
  bool left_stabilized = true;   // h A = A for sampled h fixing e
  int skipped_samples = 0;       // g whose tree action is truncated away
};

// e is the wall `wall` directed toward its `toward_rep` side: e points at an
// orientation u iff u chooses that side.  Membership of g is decided through
// the pulled-back wall: e points at g.v iff v chooses g^-1(tau side of e).
inline AlmostInvariantReport tree_to_almost_invariant(const Arena& arena, const StructureTree& tree,
                                                      int wall, bool toward_rep, int vertex,
                                                      const std::vector<std::string>& samples) {
  require(wall >= 0 && (std::size_t)wall < tree.system.size(), "unknown wall");
  require(vertex >= 0 && (std::size_t)vertex < tree.vertices.size(), "unknown tree vertex");
  AlmostInvariantReport rep;
  Bitset bits(arena.graph.vertex_count());
  Bitset assigned(arena.graph.vertex_count());
  Cut tau = tree.half_space(wall, toward_rep);
  auto preimage = tree.nu_preimage(vertex);

  std::vector<std::string> k_sample, h_sample;  // stabilizers of v and of e
  for (auto& g : samples) {
    std::optional<bool> pointed_at;
    if (!preimage.empty()) {
      // e -> g.nu(x0) iff g x0 lands in the tau side
      if (auto img = arena.act_vertex_left(g, preimage[0])) pointed_at = tau.contains(*img);
    } else {
      try {
        Cut pulled = arena.act_left_cut(arena.oracle.inverse(g), tau);
        if (auto j = tree.system.find_pair(pulled)) {
          bool pulled_is_rep = pulled == tree.system.reps[*j];
          pointed_at = ((((tree.vertices[vertex] >> *j) & 1) != 0) == pulled_is_rep);
        }
      } catch (const truncation_error&) {
      }
    }
    auto coset = arena.vertex_of(g);
    if (!pointed_at || !coset) {
      ++rep.skipped_samples;
      continue;
    }
    if (assigned.test(*coset))
      check_internal(bits.test(*coset) == *pointed_at,
                     "samples in one coset disagree about membership");
    assigned.set(*coset);
    if (*pointed_at) bits.set(*coset);

    // sampled stabilizers: g fixes v when its wall action preserves the
    // orientation wherever defined; g fixes e when it maps the tau side to
    // itself
    auto wa = wall_action(arena, tree.system, g);
    bool fixes_v = true, any = false;
    for (std::size_t i = 0; i < tree.system.size(); ++i) {
      if (!wa[i]) continue;
      any = true;
      bool chose_rep = (tree.vertices[vertex] >> i) & 1;
      bool image_rep = chose_rep == wa[i]->second;
      if ((((tree.vertices[vertex] >> wa[i]->first) & 1) != 0) != image_rep) fixes_v = false;
    }
    if (any && fixes_v) k_sample.push_back(g);
    if (wa[wall] && wa[wall]->first == wall && wa[wall]->second) h_sample.push_back(g);
  }
  rep.set = Cut(arena.graph, bits);
  rep.proper = bits.any() && (assigned & ~bits).any();

  // A + Ax is H-finite for every generator x: membership of A.x is decided
  // by pullback, and the difference is counted only where the pullback is
  // certain, so truncation noise never inflates it
  for (char x : arena.oracle.letters_with_inverses(arena.s_letters)) {
    AlmostInvariantReport::GeneratorDifference gd;
    gd.generator = std::string(1, x);
    auto rt = arena.right_translate(gd.generator, rep.set);
    gd.undefined = (int)rt.uncertain.count();
    Bitset diff = (bits ^ rt.set.inside()) & ~rt.uncertain & assigned;
    gd.finiteness = arena.h_finiteness_of_vertices(diff);
    rep.differences.push_back(std::move(gd));
  }

  // A(v)K = A(v) and H G[e,v] = G[e,v] on the sampled stabilizers
  for (auto& k : k_sample)
    for (auto v : bits.bits()) {
      auto img = arena.act_vertex_right(k, (int)v);
      if (img && !bits.test(*img)) rep.right_stabilized = false;
    }
  for (auto& h : h_sample)
    for (auto v : bits.bits()) {
      auto img = arena.act_vertex_left(h, (int)v);
      if (img && !bits.test(*img)) rep.left_stabilized = false;
    }
  return rep;
}

}  // namespace cutforest
