#pragma once

#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cutforest/cubing.hpp"
#include "cutforest/decomposition.hpp"
#include "cutforest/fixtures.hpp"
#include "cutforest/relative.hpp"

namespace cutforest {
namespace verify {

struct CheckLine {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string name;
  std::vector<CheckLine> lines;

  bool passed() const {
    for (auto& l : lines)
      if (!l.passed) return false;
    return true;
  }

  void add(const std::string& n, bool ok, const std::string& detail = "") {
    lines.push_back({n, ok, detail});
  }
};

namespace detail {

inline Bitset pair_key(const Cut& c) {
  Bitset a = c.inside(), b = ~c.inside();
  return a < b ? a : b;
}

inline std::vector<std::pair<Graph, std::string>> corpus_with_names(uint64_t seed) {
  std::vector<std::pair<Graph, std::string>> out;
  int i = 0;
  for (auto& g : fixtures::corpus(seed))
    out.emplace_back(g, "corpus[" + std::to_string(i++) + "]");
  return out;
}

inline std::string expr_fingerprint(const CanonicalExpression& e) {
  std::ostringstream os;
  for (std::size_t v = 0; v < e.a_side.size(); ++v) os << (e.a_side.test(v) ? 'A' : '*');
  os << '|' << to_string(e.form) << '|';
  for (auto& [w, s] : e.members) os << w << (s ? '+' : '-') << ' ';
  return os.str();
}

// every admissible twig order must yield the identical expression
inline std::set<std::string> all_twig_orders(const Cut& a, const NestedSystem& sys,
                                             const StructureTree& tree) {
  std::set<std::string> results;
  std::vector<std::size_t> path;
  while (true) {
    std::vector<std::size_t> sizes;
    std::size_t call = 0;
    auto policy = [&](const std::vector<OrientedMember>& choices) {
      std::size_t pick = call < path.size() ? path[call] : 0;
      if (call >= path.size()) path.push_back(0);
      sizes.push_back(choices.size());
      ++call;
      return choices[pick];
    };
    results.insert(expr_fingerprint(canonical_decomposition(a, sys, tree, policy)));
    while (!path.empty() && path.back() + 1 >= sizes[path.size() - 1]) path.pop_back();
    if (path.empty()) break;
    ++path.back();
  }
  return results;
}

// branch cut of an arena: the vertices whose representative starts with the
// given prefix
inline Cut prefix_cut(const Arena& a, const std::string& prefix) {
  Bitset b(a.graph.vertex_count());
  for (std::size_t v = 0; v < a.rep.size(); ++v)
    if (a.rep[v].rfind(prefix, 0) == 0 && !a.rep[v].empty()) b.set(v);
  return Cut(a.graph, b);
}

struct SweepConfig {
  std::string group;
  int radius;
};

inline std::vector<SweepConfig> crossing_fixtures() {
  return {{"dinf", 4}, {"f2", 3}, {"z2", 4}, {"bs-amalgam", 2}};
}

}  // namespace detail

// 1. structure-tree separation at levels 1..3 against exhaustive cut
// enumeration
inline SuiteReport suite_separation(uint64_t seed) {
  SuiteReport rep{"separation", {}};
  auto graphs = detail::corpus_with_names(seed);
  for (auto& [g, name] : graphs) {
    bool ok = true;
    std::string why;
    for (int n = 1; n <= 3 && ok; ++n) {
      auto t = structure_tree(g, n);
      auto cuts = enumerate_cuts(g, n, false);
      for (std::size_t x = 0; x < g.vertex_count() && ok; ++x)
        for (std::size_t y = x + 1; y < g.vertex_count() && ok; ++y) {
          bool separated = false;
          for (auto& c : cuts)
            if (separates(g, c, (int)x, (int)y)) separated = true;
          if ((t.nu[x] == t.nu[y]) != !separated) {
            ok = false;
            why = "level " + std::to_string(n) + " pair " + g.id((int)x) + "," + g.id((int)y);
          }
        }
    }
    rep.add(name, ok, why);
  }
  return rep;
}

// 2. nested-generator postconditions, each against an independent oracle
inline SuiteReport suite_nested_generators(uint64_t seed) {
  SuiteReport rep{"nested-generators", {}};
  for (auto& [g, name] : detail::corpus_with_names(seed)) {
    bool nested_ok = true, aut_ok = true, mono_ok = true, closure_ok = true;
    std::vector<std::set<Bitset>> levels;
    for (int n = 1; n <= 3; ++n) {
      auto sys = extract_nested_generators(g, n);
      for (std::size_t i = 0; i < sys.size(); ++i)
        for (std::size_t j = i + 1; j < sys.size(); ++j)
          if (!nested(sys.reps[i], sys.reps[j])) nested_ok = false;
      std::set<Bitset> keys;
      for (auto& c : sys.reps) keys.insert(detail::pair_key(c));
      for (auto& p : automorphisms(g))
        for (auto& c : sys.reps)
          if (!keys.count(detail::pair_key(apply_permutation(p, c)))) aut_ok = false;
      // the genuine ring-closure fixpoint, independent of the fiber shortcut
      // used inside the extraction
      auto closure = ring_closure(g, sys.reps);
      std::set<Bitset> closure_set;
      for (auto& c : closure) closure_set.insert(c.inside());
      for (auto& c : enumerate_cuts(g, n, false))
        if (!closure_set.count(c.inside())) closure_ok = false;
      levels.push_back(keys);
    }
    for (int n = 0; n + 1 < (int)levels.size(); ++n)
      for (auto& k : levels[n])
        if (!levels[n + 1].count(k)) mono_ok = false;
    rep.add(name + " nested", nested_ok);
    rep.add(name + " invariant", aut_ok);
    rep.add(name + " monotone", mono_ok);
    rep.add(name + " closure", closure_ok);
  }
  return rep;
}

// 3. canonical decomposition round trip, twig independence, equivariance
inline SuiteReport suite_decomposition(uint64_t) {
  SuiteReport rep{"decomposition", {}};
  struct Case {
    Graph g;
    int n;
    std::string name;
  };
  std::vector<Case> cases = {{fixtures::path4(), 3, "path4@3"}, {fixtures::barbell(), 1, "barbell@1"},
                             {fixtures::c4(), 2, "c4@2"},       {fixtures::c6(), 2, "c6@2"},
                             {fixtures::grid2x3(), 2, "grid2x3@2"}};
  for (auto& [g, n, name] : cases) {
    auto sys = extract_nested_generators(g, n);
    auto tree = build_tree(sys);
    auto auts = automorphisms(g);
    bool round_ok = true, twig_ok = true, equi_ok = true;
    for (auto& a : ring_closure(g, sys.reps)) {
      auto e = canonical_decomposition(a, sys, tree);
      if (!(evaluate_expression(e, tree) == a)) round_ok = false;
      if (detail::all_twig_orders(a, sys, tree).size() != 1) twig_ok = false;
      for (auto& p : auts) {
        auto tp = induced_tree_automorphism(tree, p);
        auto ep = canonical_decomposition(apply_permutation(p, a), sys, tree);
        for (std::size_t v = 0; v < tree.vertices.size(); ++v)
          if (ep.a_side.test(tp[v]) != e.a_side.test(v)) equi_ok = false;
      }
    }
    rep.add(name + " round-trip", round_ok);
    rep.add(name + " twig-order", twig_ok);
    rep.add(name + " equivariance", equi_ok);
  }
  return rep;
}

// 4. crossing-cut sweep: sum identities and a nested verdict on every run
inline SuiteReport suite_crossing(uint64_t) {
  SuiteReport rep{"crossing", {}};
  for (auto& cfg : detail::crossing_fixtures()) {
    Arena a = build_fixture_arena(cfg.group, cfg.radius);
    auto rs = relative_nested_system(a, 1);
    auto words = a.oracle.ball(3, a.oracle.letters_with_inverses(a.s_letters));
    long runs = 0, failures = 0;
    for (auto& wa : rs.system.reps)
      for (auto& wb : rs.system.reps)
        for (Cut A : {wa, wa.complement()})
          for (Cut B : {wb, wb.complement()})
            for (auto& g : words) {
              CrossingCase cc;
              try {
                cc = crossing_case(a, A, B, g);
              } catch (const precondition_error&) {
                continue;
              } catch (const truncation_error&) {
                continue;
              } catch (const internal_error&) {
                ++runs;
                ++failures;
                continue;
              }
              ++runs;
              if (!cc.sums_hold() || !cc.nested) ++failures;
            }
    rep.add(cfg.group, failures == 0 && runs > 0,
            std::to_string(runs) + " runs, " + std::to_string(failures) + " failures");
  }
  return rep;
}

// 5. Kropholler corner finiteness, monotone in the radius
inline SuiteReport suite_kropholler(uint64_t) {
  SuiteReport rep{"kropholler", {}};
  struct Config {
    std::string group, a_prefix, b_prefix;
    bool b_complement;  // take the complement of the b-prefix branch
  };
  std::vector<Config> configs = {{"dinf", "t", "s", false},
                                 {"f2", "bb", "B", true},
                                 {"z2", "yy", "Y", true},
                                 {"bs-amalgam", "ab", "b", false}};
  for (auto& cfg : configs) {
    std::vector<long> totals;
    bool all_conclusive_when_interior = true;
    long runs = 0, nonempty = 0;
    for (int r : {4, 5, 6}) {
      Arena a = build_fixture_arena(cfg.group, r);
      Cut A = detail::prefix_cut(a, cfg.a_prefix);
      Cut B = detail::prefix_cut(a, cfg.b_prefix);
      if (cfg.b_complement) B = B.complement();
      auto words = a.oracle.ball(3, a.oracle.letters_with_inverses(a.s_letters));
      long total = 0;
      for (auto& g : words) {
        CornerCertificate cert;
        try {
          cert = kropholler_corner(a, A, B, g);
        } catch (const error&) {
          continue;
        }
        ++runs;
        if (!cert.corner.is_empty()) ++nonempty;
        total += cert.finiteness.orbit_count;
        // the corner coboundary sits well inside the ball here, so the
        // verdict must be conclusive
        bool interior_ok = true;
        for (int e : coboundary(a.graph, cert.corner))
          if (!a.edge_is_interior(e)) interior_ok = false;
        if (interior_ok && !cert.finiteness.conclusive) all_conclusive_when_interior = false;
      }
      totals.push_back(total);
    }
    bool monotone = totals[0] <= totals[1] && totals[1] <= totals[2];
    rep.add(cfg.group + " conclusive", all_conclusive_when_interior && runs > 0 && nonempty > 0,
            std::to_string(runs) + " runs, " + std::to_string(nonempty) + " nonempty corners");
    rep.add(cfg.group + " monotone", monotone,
            std::to_string(totals[0]) + " <= " + std::to_string(totals[1]) + " <= " +
                std::to_string(totals[2]));
  }
  return rep;
}

// 6. the amalgam's relative tree: diameter two, middle vertex H-stabilized
inline SuiteReport suite_relative_shape(uint64_t) {
  SuiteReport rep{"relative-shape", {}};
  Arena a = build_fixture_arena("bs-amalgam", 2);
  auto rs = relative_nested_system(a, 1);
  int diameter = 0;
  for (std::size_t u = 0; u < rs.tree.vertices.size(); ++u)
    for (std::size_t v = u + 1; v < rs.tree.vertices.size(); ++v)
      diameter = std::max(diameter, (int)rs.tree.path_between((int)u, (int)v).size());
  rep.add("diameter two", diameter == 2, "diameter " + std::to_string(diameter));

  int mid = rs.base_vertex();
  bool stabilized = true;
  for (auto& h : a.h_ball) {
    auto wa = wall_action(a, rs.system, h);
    for (std::size_t i = 0; i < rs.system.size(); ++i) {
      if (!wa[i]) continue;
      bool chose_rep = (rs.tree.vertices[mid] >> i) & 1;
      bool image_rep = chose_rep == wa[i]->second;
      if ((((rs.tree.vertices[mid] >> wa[i]->first) & 1) != 0) != image_rep) stabilized = false;
    }
  }
  rep.add("middle vertex H-stabilized", stabilized);
  return rep;
}

// 7. gamma geometry: factorial geodesic counts, cube vertices, hyperplanes
inline SuiteReport suite_gamma(uint64_t) {
  SuiteReport rep{"gamma", {}};
  auto universe = [](int n) {
    LabelUniverse u;
    for (int i = 1; i <= n; ++i) u.labels.push_back(std::to_string(i));
    return u;
  };
  for (int n = 2; n <= 4; ++n) {
    auto ball = gamma_ball(MetricPoint{0}, n, universe(n + 2));
    auto g = geodesics(ball, ball.find(MetricPoint{0}), ball.find(MetricPoint{(1ull << n) - 1}));
    long fact = 1;
    for (int k = 2; k <= n; ++k) fact *= k;
    rep.add("n=" + std::to_string(n) + " geodesics", g.count == fact,
            std::to_string(g.count) + " of " + std::to_string(fact));
    rep.add("n=" + std::to_string(n) + " cube", (long)g.cube_vertices.size() == (1l << n));
  }
  bool hp_ok = true;
  for (int n = 1; n <= 3; ++n)
    for (int r = 1; r <= 3; ++r) {
      auto ball = gamma_ball(MetricPoint{0}, r, universe(n));
      for (int label = 0; label < n; ++label)
        if (!hyperplane(ball, label).disconnects_exactly) hp_ok = false;
    }
  rep.add("hyperplanes disconnect", hp_ok);
  return rep;
}

// 8. the Sageev isomorphism on fixture systems
inline SuiteReport suite_sageev(uint64_t) {
  SuiteReport rep{"sageev", {}};

  auto check_system = [&](const std::string& name, const HalfSpaceSystem& sys) {
    auto sg = sageev_vertices(sys);
    // distances within the principal component
    std::vector<int> comp;
    for (std::size_t v = 0; v < sg.vertices.size(); ++v)
      if (sg.in_principal_component((int)v)) comp.push_back((int)v);
    // BFS over component edges
    std::map<int, std::map<int, int>> dist;
    for (int s : comp) {
      std::map<int, int> d{{s, 0}};
      std::vector<int> q{s};
      for (std::size_t i = 0; i < q.size(); ++i)
        for (auto& e : sg.edges) {
          int a = -1, b = -1;
          if (e.u == q[i]) a = e.u, b = e.v;
          if (e.v == q[i]) a = e.v, b = e.u;
          if (a >= 0 && sg.in_principal_component(b) && !d.count(b)) {
            d[b] = d[a] + 1;
            q.push_back(b);
          }
        }
      dist[s] = std::move(d);
    }
    bool injective = true, adjacency = true, distances = true;
    std::set<uint64_t> seen;
    for (int v : comp) {
      auto p = vertex_to_set(sg, v);
      if (!seen.insert(p.point.delta).second) injective = false;
      if (!p.principal_component) injective = false;
    }
    for (int u : comp)
      for (int v : comp) {
        int graph_d = dist[u].count(v) ? dist[u][v] : -1;
        int metric = metric_d(vertex_to_set(sg, u).point, vertex_to_set(sg, v).point);
        if (graph_d != metric) distances = false;
        if ((graph_d == 1) != (metric == 1)) adjacency = false;
      }
    rep.add(name + " injective", injective);
    rep.add(name + " adjacency", adjacency);
    rep.add(name + " distances", distances);

    bool all_nested = true;
    for (std::size_t i = 0; i < sys.size(); ++i)
      for (std::size_t j = i + 1; j < sys.size(); ++j)
        if (!nested(sys.walls[i], sys.walls[j])) all_nested = false;
    if (all_nested) {
      // principal component must be a tree
      std::set<int> cedges;
      for (std::size_t e = 0; e < sg.edges.size(); ++e)
        if (sg.in_principal_component(sg.edges[e].u)) cedges.insert((int)e);
      rep.add(name + " tree", cedges.size() + 1 == comp.size());
    }
  };

  {
    Arena a = build_fixture_arena("z", 4);
    Bitset half(a.graph.vertex_count());
    for (std::size_t v = 0; v < a.rep.size(); ++v)
      if (a.rep[v].empty() || a.rep[v][0] == 'T') half.set(v);
    check_system("z", half_space_system(a, Cut(a.graph, half),
                                        a.oracle.ball(3, a.oracle.letters_with_inverses(a.s_letters))));
  }
  {
    Arena a = build_fixture_arena("dinf", 4, std::vector<std::string>{});
    Bitset half(a.graph.vertex_count());
    for (std::size_t v = 0; v < a.rep.size(); ++v)
      if (a.rep[v].empty() || a.rep[v][0] == 's') half.set(v);
    check_system("dinf", half_space_system(a, Cut(a.graph, half),
                                           a.oracle.ball(3, a.oracle.letters_with_inverses(a.s_letters))));
  }
  {
    Arena a = build_fixture_arena("f2", 3, std::vector<std::string>{});
    Bitset cone(a.graph.vertex_count());
    for (std::size_t v = 0; v < a.rep.size(); ++v)
      if (!a.rep[v].empty() && a.rep[v][0] == 'a') cone.set(v);
    check_system("f2", half_space_system(a, Cut(a.graph, cone),
                                         a.oracle.ball(2, a.oracle.letters_with_inverses(a.s_letters))));
  }
  {
    Arena a = build_fixture_arena("z2", 3, std::vector<std::string>{});
    Bitset xh(a.graph.vertex_count()), yh(a.graph.vertex_count());
    for (std::size_t v = 0; v < a.rep.size(); ++v) {
      if (a.rep[v].find('X') != std::string::npos) xh.set(v);
      if (a.rep[v].find('Y') != std::string::npos) yh.set(v);
    }
    check_system("z2-square",
                 explicit_half_space_system(a.graph, {Cut(a.graph, xh), Cut(a.graph, yh)},
                                            {"x-half", "y-half"}));
  }
  return rep;
}

// 9. zero hyperbolicity and the Z-tree on fixture orbits
inline SuiteReport suite_ztree(uint64_t seed) {
  SuiteReport rep{"ztree", {}};
  auto orbit_points = [](const Arena& a, const Cut& half, const std::vector<std::string>& words) {
    std::vector<MetricPoint> pts;
    for (auto& w : words) {
      auto rt = a.right_translate(w, half);
      uint64_t delta = 0;
      Bitset diff = (rt.set.inside() ^ half.inside()) & ~rt.uncertain;
      for (auto v : diff.bits()) delta |= 1ull << v;
      pts.push_back({delta});
    }
    return pts;
  };

  struct Fx {
    std::string name;
    char neg;
    std::vector<std::string> words;  // right translations along the line
  };
  for (auto& fx : {Fx{"z", 'T', {"TT", "T", "", "t", "tt"}},
                   Fx{"dinf", 's', {"stst", "st", "", "ts", "tsts"}}}) {
    Arena a = build_fixture_arena(fx.name, 5, std::vector<std::string>{});
    Bitset half(a.graph.vertex_count());
    for (std::size_t v = 0; v < a.rep.size(); ++v)
      if (a.rep[v].empty() || a.rep[v][0] == fx.neg) half.set(v);
    auto pts = orbit_points(a, Cut(a.graph, half), fx.words);
    auto hv = zero_hyperbolicity_check(pts);
    rep.add(fx.name + " 0-hyperbolic", hv.ok);

    bool exact = true, invariant = true;
    auto t0 = build_z_tree(pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (t0.dist[i][j] != metric_d(pts[i], pts[j])) exact = false;
    fixtures::Rng rng(seed + 99);
    for (int round = 0; round < 10; ++round) {
      std::vector<int> perm(pts.size());
      for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = (int)i;
      for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below((int)i)]);
      std::vector<MetricPoint> shuffled;
      for (int i : perm) shuffled.push_back(pts[i]);
      auto t = build_z_tree(shuffled);
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j)
          if (t.dist[i][j] != metric_d(shuffled[i], shuffled[j])) invariant = false;
    }
    rep.add(fx.name + " re-measures", exact);
    rep.add(fx.name + " order-invariant", invariant);
  }
  return rep;
}

// 10. the round trip tree -> almost invariant set -> Sageev tree
inline SuiteReport suite_roundtrip(uint64_t) {
  SuiteReport rep{"roundtrip", {}};
  for (auto& name : {std::string("z"), std::string("dinf")}) {
    Arena a = build_fixture_arena(name, 4, std::vector<std::string>{});
    auto rs = relative_nested_system(a, 1);
    // wall adjacent to the base, directed away from it
    int wall = -1;
    for (std::size_t w = 0; w < rs.system.size(); ++w) {
      auto cb = coboundary(a.graph, rs.system.reps[w]);
      for (int e : cb)
        if (a.graph.edge(e).u == a.base || a.graph.edge(e).v == a.base) wall = (int)w;
    }
    if (wall < 0) {
      rep.add(name, false, "no wall at the base");
      continue;
    }
    int v = rs.tree.nu[a.base];
    auto samples = a.oracle.ball(4, a.oracle.letters_with_inverses(a.s_letters));
    auto air = tree_to_almost_invariant(a, rs.tree, wall, true, v, samples);
    bool finite_ok = air.proper;
    for (auto& gd : air.differences)
      if (!gd.finiteness.conclusive || gd.finiteness.orbit_count > 4) finite_ok = false;
    rep.add(name + " H-finite differences", finite_ok);
    rep.add(name + " stabilized", air.right_stabilized && air.left_stabilized);

    // feed the sampled translates back through the Sageev construction
    auto sys = half_space_system(a, rs.system.reps[wall],
                                 a.oracle.ball(2, a.oracle.letters_with_inverses(a.s_letters)));
    auto sg = sageev_vertices(sys);
    bool tree_ok = sg.edges.size() + 1 == sg.vertices.size();
    int leaves = 0;
    for (std::size_t vx = 0; vx < sg.vertices.size(); ++vx) {
      int deg = 0;
      for (auto& e : sg.edges)
        if (e.u == (int)vx || e.v == (int)vx) ++deg;
      if (deg == 1) ++leaves;
    }
    tree_ok = tree_ok && leaves == 2;
    // every surviving wall is a wall of the original line tree
    std::set<Bitset> original;
    for (auto& c : rs.system.reps) original.insert(detail::pair_key(c));
    bool walls_match = true;
    for (auto& w : sys.walls)
      if (!original.count(detail::pair_key(w))) walls_match = false;
    rep.add(name + " line reproduced", tree_ok && walls_match,
            std::to_string(sg.vertices.size()) + " vertices");
  }
  return rep;
}

struct Criterion {
  int number;
  std::string title;
  std::string suite;
  std::function<SuiteReport(uint64_t)> run;
};

inline std::vector<Criterion> acceptance_criteria() {
  return {
      {1, "structure-tree separation", "separation", suite_separation},
      {2, "nested-generator properties", "nested-generators", suite_nested_generators},
      {3, "canonical decomposition", "decomposition", suite_decomposition},
      {4, "crossing-cut table", "crossing", suite_crossing},
      {5, "Kropholler corner", "kropholler", suite_kropholler},
      {6, "relative tree shape", "relative-shape", suite_relative_shape},
      {7, "gamma geometry", "gamma", suite_gamma},
      {8, "Sageev isomorphism", "sageev", suite_sageev},
      {9, "0-hyperbolicity and Z-tree", "ztree", suite_ztree},
      {10, "tree/almost-invariant round trip", "roundtrip", suite_roundtrip},
  };
}

inline std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (auto& c : acceptance_criteria()) out.push_back(c.suite);
  return out;
}

inline SuiteReport run_suite(const std::string& name, uint64_t seed) {
  for (auto& c : acceptance_criteria())
    if (c.suite == name || name == std::to_string(c.number)) return c.run(seed);
  throw precondition_error("unknown verify suite: " + name);
}

}  // namespace verify
}  // namespace cutforest
