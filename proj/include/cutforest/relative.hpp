#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cutforest/arena.hpp"
#include "cutforest/structure_tree.hpp"

namespace cutforest {

// A component C of the preimage of a quotient cut E, together with the
// component-lemma certificates gathered inside the truncation.
struct LiftedCut {
  Cut component;
  Cut quotient_cut;                             // E, oriented away from [o]
  int quotient_pair = -1;                       // wall index in the quotient system
  std::vector<std::string> stabilizer_sample;   // h with hC = C
};

// Lift a quotient cut to the components of its preimage and verify the
// component lemma on the sampled H-elements.  The quotient coboundary must
// lie in the exact region of the quotient.
inline std::vector<LiftedCut> lift_cut(const Arena& arena, const QuotientGraph& q, const Cut& e) {
  e.check_graph(q.graph);
  for (int qe : coboundary(q.graph, e)) {
    auto& ed = q.graph.edge(qe);
    if (q.q_level[ed.u] > q.interior_radius || q.q_level[ed.v] > q.interior_radius)
      throw truncation_error("quotient coboundary leaves the exact region; grow the radius");
  }
  Bitset pre = q.preimage(e, arena.graph.vertex_count());
  auto comps = components(arena.graph, pre);
  require(!comps.empty(), "quotient cut has an empty preimage");

  // the component lemma at desk scale: sampled translates of a component
  // stay inside the preimage, never straddle two components, and connect
  // every component into a single H-orbit
  detail::UnionFind orbit((int)comps.size());
  std::vector<std::vector<std::string>> stabilizers(comps.size());
  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    for (auto& h : arena.h_ball) {
      Bitset img(arena.graph.vertex_count());
      bool total = true;
      for (auto v : comps[ci].bits()) {
        auto iv = arena.act_vertex_left(h, (int)v);
        if (!iv) {
          total = false;
          continue;
        }
        img.set(*iv);
      }
      if (img.none()) continue;
      check_internal(img.is_subset_of(pre), "an H-translate of a component leaves the preimage");
      int hits = 0, target = -1;
      for (std::size_t cj = 0; cj < comps.size(); ++cj)
        if ((img & comps[cj]).any()) {
          ++hits;
          target = (int)cj;
        }
      check_internal(hits == 1, "translate straddles two components");
      orbit.unite((int)ci, target);
      if (total && img == comps[ci]) stabilizers[ci].push_back(h);
    }
  }
  for (std::size_t ci = 1; ci < comps.size(); ++ci)
    if (orbit.find((int)ci) != orbit.find(0))
      throw truncation_error(
          "sampled H-translates do not connect the lifted components; grow the radius");

  std::vector<LiftedCut> out;
  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    LiftedCut lc;
    lc.component = Cut(arena.graph, comps[ci]);
    lc.quotient_cut = e;
    lc.stabilizer_sample = std::move(stabilizers[ci]);
    // the complement of a lifted component must also be connected
    if (!side_connected(arena.graph, lc.component.complement()))
      throw truncation_error("component complement is disconnected inside the truncation");
    // the projection of the component coboundary is exactly the quotient
    // coboundary
    std::set<int> proj;
    for (int ae : coboundary(arena.graph, lc.component))
      if (q.edge_proj[ae] >= 0) proj.insert(q.edge_proj[ae]);
    std::set<int> qcb;
    for (int qe : coboundary(q.graph, e)) qcb.insert(qe);
    check_internal(proj == qcb, "component coboundary does not project onto the quotient coboundary");
    out.push_back(std::move(lc));
  }
  return out;
}

// the relative nested system over the arena plus its quotient scaffolding
struct RelativeSystem {
  Arena arena;
  QuotientGraph quotient;
  NestedSystem quotient_system;
  StructureTree quotient_tree;
  std::vector<LiftedCut> lifts;      // one per wall, same order as system.reps
  NestedSystem system;               // the lifted walls on the arena graph
  StructureTree tree;                // T-bar(H)
  std::vector<int> skipped_members;  // quotient walls whose lift is out of reach
  int level = 0;

  int base_vertex() const { return tree.nu[arena.base]; }
};

inline RelativeSystem relative_nested_system(const Arena& arena, int n) {
  RelativeSystem rs;
  rs.arena = arena;
  rs.level = n;
  rs.quotient = quotient_graph(arena);
  rs.quotient_system = extract_nested_generators(rs.quotient.graph, n, 16);
  rs.quotient_tree = build_tree(rs.quotient_system);

  std::vector<Cut> walls;
  for (std::size_t i = 0; i < rs.quotient_system.size(); ++i) {
    const Cut& e = rs.quotient_system.reps[i];
    std::vector<LiftedCut> lifted;
    try {
      lifted = lift_cut(arena, rs.quotient, e);
    } catch (const truncation_error&) {
      rs.skipped_members.push_back((int)i);
      continue;
    }
    for (auto& lc : lifted) {
      // membership requires at most n H-orbits in the coboundary
      auto fin = arena.h_finiteness_of_edges(coboundary(arena.graph, lc.component));
      check_internal(fin.orbit_count <= n, "lifted wall exceeds the H-orbit bound of its level");
      lc.quotient_pair = (int)i;
      walls.push_back(lc.component);
      rs.lifts.push_back(std::move(lc));
    }
  }
  rs.system = NestedSystem{arena.graph, walls, n};
  if (auto w = rs.system.crossing_witness())
    throw internal_error("lifted walls cross: members " + std::to_string(w->first) + " and " +
                         std::to_string(w->second));
  rs.tree = build_tree(rs.system);
  return rs;
}

// Largest inclusion interval [C, D] inside the system; the finite interval
// condition at desk scale.
inline int max_interval_length(const NestedSystem& sys) {
  int best = 0;
  std::vector<Cut> sides;
  for (auto& r : sys.reps) {
    sides.push_back(r);
    sides.push_back(r.complement());
  }
  for (auto& c : sides)
    for (auto& d : sides) {
      if (!(c.is_subset_of(d)) || c == d) continue;
      int between = 0;
      for (auto& e : sides)
        if (c.is_subset_of(e) && e.is_subset_of(d)) ++between;
      best = std::max(best, between);
    }
  return best;
}

// ---------------------------------------------------------------------------
// Kropholler corner

struct CornerCertificate {
  Cut corner;                         // A ∩ gB
  CornerReport corners;
  FinitenessReport finiteness;        // (H∩K)-orbit count of the corner coboundary
  int sampled_hk_elements = 0;
  bool degenerate = false;            // some corner already empty
};

// Sampled elements of H ∩ gHg^-1 inside the H-ball.
inline std::vector<std::string> hk_sample(const Arena& arena, const std::string& g) {
  std::vector<std::string> out;
  std::string ginv = arena.oracle.inverse(g);
  for (auto& h : arena.h_ball)
    if (arena.oracle.in_h(arena.oracle.multiply(arena.oracle.multiply(ginv, h), g)))
      out.push_back(h);
  return out;
}

// Orbit count of an edge set under a sampled element set, with closure
// checked inside the interior.
inline FinitenessReport sampled_orbit_finiteness(const Arena& arena,
                                                 const std::vector<std::string>& sample,
                                                 const std::vector<int>& edges) {
  detail::UnionFind uf(arena.graph.edge_count());
  std::vector<std::vector<std::optional<int>>> eimg(sample.size());
  for (std::size_t k = 0; k < sample.size(); ++k) {
    eimg[k].assign(arena.graph.edge_count(), std::nullopt);
    for (std::size_t e = 0; e < arena.graph.edge_count(); ++e) {
      auto u2 = arena.act_vertex_left(sample[k], arena.graph.edge((int)e).u);
      auto v2 = arena.act_vertex_left(sample[k], arena.graph.edge((int)e).v);
      if (u2 && v2)
        if (auto e2 = arena.find_edge(*u2, *v2)) {
          eimg[k][e] = *e2;
          uf.unite((int)e, *e2);
        }
    }
  }
  std::vector<bool> closed(arena.graph.edge_count(), true);
  for (std::size_t e = 0; e < arena.graph.edge_count(); ++e)
    if (arena.edge_is_interior((int)e))
      for (std::size_t k = 0; k < sample.size(); ++k)
        if (!eimg[k][e]) closed[uf.find((int)e)] = false;
  FinitenessReport r;
  std::set<int> labels;
  for (int e : edges) labels.insert(uf.find(e));
  r.orbit_labels.assign(labels.begin(), labels.end());
  r.orbit_count = (int)labels.size();
  r.conclusive = true;
  for (int l : labels)
    if (!closed[l]) r.conclusive = false;
  return r;
}

inline CornerCertificate kropholler_corner(const Arena& arena, const Cut& a, const Cut& b,
                                           const std::string& g) {
  a.check_graph(arena.graph);
  b.check_graph(arena.graph);
  Cut gb = arena.act_left_cut(g, b);
  auto go = arena.act_vertex_left(g, arena.base);
  if (!go) throw truncation_error("g moves the base outside the truncation");
  if (gb.contains(arena.base)) throw precondition_error("precondition failed: o lies in gB");
  if (a.contains(*go)) throw precondition_error("precondition failed: go lies in A");

  CornerCertificate cert;
  cert.corners = corner_analysis(a, gb);
  cert.corner = cert.corners.corners[0];  // A ∩ gB
  cert.degenerate = cert.corners.nested;
  auto sample = hk_sample(arena, g);
  cert.sampled_hk_elements = (int)sample.size();
  cert.finiteness = sampled_orbit_finiteness(arena, sample, coboundary(arena.graph, cert.corner));
  return cert;
}

// ---------------------------------------------------------------------------
// Crossing-cut case analysis

// Corner order: 0 = A∩gB (the Kropholler corner), 1 = A∩gB*, 2 = A*∩gB,
// 3 = A*∩gB*.
struct CrossingCase {
  int a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;
  int o_corner = -1, go_corner = -1;
  enum class Verdict { r_empty, p_empty, q_empty, equal } verdict;
  bool nested = true;

  bool sums_hold() const { return a + e + f + b == 1 && c + e + f + d == 1; }

  std::string verdict_name() const {
    switch (verdict) {
      case Verdict::r_empty: return "A*∩gB* empty";
      case Verdict::p_empty: return "A∩gB* empty";
      case Verdict::q_empty: return "A*∩gB empty";
      default: return "A = gB";
    }
  }
};

inline CrossingCase crossing_case(const Arena& arena, const Cut& a, const Cut& b,
                                  const std::string& g) {
  Cut gb = arena.act_left_cut(g, b);
  auto go = arena.act_vertex_left(g, arena.base);
  if (!go) throw truncation_error("g moves the base outside the truncation");
  if (gb.contains(arena.base)) throw precondition_error("precondition failed: o lies in gB");
  if (a.contains(*go)) throw precondition_error("precondition failed: go lies in A");
  Cut corner_k = a & gb;
  if (corner_k.is_empty())
    throw precondition_error("precondition failed: the Kropholler corner A∩gB is empty");

  Cut p = a & gb.complement(), q = a.complement() & gb, r = a.complement() & gb.complement();
  CrossingCase cc;
  cc.o_corner = p.contains(arena.base) ? 1 : 3;
  cc.go_corner = q.contains(*go) ? 2 : 3;

  // the two wall pairs {A, A*} and {gB, gB*} each join the two corners
  // adjacent across them once one corner is empty
  if (a == gb) {
    cc.f = 1;
    cc.verdict = CrossingCase::Verdict::equal;
    check_internal(p.is_empty() && q.is_empty(), "A = gB with a nonempty off corner");
  } else if (r.is_empty()) {
    cc.a = cc.c = 1;
    cc.verdict = CrossingCase::Verdict::r_empty;
  } else if (p.is_empty()) {
    cc.a = cc.d = 1;
    cc.verdict = CrossingCase::Verdict::p_empty;
  } else if (q.is_empty()) {
    cc.b = cc.c = 1;
    cc.verdict = CrossingCase::Verdict::q_empty;
  } else {
    throw internal_error("A and gB cross: the crossing-cut analysis is violated");
  }
  check_internal(cc.sums_hold(), "crossing-cut sum identities fail");
  return cc;
}

// ---------------------------------------------------------------------------
// Tree overlap T(H) vs T(gHg^-1)

struct OverlapReport {
  std::vector<int> shared_walls;  // indices into the H-system
  std::vector<int> red_walls;     // only in T(H)
  std::vector<Cut> blue_walls;    // only in T(K), as translated cuts
  int untranslatable = 0;         // H-walls whose g-translate leaves the truncation
  bool shared_is_subtree = false;
  std::vector<int> shared_hk_coset_counts;  // per shared wall: (H∩K)-cosets met by its sampled stabilizer
  std::vector<int> geodesic_walls;          // walls separating o from go

  nlohmann::json to_json(const RelativeSystem& rs) const {
    nlohmann::json j;
    auto dump = [&](const std::vector<int>& walls) {
      auto arr = nlohmann::json::array();
      for (int w : walls) arr.push_back(rs.system.reps[w].ids());
      return arr;
    };
    j["shared"] = dump(shared_walls);
    j["red"] = dump(red_walls);
    auto blue = nlohmann::json::array();
    for (auto& c : blue_walls) blue.push_back(c.ids());
    j["blue"] = blue;
    j["untranslatable"] = untranslatable;
    j["shared_is_subtree"] = shared_is_subtree;
    j["geodesic"] = dump(geodesic_walls);
    return j;
  }
};

// sampled stabilizer of a wall: ball words fixing the cut setwise
inline std::vector<std::string> wall_stabilizer_sample(const Arena& arena, const Cut& wall,
                                                       const std::vector<std::string>& words) {
  std::vector<std::string> out;
  for (auto& w : words) {
    try {
      if (arena.act_left_cut(w, wall) == wall) out.push_back(w);
    } catch (const truncation_error&) {
    }
  }
  return out;
}

inline int hk_coset_count(const Arena& arena, const std::string& g,
                          const std::vector<std::string>& elements) {
  // number of right (H∩K)-cosets met: x ~ y iff x y^-1 lies in H∩K
  std::string ginv = arena.oracle.inverse(g);
  auto in_hk = [&](const std::string& x) {
    return arena.oracle.in_h(x) &&
           arena.oracle.in_h(arena.oracle.multiply(arena.oracle.multiply(ginv, x), g));
  };
  std::vector<std::string> reps;
  for (auto& x : elements) {
    bool fresh = true;
    for (auto& r : reps)
      if (in_hk(arena.oracle.multiply(x, arena.oracle.inverse(r)))) fresh = false;
    if (fresh) reps.push_back(x);
  }
  return (int)reps.size();
}

inline OverlapReport tree_overlap(const RelativeSystem& rs, const std::string& g,
                                  const std::vector<std::string>& stab_words) {
  const Arena& arena = rs.arena;
  OverlapReport rep;
  std::set<Bitset> h_keys;
  auto key = [&](const Cut& c) {
    Bitset x = c.inside(), y = ~c.inside();
    return x < y ? x : y;
  };
  for (auto& c : rs.system.reps) h_keys.insert(key(c));

  std::set<Bitset> k_keys;
  std::vector<Cut> k_walls;
  for (auto& c : rs.system.reps) {
    try {
      Cut img = arena.act_left_cut(g, c);
      k_keys.insert(key(img));
      k_walls.push_back(img);
    } catch (const truncation_error&) {
      ++rep.untranslatable;
    }
  }
  for (std::size_t w = 0; w < rs.system.size(); ++w) {
    if (k_keys.count(key(rs.system.reps[w])))
      rep.shared_walls.push_back((int)w);
    else
      rep.red_walls.push_back((int)w);
  }
  for (auto& kw : k_walls)
    if (!h_keys.count(key(kw))) rep.blue_walls.push_back(kw);

  // shared walls span a subtree of T(H)
  std::set<int> shared(rep.shared_walls.begin(), rep.shared_walls.end());
  std::set<int> touched;
  for (auto& e : rs.tree.edges)
    if (shared.count(e.wall)) {
      touched.insert(e.a);
      touched.insert(e.b);
    }
  if (rep.shared_walls.empty()) {
    rep.shared_is_subtree = true;
  } else {
    // connected iff the shared edges reach every touched vertex from one seed
    std::set<int> seen{*touched.begin()};
    bool grew = true;
    while (grew) {
      grew = false;
      for (auto& e : rs.tree.edges)
        if (shared.count(e.wall)) {
          bool ha = seen.count(e.a), hb = seen.count(e.b);
          if (ha != hb) {
            seen.insert(ha ? e.b : e.a);
            grew = true;
          }
        }
    }
    rep.shared_is_subtree = seen.size() == touched.size();
  }

  for (int w : rep.shared_walls) {
    auto stab = wall_stabilizer_sample(arena, rs.system.reps[w], stab_words);
    rep.shared_hk_coset_counts.push_back(hk_coset_count(arena, g, stab));
  }

  auto go = arena.act_vertex_left(g, arena.base);
  if (go)
    for (std::size_t w = 0; w < rs.system.size(); ++w)
      if (rs.system.reps[w].contains(arena.base) != rs.system.reps[w].contains(*go))
        rep.geodesic_walls.push_back((int)w);
  return rep;
}

// ---------------------------------------------------------------------------
// G-translated nested system and its tree

struct AssembledSystem {
  NestedSystem system;
  StructureTree tree;
  int translated_from = 0;   // wall instances before deduplication
  int untranslatable = 0;
  bool fixed_vertex_exists = false;        // some tree vertex fixed by every sampled generator
  std::vector<int> wall_h_coset_counts;    // sampled stabilizer H-coset count per wall
};

// partial wall permutation induced by a word; nullopt where the translate
// leaves the truncation or the wall set
inline std::vector<std::optional<std::pair<int, bool>>> wall_action(const Arena& arena,
                                                                    const NestedSystem& sys,
                                                                    const std::string& w) {
  std::vector<std::optional<std::pair<int, bool>>> out(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    try {
      Cut img = arena.act_left_cut(w, sys.reps[i]);
      if (auto j = sys.find_pair(img)) out[i] = std::make_pair(*j, img == sys.reps[*j]);
    } catch (const truncation_error&) {
    }
  }
  return out;
}

inline nlohmann::json to_json(const CrossingCase& cc) {
  nlohmann::json j;
  j["counts"] = {{"a", cc.a}, {"b", cc.b}, {"c", cc.c}, {"d", cc.d}, {"e", cc.e}, {"f", cc.f}};
  j["sum_a_e_f_b"] = cc.a + cc.e + cc.f + cc.b;
  j["sum_c_e_f_d"] = cc.c + cc.e + cc.f + cc.d;
  j["o_corner"] = cc.o_corner;
  j["go_corner"] = cc.go_corner;
  j["verdict"] = cc.verdict_name();
  j["nested"] = cc.nested;
  return j;
}

inline nlohmann::json to_json(const CornerCertificate& cert) {
  nlohmann::json j;
  j["corner"] = cert.corner.ids();
  j["degenerate"] = cert.degenerate;
  j["hk_orbit_count"] = cert.finiteness.orbit_count;
  j["conclusive"] = cert.finiteness.conclusive;
  j["sampled_hk_elements"] = cert.sampled_hk_elements;
  return j;
}

// T(H) with its walls colored by membership: brown for walls shared with
// T(gHg^-1), red for walls only in T(H).  Walls only in T(K) are listed as
// dashed satellites since they are not edges of this tree.
inline std::string overlap_to_dot(const RelativeSystem& rs, const OverlapReport& rep) {
  std::set<int> shared(rep.shared_walls.begin(), rep.shared_walls.end());
  std::ostringstream os;
  os << "graph tree_overlap {\n";
  for (std::size_t v = 0; v < rs.tree.vertices.size(); ++v) {
    os << "  v" << v << " [label=\"" << (rs.base_vertex() == (int)v ? "o" : "") << "\"];\n";
  }
  for (auto& e : rs.tree.edges)
    os << "  v" << e.a << " -- v" << e.b << " [color="
       << (shared.count(e.wall) ? "brown" : "red") << "];\n";
  int bi = 0;
  for (auto& b : rep.blue_walls) {
    os << "  blue" << bi << " [shape=box, color=blue, label=\"";
    auto ids = b.ids();
    for (std::size_t i = 0; i < ids.size() && i < 6; ++i) os << (i ? "," : "") << ids[i];
    if (ids.size() > 6) os << ",...";
    os << "\"];\n";
    ++bi;
  }
  os << "}\n";
  return os.str();
}

inline AssembledSystem assemble_g_nested(const RelativeSystem& rs,
                                         const std::vector<std::string>& words) {
  const Arena& arena = rs.arena;
  std::vector<Cut> walls;
  std::set<Bitset> seen;
  auto key = [&](const Cut& c) {
    Bitset x = c.inside(), y = ~c.inside();
    return x < y ? x : y;
  };
  AssembledSystem as;
  for (auto& w : words)
    for (auto& c : rs.system.reps) {
      try {
        Cut img = arena.act_left_cut(w, c);
        ++as.translated_from;
        if (seen.insert(key(img)).second) walls.push_back(rs.system.canonical_rep(img));
      } catch (const truncation_error&) {
        ++as.untranslatable;
      }
    }
  std::sort(walls.begin(), walls.end(),
            [](const Cut& x, const Cut& y) { return x.inside() < y.inside(); });
  as.system = NestedSystem{arena.graph, walls, rs.level};
  if (auto w = as.system.crossing_witness())
    throw internal_error("translated walls cross: members " + std::to_string(w->first) + " and " +
                         std::to_string(w->second));
  as.tree = build_tree(as.system);

  // no vertex of the tree may be fixed by every sampled generator
  std::vector<char> fixed_by_all(as.tree.vertices.size(), 1);
  for (char s : arena.s_letters) {
    auto wa = wall_action(arena, as.system, std::string(1, s));
    for (std::size_t v = 0; v < as.tree.vertices.size(); ++v) {
      bool moved = false;
      for (std::size_t i = 0; i < as.system.size(); ++i) {
        if (!wa[i]) continue;
        bool chose_rep = (as.tree.vertices[v] >> i) & 1;
        bool image_rep = chose_rep == wa[i]->second;
        bool image_choice = (as.tree.vertices[v] >> wa[i]->first) & 1;
        if (image_choice != image_rep) moved = true;
      }
      if (moved) fixed_by_all[v] = 0;
    }
  }
  for (auto f : fixed_by_all)
    if (f) as.fixed_vertex_exists = true;

  // sampled stabilizers of each wall meet few H-cosets
  for (auto& c : as.system.reps) {
    auto stab = wall_stabilizer_sample(arena, c, words);
    std::vector<std::string> reps_;
    for (auto& x : stab) {
      bool fresh = true;
      for (auto& r : reps_)
        if (arena.oracle.in_h(arena.oracle.multiply(x, arena.oracle.inverse(r)))) fresh = false;
      if (fresh) reps_.push_back(x);
    }
    as.wall_h_coset_counts.push_back((int)reps_.size());
  }
  return as;
}

}  // namespace cutforest
