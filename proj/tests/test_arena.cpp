#include <doctest.h>

#include <set>

#include "cutforest/arena.hpp"

using namespace cutforest;

namespace {

int degree(const Graph& g, int v) { return (int)g.neighbors(v).size(); }

bool is_path_graph(const Graph& g) {
  int ones = 0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    int d = degree(g, (int)v);
    if (d == 1) ++ones;
    else if (d != 2) return false;
  }
  return ones == 2 && g.edge_count() + 1 == g.vertex_count();
}

}  // namespace

TEST_CASE("the fixture oracles pass the sampled soundness checks") {
  for (auto& name : group_fixture_names()) check_oracle(group_fixture(name), 5);
}

TEST_CASE("bs-amalgam normal forms") {
  auto o = oracle_bs_amalgam();
  CHECK(o.normalize("bb") == "aa");  // b^2 = z = a^2
  CHECK(o.is_identity("abBA"));
  // z commutes with everything
  for (std::string w : {"a", "b", "ab", "ba", "B", "A"})
    CHECK(o.multiply("aa", w) == o.multiply(w, "aa"));
  // <a> membership
  CHECK(o.in_h("aaaa"));
  CHECK(o.in_h("A"));
  CHECK(o.in_h("bb"));  // = z
  CHECK_FALSE(o.in_h("b"));
  CHECK_FALSE(o.in_h("ab"));
  // cosets: z^k v H = vH, trailing a absorbed
  CHECK(o.coset_canon("aaab") == "ab");
  CHECK(o.coset_canon("ba") == "b");
  CHECK(o.coset_canon("AAb") == "b");
  CHECK(o.coset_canon("bab") == o.coset_canon("bAb"));
}

TEST_CASE("z arena is a path of 2r+1 cosets") {
  Arena a = build_fixture_arena("z", 4);
  CHECK(a.graph.vertex_count() == 9);
  CHECK(is_path_graph(a.graph));
  CHECK(a.level[a.base] == 0);
  CHECK(a.interior.count() == 7);
  CHECK(a.boundary.count() == 2);
}

TEST_CASE("dinf arena over <s> is a line of cosets with the base fixed by s") {
  Arena a = build_fixture_arena("dinf", 4);
  CHECK(is_path_graph(a.graph));
  CHECK(a.graph.vertex_count() == 5);  // "", t, st, tst, stst
  auto img = a.act_vertex_left("s", a.base);
  REQUIRE(img);
  CHECK(*img == a.base);
}

TEST_CASE("f2 arena over <a> branches at every b step") {
  Arena a = build_fixture_arena("f2", 3);
  CHECK(a.graph.vertex_count() == 27);  // 1 + 2 + 6 + 18
  CHECK(a.graph.edge_count() + 1 == a.graph.vertex_count());  // a tree
}

TEST_CASE("z2 arena over Z x 0 collapses to the y line") {
  Arena a = build_fixture_arena("z2", 4);
  CHECK(is_path_graph(a.graph));
  CHECK(a.graph.vertex_count() == 9);
  // H acts trivially on the cosets, so the quotient is the same line
  auto q = quotient_graph(a);
  CHECK(q.graph.vertex_count() == a.graph.vertex_count());
  CHECK(is_path_graph(q.graph));
}

TEST_CASE("bs-amalgam arena is a line reflected by a") {
  Arena a = build_fixture_arena("bs-amalgam", 3);
  CHECK(is_path_graph(a.graph));
  CHECK(a.graph.vertex_count() == 4);  // bab, b, "", ab by word length
  // a swaps the two rays and fixes the base
  auto img = a.act_vertex_left("a", a.base);
  REQUIRE(img);
  CHECK(*img == a.base);
  auto b_side = a.vertex_of("b");
  auto ab_side = a.vertex_of("ab");
  REQUIRE((b_side && ab_side));
  CHECK(a.act_vertex_left("a", *b_side) == ab_side);
}

TEST_CASE("H-finiteness verdicts on the dinf line") {
  Arena a = build_fixture_arena("dinf", 4);
  // positive half: reps starting with t
  Bitset half(a.graph.vertex_count());
  for (std::size_t v = 0; v < a.rep.size(); ++v)
    if (!a.rep[v].empty() && a.rep[v][0] == 't') half.set(v);
  Cut pos(a.graph, half);
  auto rep = a.h_finiteness_of_edges(coboundary(a.graph, pos));
  CHECK(rep.conclusive);
  CHECK(rep.orbit_count == 1);

  auto empty = a.h_finiteness_of_vertices(Bitset(a.graph.vertex_count()));
  CHECK(empty.conclusive);
  CHECK(empty.orbit_count == 0);
}

TEST_CASE("H-finiteness on the f2 branch cut") {
  Arena a = build_fixture_arena("f2", 3);
  Bitset bs(a.graph.vertex_count());
  for (std::size_t v = 0; v < a.rep.size(); ++v)
    if (!a.rep[v].empty() && (a.rep[v][0] == 'b' || a.rep[v][0] == 'B')) bs.set(v);
  Cut branch(a.graph, bs);
  auto rep = a.h_finiteness_of_edges(coboundary(a.graph, branch));
  CHECK(rep.conclusive);
  CHECK(rep.orbit_count == 2);  // the b-star and the B-star of edges at o
}

TEST_CASE("orbit labels are invariant under the sampled H action") {
  for (auto& name : {std::string("dinf"), std::string("f2"), std::string("bs-amalgam")}) {
    Arena a = build_fixture_arena(name, 3);
    for (auto& h : a.h_gens)
      for (std::size_t e = 0; e < a.graph.edge_count(); ++e) {
        auto u2 = a.act_vertex_left(h, a.graph.edge((int)e).u);
        auto v2 = a.act_vertex_left(h, a.graph.edge((int)e).v);
        if (u2 && v2)
          if (auto e2 = a.find_edge(*u2, *v2)) CHECK(a.edge_orbit[e] == a.edge_orbit[*e2]);
      }
  }
}

TEST_CASE("act on cuts: identity, shift, reflection") {
  Arena a = build_fixture_arena("z", 4);
  // nonpositive half of the line
  Bitset half(a.graph.vertex_count());
  for (std::size_t v = 0; v < a.rep.size(); ++v)
    if (a.rep[v].empty() || a.rep[v][0] == 'T') half.set(v);
  Cut nonpos(a.graph, half);

  CHECK(a.act_left_cut("", nonpos) == nonpos);

  Cut shifted = a.act_left_cut("t", nonpos);
  // (-inf, 0] shifts to (-inf, 1] inside the truncation
  CHECK(shifted.size() == nonpos.size() + 1);
  CHECK(shifted.contains(*a.vertex_of("t")));
  CHECK(shifted.contains(*a.vertex_of("TTTT")));

  // weight preserved where total
  CHECK(cut_weight(a.graph, shifted) == cut_weight(a.graph, nonpos));

  // a far shift pushes the coboundary out of the truncation
  CHECK_THROWS_AS(a.act_left_cut("ttttt", nonpos), truncation_error);

  Arena d = build_fixture_arena("dinf", 4);
  Bitset pos(d.graph.vertex_count());
  for (std::size_t v = 0; v < d.rep.size(); ++v)
    if (!d.rep[v].empty() && d.rep[v][0] == 't') pos.set(v);
  Cut posc(d.graph, pos);
  Cut reflected = d.act_left_cut("s", posc);
  // s maps the t ray onto the st ray
  CHECK(reflected.contains(*d.vertex_of("st")));
  CHECK_FALSE(reflected.contains(*d.vertex_of("t")));
  CHECK_FALSE(reflected.contains(d.base));
}

TEST_CASE("quotients: trivial H copies the arena, dinf halves the line") {
  Arena z = build_fixture_arena("z", 3);
  auto qz = quotient_graph(z);
  CHECK(qz.graph.vertex_count() == z.graph.vertex_count());
  CHECK(qz.graph.edge_count() == z.graph.edge_count());

  Arena d = build_fixture_arena("dinf", 4);
  auto qd = quotient_graph(d);
  CHECK(qd.graph.vertex_count() == 3);  // ray [1], [t], [tst]
  CHECK(is_path_graph(qd.graph));
  REQUIRE(qd.graph.base());
  CHECK(qd.q_level[*qd.graph.base()] == 0);
}

TEST_CASE("z2 half line pulled back is proper, right-H-invariant, H-almost invariant") {
  Arena a = build_fixture_arena("z2", 4);
  auto q = quotient_graph(a);
  // far half of the quotient line: y^k for k >= 1
  Bitset qh(q.graph.vertex_count());
  for (std::size_t v = 0; v < q.graph.vertex_count(); ++v)
    if (q.graph.id((int)v).find("[y") == 0) qh.set(v);
  Cut qcut(q.graph, qh);
  Cut pulled(a.graph, q.preimage(qcut, a.graph.vertex_count()));
  CHECK(pulled.is_proper());
  // AH = A: right multiplication by the H generator fixes the vertex set
  for (auto v : pulled.inside().bits()) {
    auto img = a.act_vertex_right("x", (int)v);
    REQUIRE(img);
    CHECK(pulled.contains(*img));
  }
  auto fin = a.h_finiteness_of_edges(coboundary(a.graph, pulled));
  CHECK(fin.conclusive);
  CHECK(fin.orbit_count == 1);
}
