#include <doctest.h>

#include <algorithm>
#include <set>

#include "cutforest/cut_algebra.hpp"
#include "cutforest/fixtures.hpp"

using namespace cutforest;

namespace {

Bitset pair_key(const Cut& c) {
  Bitset a = c.inside(), b = ~c.inside();
  return a < b ? a : b;
}

std::set<Bitset> pair_set(const std::vector<Cut>& cuts) {
  std::set<Bitset> out;
  for (auto& c : cuts) out.insert(pair_key(c));
  return out;
}

// exhaustive subset oracle for bounded-weight cut pairs
std::set<Bitset> subset_oracle(const Graph& g, int n, bool conn) {
  std::set<Bitset> out;
  uint64_t limit = 1ull << g.vertex_count();
  for (uint64_t m = 1; m + 1 < limit; ++m) {
    Bitset b(g.vertex_count());
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
      if ((m >> v) & 1) b.set(v);
    Cut c(g, b);
    if (cut_weight(g, c) > n) continue;
    if (conn && !both_sides_connected(g, c)) continue;
    out.insert(pair_key(c));
  }
  return out;
}

Cut ids(const Graph& g, std::vector<std::string> v) { return Cut::of_ids(g, v); }

}  // namespace

TEST_CASE("enumerate_cuts matches the exhaustive subset oracle") {
  Graph p4 = fixtures::path4();
  auto e1 = enumerate_cuts(p4, 1, true);
  CHECK(e1.size() == 3);
  CHECK(pair_set(e1) == std::set<Bitset>{pair_key(ids(p4, {"1"})), pair_key(ids(p4, {"1", "2"})),
                                         pair_key(ids(p4, {"1", "2", "3"}))});
  CHECK(pair_set(e1) == subset_oracle(p4, 1, true));

  Graph c4 = fixtures::c4();
  CHECK(enumerate_cuts(c4, 1, true).empty());

  Graph barbell = fixtures::barbell();
  auto b1 = enumerate_cuts(barbell, 1, true);
  REQUIRE(b1.size() == 1);
  CHECK(pair_key(b1[0]) == pair_key(ids(barbell, {"1", "2", "3"})));

  for (auto& g : fixtures::corpus(7, 6))
    for (int n = 1; n <= 3; ++n)
      CHECK(pair_set(enumerate_cuts(g, n, false)) == subset_oracle(g, n, false));
}

TEST_CASE("enumerate_cuts representatives exclude the base side") {
  Graph barbell = fixtures::barbell();  // base "4"
  for (auto& c : enumerate_cuts(barbell, 3, true)) CHECK_FALSE(c.contains(barbell.index_of("4")));
}

TEST_CASE("corner analysis") {
  Graph c4 = fixtures::c4();
  Cut a = ids(c4, {"1", "2"});
  CHECK(corner_analysis(a, a).nested);

  auto r = corner_analysis(a, ids(c4, {"2", "3"}));
  CHECK_FALSE(r.nested);
  for (bool e : r.empty) CHECK_FALSE(e);

  Graph p4 = fixtures::path4();
  CHECK(corner_analysis(ids(p4, {"1"}), ids(p4, {"1", "2"})).nested);

  // the four corners partition the vertex set
  Cut sum = r.corners[0] | r.corners[1] | r.corners[2] | r.corners[3];
  CHECK(sum.is_whole());

  // symmetry, exhaustively on a fixture
  uint64_t limit = 1ull << c4.vertex_count();
  for (uint64_t ma = 0; ma < limit; ++ma)
    for (uint64_t mb = 0; mb < limit; ++mb) {
      Bitset ba(4), bb(4);
      for (int v = 0; v < 4; ++v) {
        if ((ma >> v) & 1) ba.set(v);
        if ((mb >> v) & 1) bb.set(v);
      }
      CHECK(corner_analysis(Cut(c4, ba), Cut(c4, bb)).nested ==
            corner_analysis(Cut(c4, bb), Cut(c4, ba)).nested);
    }
}

TEST_CASE("mu counts crossing pairs") {
  Graph p4 = fixtures::path4();
  auto sys = extract_nested_generators(p4, 1);
  CHECK(mu(ids(p4, {"1", "3"}), sys) == 1);
  CHECK(mu(ids(p4, {"1"}), sys) == 0);
  for (auto& member : sys.reps) CHECK(mu(member, sys) == 0);
}

TEST_CASE("ring closure fixpoints") {
  Graph p4 = fixtures::path4();
  auto e1 = extract_nested_generators(p4, 1);
  CHECK(ring_closure(p4, e1.reps).size() == 16);

  CHECK(ring_closure(p4, {Cut::empty(p4)}).size() == 1);

  Graph barbell = fixtures::barbell();
  auto cl = ring_closure(barbell, {ids(barbell, {"1", "2", "3"})});
  CHECK(cl.size() == 4);
  std::set<Bitset> got;
  for (auto& c : cl) got.insert(c.inside());
  CHECK(got.count(Bitset(6)));
  CHECK(got.count(Bitset::full(6)));
  CHECK(got.count(ids(barbell, {"1", "2", "3"}).inside()));
  CHECK(got.count(ids(barbell, {"4", "5", "6"}).inside()));
}

TEST_CASE("ring closure is monotone and idempotent") {
  Graph g = fixtures::grid2x3();
  auto cuts = enumerate_cuts(g, 2, true);
  std::vector<Cut> small(cuts.begin(), cuts.begin() + std::min<std::size_t>(2, cuts.size()));
  auto cl_small = ring_closure(g, small);
  auto cl_all = ring_closure(g, cuts);
  std::set<Bitset> big;
  for (auto& c : cl_all) big.insert(c.inside());
  for (auto& c : cl_small) CHECK(big.count(c.inside()));

  auto twice = ring_closure(g, cl_small);
  CHECK(twice.size() == cl_small.size());
}

TEST_CASE("automorphism groups of the fixtures") {
  CHECK(automorphisms(fixtures::c4()).size() == 8);
  CHECK(automorphisms(fixtures::path4()).size() == 2);
  CHECK(automorphisms(fixtures::barbell()).size() == 4);

  // permutations preserve adjacency and capacity
  Graph g = fixtures::barbell();
  for (auto& p : automorphisms(g)) {
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      int u = p[g.edge((int)e).u], v = p[g.edge((int)e).v];
      bool found = false;
      for (auto [w, f] : g.neighbors(u))
        if (w == v) found = g.edge(f).capacity == g.edge((int)e).capacity;
      CHECK(found);
    }
  }
}

TEST_CASE("extract_nested_generators on the fixtures") {
  Graph p4 = fixtures::path4();
  auto sys = extract_nested_generators(p4, 1);
  CHECK(pair_set(sys.reps) == std::set<Bitset>{pair_key(ids(p4, {"1"})), pair_key(ids(p4, {"1", "2"})),
                                               pair_key(ids(p4, {"1", "2", "3"}))});

  Graph barbell = fixtures::barbell();
  auto bsys = extract_nested_generators(barbell, 1);
  REQUIRE(bsys.size() == 1);
  CHECK(pair_key(bsys.reps[0]) == pair_key(ids(barbell, {"1", "2", "3"})));

  Graph c4 = fixtures::c4();
  auto csys = extract_nested_generators(c4, 2);
  CHECK(pair_set(csys.reps) ==
        std::set<Bitset>{pair_key(ids(c4, {"1"})), pair_key(ids(c4, {"2"})), pair_key(ids(c4, {"3"})),
                         pair_key(ids(c4, {"4"}))});
}

TEST_CASE("extracted systems satisfy the five postconditions") {
  for (auto& g : fixtures::corpus(3, 8)) {
    std::vector<std::set<Bitset>> per_level;
    for (int n = 1; n <= 3; ++n) {
      NestedSystem sys(extract_nested_generators(g, n));
      // (a) weight and connectivity
      for (auto& c : sys.reps) {
        CHECK(cut_weight(g, c) <= n);
        CHECK(both_sides_connected(g, c));
      }
      // (b) pairwise nested
      CHECK_FALSE(sys.crossing_witness().has_value());
      // (c) closure coverage
      auto closure = ring_closure(g, sys.reps);
      std::set<Bitset> closure_set;
      for (auto& c : closure) closure_set.insert(c.inside());
      for (auto& c : enumerate_cuts(g, n, false)) CHECK(closure_set.count(c.inside()));
      // (d) automorphism invariance, setwise on pairs
      auto keys = pair_set(sys.reps);
      for (auto& p : automorphisms(g))
        for (auto& c : sys.reps)
          CHECK(keys.count(pair_key(apply_permutation(p, c))));
      // (e) monotone in n
      per_level.push_back(keys);
    }
    for (auto& k : per_level[0]) CHECK(per_level[1].count(k));
    for (auto& k : per_level[1]) CHECK(per_level[2].count(k));
  }
}

TEST_CASE("guards reject oversized inputs") {
  std::vector<std::string> ids;
  std::vector<std::tuple<std::string, std::string, int>> edges;
  for (int i = 0; i < 30; ++i) ids.push_back(std::to_string(i));
  for (int i = 1; i < 30; ++i) edges.emplace_back(ids[i - 1], ids[i], 1);
  Graph big = Graph::make(ids, edges);
  CHECK_THROWS_AS(enumerate_cuts(big, 1, true), precondition_error);
  CHECK_THROWS_AS(automorphisms(big), precondition_error);
}
