#include <doctest.h>

#include <set>
#include <sstream>

#include "cutforest/decomposition.hpp"
#include "cutforest/fixtures.hpp"

using namespace cutforest;

namespace {

std::string serialize(const CanonicalExpression& e) {
  std::ostringstream os;
  for (std::size_t v = 0; v < e.a_side.size(); ++v) os << (e.a_side.test(v) ? 'A' : '*');
  os << '|' << to_string(e.form) << '|';
  for (auto& [w, s] : e.members) os << w << (s ? '+' : '-') << ' ';
  return os.str();
}

// run the decomposition once for every sequence of admissible twig choices
std::set<std::string> all_twig_orders(const Cut& a, const NestedSystem& sys,
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
    results.insert(serialize(canonical_decomposition(a, sys, tree, policy)));
    // odometer over the recorded choice sizes
    while (!path.empty() && path.back() + 1 >= sizes[path.size() - 1]) path.pop_back();
    if (path.empty()) break;
    ++path.back();
  }
  return results;
}

}  // namespace

TEST_CASE("member cuts decompose to the singleton expression") {
  Graph p4 = fixtures::path4();
  auto sys = extract_nested_generators(p4, 1);
  auto tree = build_tree(sys);
  Cut a = Cut::of_ids(p4, {"1"});
  auto e = canonical_decomposition(a, sys, tree);
  CHECK(e.form == ExprForm::direct_union);
  REQUIRE(e.members.size() == 1);
  CHECK(tree.half_space(e.members[0].first, e.members[0].second) == a);
  CHECK(evaluate_expression(e, tree) == a);
}

TEST_CASE("path4 {1,3} splits and merges to the alternating side assignment") {
  Graph p4 = fixtures::path4();
  auto sys = extract_nested_generators(p4, 1);
  auto tree = build_tree(sys);
  Cut a = Cut::of_ids(p4, {"1", "3"});
  auto e = canonical_decomposition(a, sys, tree);
  CHECK(e.form == ExprForm::recursive_merge);
  CHECK(evaluate_expression(e, tree) == a);
  CHECK(e.a_side.test(tree.nu[p4.index_of("1")]));
  CHECK_FALSE(e.a_side.test(tree.nu[p4.index_of("2")]));
  CHECK(e.a_side.test(tree.nu[p4.index_of("3")]));
  CHECK_FALSE(e.a_side.test(tree.nu[p4.index_of("4")]));
  // all three walls survive the merge
  CHECK(e.members.size() == 3);
}

TEST_CASE("c4 {1,2} takes the union form with the center on the A* side") {
  Graph c4 = fixtures::c4();
  auto sys = extract_nested_generators(c4, 2);
  auto tree = build_tree(sys);
  Cut a = Cut::of_ids(c4, {"1", "2"});
  auto e = canonical_decomposition(a, sys, tree);
  CHECK(e.form == ExprForm::direct_union);
  REQUIRE(e.members.size() == 2);
  Cut u = tree.half_space(e.members[0].first, e.members[0].second) |
          tree.half_space(e.members[1].first, e.members[1].second);
  CHECK(u == a);
  // the non-image center sits on the A* side, by the tie rule
  int center = -1;
  for (std::size_t v = 0; v < tree.vertices.size(); ++v)
    if (!tree.in_nu_image((int)v)) center = (int)v;
  REQUIRE(center >= 0);
  CHECK_FALSE(e.a_side.test(center));
  REQUIRE(e.tie_decisions.size() == 1);
  CHECK(std::get<0>(e.tie_decisions[0]) == center);
  CHECK(std::get<1>(e.tie_decisions[0]) == 2);
  CHECK(std::get<2>(e.tie_decisions[0]) == 2);
}

TEST_CASE("the degenerate expressions at a non-image vertex") {
  // orienting the walls at the c4 star center towards it gives the empty
  // set; orienting them away gives the whole vertex set
  Graph c4 = fixtures::c4();
  auto sys = extract_nested_generators(c4, 2);
  auto tree = build_tree(sys);
  int center = -1;
  for (std::size_t v = 0; v < tree.vertices.size(); ++v)
    if (!tree.in_nu_image((int)v)) center = (int)v;
  REQUIRE(center >= 0);
  std::vector<OrientedMember> pointing;
  for (auto& ed : tree.edges)
    if (ed.a == center || ed.b == center)
      pointing.push_back({ed.wall, !((tree.vertices[center] >> ed.wall) & 1)});
  REQUIRE(pointing.size() == 4);
  ExprNode towards{ExprForm::complemented_union, pointing, nullptr, nullptr, {}};
  CHECK(evaluate_node(towards, tree).is_empty());
  ExprNode away{ExprForm::direct_union, pointing, nullptr, nullptr, {}};
  CHECK(evaluate_node(away, tree).is_whole());
}

TEST_CASE("cuts outside the ring closure are rejected") {
  Graph g = fixtures::barbell();
  auto sys = extract_nested_generators(g, 1);
  auto tree = build_tree(sys);
  // {1} separates the fiber {1,2,3}
  CHECK_THROWS_AS(canonical_decomposition(Cut::of_ids(g, {"1"}), sys, tree), precondition_error);
}

TEST_CASE("round trip, twig independence and equivariance over fixture closures") {
  struct Case {
    Graph g;
    int n;
  };
  std::vector<Case> cases = {{fixtures::path4(), 1}, {fixtures::path4(), 3},
                             {fixtures::c4(), 2},    {fixtures::barbell(), 1},
                             {fixtures::c6(), 2},    {fixtures::grid2x3(), 2}};
  for (auto& [g, n] : cases) {
    auto sys = extract_nested_generators(g, n);
    auto tree = build_tree(sys);
    auto auts = automorphisms(g);
    auto closure = ring_closure(g, sys.reps);
    for (auto& a : closure) {
      auto e = canonical_decomposition(a, sys, tree);
      CHECK(evaluate_expression(e, tree) == a);
      CHECK(all_twig_orders(a, sys, tree).size() == 1);

      for (auto& p : auts) {
        auto tp = induced_tree_automorphism(tree, p);
        auto ep = canonical_decomposition(apply_permutation(p, a), sys, tree);
        // side assignment commutes with the induced tree map
        for (std::size_t v = 0; v < tree.vertices.size(); ++v)
          CHECK(ep.a_side.test(tp[v]) == e.a_side.test(v));
      }
    }
  }
}

TEST_CASE("round trip over the random corpus") {
  for (auto& g : fixtures::corpus(21, 10)) {
    if (g.vertex_count() > 7) continue;  // keep the closures small
    auto sys = extract_nested_generators(g, 2);
    auto tree = build_tree(sys);
    for (auto& a : ring_closure(g, sys.reps)) {
      auto e = canonical_decomposition(a, sys, tree);
      CHECK(evaluate_expression(e, tree) == a);
      // the flat member walls are exactly the tree coboundary of the side
      // assignment
      std::set<int> flat_walls;
      for (auto& [w, s] : e.members) flat_walls.insert(w);
      std::set<int> tree_cob;
      for (auto& ed : tree.edges)
        if (e.a_side.test(ed.a) != e.a_side.test(ed.b)) tree_cob.insert(ed.wall);
      CHECK(flat_walls == tree_cob);
    }
  }
}
