// Build the level-2 structure tree of a small graph, print the tree with its
// nu map, and canonically decompose a cut over the nested generators.

#include <iostream>

#include "cutforest/decomposition.hpp"
#include "cutforest/fixtures.hpp"

int main() {
  using namespace cutforest;

  Graph g = Graph::make({"1", "2", "3", "4", "5", "6"},
                        {{"1", "2", 1},
                         {"2", "3", 1},
                         {"3", "1", 1},
                         {"3", "4", 1},
                         {"4", "5", 1},
                         {"5", "6", 1},
                         {"6", "4", 1}});

  auto system = extract_nested_generators(g, 2);
  auto tree = build_tree(system);

  std::cout << "nested generators at level 2:\n";
  for (auto& c : system.reps) {
    std::cout << "  {";
    auto ids = c.ids();
    for (std::size_t i = 0; i < ids.size(); ++i) std::cout << (i ? "," : "") << ids[i];
    std::cout << "}\n";
  }
  std::cout << "\n" << tree.to_dot() << "\n";

  Cut a = Cut::of_ids(g, {"1", "2", "3"});
  auto expr = canonical_decomposition(a, system, tree);
  std::cout << "canonical form of {1,2,3}: " << to_string(expr.form) << " over "
            << expr.members.size() << " generator(s); evaluates back to {";
  auto ids = evaluate_expression(expr, tree).ids();
  for (std::size_t i = 0; i < ids.size(); ++i) std::cout << (i ? "," : "") << ids[i];
  std::cout << "}\n";
  return 0;
}
