// Build the relative tree of the infinite dihedral group over <s>, check a
// Kropholler corner, and run one crossing-cut case.

#include <iostream>

#include "cutforest/relative.hpp"

int main() {
  using namespace cutforest;

  Arena arena = build_fixture_arena("dinf", 4);
  auto rs = relative_nested_system(arena, 1);

  std::cout << "T(H) for dinf over <s>: " << rs.tree.vertices.size() << " vertices, "
            << rs.system.size() << " walls\n";

  // the two rays of the coset line
  Bitset pos(arena.graph.vertex_count()), neg(arena.graph.vertex_count());
  for (std::size_t v = 0; v < arena.rep.size(); ++v) {
    if (!arena.rep[v].empty() && arena.rep[v][0] == 't') pos.set(v);
    if (!arena.rep[v].empty() && arena.rep[v][0] == 's') neg.set(v);
  }
  Cut A(arena.graph, pos), B(arena.graph, neg);

  auto cert = kropholler_corner(arena, A, B, "s");
  std::cout << "corner A ∩ sB meets " << cert.finiteness.orbit_count
            << " (H∩K)-orbit(s), conclusive=" << cert.finiteness.conclusive << "\n";

  auto cc = crossing_case(arena, A, B, "s");
  std::cout << "crossing case verdict: " << cc.verdict_name() << ", sums "
            << (cc.sums_hold() ? "hold" : "fail") << "\n";
  return 0;
}
