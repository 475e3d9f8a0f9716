#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cutforest/graph.hpp"

namespace cutforest {
namespace fixtures {

// path 1-2-3-4
inline Graph path4() {
  return Graph::make({"1", "2", "3", "4"}, {{"1", "2", 1}, {"2", "3", 1}, {"3", "4", 1}});
}

// two triangles {1,2,3} and {4,5,6} joined by the bridge 3-4; base at the
// far bridgehead so the bridge cut's representative is {1,2,3}
inline Graph barbell() {
  return Graph::make({"1", "2", "3", "4", "5", "6"},
                     {{"1", "2", 1},
                      {"1", "3", 1},
                      {"2", "3", 1},
                      {"3", "4", 1},
                      {"4", "5", 1},
                      {"4", "6", 1},
                      {"5", "6", 1}},
                     "4");
}

inline Graph cycle(int n, const std::string& name_prefix = "") {
  std::vector<std::string> ids;
  std::vector<std::tuple<std::string, std::string, int>> edges;
  for (int i = 1; i <= n; ++i) ids.push_back(name_prefix + std::to_string(i));
  for (int i = 0; i < n; ++i) edges.emplace_back(ids[i], ids[(i + 1) % n], 1);
  return Graph::make(ids, edges);
}

inline Graph c4() { return cycle(4); }
inline Graph c6() { return cycle(6); }

// 2x3 grid, rows {1,2,3} / {4,5,6}
inline Graph grid2x3() {
  return Graph::make({"1", "2", "3", "4", "5", "6"},
                     {{"1", "2", 1},
                      {"2", "3", 1},
                      {"4", "5", 1},
                      {"5", "6", 1},
                      {"1", "4", 1},
                      {"2", "5", 1},
                      {"3", "6", 1}});
}

inline Graph by_name(const std::string& name) {
  if (name == "path4") return path4();
  if (name == "barbell") return barbell();
  if (name == "c4") return c4();
  if (name == "c6") return c6();
  if (name == "grid2x3") return grid2x3();
  throw precondition_error("unknown graph fixture: " + name);
}

inline std::vector<std::string> graph_fixture_names() {
  return {"path4", "barbell", "c4", "c6", "grid2x3"};
}

// xorshift; fixed seed -> fixed corpus on every platform
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed * 2654435769u + 1) {}
  uint64_t next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  }
  int below(int n) { return (int)(next() % (uint64_t)n); }
};

// Deterministic corpus of small connected graphs: named structured graphs
// plus seeded random connected graphs on 4..8 vertices.
inline std::vector<Graph> corpus(uint64_t seed = 0, int random_count = 24) {
  std::vector<Graph> out;
  out.push_back(path4());
  out.push_back(barbell());
  out.push_back(c4());
  out.push_back(c6());
  out.push_back(grid2x3());
  // complete graph K4
  out.push_back(Graph::make({"1", "2", "3", "4"},
                            {{"1", "2", 1}, {"1", "3", 1}, {"1", "4", 1}, {"2", "3", 1}, {"2", "4", 1}, {"3", "4", 1}}));
  // star on 5 leaves
  out.push_back(Graph::make({"c", "1", "2", "3", "4", "5"},
                            {{"c", "1", 1}, {"c", "2", 1}, {"c", "3", 1}, {"c", "4", 1}, {"c", "5", 1}}));
  // cube graph Q3
  {
    std::vector<std::string> ids;
    std::vector<std::tuple<std::string, std::string, int>> edges;
    for (int i = 0; i < 8; ++i) ids.push_back(std::to_string(i));
    for (int i = 0; i < 8; ++i)
      for (int b = 0; b < 3; ++b)
        if (i < (i ^ (1 << b))) edges.emplace_back(ids[i], ids[i ^ (1 << b)], 1);
    out.push_back(Graph::make(ids, edges));
  }
  // two triangles sharing a vertex
  out.push_back(Graph::make({"1", "2", "3", "4", "5"},
                            {{"1", "2", 1}, {"2", "3", 1}, {"1", "3", 1}, {"3", "4", 1}, {"4", "5", 1}, {"3", "5", 1}}));
  // weighted path: capacities 2,1,3
  out.push_back(Graph::make({"1", "2", "3", "4"}, {{"1", "2", 2}, {"2", "3", 1}, {"3", "4", 3}}));

  Rng rng(seed + 1);
  while ((int)out.size() < 10 + random_count) {
    int n = 4 + rng.below(5);  // 4..8
    std::vector<std::string> ids;
    for (int i = 1; i <= n; ++i) ids.push_back(std::to_string(i));
    std::vector<std::tuple<std::string, std::string, int>> edges;
    // random spanning tree, then extra edges
    for (int i = 1; i < n; ++i) edges.emplace_back(ids[rng.below(i)], ids[i], 1);
    int extra = rng.below(n);
    for (int k = 0; k < extra; ++k) {
      int u = rng.below(n), v = rng.below(n);
      if (u == v) continue;
      std::string a = ids[std::min(u, v)], b = ids[std::max(u, v)];
      bool dup = false;
      for (auto& [x, y, c] : edges)
        if ((x == a && y == b) || (x == b && y == a)) dup = true;
      if (!dup) edges.emplace_back(a, b, 1);
    }
    out.push_back(Graph::make(ids, edges));
  }
  return out;
}

}  // namespace fixtures
}  // namespace cutforest
