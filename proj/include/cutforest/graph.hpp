#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "cutforest/bitset.hpp"
#include "cutforest/errors.hpp"

namespace cutforest {

// Finite simple connected graph with positive integer edge capacities and an
// optional designated base vertex "o".  Vertex ids are opaque strings mapped
// once to dense indices; everything downstream works on index bitsets.
// Copies share the underlying data, so graph identity checks are pointer
// comparisons.
class Graph {
 public:
  struct Edge {
    int u, v;  // dense indices, u < v
    int capacity;
  };

  Graph() = default;

  static Graph make(std::vector<std::string> vertex_ids,
                    std::vector<std::tuple<std::string, std::string, int>> edges,
                    std::optional<std::string> base = std::nullopt) {
    auto d = std::make_shared<Data>();
    d->ids = std::move(vertex_ids);
    require(!d->ids.empty(), "graph must have at least one vertex");
    for (std::size_t i = 0; i < d->ids.size(); ++i) {
      auto [it, fresh] = d->index.emplace(d->ids[i], (int)i);
      require(fresh, "duplicate vertex id: " + d->ids[i]);
    }
    d->adj.resize(d->ids.size());
    for (auto& [a, b, cap] : edges) {
      auto ia = d->index.find(a), ib = d->index.find(b);
      require(ia != d->index.end(), "edge endpoint not a listed vertex: " + a);
      require(ib != d->index.end(), "edge endpoint not a listed vertex: " + b);
      int u = ia->second, v = ib->second;
      require(u != v, "loop edge rejected: " + a);
      if (u > v) std::swap(u, v);
      require(cap >= 1, "capacity must be >= 1 on edge " + a + "-" + b);
      for (auto& e : d->edges)
        require(e.u != u || e.v != v, "parallel edge rejected: " + a + "-" + b);
      int idx = (int)d->edges.size();
      d->edges.push_back({u, v, cap});
      d->adj[u].push_back({v, idx});
      d->adj[v].push_back({u, idx});
    }
    for (auto& nb : d->adj) std::sort(nb.begin(), nb.end());
    if (base) {
      auto it = d->index.find(*base);
      require(it != d->index.end(), "base vertex not listed: " + *base);
      d->base = it->second;
    }
    Graph g;
    g.data_ = std::move(d);
    require(g.is_connected(), "graph must be connected");
    return g;
  }

  std::size_t vertex_count() const { return data_->ids.size(); }
  std::size_t edge_count() const { return data_->edges.size(); }
  const std::vector<std::string>& vertex_ids() const { return data_->ids; }
  const std::string& id(int v) const { return data_->ids[v]; }
  const std::vector<Edge>& edges() const { return data_->edges; }
  const Edge& edge(int e) const { return data_->edges[e]; }

  int index_of(const std::string& id) const {
    auto it = data_->index.find(id);
    require(it != data_->index.end(), "unknown vertex id: " + id);
    return it->second;
  }

  bool has_vertex(const std::string& id) const { return data_->index.count(id) > 0; }

  // (neighbor, edge index) pairs sorted by neighbor.
  const std::vector<std::pair<int, int>>& neighbors(int v) const { return data_->adj[v]; }

  std::optional<int> base() const { return data_->base; }
  // Side convention for {A, A*} representatives: the side NOT containing this.
  int base_or_default() const { return data_->base.value_or(0); }

  bool same_as(const Graph& o) const { return data_ == o.data_; }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["vertices"] = data_->ids;
    auto edges = nlohmann::json::array();
    for (auto& e : data_->edges) {
      if (e.capacity == 1)
        edges.push_back({data_->ids[e.u], data_->ids[e.v]});
      else
        edges.push_back({data_->ids[e.u], data_->ids[e.v], e.capacity});
    }
    j["edges"] = edges;
    if (data_->base) j["base"] = data_->ids[*data_->base];
    return j;
  }

  static Graph from_json(const nlohmann::json& j) {
    require(j.contains("vertices") && j.contains("edges"), "graph json needs vertices and edges");
    std::vector<std::string> ids = j["vertices"].get<std::vector<std::string>>();
    std::vector<std::tuple<std::string, std::string, int>> edges;
    for (auto& e : j["edges"]) {
      require(e.is_array() && (e.size() == 2 || e.size() == 3), "edge must be [u,v] or [u,v,cap]");
      int cap = e.size() == 3 ? e[2].get<int>() : 1;
      edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>(), cap);
    }
    std::optional<std::string> base;
    if (j.contains("base")) base = j["base"].get<std::string>();
    return make(std::move(ids), std::move(edges), base);
  }

 private:
  struct Data {
    std::vector<std::string> ids;
    std::map<std::string, int> index;
    std::vector<Edge> edges;
    std::vector<std::vector<std::pair<int, int>>> adj;
    std::optional<int> base;
  };

  bool is_connected() const {
    std::size_t n = vertex_count();
    Bitset seen(n);
    std::vector<int> stack{0};
    seen.set(0);
    std::size_t found = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [w, e] : neighbors(v))
        if (!seen.test(w)) {
          seen.set(w);
          ++found;
          stack.push_back(w);
        }
    }
    return found == n;
  }

  std::shared_ptr<const Data> data_;
};

// A vertex subset A of a specific graph.  The atom of the whole cut theory:
// its coboundary, weight and complement are what every module manipulates.
class Cut {
 public:
  Cut() = default;
  Cut(const Graph& g, Bitset inside) : graph_(g), inside_(std::move(inside)) {
    require(inside_.size() == g.vertex_count(), "cut bitset size mismatch");
  }

  static Cut of_ids(const Graph& g, const std::vector<std::string>& ids) {
    Bitset b(g.vertex_count());
    for (auto& id : ids) b.set(g.index_of(id));
    return Cut(g, b);
  }

  static Cut empty(const Graph& g) { return Cut(g, Bitset(g.vertex_count())); }
  static Cut whole(const Graph& g) { return Cut(g, Bitset::full(g.vertex_count())); }

  const Graph& graph() const { return graph_; }
  const Bitset& inside() const { return inside_; }
  bool contains(int v) const { return inside_.test(v); }
  std::size_t size() const { return inside_.count(); }
  bool is_empty() const { return inside_.none(); }
  bool is_whole() const { return inside_.count() == graph_.vertex_count(); }
  bool is_proper() const { return !is_empty() && !is_whole(); }

  Cut complement() const { return Cut(graph_, ~inside_); }

  Cut operator&(const Cut& o) const { return combined(o, inside_ & o.inside_); }
  Cut operator|(const Cut& o) const { return combined(o, inside_ | o.inside_); }
  Cut operator^(const Cut& o) const { return combined(o, inside_ ^ o.inside_); }

  bool operator==(const Cut& o) const { return graph_.same_as(o.graph_) && inside_ == o.inside_; }
  bool operator!=(const Cut& o) const { return !(*this == o); }

  bool is_subset_of(const Cut& o) const {
    check_same_graph(o);
    return inside_.is_subset_of(o.inside_);
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (auto v : inside_.bits()) out.push_back(graph_.id(v));
    return out;
  }

  void check_same_graph(const Cut& o) const {
    require(graph_.same_as(o.graph_), "cuts belong to different graphs");
  }

  void check_graph(const Graph& g) const {
    require(graph_.same_as(g), "cut does not belong to this graph");
  }

 private:
  Cut combined(const Cut& o, Bitset bits) const {
    check_same_graph(o);
    return Cut(graph_, std::move(bits));
  }

  Graph graph_;
  Bitset inside_;
};

// Edges with exactly one endpoint in A.  Symmetric in A and A*.
inline std::vector<int> coboundary(const Graph& g, const Cut& a) {
  a.check_graph(g);
  std::vector<int> out;
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    if (a.contains(g.edge((int)e).u) != a.contains(g.edge((int)e).v)) out.push_back((int)e);
  return out;
}

// Capacity sum over the coboundary.
inline int cut_weight(const Graph& g, const Cut& a) {
  int w = 0;
  for (int e : coboundary(g, a)) w += g.edge(e).capacity;
  return w;
}

inline bool separates(const Graph& g, const Cut& a, int u, int v) {
  a.check_graph(g);
  require(u >= 0 && (std::size_t)u < g.vertex_count(), "unknown vertex index");
  require(v >= 0 && (std::size_t)v < g.vertex_count(), "unknown vertex index");
  return a.contains(u) != a.contains(v);
}

inline bool separates(const Graph& g, const Cut& a, const std::string& u, const std::string& v) {
  return separates(g, a, g.index_of(u), g.index_of(v));
}

// Connected components of the subgraph induced on `region`, ordered by least
// contained vertex index.
inline std::vector<Bitset> components(const Graph& g, const Bitset& region) {
  require(region.size() == g.vertex_count(), "region bitset size mismatch");
  std::vector<Bitset> out;
  Bitset seen(g.vertex_count());
  for (std::size_t s = 0; s < g.vertex_count(); ++s) {
    if (!region.test(s) || seen.test(s)) continue;
    Bitset comp(g.vertex_count());
    std::vector<int> stack{(int)s};
    comp.set(s);
    seen.set(s);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [w, e] : g.neighbors(v))
        if (region.test(w) && !seen.test(w)) {
          seen.set(w);
          comp.set(w);
          stack.push_back(w);
        }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

inline bool side_connected(const Graph& g, const Cut& a) {
  return components(g, a.inside()).size() <= 1;
}

inline bool both_sides_connected(const Graph& g, const Cut& a) {
  return side_connected(g, a) && side_connected(g, a.complement());
}

}  // namespace cutforest
