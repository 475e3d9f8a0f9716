#pragma once

#include <functional>
#include <memory>
#include <tuple>
#include <vector>

#include "cutforest/structure_tree.hpp"

namespace cutforest {

enum class ExprForm { direct_union, complemented_union, recursive_merge };

inline const char* to_string(ExprForm f) {
  switch (f) {
    case ExprForm::direct_union: return "direct-union";
    case ExprForm::complemented_union: return "complemented-union";
    default: return "recursive-merge";
  }
}

// Oriented member: (wall index, which side) where true selects the canonical
// representative side.
using OrientedMember = std::pair<int, bool>;

struct ExprNode {
  ExprForm form;
  std::vector<OrientedMember> members;  // union forms
  std::shared_ptr<const ExprNode> left, right;
  OrientedMember split{-1, false};  // the twig a merge recursed on
};

// Canonical expression of a ring element over the nested generators.  The
// side assignment over tree vertices is the canonical artifact; the flat
// generator list and the evaluation tree are derived from the recursion.
struct CanonicalExpression {
  Bitset a_side;  // tree vertices assigned to the A side
  ExprForm form;
  std::vector<OrientedMember> members;
  std::shared_ptr<const ExprNode> root;
  // Non-image vertices decided by the finite-degree tie rule, with the two
  // incident pointing-subset counts; ties go to the A* side.
  std::vector<std::tuple<int, int, int>> tie_decisions;

  nlohmann::json to_json(const StructureTree& tree) const {
    nlohmann::json j;
    j["form"] = to_string(form);
    auto ms = nlohmann::json::array();
    for (auto& [w, side] : members) ms.push_back(tree.half_space(w, side).ids());
    j["members"] = ms;
    auto side = nlohmann::json::array();
    for (std::size_t v = 0; v < tree.vertices.size(); ++v)
      side.push_back(a_side.test(v) ? "A" : "A*");
    j["tree_vertex_sides"] = side;
    auto ties = nlohmann::json::array();
    for (auto& [v, ka, kb] : tie_decisions)
      ties.push_back({{"vertex", v}, {"incident_in_A", ka}, {"incident_in_A*", kb}});
    j["tie_rule_decisions"] = ties;
    return j;
  }
};

// Chooses the twig to split on; receives the admissible (wall, side) choices
// in canonical order.  The default takes the first, the test harness sweeps
// all of them.
using TwigPolicy = std::function<OrientedMember(const std::vector<OrientedMember>&)>;

inline OrientedMember first_twig(const std::vector<OrientedMember>& choices) { return choices[0]; }

inline Cut evaluate_node(const ExprNode& node, const StructureTree& tree) {
  switch (node.form) {
    case ExprForm::direct_union: {
      Cut acc = Cut::empty(tree.system.graph);
      for (auto& [w, side] : node.members) acc = acc | tree.half_space(w, side);
      return acc;
    }
    case ExprForm::complemented_union: {
      Cut acc = Cut::empty(tree.system.graph);
      for (auto& [w, side] : node.members) acc = acc | tree.half_space(w, side);
      return acc.complement();
    }
    default:
      return evaluate_node(*node.left, tree) | evaluate_node(*node.right, tree);
  }
}

inline Cut evaluate_expression(const CanonicalExpression& expr, const StructureTree& tree) {
  require(expr.root != nullptr, "malformed expression: missing evaluation tree");
  return evaluate_node(*expr.root, tree);
}

namespace detail {

struct DecompResult {
  Bitset a_side;
  std::shared_ptr<const ExprNode> node;
  std::vector<OrientedMember> flat;
  std::vector<std::tuple<int, int, int>> ties;
};

struct Decomposer {
  const StructureTree& tree;
  const NestedSystem& sys;
  TwigPolicy policy;
  int depth_guard;

  DecompResult run(const Cut& a, int depth) {
    check_internal(depth <= depth_guard, "canonical decomposition failed to terminate");
    std::size_t nt = tree.vertices.size();

    if (a.is_empty()) {
      auto node = std::make_shared<ExprNode>(ExprNode{ExprForm::direct_union, {}, nullptr, nullptr, {}});
      return {Bitset(nt), node, {}, {}};
    }
    if (a.is_whole()) {
      auto node =
          std::make_shared<ExprNode>(ExprNode{ExprForm::complemented_union, {}, nullptr, nullptr, {}});
      return {Bitset::full(nt), node, {}, {}};
    }
    if (auto pair = sys.find_pair(a)) {
      bool side = a == sys.reps[*pair];
      auto node = std::make_shared<ExprNode>(
          ExprNode{ExprForm::direct_union, {{*pair, side}}, nullptr, nullptr, {}});
      return {tree.half_tree(*pair, side), node, {{*pair, side}}, {}};
    }

    std::vector<int> crossing;
    for (std::size_t w = 0; w < sys.size(); ++w)
      if (!nested(a, sys.reps[w])) crossing.push_back((int)w);

    if (crossing.empty()) return base_case(a);
    return split_case(a, crossing, depth);
  }

  // mu(a) = 0, a proper, not a member: a determines a vertex z and one side
  // of a is the union of the member cuts pointing at z.
  DecompResult base_case(const Cut& a) {
    Cut ac = a.complement();
    // pointing side per wall: the side contained in a or in a*
    std::vector<bool> pointing_rep(sys.size());
    OrientationMask z_mask = 0;
    for (std::size_t w = 0; w < sys.size(); ++w) {
      const Cut& r = sys.reps[w];
      Cut rc = r.complement();
      bool rep_points = r.is_subset_of(a) || r.is_subset_of(ac);
      bool comp_points = rc.is_subset_of(a) || rc.is_subset_of(ac);
      check_internal(rep_points != comp_points, "nested wall without a unique pointing side");
      pointing_rep[w] = rep_points;
      if (!rep_points) z_mask |= 1ull << w;  // z chooses the complement of the pointing side
    }
    int z = tree.find_vertex(z_mask);

    std::vector<OrientedMember> in_a, in_ac;
    for (auto& e : tree.edges)
      if (e.a == z || e.b == z) {
        Cut p = tree.half_space(e.wall, pointing_rep[e.wall]);
        if (p.is_subset_of(a))
          in_a.push_back({e.wall, pointing_rep[e.wall]});
        else {
          check_internal(p.is_subset_of(ac), "incident pointing cut in neither side");
          in_ac.push_back({e.wall, pointing_rep[e.wall]});
        }
      }

    auto union_of = [&](const std::vector<OrientedMember>& ms) {
      Cut acc = Cut::empty(sys.graph);
      for (auto& [w, s] : ms) acc = acc | tree.half_space(w, s);
      return acc;
    };

    bool z_in_a_side;
    std::vector<std::tuple<int, int, int>> ties;
    auto pre = tree.nu_preimage(z);
    if (!pre.empty()) {
      z_in_a_side = a.contains(pre[0]);
    } else {
      ties.emplace_back(z, (int)in_a.size(), (int)in_ac.size());
      z_in_a_side = (int)in_a.size() > (int)in_ac.size();
    }

    ExprForm form = z_in_a_side ? ExprForm::complemented_union : ExprForm::direct_union;
    const auto& members = z_in_a_side ? in_ac : in_a;
    if (z_in_a_side)
      check_internal(union_of(in_ac) == ac, "complemented union does not reproduce A*");
    else
      check_internal(union_of(in_a) == a, "direct union does not reproduce A");

    Bitset side(tree.vertices.size());
    for (auto& [w, s] : members) side = side | tree.half_tree(w, s);
    if (z_in_a_side) side = ~side;

    auto node = std::make_shared<ExprNode>(ExprNode{form, members, nullptr, nullptr, {}});
    return {side, node, members, std::move(ties)};
  }

  DecompResult split_case(const Cut& a, const std::vector<int>& crossing, int depth) {
    // twigs: crossing walls whose tree edge has an endpoint meeting no other
    // crossing wall
    std::vector<OrientedMember> admissible;
    for (int w : crossing) {
      const StructureTree::TreeEdge* edge = nullptr;
      for (auto& e : tree.edges)
        if (e.wall == w) edge = &e;
      check_internal(edge != nullptr, "wall has no tree edge");
      auto f_degree = [&](int v) {
        int d = 0;
        for (auto& e : tree.edges)
          if (e.a == v || e.b == v)
            for (int u : crossing)
              if (e.wall == u) ++d;
        return d;
      };
      if (f_degree(edge->a) != 1 && f_degree(edge->b) != 1) continue;
      for (bool s : {true, false}) {
        Cut half = tree.half_space(w, s);
        Cut part = a & half;
        bool mu0 = true;
        for (std::size_t u = 0; u < sys.size() && mu0; ++u)
          if (!nested(part, sys.reps[u])) mu0 = false;
        if (mu0) admissible.push_back({w, s});
      }
    }
    check_internal(!admissible.empty(), "no admissible twig for a crossing cut");
    OrientedMember choice = policy(admissible);

    Cut half = tree.half_space(choice.first, choice.second);
    DecompResult left = run(a & half, depth + 1);
    DecompResult right = run(a & half.complement(), depth + 1);

    // keep walls used by exactly one sub-expression
    std::vector<OrientedMember> flat;
    auto used_in = [](const std::vector<OrientedMember>& ms, int wall) {
      for (auto& [w, s] : ms)
        if (w == wall) return true;
      return false;
    };
    for (auto& m : left.flat)
      if (!used_in(right.flat, m.first)) flat.push_back(m);
    for (auto& m : right.flat)
      if (!used_in(left.flat, m.first)) flat.push_back(m);
    std::sort(flat.begin(), flat.end());

    DecompResult out;
    out.a_side = left.a_side | right.a_side;
    out.node = std::make_shared<ExprNode>(
        ExprNode{ExprForm::recursive_merge, {}, left.node, right.node, choice});
    out.flat = std::move(flat);
    out.ties = std::move(left.ties);
    for (auto& t : right.ties) out.ties.push_back(t);
    return out;
  }
};

}  // namespace detail

// True iff a is a union of nu-fibers, i.e. lies in the ring generated by the
// system.
inline bool in_ring_closure(const Cut& a, const StructureTree& tree) {
  for (std::size_t x = 0; x < tree.nu.size(); ++x)
    for (std::size_t y = x + 1; y < tree.nu.size(); ++y)
      if (tree.nu[x] == tree.nu[y] && a.contains((int)x) != a.contains((int)y)) return false;
  return true;
}

inline CanonicalExpression canonical_decomposition(const Cut& a, const NestedSystem& system,
                                                   const StructureTree& tree,
                                                   TwigPolicy policy = first_twig) {
  a.check_graph(system.graph);
  require(tree.system.reps.size() == system.reps.size(), "tree was not built from this system");
  for (std::size_t i = 0; i < system.reps.size(); ++i)
    require(tree.system.reps[i] == system.reps[i], "tree was not built from this system");
  require(in_ring_closure(a, tree),
          "cut is not in the ring closure of the system (separates a nu-fiber)");

  detail::Decomposer d{tree, system, std::move(policy), (int)system.size() + 2};
  auto res = d.run(a, 0);

  // the side assignment must reproduce a through nu
  for (std::size_t x = 0; x < tree.nu.size(); ++x)
    check_internal(res.a_side.test(tree.nu[x]) == a.contains((int)x),
                   "side assignment disagrees with the cut on a nu-image vertex");

  CanonicalExpression expr;
  expr.a_side = std::move(res.a_side);
  expr.form = res.node->form;
  expr.members = std::move(res.flat);
  expr.root = std::move(res.node);
  expr.tie_decisions = std::move(res.ties);

  Cut back = evaluate_expression(expr, tree);
  check_internal(back == a, "expression evaluation does not reproduce the cut");
  return expr;
}

}  // namespace cutforest
