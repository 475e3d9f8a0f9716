// cutforest: build structure trees from edge cuts, relative trees over coset
// graphs, and the cubing-side metric machinery; batch front door with
// deterministic JSON/DOT output.
//
// Exit codes: 0 success, 1 precondition error, 2 truncation-inconclusive,
// 3 internal invariant failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cutforest/cubing.hpp"
#include "cutforest/decomposition.hpp"
#include "cutforest/fixtures.hpp"
#include "cutforest/verify.hpp"

using namespace cutforest;

namespace {

struct Output {
  std::string path;  // empty = stdout

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      if (text.empty() || text.back() != '\n') std::cout << '\n';
    } else {
      std::ofstream f(path);
      require(f.good(), "cannot open output file: " + path);
      f << text;
      if (text.empty() || text.back() != '\n') f << '\n';
    }
  }

  void write(const nlohmann::json& j) const { write(j.dump(2)); }
};

Graph load_graph(const std::string& fixture, const std::string& input) {
  if (!fixture.empty()) return fixtures::by_name(fixture);
  require(!input.empty(), "need --fixture or --input");
  std::ifstream f(input);
  require(f.good(), "cannot open graph file: " + input);
  nlohmann::json j;
  f >> j;
  return Graph::from_json(j);
}

nlohmann::json tree_json(const StructureTree& t) {
  nlohmann::json j;
  j["level"] = t.level;
  auto walls = nlohmann::json::array();
  for (auto& c : t.system.reps) walls.push_back(c.ids());
  j["walls"] = walls;
  j["vertex_count"] = t.vertices.size();
  auto edges = nlohmann::json::array();
  for (auto& e : t.edges) edges.push_back({{"wall", e.wall}, {"a", e.a}, {"b", e.b}});
  j["edges"] = edges;
  nlohmann::json nu;
  for (std::size_t x = 0; x < t.nu.size(); ++x) nu[t.system.graph.id((int)x)] = t.nu[x];
  j["nu"] = nu;
  return j;
}

std::vector<std::string> split_ids(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

Arena build_arena_from_flags(const std::string& group, int radius, bool trivial_h) {
  if (trivial_h) return build_fixture_arena(group, radius, std::vector<std::string>{});
  return build_fixture_arena(group, radius);
}

Cut prefix_cut(const Arena& a, const std::string& prefix) {
  Bitset b(a.graph.vertex_count());
  for (std::size_t v = 0; v < a.rep.size(); ++v)
    if (!a.rep[v].empty() && a.rep[v].rfind(prefix, 0) == 0) b.set(v);
  require(b.any(), "no coset representative starts with '" + prefix + "'");
  return Cut(a.graph, b);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cut-and-tree toolkit: structure trees, relative trees, Sageev cubing"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string format = "json", out_path;
  uint64_t seed = 0;
  app.add_option("--format", format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--seed", seed, "seed for sampled checks and the corpus");

  // ---- cuts
  std::string cuts_fixture, cuts_input;
  int cuts_level = 1;
  bool cuts_connected = false;
  auto* cuts = app.add_subcommand("cuts", "enumerate bounded-weight cuts and extract E_n");
  cuts->add_option("--fixture", cuts_fixture, "graph fixture name");
  cuts->add_option("--input", cuts_input, "graph json file");
  cuts->add_option("-n,--level", cuts_level, "weight bound");
  cuts->add_flag("--connected", cuts_connected, "restrict enumeration to both-sides-connected cuts");

  // ---- tree
  std::string tree_fixture, tree_input;
  int tree_level = 1;
  auto* tree = app.add_subcommand("tree", "structure tree T_n with nu");
  tree->add_option("--fixture", tree_fixture, "graph fixture name");
  tree->add_option("--input", tree_input, "graph json file");
  tree->add_option("-n,--level", tree_level, "weight bound");

  // ---- decompose
  std::string dec_fixture, dec_input, dec_cut;
  int dec_level = 1;
  auto* dec = app.add_subcommand("decompose", "canonical expression of a cut over E_n");
  dec->add_option("--fixture", dec_fixture, "graph fixture name");
  dec->add_option("--input", dec_input, "graph json file");
  dec->add_option("-n,--level", dec_level, "weight bound");
  dec->add_option("--cut", dec_cut, "comma separated vertex ids")->required();

  // ---- arena
  std::string arena_group = "z";
  int arena_radius = 4;
  bool arena_trivial = false;
  auto* arena_cmd = app.add_subcommand("arena", "build and dump a truncated coset graph");
  arena_cmd->add_option("--group", arena_group, "group fixture: z z2 f2 dinf z2z3 bs-amalgam");
  arena_cmd->add_option("--radius", arena_radius, "truncation radius (>= 2)");
  arena_cmd->add_flag("--trivial-h", arena_trivial, "use the trivial subgroup instead of the fixture H");

  // ---- relative
  std::string rel_group = "dinf", rel_g;
  int rel_radius = 4, rel_level = 1, rel_wall_a = -1, rel_wall_b = -1;
  auto* rel = app.add_subcommand("relative", "relative tree, corner, crossing case and overlap");
  rel->add_option("--group", rel_group, "group fixture");
  rel->add_option("--radius", rel_radius, "truncation radius");
  rel->add_option("-n,--level", rel_level, "H-orbit bound");
  rel->add_option("--g", rel_g, "word: add corner/crossing/overlap reports for it");
  rel->add_option("--wall-a", rel_wall_a, "wall index for the corner reports (default 0)");
  rel->add_option("--wall-b", rel_wall_b, "wall index for the corner reports (default 0)");
  bool rel_assemble = false;
  rel->add_flag("--assemble", rel_assemble, "also build the G-translated nested system and its tree");

  // ---- cubing
  std::string cub_group = "z";
  int cub_radius = 4, cub_words = 3, cub_gamma = 0;
  auto* cub = app.add_subcommand("cubing", "half-space system, Sageev graph and iso check");
  cub->add_option("--group", cub_group, "z, dinf or f2 (trivial H orbits of a half space)");
  cub->add_option("--radius", cub_radius, "truncation radius");
  cub->add_option("--words", cub_words, "orbit word radius");
  cub->add_option("--gamma", cub_gamma, "also emit a gamma ball of this radius (dot format)");

  // ---- ztree
  std::string zt_group = "z", zt_matrix;
  int zt_radius = 5, zt_span = 2;
  auto* zt = app.add_subcommand("ztree", "embed an orbit metric in its Z-tree");
  zt->add_option("--group", zt_group, "z or dinf");
  zt->add_option("--radius", zt_radius, "truncation radius");
  zt->add_option("--span", zt_span, "translation span of the orbit");
  zt->add_option("--matrix", zt_matrix, "json file with a distance matrix instead");

  // ---- verify
  std::vector<std::string> verify_suites;
  auto* ver = app.add_subcommand("verify", "run the oracle suites");
  ver->add_option("--suite", verify_suites, "suite names (default: all)");

  // ---- fixtures
  auto* fx = app.add_subcommand("fixtures", "list graph and group fixtures");

  CLI11_PARSE(app, argc, argv);
  Output output{out_path};

  try {
    if (*cuts) {
      Graph g = load_graph(cuts_fixture, cuts_input);
      nlohmann::json j;
      auto all = nlohmann::json::array();
      for (auto& c : enumerate_cuts(g, cuts_level, cuts_connected))
        all.push_back({{"vertices", c.ids()}, {"weight", cut_weight(g, c)}});
      j["cuts"] = all;
      j["level"] = cuts_level;
      j["nested_generators"] = extract_nested_generators(g, cuts_level).to_json();
      output.write(j);
    } else if (*tree) {
      Graph g = load_graph(tree_fixture, tree_input);
      auto t = structure_tree(g, tree_level);
      if (format == "dot")
        output.write(t.to_dot());
      else
        output.write(tree_json(t));
    } else if (*dec) {
      Graph g = load_graph(dec_fixture, dec_input);
      auto sys = extract_nested_generators(g, dec_level);
      auto t = build_tree(sys);
      Cut a = Cut::of_ids(g, split_ids(dec_cut));
      auto e = canonical_decomposition(a, sys, t);
      nlohmann::json j = e.to_json(t);
      j["cut"] = a.ids();
      j["evaluates_to"] = evaluate_expression(e, t).ids();
      output.write(j);
    } else if (*arena_cmd) {
      Arena a = build_arena_from_flags(arena_group, arena_radius, arena_trivial);
      if (format == "dot") {
        std::ostringstream os;
        os << "graph arena {\n";
        for (std::size_t v = 0; v < a.graph.vertex_count(); ++v)
          os << "  v" << v << " [label=\"" << a.graph.id((int)v) << "\""
             << (a.boundary.test(v) ? ", style=dashed" : "") << "];\n";
        for (auto& e : a.graph.edges()) os << "  v" << e.u << " -- v" << e.v << ";\n";
        os << "}\n";
        output.write(os.str());
      } else {
        output.write(a.to_json());
      }
    } else if (*rel) {
      Arena a = build_arena_from_flags(rel_group, rel_radius, false);
      auto rs = relative_nested_system(a, rel_level);
      if (rel_g.empty() && format == "dot") {
        output.write(rs.tree.to_dot());
      } else {
        nlohmann::json j;
        j["group"] = rel_group;
        j["level"] = rel_level;
        j["walls"] = rs.system.to_json()["members"];
        j["tree"] = tree_json(rs.tree);
        j["skipped_quotient_members"] = rs.skipped_members.size();
        if (rel_assemble) {
          auto words = a.oracle.ball(2, a.oracle.letters_with_inverses(a.s_letters));
          auto as = assemble_g_nested(rs, words);
          j["assembled"] = {{"walls", as.system.size()},
                            {"tree_vertices", as.tree.vertices.size()},
                            {"untranslatable", as.untranslatable},
                            {"fixed_vertex_exists", as.fixed_vertex_exists},
                            {"wall_h_coset_counts", as.wall_h_coset_counts}};
        }
        if (!rel_g.empty()) {
          int wa = rel_wall_a < 0 ? 0 : rel_wall_a;
          int wb = rel_wall_b < 0 ? 0 : rel_wall_b;
          require(wa < (int)rs.system.size() && wb < (int)rs.system.size(), "wall index out of range");
          auto cert = kropholler_corner(a, rs.system.reps[wa], rs.system.reps[wb], rel_g);
          j["corner"] = to_json(cert);
          if (!cert.corner.is_empty())
            j["crossing_case"] = to_json(crossing_case(a, rs.system.reps[wa], rs.system.reps[wb], rel_g));
          auto words = a.oracle.ball(2, a.oracle.letters_with_inverses(a.s_letters));
          auto rep = tree_overlap(rs, rel_g, words);
          j["overlap"] = rep.to_json(rs);
          if (format == "dot") {
            output.write(overlap_to_dot(rs, rep));
            return 0;
          }
        }
        output.write(j);
      }
    } else if (*cub) {
      Arena a = build_fixture_arena(cub_group, cub_radius, std::vector<std::string>{});
      // canned base half space per group: the negative-side cut at the base
      char neg = cub_group == "z" ? 'T' : (cub_group == "dinf" ? 's' : 'A');
      Bitset half(a.graph.vertex_count());
      for (std::size_t v = 0; v < a.rep.size(); ++v)
        if (a.rep[v].empty() || a.rep[v][0] == neg) half.set(v);
      auto sys = half_space_system(a, Cut(a.graph, half),
                                   a.oracle.ball(cub_words, a.oracle.letters_with_inverses(a.s_letters)));
      auto sg = sageev_vertices(sys);
      if (cub_gamma > 0 && format == "dot") {
        LabelUniverse u = wall_universe(sys);
        if (u.size() > 12) u.labels.resize(12);
        output.write(gamma_ball(MetricPoint{0}, cub_gamma, u).to_dot());
        return 0;
      }
      nlohmann::json j;
      j["group"] = cub_group;
      auto walls = nlohmann::json::array();
      for (std::size_t w = 0; w < sys.size(); ++w)
        walls.push_back({{"label", sys.labels[w]}, {"vertices", sys.walls[w].ids()}});
      j["walls"] = walls;
      j["rejected_walls"] = sys.rejected;
      j["sageev_vertices"] = sg.vertices.size();
      j["sageev_edges"] = sg.edges.size();
      int principal = 0;
      bool injective = true;
      std::set<uint64_t> seen;
      for (std::size_t v = 0; v < sg.vertices.size(); ++v)
        if (sg.in_principal_component((int)v)) {
          ++principal;
          if (!seen.insert(vertex_to_set(sg, (int)v).point.delta).second) injective = false;
        }
      j["principal_component_size"] = principal;
      j["vertex_to_set_injective"] = injective;
      output.write(j);
    } else if (*zt) {
      std::vector<std::vector<int>> d;
      if (!zt_matrix.empty()) {
        std::ifstream f(zt_matrix);
        require(f.good(), "cannot open matrix file: " + zt_matrix);
        nlohmann::json j;
        f >> j;
        d = j.get<std::vector<std::vector<int>>>();
      } else {
        Arena a = build_fixture_arena(zt_group, zt_radius, std::vector<std::string>{});
        char neg = zt_group == "z" ? 'T' : 's';
        Bitset half(a.graph.vertex_count());
        for (std::size_t v = 0; v < a.rep.size(); ++v)
          if (a.rep[v].empty() || a.rep[v][0] == neg) half.set(v);
        Cut base(a.graph, half);
        std::vector<Bitset> deltas;
        for (int k = -zt_span; k <= zt_span; ++k) {
          std::string w;
          if (zt_group == "z")
            w = std::string((std::size_t)std::abs(k), k >= 0 ? 't' : 'T');
          else
            for (int i = 0; i < std::abs(k); ++i) w += (k >= 0 ? "ts" : "st");
          auto rt = a.right_translate(w, base);
          deltas.push_back((rt.set.inside() ^ half) & ~rt.uncertain);
        }
        d.assign(deltas.size(), std::vector<int>(deltas.size(), 0));
        for (std::size_t i = 0; i < deltas.size(); ++i)
          for (std::size_t j2 = 0; j2 < deltas.size(); ++j2)
            d[i][j2] = (int)(deltas[i] ^ deltas[j2]).count();
      }
      auto t = build_z_tree(d);
      nlohmann::json j;
      j["points"] = t.point_count;
      j["nodes"] = t.node_count();
      auto edges = nlohmann::json::array();
      for (std::size_t u = 0; u < t.adj.size(); ++u)
        for (auto [w, len] : t.adj[u])
          if ((int)u < w) edges.push_back({{"a", u}, {"b", w}, {"length", len}});
      j["edges"] = edges;
      j["degree_over_two"] = t.high_degree_nodes();
      auto dist = nlohmann::json::array();
      for (int i = 0; i < t.point_count; ++i) {
        auto row = nlohmann::json::array();
        for (int j2 = 0; j2 < t.point_count; ++j2) row.push_back(t.dist[i][j2]);
        dist.push_back(row);
      }
      j["distance_matrix"] = dist;
      output.write(j);
    } else if (*ver) {
      auto names = verify_suites.empty() ? verify::suite_names() : verify_suites;
      bool all_ok = true;
      std::ostringstream os;
      for (auto& name : names) {
        auto rep = verify::run_suite(name, seed);
        for (auto& line : rep.lines) {
          os << (line.passed ? "PASS" : "FAIL") << "  " << rep.name << ": " << line.name;
          if (!line.detail.empty()) os << "  (" << line.detail << ")";
          os << "\n";
          all_ok = all_ok && line.passed;
        }
      }
      output.write(os.str());
      if (!all_ok) throw internal_error("verify found failing checks");
    } else if (*fx) {
      nlohmann::json j;
      j["graphs"] = fixtures::graph_fixture_names();
      j["groups"] = group_fixture_names();
      output.write(j);
    }
  } catch (const generation_failure& e) {
    nlohmann::json j;
    j["error"] = e.what();
    auto unc = nlohmann::json::array();
    for (auto& c : e.uncovered) unc.push_back(c.ids());
    j["uncovered"] = unc;
    std::cerr << j.dump(2) << "\n";
    return 3;
  } catch (const truncation_error& e) {
    std::cerr << "truncation-inconclusive: " << e.what() << "\n";
    return 2;
  } catch (const precondition_error& e) {
    std::cerr << "precondition error: " << e.what() << "\n";
    return 1;
  } catch (const internal_error& e) {
    std::cerr << "internal invariant failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
