#include <doctest.h>

#include "fixtures.hpp"
#include "vdgslice/vdg.hpp"

using namespace vdgslice;

namespace {

const std::string kX3d = "s1.c:3:5:x:p0:t811c9dc5:o0:d";
const std::string kX3u = "s1.c:3:9:x:p0:t811c9dc5:o0:u";
const std::string kX4c = "s1.c:4:9:x:p0:t811c9dc5:o0:c";
const std::string kY5d = "s1.c:5:9:y:p0:t811c9dc5:o0:d";
const std::string kY7d = "s1.c:7:9:y:p0:t811c9dc5:o0:d";
const std::string kX7u = "s1.c:7:13:x:p0:t811c9dc5:o0:u";
const std::string kZ9d = "s1.c:9:5:z:p0:t811c9dc5:o0:d";
const std::string kY9u = "s1.c:9:9:y:p0:t811c9dc5:o0:u";
const std::string kX9u = "s1.c:9:13:x:p0:t811c9dc5:o0:u";

bool has_edge(const Analysis& a, const std::string& from, const std::string& to, EdgeKind kind) {
  NodeIndex f = fixtures::node(a, from), t = fixtures::node(a, to);
  for (auto e : a.vdg.in_edges(t))
    if (a.vdg.edges[e].from == f && a.vdg.edges[e].kind == kind) return true;
  return false;
}

std::size_t in_kind(const Analysis& a, const std::string& id, EdgeKind kind) {
  std::size_t n = 0;
  for (auto e : a.vdg.in_edges(fixtures::node(a, id))) n += a.vdg.edges[e].kind == kind;
  return n;
}

std::size_t cross_edges(const Vdg& g) {
  std::size_t n = 0;
  for (const auto& e : g.edges) n += e.cross_path;
  return n;
}

}  // namespace

TEST_CASE("S1 has the hand-derived dependence edges") {
  auto a = fixtures::analyze({"s1.c"}, {"main_task"});
  CHECK(a->vdg.nodes.size() == 9);
  CHECK(a->vdg.edges.size() == 12);
  CHECK(has_edge(*a, kX3d, kX4c, EdgeKind::Data));
  CHECK(has_edge(*a, kX3d, kX7u, EdgeKind::Data));
  CHECK(has_edge(*a, kX3d, kX9u, EdgeKind::Data));
  CHECK(has_edge(*a, kX4c, kY5d, EdgeKind::Control));
  CHECK(has_edge(*a, kX4c, kY7d, EdgeKind::Control));
  CHECK(has_edge(*a, kX4c, kX7u, EdgeKind::Control));
  CHECK(has_edge(*a, kY5d, kY9u, EdgeKind::Data));
  CHECK(has_edge(*a, kY7d, kY9u, EdgeKind::Data));
  CHECK(has_edge(*a, kY9u, kZ9d, EdgeKind::Assignment));
  CHECK(has_edge(*a, kX9u, kZ9d, EdgeKind::Assignment));
  CHECK(has_edge(*a, kX3u, kX3d, EdgeKind::Assignment));
  CHECK(has_edge(*a, kX7u, kY7d, EdgeKind::Assignment));
  CHECK(in_kind(*a, kX3u, EdgeKind::Data) == 0);
  CHECK(a->vdg.in_edges(fixtures::node(*a, kX3u)).empty());
  CHECK(a->vdg.nodes[fixtures::node(*a, kX3u)].entry_reached);
  CHECK_FALSE(a->vdg.nodes[fixtures::node(*a, kX9u)].entry_reached);
}

TEST_CASE("a lone constant assignment is one def and no edges") {
  auto a = fixtures::analyze_text("int a;\nvoid f(void) {\n  a = 1;\n}\n", {"f"});
  REQUIRE(a->vdg.nodes.size() == 1);
  CHECK(a->vdg.nodes[0].role == NodeRole::Def);
  CHECK(a->vdg.edges.empty());
}

TEST_CASE("the loop fixed point connects the body def to the condition") {
  auto a = fixtures::analyze_text("int i, n;\nvoid f(void) {\n  while (i < n) { i = i + 1; }\n}\n", {"f"});
  CHECK(has_edge(*a, "t.c:3:19:i:p0:t811c9dc5:o0:d", "t.c:3:10:i:p0:t811c9dc5:o0:c", EdgeKind::Data));
  CHECK(has_edge(*a, "t.c:3:19:i:p0:t811c9dc5:o0:d", "t.c:3:23:i:p0:t811c9dc5:o0:u", EdgeKind::Data));
  CHECK(has_edge(*a, "t.c:3:10:i:p0:t811c9dc5:o0:c", "t.c:3:19:i:p0:t811c9dc5:o0:d", EdgeKind::Control));
}

TEST_CASE("a strong def kills and branch defs merge") {
  auto a = fixtures::analyze_text(
      "int a, b, c;\nvoid f(void) {\n  a = 1;\n  a = 2;\n  if (c) a = 3;\n  b = a;\n}\n", {"f"});
  NodeIndex use = fixtures::node(*a, "t.c:6:7:a:p0:t811c9dc5:o0:u");
  std::set<std::uint32_t> lines;
  for (auto e : a->vdg.in_edges(use))
    if (a->vdg.edges[e].kind == EdgeKind::Data) lines.insert(a->vdg.nodes[a->vdg.edges[e].from].pos.line);
  CHECK(lines == std::set<std::uint32_t>{4, 5});
}

TEST_CASE("S2 links the isr def to the task use across paths") {
  auto a = fixtures::analyze({"s2.c"}, {"task", "isr"});
  NodeIndex def = fixtures::node(*a, "s2.c:6:5:s:p1:t811c9dc5:o0:d");
  NodeIndex use = fixtures::node(*a, "s2.c:3:11:s:p0:t811c9dc5:o0:u");
  bool found = false;
  for (auto e : a->vdg.in_edges(use)) {
    const VdgEdge& edge = a->vdg.edges[e];
    if (edge.from == def) found = edge.kind == EdgeKind::Data && edge.cross_path;
  }
  CHECK(found);
  CHECK(cross_edges(a->vdg) == 1);
}

TEST_CASE("locals never produce cross-path edges") {
  auto a = fixtures::analyze_text(
      "void f(void) {\n  int a = 1;\n  int b = a;\n}\nvoid g(void) {\n  int a = 2;\n  int b = a;\n}\n", {"f", "g"});
  CHECK(cross_edges(a->vdg) == 0);
  CHECK(a->vdg.edges.size() == 4);
}

TEST_CASE("a global written in two other paths has two cross-path in-edges") {
  auto a = fixtures::analyze_text(
      "int g, r;\nvoid p0(void) {\n  r = g;\n}\nvoid p1(void) {\n  g = 1;\n}\nvoid p2(void) {\n  g = 2;\n}\n",
      {"p0", "p1", "p2"});
  NodeIndex use = fixtures::node(*a, "t.c:3:7:g:p0:t811c9dc5:o0:u");
  std::size_t cross = 0;
  std::set<std::uint32_t> from_paths;
  for (auto e : a->vdg.in_edges(use)) {
    cross += a->vdg.edges[e].cross_path;
    from_paths.insert(a->vdg.nodes[a->vdg.edges[e].from].path);
  }
  CHECK(cross == 2);
  CHECK(from_paths == std::set<std::uint32_t>{1, 2});
}

TEST_CASE("cross-path connection is idempotent") {
  auto a = fixtures::analyze({"s2.c"}, {"task", "isr"});
  std::size_t before = a->vdg.edges.size();
  connect_cross_path(a->vdg, a->model);
  CHECK(a->vdg.edges.size() == before);
}

TEST_CASE("find_nodes filters by name, file, line and path") {
  auto s1 = fixtures::analyze({"s1.c"}, {"main_task"});
  auto ys = find_nodes(s1->vdg, s1->model, "y");
  REQUIRE(ys.size() == 3);
  CHECK(s1->vdg.nodes[ys[0]].id == kY5d);
  CHECK(s1->vdg.nodes[ys[1]].id == kY7d);
  CHECK(s1->vdg.nodes[ys[2]].id == kY9u);
  CHECK(find_nodes(s1->vdg, s1->model, "nosuch").empty());
  CHECK(find_nodes(s1->vdg, s1->model, "x", NodeFilter{std::nullopt, 9, std::nullopt}).size() == 1);
  auto s2 = fixtures::analyze({"s2.c"}, {"task", "isr"});
  auto s = find_nodes(s2->vdg, s2->model, "s", NodeFilter{std::nullopt, std::nullopt, 0});
  REQUIRE(s.size() == 1);
  CHECK(s2->vdg.nodes[s[0]].role == NodeRole::Use);
}

TEST_CASE("calls bind arguments to parameters and returns to the result") {
  auto a = fixtures::analyze_text(
      "int g, r;\nint h(int p) {\n  return p + 1;\n}\nvoid f(void) {\n  r = h(g);\n}\n", {"f"});
  std::size_t traced = 0;
  for (const auto& n : a->vdg.nodes) traced += n.trace != 0;
  CHECK(traced > 0);
  NodeIndex r = fixtures::node(*a, "t.c:6:3:r:p0:t811c9dc5:o0:d");
  std::set<NodeIndex> back{r};
  std::vector<NodeIndex> work{r};
  while (!work.empty()) {
    NodeIndex n = work.back();
    work.pop_back();
    for (auto e : a->vdg.in_edges(n))
      if (back.insert(a->vdg.edges[e].from).second) work.push_back(a->vdg.edges[e].from);
  }
  bool reaches_g = false;
  for (NodeIndex n : back) reaches_g = reaches_g || a->model.symbol(a->vdg.nodes[n].symbol).name == "g";
  CHECK(reaches_g);
}

TEST_CASE("node ids are unique and follow the documented format") {
  auto a = fixtures::analyze({"s2.c"}, {"task", "isr"});
  std::set<std::string> ids;
  for (const auto& n : a->vdg.nodes) {
    CHECK(ids.insert(n.id).second);
    CHECK(n.id == format_node_id(a->model, a->vdg.traces, n));
    CHECK(a->vdg.find(n.id).has_value());
  }
}
