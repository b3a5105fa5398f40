#include <doctest.h>

#include <random>

#include "gdsl/parser.hpp"
#include "gdsl/semantic.hpp"
#include "gdsl/transforms.hpp"
#include "skeleton.hpp"
#include "support.hpp"

using namespace gdsl;

namespace {

Program corpus(const std::string &name) { return parse_source(read_corpus(name)); }

const Foreach *find_launch(const Program &p) {
  for (const auto &t : find_target_functions(resolve(p).program)) (void)t;
  const Foreach *out = nullptr;
  for (const auto &s : p.main.body.stmts)
    visit_stmts(s, [&](const Stmt &x) {
      if (!out && launch_call(p, x)) out = &x.as<Foreach>();
    });
  return out;
}

} // namespace

TEST_CASE("vertex to edge on SSSP matches the edge listing") {
  TransformResult r = vertex_to_edge(corpus("sssp.fal"));
  REQUIRE(r.report.applied);
  CHECK(r.report.rewrittenFunction == "relaxgraph");
  CHECK(alpha_equivalent(r.program, corpus("sssp_edge.fal")));
  const auto &k = r.program.functions[0];
  CHECK(k.params[0].type == TypeKind::Edge);
  CHECK(print_stmt(k.body.stmts[2]) == "MIN(t.dist, p.dist + e.weight, changed);");
}

TEST_CASE("vertex to edge on BFS rewrites the level filter") {
  TransformResult r = vertex_to_edge(corpus("bfs.fal"));
  REQUIRE(r.report.applied);
  const Foreach *fe = find_launch(r.program);
  REQUIRE(fe);
  CHECK(fe->iterator == IteratorKind::Edges);
  CHECK(print_expr(*fe->filter) == "e.src.dist == lev");
  CHECK(alpha_equivalent(r.program, corpus("bfs_edge.fal")));
}

TEST_CASE("in-neighbor traversal maps the iterator to the edge source") {
  Program p = parse_source(R"(
int changed = 0;
void pull(Point p, Graph graph) {
  foreach (t In p.innbrs) MIN(p.dist, t.dist + graph.getweight(t, p), changed);
}
int main() { Graph graph; graph.addPointProperty(dist, int); foreach (t In graph.points) pull(t, graph); }
)");
  TransformResult r = vertex_to_edge(p);
  REQUIRE(r.report.applied);
  const auto &k = r.program.functions[0];
  CHECK(print_stmt(k.body.stmts[0]) == "Point (graph) p = e.dst;");
  CHECK(print_stmt(k.body.stmts[1]) == "Point (graph) t = e.src;");
  CHECK(print_stmt(k.body.stmts[2]) == "MIN(p.dist, t.dist + e.weight, changed);");
  TransformResult back = edge_to_vertex(r.program);
  REQUIRE(back.report.applied);
  CHECK(alpha_equivalent(back.program, p));
}

TEST_CASE("ineligible kernels are left untouched") {
  Program p = parse_source(R"(
int changed = 0;
void k(Point p, Graph graph) {
  foreach (t In p.outnbrs) MIN(t.dist, p.dist + 1, changed);
  p.dist = 0;
  changed = 1;
}
int main() { Graph graph; graph.addPointProperty(dist, int); foreach (t In graph.points) k(t, graph); }
)");
  TransformResult r = vertex_to_edge(p);
  CHECK_FALSE(r.report.applied);
  CHECK_FALSE(r.report.reason.empty());
  CHECK(r.program == p);
  CHECK(pretty_print(r.program) == pretty_print(p));

  TransformResult mst = vertex_to_edge(corpus("mst.fal"));
  CHECK_FALSE(mst.report.applied);
  CHECK(mst.program == corpus("mst.fal"));
}

TEST_CASE("edge to vertex on the edge listings") {
  TransformResult s = edge_to_vertex(corpus("sssp_edge.fal"));
  REQUIRE(s.report.applied);
  CHECK(alpha_equivalent(s.program, corpus("sssp.fal")));
  CHECK(print_stmt(s.program.functions[0].body.stmts[0]) ==
        "foreach (t In p.outnbrs) MIN(t.dist, p.dist + graph.getweight(p, t), changed);");
  TransformResult b = edge_to_vertex(corpus("bfs_edge.fal"));
  REQUIRE(b.report.applied);
  CHECK(alpha_equivalent(b.program, corpus("bfs.fal")));
  CHECK_FALSE(edge_to_vertex(corpus("sssp.fal")).report.applied);
}

TEST_CASE("edge to vertex accepts declare-then-assign endpoints and dst-only kernels") {
  Program split = parse_source(R"(
int changed = 0;
void relax(Edge e, Graph graph) {
  Point (graph) p;
  Point (graph) t;
  p = e.src;
  t = e.dst;
  MIN(t.dist, p.dist + e.weight, changed);
}
int main() { Graph graph; graph.addPointProperty(dist, int); foreach (e In graph.edges) relax(e, graph); }
)");
  TransformResult r = edge_to_vertex(split);
  REQUIRE(r.report.applied);
  CHECK(print_stmt(r.program.functions[0].body.stmts[0]) ==
        "foreach (t In p.outnbrs) MIN(t.dist, p.dist + graph.getweight(p, t), changed);");

  Program dst_only = parse_source(R"(
void mark(Edge e, Graph graph) {
  Point (graph) t = e.dst;
  t.seen = 1;
}
int main() { Graph graph; graph.addPointProperty(seen, int); foreach (e In graph.edges) mark(e, graph); }
)");
  TransformResult d = edge_to_vertex(dst_only);
  REQUIRE(d.report.applied);
  const auto &k = d.program.functions[0];
  CHECK(k.params[0].type == TypeKind::Point);
  CHECK(k.params[0].name == "p");
  CHECK(print_stmt(k.body.stmts[0]) == "foreach (t In p.outnbrs) t.seen = 1;");
}

TEST_CASE("edge to vertex refuses launches that need the neighbor endpoint") {
  Program p = parse_source(R"(
int changed = 0;
void relax(Edge e, Graph graph) {
  Point (graph) p = e.src;
  Point (graph) t = e.dst;
  MIN(t.dist, p.dist + e.weight, changed);
}
int main() { Graph graph; graph.addPointProperty(dist, int); foreach (e In graph.edges) (e.dst.dist > 0) relax(e, graph); }
)");
  TransformResult r = edge_to_vertex(p);
  CHECK_FALSE(r.report.applied);
  CHECK(r.program == p);
}

TEST_CASE("vertex/edge roundtrip on corpus") {
  for (const char *name : {"bfs.fal", "sssp.fal", "cc.fal", "bfs_sssp.fal", "cc_two_graphs.fal",
                           "bfs_sssp_sections.fal"}) {
    Program p = corpus(name);
    TransformResult e = vertex_to_edge(p);
    REQUIRE_MESSAGE(e.report.applied, name);
    CHECK_NOTHROW(resolve(e.program));
    TransformResult v = edge_to_vertex(e.program);
    REQUIRE_MESSAGE(v.report.applied, name);
    CHECK_MESSAGE(alpha_equivalent(v.program, p), name);
  }
}

TEST_CASE("vertex/edge roundtrip on generated kernels") {
  std::mt19937 rng(20240601);
  for (int i = 0; i < 100; ++i) {
    std::string src = skeleton(rng);
    INFO(src);
    Program p = parse_source(src);
    CHECK_NOTHROW(resolve(p));
    TransformResult e = vertex_to_edge(p);
    REQUIRE(e.report.applied);
    CHECK_NOTHROW(resolve(e.program));
    TransformResult v = edge_to_vertex(e.program);
    REQUIRE(v.report.applied);
    CHECK(alpha_equivalent(v.program, p));
  }
}

TEST_CASE("worklist conversion of SSSP") {
  TransformResult r = to_worklist(corpus("sssp.fal"));
  REQUIRE(r.report.applied);
  CHECK(r.report.removedGlobals == std::vector<std::string>{"changed"});
  std::string text = pretty_print(r.program);
  CHECK(text.find("Collection<Point> _wl(graph, dist);") != std::string::npos);
  CHECK(text.find("foreach (t In graph.points) (t.dist != MAX_INT) _wl.add(t);") != std::string::npos);
  CHECK(text.find("if (_upd == 1) _wl.add(t);") != std::string::npos);
  CHECK(text.find("while (_wl.size() > 0)") != std::string::npos);
  CHECK_NOTHROW(resolve(r.program));
}

TEST_CASE("worklist conversion of BFS subsumes the level filter") {
  TransformResult r = to_worklist(corpus("bfs.fal"));
  REQUIRE(r.report.applied);
  CHECK(r.report.removedGlobals == std::vector<std::string>{"changed", "lev"});
  std::string text = pretty_print(r.program);
  CHECK(text.find("MIN(t.dist, p.dist + 1, _upd);") != std::string::npos);
  CHECK(text.find("foreach (t In graph.points) (t.dist == 0) _wl.add(t);") != std::string::npos);
  CHECK(r.program.functions[0].params.size() == 3);
  CHECK_NOTHROW(resolve(r.program));
}

TEST_CASE("worklist conversion of an edge program goes through vertex form") {
  TransformResult r = to_worklist(corpus("sssp_edge.fal"));
  REQUIRE(r.report.applied);
  CHECK(r.program.functions[0].params[0].type == TypeKind::Point);
}

TEST_CASE("worklist conversion refusals") {
  Program pull = parse_source(R"(
int changed = 0;
void pull(Point p, Graph graph) {
  foreach (t In p.innbrs) MIN(p.comp, t.comp, changed);
}
int main() {
  Graph graph;
  graph.addPointProperty(comp, int);
  foreach (t In graph.points) t.comp = t;
  while (1) {
    changed = 0;
    foreach (t In graph.points) pull(t, graph);
    if (changed == 0) break;
  }
}
)");
  TransformResult r = to_worklist(pull);
  CHECK_FALSE(r.report.applied);
  CHECK(r.report.reason.find("non-iterator point") != std::string::npos);
  CHECK(r.program == pull);

  TransformResult cc = to_worklist(corpus("cc.fal"));
  CHECK(cc.report.applied);
  TransformResult mst = to_worklist(corpus("mst.fal"));
  CHECK_FALSE(mst.report.applied);
  CHECK(mst.program == corpus("mst.fal"));
}

TEST_CASE("alpha normalization") {
  Program a = parse_source("int g = 0;\nvoid f(Point p, Graph x) { foreach (t In p.outnbrs) { g = 1; } }\nint main() { }");
  Program b = parse_source("int g = 0;\nvoid f(Point q, Graph y) { foreach (s In q.outnbrs) g = 1; }\nint main() { }");
  Program c = parse_source("int g = 0;\nvoid f(Point q, Graph y) { foreach (s In q.innbrs) g = 1; }\nint main() { }");
  CHECK(alpha_equivalent(a, b));
  CHECK_FALSE(alpha_equivalent(a, c));
  CHECK(pretty_print(alpha_normalize(a)).find("foreach (_l2 In _l0.outnbrs) g = 1;") != std::string::npos);
}
