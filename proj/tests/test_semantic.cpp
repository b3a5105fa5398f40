#include <doctest.h>

#include "gdsl/parser.hpp"
#include "gdsl/semantic.hpp"
#include "support.hpp"

using namespace gdsl;

namespace {

Program resolved(const std::string &src) { return resolve(parse_source(src)).program; }

Program corpus(const std::string &name) { return resolved(read_corpus(name)); }

std::string first_error(const std::string &src) {
  try {
    resolve(parse_source(src));
  } catch (const SemanticErrors &e) {
    return e.errors().front().message;
  }
  return "";
}

AccessSet props(std::initializer_list<std::pair<std::string, std::string>> p,
                std::initializer_list<std::string> g = {}) {
  AccessSet s;
  s.properties.insert(p.begin(), p.end());
  s.globals.insert(g.begin(), g.end());
  return s;
}

const Stmt &find_stmt(const Block &b, const std::string &text) {
  for (const auto &s : b.stmts) {
    std::string flat;
    for (char c : print_stmt(s))
      if (c != '\n' && !(c == ' ' && !flat.empty() && flat.back() == ' ')) flat += c;
    if (flat == text) return s;
  }
  throw std::runtime_error("statement not found: " + text);
}

const Block &loop_body(const Program &p) {
  for (const auto &s : p.main.body.stmts)
    if (auto *w = s.get_if<While>()) return w->body->as<Block>();
  throw std::runtime_error("no loop");
}

} // namespace

TEST_CASE("BFS resolves and types properties") {
  Program p = corpus("bfs.fal");
  const auto &fe = p.functions[0].body.stmts[0].as<Foreach>();
  const auto &cond = fe.body->as<If>().cond.as<Binary>();
  CHECK(cond.lhs->info.value.type == TypeKind::Int);
  CHECK(cond.lhs->info.value.property == "dist");
  CHECK(cond.lhs->info.value.graph == "graph");
}

TEST_CASE("every corpus program resolves") {
  for (const char *name : {"bfs.fal", "bfs_edge.fal", "sssp.fal", "sssp_edge.fal", "cc.fal",
                           "mst.fal", "bfs_sssp.fal", "bfs_sssp_sections.fal",
                           "cc_two_graphs.fal"})
    CHECK_NOTHROW(corpus(name));
}

TEST_CASE("semantic errors") {
  CHECK(first_error("void k(Point p, Graph g) { p.cost = 1; }\n"
                    "int main() { Graph g; g.addPointProperty(dist, int); }") ==
        "undefined property 'cost'");
  CHECK(first_error("void k(Point p, Graph g) { foreach (t In p.points) t.dist = 0; }\n"
                    "int main() { Graph g; g.addPointProperty(dist, int); }") ==
        "iterator 'points' requires Graph subject");
  CHECK(first_error("int main() { Graph g; foreach (t In g.outnbrs) t = 0; }") ==
        "iterator 'outnbrs' requires Point subject");
  CHECK(first_error("int main() { x = 1; }") == "undefined name 'x'");
  CHECK(first_error("int main() { break; }") == "break outside loop");
  CHECK(first_error("int main() { Graph g; g.addPointProperty(d, int); g.addPointProperty(d, int); }")
            .rfind("property redeclaration", 0) == 0);
  CHECK(first_error("int main() { Graph g; int x = 0; x = g; }") == "type mismatch in assignment");
  CHECK(first_error("int main() { int x = 0; MIN(x, 1); }") ==
        "MIN takes exactly three arguments");
}

TEST_CASE("scoping: inner declarations shadow outer") {
  SymbolTable st;
  st.declare("x", {TypeKind::Int, StorageClass::Global, ""});
  st.push_scope();
  st.declare("x", {TypeKind::Float, StorageClass::Local, ""});
  CHECK(st.lookup("x")->type == TypeKind::Float);
  st.pop_scope();
  CHECK(st.lookup("x")->type == TypeKind::Int);
  // BFS's parameter `lev` shadows the global of the same name
  Program p = corpus("bfs.fal");
  RWSets s = compute_rw_sets(p, p.functions[0]);
  CHECK_FALSE(s.read.globals.count("lev"));
}

TEST_CASE("target functions") {
  auto sssp = find_target_functions(corpus("sssp.fal"));
  REQUIRE(sssp.size() == 1);
  CHECK(sssp[0].function == "relaxgraph");
  CHECK(sssp[0].outer);
  CHECK(sssp[0].callSite->as<Foreach>().iterator == IteratorKind::Points);

  Program bfs = corpus("bfs.fal");
  auto t = find_target_functions(bfs);
  REQUIRE(t.size() == 1);
  CHECK(t[0].function == "BFS");
  CHECK(t[0].outer);
  REQUIRE(t[0].callSite->as<Foreach>().filter.has_value());
  CHECK(print_expr(*t[0].callSite->as<Foreach>().filter) == "t.dist == lev");

  Program two = resolved("void f(Point p, Graph g) { }\n"
                         "int main() { Graph g; int x = 0; foreach (t In g.points) { f(t, g); x = 1; } }");
  CHECK(find_target_functions(two).empty());
}

TEST_CASE("function read/write sets") {
  Program sssp = corpus("sssp.fal");
  RWSets r = compute_rw_sets(sssp, sssp.functions[0]);
  CHECK(r.read == props({{"graph", "dist"}, {"graph", "weight"}}));
  CHECK(r.write == props({{"graph", "dist"}}, {"changed"}));

  Program bfs = corpus("bfs.fal");
  RWSets b = compute_rw_sets(bfs, bfs.functions[0]);
  CHECK(b.read == props({{"graph", "dist"}}));
  CHECK(b.write == props({{"graph", "dist"}}, {"changed"}));

  Program pure = resolved("int f(int x) { return x + 1; }\nint main() { }");
  RWSets f = compute_rw_sets(pure, pure.functions[0]);
  CHECK(f.read.empty());
  CHECK(f.write.empty());

  Program rec = resolved("int g = 0;\nvoid a(int x) { b(x); }\nvoid b(int x) { a(x); }\nint main() { }");
  CHECK_THROWS_AS(compute_rw_sets(rec, rec.functions[0]), SemanticErrors);
}

TEST_CASE("statement read/write sets") {
  Program sssp = corpus("sssp.fal");
  const Block &body = loop_body(sssp);
  RWSets a = compute_stmt_rw_sets(sssp, find_stmt(body, "changed = 0;"));
  CHECK(a.read.empty());
  CHECK(a.write == props({}, {"changed"}));
  RWSets b = compute_stmt_rw_sets(sssp, find_stmt(body, "if (changed == 0) break;"));
  CHECK(b.read == props({}, {"changed"}));
  CHECK(b.write.empty());

  Program bfs = corpus("bfs.fal");
  const Block &bb = loop_body(bfs);
  RWSets c = compute_stmt_rw_sets(bfs, find_stmt(bb, "lev++;"));
  CHECK(c.read == props({}, {"lev"}));
  CHECK(c.write == props({}, {"lev"}));
  RWSets launch = compute_stmt_rw_sets(bfs, bb.stmts[1]);
  CHECK(launch.read == props({{"graph", "dist"}}, {"lev"}));
  CHECK(launch.write == props({{"graph", "dist"}}, {"changed"}));
}

TEST_CASE("set operations and argument mapping") {
  Program mst = corpus("mst.fal");
  auto targets = find_target_functions(mst);
  REQUIRE(targets.size() == 3);
  CHECK(targets[1].launch.read.properties.count({"comps", ""}));
  CHECK(targets[2].launch.write.properties.count({"comps", ""}));
  CHECK(targets[2].launch.write.globals == std::set<std::string>{"changed", "mstwt"});

  Program two = corpus("cc_two_graphs.fal");
  auto t2 = find_target_functions(two);
  REQUIRE(t2.size() == 2);
  CHECK(t2[0].launch.write == props({{"g1", "comp"}}, {"changed1"}));
  CHECK(t2[1].launch.write == props({{"g2", "comp"}}, {"changed2"}));
}

TEST_CASE("sets are monotone under statement addition") {
  Program base = resolved("int a = 0;\nint b = 0;\nvoid f(Point p, Graph g) { a = 1; }\n"
                          "int main() { Graph g; }");
  Program more = resolved("int a = 0;\nint b = 0;\nvoid f(Point p, Graph g) { a = 1; b = a; }\n"
                          "int main() { Graph g; }");
  RWSets x = compute_rw_sets(base, base.functions[0]);
  RWSets y = compute_rw_sets(more, more.functions[0]);
  for (const auto &g : x.write.globals) CHECK(y.write.globals.count(g));
  for (const auto &g : x.read.globals) CHECK(y.read.globals.count(g));
  CHECK(y.read.globals.count("a"));
}
