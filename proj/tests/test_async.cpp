#include <doctest.h>

#include "gdsl/async.hpp"
#include "gdsl/parser.hpp"
#include "support.hpp"

using namespace gdsl;

namespace {

Program load(const std::string &name) { return resolve(parse_source(read_corpus(name))).program; }
Program load_src(const std::string &src) { return resolve(parse_source(src)).program; }

std::vector<int> launch_ids(const Cfg &cfg) {
  std::vector<int> out;
  for (const auto &n : cfg.nodes)
    if (n.kind == CfgKind::KernelLaunch) out.push_back(n.id);
  return out;
}

// every node visited at most (forward in-degree + back-edge in-degree), root once more
void check_termination_bound(const Cfg &cfg) {
  for (const auto &n : cfg.nodes) {
    int back_in = 0;
    for (const auto &[u, v] : cfg.back_edges)
      if (v == n.id) ++back_in;
    int bound = n.predecessor_count + back_in + (n.id == cfg.root ? 1 : 0);
    CHECK(n.visited <= bound);
  }
}

const char *kTwoKernels = R"(
int f1 = 0, f2 = 0;
void ka(Point p, Graph g) { p.a = 1; }
void kb(Point p, Graph g) { p.b = 2; }
int main() {
  Graph g;
  g.addPointProperty(a, int);
  g.addPointProperty(b, int);
  foreach (t In g.points) ka(t, g);
  foreach (t In g.points) kb(t, g);
}
)";

} // namespace

TEST_CASE("SSSP main CFG") {
  Program p = load("sssp.fal");
  Cfg cfg = build_cfg(p, p.main);
  // decl, addPointProperty, read, init foreach, source init, header, reset, launch, if, break, exit
  CHECK(cfg.nodes.size() == 11);
  CHECK(cfg.edge_count() == 11);
  count_predecessors(cfg);
  const CfgNode &header = cfg.nodes[5];
  CHECK(header.stmt->is<While>());
  CHECK(header.predecessor_count == 1);
  CHECK(cfg.back_edges.size() == 1);
  CHECK(cfg.back_edges.count({8, 5}));
  mark_barriers(cfg);
  auto launches = launch_ids(cfg);
  REQUIRE(launches.size() == 1);
  CHECK(cfg.nodes[static_cast<std::size_t>(launches[0])].barrier);
  check_termination_bound(cfg);
}

TEST_CASE("predecessor counts") {
  Program diamond = load_src("int main() { int x = 0; if (x == 0) x = 1; else x = 2; x = 3; }");
  Cfg d = build_cfg(diamond, diamond.main);
  count_predecessors(d);
  // 0 decl, 1 if, 2 then, 3 else, 4 join, 5 exit
  CHECK(d.nodes[4].predecessor_count == 2);

  Program line = load_src("int main() { int a = 0; int b = 0; int c = 0; }");
  Cfg l = build_cfg(line, line.main);
  count_predecessors(l);
  CHECK(l.nodes[0].predecessor_count == 0);
  CHECK(l.nodes[1].predecessor_count == 1);
  CHECK(l.nodes[2].predecessor_count == 1);

  Program empty = load_src("int main() { }");
  Cfg e = build_cfg(empty, empty.main);
  CHECK(e.nodes.size() == 1);
  CHECK(e.root == e.exit);
  count_predecessors(e);
  CHECK(mark_barriers(e) == 1);
}

TEST_CASE("independent launches are barrier-free") {
  Program p = load_src(kTwoKernels);
  Cfg cfg = analyze_main(p);
  auto launches = launch_ids(cfg);
  REQUIRE(launches.size() == 2);
  CHECK(launches[1] == launches[0] + 1);
  CHECK_FALSE(cfg.nodes[static_cast<std::size_t>(launches[0])].barrier);
  CHECK_FALSE(cfg.nodes[static_cast<std::size_t>(launches[1])].barrier);
  Schedule s = derive_schedule(cfg);
  REQUIRE(s.orderedGroups.size() == 1);
  CHECK(s.orderedGroups[0].launches == launches);
  CHECK(schedule_is_safe(cfg, s));
}

TEST_CASE("conflicting launches stay synchronous") {
  Program p = load_src(R"(
void ka(Point p, Graph g) { p.a = 1; }
void kb(Point p, Graph g) { p.b = p.a; }
void kc(Point p, Graph g) { p.a = p.b; }
int main() {
  Graph g;
  g.addPointProperty(a, int);
  g.addPointProperty(b, int);
  foreach (t In g.points) ka(t, g);
  foreach (t In g.points) kb(t, g);
  foreach (t In g.points) kc(t, g);
}
)");
  Cfg cfg = analyze_main(p);
  auto launches = launch_ids(cfg);
  REQUIRE(launches.size() == 3);
  CHECK(cfg.nodes[static_cast<std::size_t>(launches[0])].barrier);
  CHECK(cfg.nodes[static_cast<std::size_t>(launches[1])].barrier);
  Schedule s = derive_schedule(cfg);
  CHECK(s.orderedGroups.size() == 3);
  for (const auto &g : s.orderedGroups) CHECK(g.launches.size() == 1);
}

TEST_CASE("single trailing launch is barrier-free") {
  Program p = load_src("void k(Point p, Graph g) { p.a = 1; }\n"
                       "int main() { Graph g; g.addPointProperty(a, int); foreach (t In g.points) k(t, g); }");
  Cfg cfg = analyze_main(p);
  auto launches = launch_ids(cfg);
  REQUIRE(launches.size() == 1);
  CHECK_FALSE(cfg.nodes[static_cast<std::size_t>(launches[0])].barrier);
  Schedule s = derive_schedule(cfg);
  REQUIRE(s.orderedGroups.size() == 1);
  CHECK_FALSE(s.orderedGroups[0].barrierAfter);
}

TEST_CASE("BFS and SSSP share a group per iteration") {
  Program p = load("bfs_sssp.fal");
  Cfg cfg = analyze_main(p);
  auto launches = launch_ids(cfg);
  REQUIRE(launches.size() == 2);
  CHECK_FALSE(cfg.nodes[static_cast<std::size_t>(launches[0])].barrier);
  CHECK(cfg.nodes[static_cast<std::size_t>(launches[1])].barrier);
  Schedule s = derive_schedule(cfg);
  REQUIRE(s.orderedGroups.size() == 1);
  CHECK(s.orderedGroups[0].launches.size() == 2);
  CHECK(schedule_is_safe(cfg, s));
  check_termination_bound(cfg);

  RWSets a = compute_stmt_rw_sets(p, *cfg.nodes[static_cast<std::size_t>(launches[0])].stmt);
  RWSets b = compute_stmt_rw_sets(p, *cfg.nodes[static_cast<std::size_t>(launches[1])].stmt);
  CHECK_FALSE(a.read.intersects(b.write));
  CHECK_FALSE(a.write.intersects(b.read));
  CHECK_FALSE(a.write.intersects(b.write));
}

TEST_CASE("plain statements between launches") {
  Program p = load_src(R"(
int x = 0;
void ka(Point p, Graph g) { p.a = 1; }
void kb(Point p, Graph g) { p.b = x; }
int main() {
  Graph g;
  g.addPointProperty(a, int);
  g.addPointProperty(b, int);
  foreach (t In g.points) ka(t, g);
  x = 5;
  foreach (t In g.points) kb(t, g);
}
)");
  Cfg cfg = analyze_main(p);
  Schedule s = derive_schedule(cfg);
  // `x = 5` is disjoint from ka but kb reads x, so kb starts a new group
  CHECK(s.orderedGroups.size() == 2);
  CHECK(schedule_is_safe(cfg, s));
}

TEST_CASE("every corpus CFG terminates within the visit bound and schedules safely") {
  for (const char *name : {"bfs.fal", "bfs_edge.fal", "sssp.fal", "sssp_edge.fal", "cc.fal",
                           "mst.fal", "bfs_sssp.fal", "bfs_sssp_sections.fal",
                           "cc_two_graphs.fal"}) {
    INFO(name);
    Program p = load(name);
    Cfg cfg = analyze_main(p);
    check_termination_bound(cfg);
    Schedule s = derive_schedule(cfg);
    CHECK(schedule_is_safe(cfg, s));
    std::size_t launches = launch_ids(cfg).size();
    std::size_t grouped = 0;
    for (const auto &g : s.orderedGroups) grouped += g.launches.size();
    CHECK(grouped == launches);
  }
}

TEST_CASE("dump format") {
  Program p = load("sssp.fal");
  Cfg cfg = analyze_main(p);
  std::string text = dump_cfg(cfg);
  CHECK(text.find("7 KERNEL_LAUNCH 1 1 -> 8 R{graph.dist, graph.weight} W{changed, graph.dist}\n") !=
        std::string::npos);
  CHECK(text.find("8 PLAIN 0 1 -> 9,5 R{changed} W{}\n") != std::string::npos);
  CHECK(text.find("10 PLAIN 0 1 -> R{} W{}\n") != std::string::npos);
}
