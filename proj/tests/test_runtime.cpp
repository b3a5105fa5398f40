#include <doctest.h>

#include <cmath>
#include <thread>

#include "gdsl/parser.hpp"
#include "gdsl/pipeline.hpp"
#include "gdsl/runtime.hpp"
#include "support.hpp"

using namespace gdsl;

namespace {

constexpr std::int64_t kBfsInf = 1234567890;
constexpr std::int64_t kSsspInf = 2147483647;

EdgeList triangle() { return {3, {{0, 1, 5}, {0, 2, 3}, {2, 1, 1}}}; }

ExecutionPlan plan_for(const std::string &file, Mode mode = Mode::AsWritten, Target t = Target::host(1),
                       bool async = false) {
  CompileOptions o;
  o.mode = mode;
  o.target = t;
  o.async = async;
  o.force = true;
  return compile_source(read_corpus(file), o).plan;
}

ExecResult run(const ExecutionPlan &plan, const std::vector<EdgeList> &graphs, int threads = 1,
               WorklistMode wl = WorklistMode::FIFO, std::optional<std::int64_t> delta = std::nullopt) {
  std::vector<std::shared_ptr<GraphStore>> stores;
  for (const auto &g : graphs) stores.push_back(build_graph_store(g));
  ExecOptions o;
  o.threads = threads;
  o.worklist = wl;
  o.delta = delta;
  return execute(plan, stores, o);
}

std::vector<std::int64_t> expected(std::vector<std::int64_t> oracle, std::int64_t inf) {
  for (auto &v : oracle)
    if (v == kUnreached) v = inf;
  return oracle;
}

} // namespace

TEST_CASE("graph store layout") {
  auto s = build_graph_store({3, {{0, 1, 5}, {0, 2, 3}, {1, 2, 1}}});
  CHECK(s->csrOffsets == std::vector<std::int64_t>{0, 2, 3, 3});
  CHECK(s->csrTargets == std::vector<std::int64_t>{1, 2, 2});
  CHECK(s->csrWeights == std::vector<std::int64_t>{5, 3, 1});
  CHECK(build_graph_store({4, {}})->csrOffsets == std::vector<std::int64_t>{0, 0, 0, 0, 0});
  CHECK_THROWS_AS(build_graph_store({2, {{0, 2, 1}}}), GraphError);
  CHECK_THROWS_AS(build_graph_store({2, {{0, 1, -1}}}), GraphError);

  // stable by (src, input order); csrEdge maps back to the edge list
  EdgeList g{3, {{2, 0, 7}, {0, 1, 1}, {2, 1, 8}, {0, 2, 2}}};
  s = build_graph_store(g);
  CHECK(s->csrOffsets == std::vector<std::int64_t>{0, 2, 2, 4});
  CHECK(s->csrEdge == std::vector<std::int64_t>{1, 3, 0, 2});
  CHECK(s->in_offsets() == std::vector<std::int64_t>{0, 1, 3, 4});
  CHECK(s->in_sources() == std::vector<std::int64_t>{2, 0, 2, 0});

  EdgeList er = gen_er(500, 3000, 5);
  s = build_graph_store(er);
  CHECK(s->csrOffsets.back() == 3000);
  std::multiset<std::tuple<std::int64_t, std::int64_t, std::int64_t>> a, b;
  for (const auto &e : er.edges) a.insert({e.src, e.dst, e.weight});
  for (std::int64_t v = 0; v < 500; ++v)
    for (auto k = s->csrOffsets[v]; k < s->csrOffsets[v + 1]; ++k) b.insert({v, s->csrTargets[k], s->csrWeights[k]});
  CHECK(a == b);
}

TEST_CASE("BFS on a path") {
  std::vector<std::int64_t> levels(10);
  for (int i = 0; i < 10; ++i) levels[i] = i;
  for (Mode m : {Mode::AsWritten, Mode::Edge, Mode::Worklist})
    for (Target t : {Target::host(4), Target::device()}) {
      auto r = run(plan_for("bfs.fal", m, t), {gen_path(10)}, 2);
      CHECK(r.properties.at("graph.dist") == levels);
    }
}

TEST_CASE("SSSP on the triangle") {
  std::vector<std::int64_t> want{0, 4, 3};
  CHECK(want == oracle_dijkstra(triangle(), 0));
  CHECK(run(plan_for("sssp.fal"), {triangle()}).properties.at("graph.dist") == want);
  CHECK(run(plan_for("sssp_edge.fal"), {triangle()}).properties.at("graph.dist") == want);
  CHECK(run(plan_for("sssp.fal", Mode::AsWritten, Target::device()), {triangle()}).properties.at("graph.dist") ==
        want);
}

TEST_CASE("CC labels") {
  EdgeList g = symmetrize({4, {{0, 1, 1}, {2, 3, 1}}});
  auto r = run(plan_for("cc.fal"), {g});
  CHECK(r.properties.at("graph.comp") == std::vector<std::int64_t>{0, 0, 2, 2});
  CHECK(r.globals.at("changed") == 0);
}

TEST_CASE("worklist draining") {
  ExecutionPlan wl = plan_for("sssp.fal", Mode::Worklist);
  auto fifo = run(wl, {triangle()});
  CHECK(fifo.properties.at("graph.dist") == std::vector<std::int64_t>{0, 4, 3});
  // topology-driven SSSP needs 3 sweeps over 3 points here (the last finds nothing)
  auto topo = run(plan_for("sssp.fal"), {triangle()});
  CHECK(topo.loopIterations <= 3);
  CHECK(fifo.kernelInvocations <= 3 * 3);

  // delta = 2: bucket 0 holds the source, then bucket 1 holds 2 (dist 3) and
  // then 1 (dist 4 after the relaxation through 2)
  auto d2 = worklist_drain(wl, {build_graph_store(triangle())}, WorklistMode::DeltaStepping, 1, 2);
  CHECK(d2.properties.at("graph.dist") == std::vector<std::int64_t>{0, 4, 3});
  CHECK(d2.bucketTrace.front() == 0);
  CHECK(std::is_sorted(d2.bucketTrace.begin(), d2.bucketTrace.end()));
  CHECK(d2.bucketTrace.back() == 2);

  // delta = 1 with unit weights: one bucket per BFS level
  EdgeList path = gen_path(10);
  auto d1 = worklist_drain(plan_for("bfs.fal", Mode::Worklist), {build_graph_store(path)},
                           WorklistMode::DeltaStepping, 1, 1);
  std::vector<std::int64_t> levels(10);
  for (int i = 0; i < 10; ++i) levels[i] = i;
  CHECK(d1.bucketTrace == levels);
  CHECK(d1.properties.at("graph.dist") == levels);

  CHECK_THROWS_AS(worklist_drain(wl, {build_graph_store(triangle())}, WorklistMode::DeltaStepping, 1, 0),
                  DeltaError);
}

TEST_CASE("delta stepping order and oracle on random graphs") {
  ExecutionPlan wl = plan_for("sssp.fal", Mode::Worklist);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    EdgeList g = gen_er(300, 1500, seed);
    for (std::int64_t delta : {1, 10, 50, 1000}) {
      auto r = run(wl, {g}, 4, WorklistMode::DeltaStepping, delta);
      CHECK(r.properties.at("graph.dist") == expected(oracle_dijkstra(g, 0), kSsspInf));
      CHECK(std::is_sorted(r.bucketTrace.begin(), r.bucketTrace.end()));
    }
  }
}

TEST_CASE("union-find set") {
  UnionFindSet s(4);
  CHECK(s.unite(0, 1));
  CHECK(s.find(0) == s.find(1));
  CHECK_FALSE(s.unite(0, 1));
  CHECK(s.count_roots() == 3);
  CHECK(s.unite(2, 3));
  CHECK(s.unite(1, 3));
  CHECK(s.count_roots() == 1);
  std::int64_t r = s.find(3);
  CHECK(s.find(3) == r);

  // concurrent unions over a random edge set agree with the sequential oracle
  EdgeList g = gen_er(2000, 3000, 9);
  UnionFindSet c(2000);
  std::vector<std::thread> ts;
  for (int t = 0; t < 4; ++t)
    ts.emplace_back([&, t] {
      for (std::size_t i = t; i < g.edges.size(); i += 4) c.unite(g.edges[i].src, g.edges[i].dst);
    });
  for (auto &t : ts) t.join();
  auto comps = oracle_components(g);
  for (std::int64_t v = 0; v < 2000; ++v)
    for (std::int64_t u : {std::int64_t{0}, v / 2})
      CHECK((c.find(u) == c.find(v)) == (comps[u] == comps[v]));
}

TEST_CASE("single locks") {
  SingleLock l(10);
  CHECK(l.try_acquire({0, 1, 2}, 0));
  l.release({0, 1, 2}, 0);
  CHECK(l.try_acquire(7, 1));
  CHECK_FALSE(l.try_acquire({3, 7}, 0));
  CHECK_FALSE(l.held(3));
  l.release(7, 1);

  int wins = 0;
  std::atomic<int> acquired{0};
  std::thread a([&] { acquired += l.try_acquire(5, 0); });
  std::thread b([&] { acquired += l.try_acquire(5, 1); });
  a.join();
  b.join();
  wins = acquired.load();
  CHECK(wins == 1);
}

TEST_CASE("Boruvka MST") {
  EdgeList g = symmetrize(triangle());
  auto r = run(plan_for("mst.fal"), {g});
  CHECK(r.globals.at("mstwt") == 4);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    EdgeList h = symmetrize(gen_er(400, 1200, seed));
    for (int threads : {1, 4})
      CHECK(run(plan_for("mst.fal"), {h}, threads).globals.at("mstwt") == oracle_kruskal(h));
  }
}

TEST_CASE("load imbalance") {
  EdgeList star = gen_star(999);
  auto v = run(plan_for("bfs.fal"), {star}, 4);
  auto e = run(plan_for("bfs.fal", Mode::Edge), {star}, 4);
  // vertex mode: worker 0 owns the hub, so work = [999, 0, 0, 0] and CV = sqrt(3)
  CHECK(v.perWorkerWork == std::vector<double>{999, 0, 0, 0});
  CHECK(load_imbalance(v) == doctest::Approx(std::sqrt(3.0)));
  CHECK(load_imbalance(v) > 1.0);
  CHECK(load_imbalance(e) < 0.1);

  auto ring = run(plan_for("bfs.fal"), {gen_ring(1000)}, 4);
  CHECK(load_imbalance(ring) == doctest::Approx(0.0).epsilon(1e-12));
  auto ringE = run(plan_for("bfs.fal", Mode::Edge), {gen_ring(1000)}, 4);
  CHECK(load_imbalance(ringE) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("transfer accounting on a simulated device") {
  ExecutionPlan plan = plan_for("bfs.fal", Mode::AsWritten, Target::device());
  auto r = run(plan, {gen_path(10)});
  // one copy of dist before the loop, then changed both ways per iteration
  CHECK(r.transferCount == 1 + 2 * r.loopIterations);
  CHECK(r.loopIterations == 10);
  auto h = run(plan_for("bfs.fal", Mode::AsWritten, Target::host(2)), {gen_path(10)});
  CHECK(h.transferCount == 0);
  CHECK(h.cost.transfers == 0);
  CHECK(r.cost.transfers == doctest::Approx(21 * 100 + 10 * 8 * 0.01 + 20 * 8 * 0.01));
}

TEST_CASE("results do not depend on target, threads or schedule") {
  EdgeList g = symmetrize(gen_er(400, 1600, 21));
  struct Case {
    const char *file;
    const char *prop;
    std::vector<std::int64_t> want;
  };
  std::vector<Case> cases{
      {"bfs.fal", "graph.dist", expected(oracle_bfs(g, 0), kBfsInf)},
      {"bfs_edge.fal", "graph.dist", expected(oracle_bfs(g, 0), kBfsInf)},
      {"sssp.fal", "graph.dist", expected(oracle_dijkstra(g, 0), kSsspInf)},
      {"sssp_edge.fal", "graph.dist", expected(oracle_dijkstra(g, 0), kSsspInf)},
      {"cc.fal", "graph.comp", oracle_components(g)},
  };
  for (const auto &c : cases)
    for (Target t : {Target::host(1), Target::device()})
      for (bool async : {false, true})
        for (int threads : {1, 2, 4, 8}) {
          auto r = run(plan_for(c.file, Mode::AsWritten, t, async), {g}, threads);
          CHECK_MESSAGE(r.properties.at(c.prop) == c.want, c.file);
        }

  auto bs = run(plan_for("bfs_sssp.fal", Mode::AsWritten, Target::host(4), true), {g}, 4);
  CHECK(bs.properties.at("graph.bdist") == expected(oracle_bfs(g, 0), kBfsInf));
  CHECK(bs.properties.at("graph.sdist") == expected(oracle_dijkstra(g, 0), kSsspInf));
  for (Target t : {Target::host(2), Target::device(), Target::multi(2)}) {
    auto s = run(plan_for("bfs_sssp_sections.fal", Mode::AsWritten, t), {g}, 2);
    CHECK(s.properties.at("graph.bdist") == expected(oracle_bfs(g, 0), kBfsInf));
    CHECK(s.properties.at("graph.sdist") == expected(oracle_dijkstra(g, 0), kSsspInf));
  }
  EdgeList h = symmetrize(gen_two_components(50, 3));
  auto two = run(plan_for("cc_two_graphs.fal", Mode::AsWritten, Target::multi(2)), {g, h}, 2);
  CHECK(two.properties.at("g1.comp") == oracle_components(g));
  CHECK(two.properties.at("g2.comp") == oracle_components(h));
}

TEST_CASE("sections cost is the larger section on two devices") {
  EdgeList a = symmetrize(gen_er(300, 900, 1)), b = symmetrize(gen_path(40));
  auto r = run(plan_for("cc_two_graphs.fal", Mode::AsWritten, Target::multi(2)), {a, b}, 2);
  REQUIRE(r.cost.sections.size() == 2);
  double mx = std::max(r.cost.sections[0], r.cost.sections[1]);
  CHECK(r.cost.total == doctest::Approx(mx + r.cost.host));
  auto one = run(plan_for("cc_two_graphs.fal", Mode::AsWritten, Target::device()), {a, b}, 2);
  CHECK(one.cost.total == doctest::Approx(one.cost.sections[0] + one.cost.sections[1] + one.cost.host));
}

TEST_CASE("runtime errors") {
  ExecutionPlan plan = plan_for("sssp.fal");
  ExecOptions o;
  o.iterationCap = 2;
  // 0 -> 9 -> 8 -> ... -> 1: an ascending sweep settles one point per iteration
  EdgeList down{10, {{0, 9, 1}}};
  for (int i = 9; i > 1; --i) down.edges.push_back({i, i - 1, 1});
  CHECK_THROWS_AS(execute(plan, {build_graph_store(down)}, o), DivergenceError);
  o.iterationCap = 10;
  CHECK(execute(plan, {build_graph_store(down)}, o).properties.at("graph.dist")[1] == 9);
  CHECK_THROWS_AS(execute(plan, {}, {}), RuntimeError);
  o = {};
  o.threads = 0;
  CHECK_THROWS_AS(execute(plan, {build_graph_store(gen_path(3))}, o), RuntimeError);

  CompileOptions co;
  ExecutionPlan fl = compile_source("float x = 0;\nint main(int argc, char *argv[]) {\n  Graph g;\n  g.read(argv[1]);\n  x = 1.5;\n}\n", co).plan;
  CHECK_THROWS_AS(execute(fl, {build_graph_store(gen_path(3))}, {}), RuntimeError);
}
