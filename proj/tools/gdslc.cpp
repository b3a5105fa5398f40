// gdslc: compile, run and benchmark graph DSL programs.

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gdsl/ast.hpp"
#include "gdsl/parser.hpp"
#include "gdsl/pipeline.hpp"
#include "gdsl/runtime.hpp"

using namespace gdsl;

namespace {

enum Exit { kOk = 0, kUsage = 1, kFrontend = 2, kIneligible = 3, kLowering = 4, kRuntime = 5 };

struct Options {
  std::string mode = "as-written";
  bool async = false;
  std::string target = "cpu";
  int threads = 1;
  int devices = 2;
  std::vector<std::string> dumps;
  std::string emitPlan;
  bool normalize = false;
  bool allowFallback = false;
  bool force = false;
  CostModel cost;
};

void add_compile_flags(CLI::App *app, Options &o) {
  app->add_option("--mode", o.mode, "vertex | edge | worklist (default: as written)")
      ->check(CLI::IsMember({"as-written", "vertex", "edge", "worklist"}));
  auto *sync = app->add_flag("--sync", "synchronous schedule (default)");
  app->add_flag("--async", o.async, "barrier-free groups from the async analysis")->excludes(sync);
  app->add_option("--target", o.target, "cpu | sim-gpu | sim-multi-gpu")
      ->check(CLI::IsMember({"cpu", "sim-gpu", "sim-multi-gpu"}));
  app->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--devices", o.devices, "devices for sim-multi-gpu")->check(CLI::Range(2, 64));
  app->add_option("--dump", o.dumps, "ast, cfg, plan (comma separated)")
      ->delimiter(',')
      ->check(CLI::IsMember({"ast", "cfg", "plan"}));
  app->add_option("--emit-plan", o.emitPlan, "write the plan text to a file");
  app->add_flag("--normalize-names", o.normalize, "alpha-normalize local names before analysis");
  app->add_flag("--allow-fallback", o.allowFallback, "keep the written form when a transform does not apply");
  app->add_flag("--force", o.force, "allow worklist mode on a simulated GPU");
  app->add_option("--per-edge-work", o.cost.perEdgeWork, "cost units per edge");
  app->add_option("--per-vertex-work", o.cost.perVertexWork, "cost units per vertex");
  app->add_option("--transfer-latency", o.cost.transferLatency, "cost units per transfer");
  app->add_option("--transfer-per-byte", o.cost.transferPerByte, "cost units per transferred byte");
}

CompileOptions compile_options(const Options &o) {
  CompileOptions c;
  c.mode = *parse_mode(o.mode);
  c.async = o.async;
  if (o.target == "cpu") c.target = Target::host(o.threads);
  else if (o.target == "sim-gpu") c.target = Target::device();
  else c.target = Target::multi(o.devices);
  c.target.cost = o.cost;
  c.normalize = o.normalize;
  c.allowFallback = o.allowFallback;
  c.force = o.force;
  return c;
}

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Maps an exception from any stage to a diagnostic and exit code.
int report(const std::string &file) {
  try {
    throw;
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Diagnostic &e) {
    std::cerr << file << ":" << e.line() << ":" << e.col() << ": " << e.kind() << ": " << e.message() << "\n";
    return kFrontend;
  } catch (const SemanticErrors &e) {
    for (const auto &x : e.errors())
      std::cerr << file << ":" << x.loc.line << ":" << x.loc.col << ": semantic error: " << x.message << "\n";
    return kFrontend;
  } catch (const IneligibleError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIneligible;
  } catch (const LoweringError &e) {
    std::cerr << "lowering error: " << e.what() << "\n";
    return kLowering;
  } catch (const FormatError &e) {
    std::cerr << "graph format error: " << e.what() << "\n";
    return kRuntime;
  } catch (const std::exception &e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntime;
  }
}

Compilation compile_file(const std::string &file, const Options &o) {
  Compilation c = compile_source(slurp(file), compile_options(o));
  for (const auto &t : c.transforms)
    if (t.applied)
      std::cerr << "note: rewrote " << (t.rewrittenFunctions.empty() ? t.rewrittenFunction : t.rewrittenFunctions.front())
                << (t.rewrittenFunctions.size() > 1 ? " and others" : "") << "\n";
  if (c.fellBack) std::cerr << "note: kept the written form: " << c.fallbackReason << "\n";
  return c;
}

void write_dumps(const Compilation &c, const Options &o, bool defaultPlan) {
  std::string plan = emit_text(c.plan);
  if (!o.emitPlan.empty()) {
    std::ofstream out(o.emitPlan, std::ios::binary);
    if (!out) throw IoError("cannot write '" + o.emitPlan + "'");
    out << plan;
  }
  bool any = false;
  for (const char *what : {"ast", "cfg", "plan"}) {
    if (std::find(o.dumps.begin(), o.dumps.end(), what) == o.dumps.end()) continue;
    if (o.dumps.size() > 1) std::cout << "== " << what << " ==\n";
    std::string w = what;
    std::cout << (w == "ast" ? pretty_print(c.program) : w == "cfg" ? dump_cfg(c.cfg) : plan);
    any = true;
  }
  if (!any && defaultPlan && o.emitPlan.empty()) std::cout << plan;
}

std::vector<std::shared_ptr<GraphStore>> load_graphs(const std::vector<std::string> &paths, bool sym) {
  std::vector<std::shared_ptr<GraphStore>> out;
  for (const auto &p : paths) {
    EdgeList g = read_graph(p);
    out.push_back(build_graph_store(sym ? symmetrize(g) : g));
  }
  return out;
}

EdgeList edge_list(const GraphStore &s) { return {s.n, s.edgeList}; }

// Finds the property the oracle checks: the one whose name ends in a preferred suffix.
const std::vector<std::int64_t> *pick(const ExecResult &r, std::initializer_list<const char *> suffixes) {
  for (const char *suf : suffixes)
    for (const auto &[name, v] : r.properties) {
      auto dot = name.find('.');
      if (dot != std::string::npos && name.substr(dot + 1) == suf) return &v;
    }
  return nullptr;
}

// Reached vertices must equal the oracle; unreached ones must all keep one
// sentinel larger than every reached value.
bool same_distances(const std::vector<std::int64_t> &got, const std::vector<std::int64_t> &want) {
  if (got.size() != want.size()) return false;
  std::int64_t maxReached = -1;
  std::optional<std::int64_t> sentinel;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (want[i] == kUnreached) {
      if (sentinel && *sentinel != got[i]) return false;
      sentinel = got[i];
    } else if (got[i] != want[i]) {
      return false;
    } else {
      maxReached = std::max(maxReached, got[i]);
    }
  }
  return !sentinel || *sentinel > maxReached;
}

bool verify(const std::string &oracle, const ExecResult &r, const GraphStore &g, std::ostream &out) {
  EdgeList el = edge_list(g);
  if (oracle == "mst") {
    auto it = r.globals.find("mstwt");
    if (it == r.globals.end()) return false;
    out << "mstWeight=" << it->second << "\n";
    return it->second == oracle_kruskal(el);
  }
  if (oracle == "cc") {
    const auto *v = pick(r, {"comp"});
    return v && *v == oracle_components(el);
  }
  if (oracle == "bfs") {
    const auto *v = pick(r, {"bdist", "dist"});
    return v && same_distances(*v, oracle_bfs(el, 0));
  }
  const auto *v = pick(r, {"sdist", "dist"});
  return v && same_distances(*v, oracle_dijkstra(el, 0));
}

struct RunFlags {
  std::vector<std::string> graphs;
  bool symmetrize = false;
  std::optional<std::int64_t> delta;
  std::string schedule = "fifo";
  std::string oracle;
  std::string stats;
};

ExecOptions exec_options(const Options &o, const RunFlags &f) {
  ExecOptions e;
  e.threads = o.threads;
  e.delta = f.delta;
  e.worklist = f.schedule == "delta" || f.delta ? WorklistMode::DeltaStepping : WorklistMode::FIFO;
  return e;
}

const char *kCsvHeader =
    "program,graph,mode,sync,target,threads,wallMillis,simCost,transferCount,loadImbalanceCV,kernelInvocations\n";

std::string fmt(double x) {
  std::ostringstream ss;
  ss << std::setprecision(12) << x;
  return ss.str();
}

std::string base(const std::string &path) {
  auto s = path.find_last_of('/');
  return s == std::string::npos ? path : path.substr(s + 1);
}

std::string csv_row(const std::string &program, const std::string &graph, const Options &o,
                    const ExecResult *r, double millis) {
  std::string row = base(program) + "," + base(graph) + "," + o.mode + "," + (o.async ? "async" : "sync") + "," +
                    o.target + "," + std::to_string(o.threads) + ",";
  if (!r) return row + "FAILED,,,,\n";
  return row + fmt(millis) + "," + fmt(r->cost.total) + "," + std::to_string(r->transferCount) + "," +
         fmt(load_imbalance(*r)) + "," + std::to_string(r->kernelInvocations) + "\n";
}

int cmd_compile(const std::string &file, const Options &o) {
  try {
    write_dumps(compile_file(file, o), o, true);
    return kOk;
  } catch (...) {
    return report(file);
  }
}

int cmd_run(const std::string &file, const Options &o, const RunFlags &f) {
  try {
    Compilation c = compile_file(file, o);
    write_dumps(c, o, false);
    auto graphs = load_graphs(f.graphs, f.symmetrize);
    auto t0 = std::chrono::steady_clock::now();
    ExecResult r = execute(c.plan, graphs, exec_options(o, f));
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    for (const auto &[name, v] : r.properties) std::cout << "checksum " << name << "=" << checksum(v) << "\n";
    for (const auto &[name, v] : r.globals) std::cout << "global " << name << "=" << v << "\n";
    std::cout << "simCost=" << fmt(r.cost.total) << "\n";
    std::cout << "transferCount=" << r.transferCount << "\n";
    std::cout << "kernelInvocations=" << r.kernelInvocations << "\n";
    std::cout << "loadImbalanceCV=" << fmt(load_imbalance(r)) << "\n";
    if (!f.stats.empty()) {
      std::ofstream out(f.stats, std::ios::binary);
      if (!out) throw IoError("cannot write '" + f.stats + "'");
      out << kCsvHeader << csv_row(file, f.graphs.front(), o, &r, ms);
    }
    if (!f.oracle.empty()) {
      bool ok = verify(f.oracle, r, *graphs.front(), std::cout);
      std::cout << "oracle " << f.oracle << " " << (ok ? "PASS" : "FAIL") << "\n";
      if (!ok) return kRuntime;
    }
    return kOk;
  } catch (...) {
    return report(file);
  }
}

int cmd_bench(const std::vector<std::string> &programs, const std::vector<std::string> &graphs,
              const std::vector<std::string> &modes, const std::vector<std::string> &syncs,
              const std::vector<std::string> &targets, const std::vector<int> &threads, const Options &base,
              const RunFlags &flags, const std::string &outPath) {
  std::ofstream file;
  if (!outPath.empty()) {
    file.open(outPath, std::ios::binary);
    if (!file) {
      std::cerr << "error: cannot write '" << outPath << "'\n";
      return kUsage;
    }
  }
  std::ostream &out = outPath.empty() ? std::cout : file;
  out << kCsvHeader;
  for (const auto &prog : programs)
    for (const auto &graph : graphs)
      for (const auto &mode : modes)
        for (const auto &sync : syncs)
          for (const auto &target : targets)
            for (int t : threads) {
              Options o = base;
              o.mode = mode;
              o.async = sync == "async";
              o.target = target;
              o.threads = t;
              try {
                Compilation c = compile_source(slurp(prog), compile_options(o));
                auto stores = load_graphs({graph}, flags.symmetrize);
                auto t0 = std::chrono::steady_clock::now();
                ExecResult r = execute(c.plan, stores, exec_options(o, flags));
                double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
                out << csv_row(prog, graph, o, &r, ms);
              } catch (...) {
                report(prog);
                out << csv_row(prog, graph, o, nullptr, 0);
              }
            }
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Graph DSL compiler and simulated runtime"};
  app.require_subcommand(1);
  Options opt;

  std::string file;
  auto *compile = app.add_subcommand("compile", "lower a program and print its plan");
  compile->add_option("file", file, "program source")->required();
  add_compile_flags(compile, opt);

  RunFlags rf;
  auto *run = app.add_subcommand("run", "compile and execute a program");
  run->add_option("file", file, "program source")->required();
  run->add_option("graphs", rf.graphs, "input graphs, argv[1], argv[2], ...")->required();
  add_compile_flags(run, opt);
  run->add_flag("--symmetrize", rf.symmetrize, "add the reverse of every edge before running");
  run->add_option("--delta", rf.delta, "bucket width; selects delta-stepping worklists");
  run->add_option("--schedule", rf.schedule, "worklist schedule: fifo | delta")
      ->check(CLI::IsMember({"fifo", "delta"}));
  run->add_option("--verify-oracle", rf.oracle, "bfs | sssp | cc | mst")
      ->check(CLI::IsMember({"bfs", "sssp", "cc", "mst"}));
  run->add_option("--stats", rf.stats, "write a one-row CSV summary");

  std::vector<std::string> bPrograms, bGraphs, bModes{"vertex", "edge"}, bSyncs{"sync"}, bTargets{"cpu"};
  std::vector<int> bThreads{1};
  std::string bOut;
  RunFlags bf;
  Options bopt;
  auto *bench = app.add_subcommand("bench", "run a matrix of programs, graphs and options as CSV");
  bench->add_option("--programs", bPrograms, "program sources")->delimiter(',')->required();
  bench->add_option("--graphs", bGraphs, "graph files")->delimiter(',')->required();
  bench->add_option("--modes", bModes, "modes")->delimiter(',')->check(CLI::IsMember({"as-written", "vertex", "edge", "worklist"}));
  bench->add_option("--syncs", bSyncs, "sync, async")->delimiter(',')->check(CLI::IsMember({"sync", "async"}));
  bench->add_option("--targets", bTargets, "targets")->delimiter(',')->check(CLI::IsMember({"cpu", "sim-gpu", "sim-multi-gpu"}));
  bench->add_option("--threads", bThreads, "thread counts")->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("--devices", bopt.devices, "devices for sim-multi-gpu")->check(CLI::Range(2, 64));
  bench->add_flag("--allow-fallback", bopt.allowFallback, "keep the written form when a transform does not apply");
  bench->add_flag("--force", bopt.force, "allow worklist mode on a simulated GPU");
  bench->add_flag("--symmetrize", bf.symmetrize, "add the reverse of every edge");
  bench->add_option("--delta", bf.delta, "bucket width; selects delta-stepping worklists");
  bench->add_option("-o,--output", bOut, "CSV file (default stdout)");

  std::string kind, gOut;
  std::int64_t n = 0, m = 0;
  std::uint64_t seed = 1;
  RmatParams rp;
  bool gSym = false;
  auto *gen = app.add_subcommand("gen", "generate a graph file");
  gen->add_option("kind", kind, "er | rmat | path | star | ring | two")
      ->required()
      ->check(CLI::IsMember({"er", "rmat", "path", "star", "ring", "two"}));
  gen->add_option("--n", n, "vertices (leaves for star, half size for two)")->required();
  gen->add_option("--m", m, "edges (er, rmat)");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--a", rp.a);
  gen->add_option("--b", rp.b);
  gen->add_option("--c", rp.c);
  gen->add_option("--d", rp.d);
  gen->add_flag("--symmetrize", gSym, "add the reverse of every edge");
  gen->add_option("-o,--output", gOut, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  if (compile->parsed()) return cmd_compile(file, opt);
  if (run->parsed()) return cmd_run(file, opt, rf);
  if (bench->parsed()) return cmd_bench(bPrograms, bGraphs, bModes, bSyncs, bTargets, bThreads, bopt, bf, bOut);

  try {
    EdgeList g;
    if (kind == "er") g = gen_er(n, m, seed);
    else if (kind == "rmat") g = gen_rmat(n, m, seed, rp);
    else if (kind == "path") g = gen_path(n);
    else if (kind == "star") g = gen_star(n);
    else if (kind == "ring") g = gen_ring(n);
    else g = gen_two_components(n, seed);
    write_graph(gOut, gSym ? symmetrize(g) : g);
  } catch (const ParamError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
