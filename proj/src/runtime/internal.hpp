#pragma once

// Closure compiler shared by the executor. Expressions and statements are
// turned into std::function trees that run against a Ctx (one per worker).

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gdsl/runtime.hpp"

namespace gdsl::rt {

using Val = std::int64_t;

// State of one location (host or a simulated device).
struct Memory {
  std::vector<std::vector<Val>> props;
  std::vector<Val> globals;
  std::vector<std::unique_ptr<UnionFindSet>> sets;
  std::vector<std::unique_ptr<Worklist>> colls;
};

struct PropInfo {
  std::string name; // "graph.dist"
  int graph = 0;
  bool edge = false;
};

struct CollInfo {
  std::string name;
  int graph = 0;
  int keyProp = -1;
  std::int64_t delta = 1;
};

struct SetInfo {
  std::string name;
  int graph = 0;
};

// Program-wide tables; read-only while kernels run (apart from the locks).
struct World {
  std::vector<std::string> graphNames;
  std::vector<std::shared_ptr<GraphStore>> graphs;
  std::vector<std::unique_ptr<SingleLock>> locks;
  std::vector<PropInfo> props;
  std::map<std::string, int> propNames;      // bare property name -> id
  std::vector<std::vector<int>> propSlot;    // [graph][name id] -> prop, -1
  std::vector<SetInfo> sets;
  std::vector<CollInfo> colls;
  std::vector<std::string> globalNames;
  WorklistMode mode = WorklistMode::FIFO;

  std::int64_t size_of(int prop) const {
    const auto &g = *graphs[static_cast<std::size_t>(props[static_cast<std::size_t>(prop)].graph)];
    return props[static_cast<std::size_t>(prop)].edge ? g.m : g.n;
  }
};

struct Ctx {
  Memory *mem = nullptr;
  const World *world = nullptr;
  Val *frame = nullptr;
  int worker = 0;
  bool host = true;            // collection adds go straight to the worklist
  std::int64_t vertices = 0;   // work counters
  std::int64_t edges = 0;
  std::vector<std::pair<int, Val>> pushes; // buffered adds of device workers
  Val ret = 0;
};

enum class Flow { Normal, Break, Return };

using ExprFn = std::function<Val(Ctx &)>;
using StmtFn = std::function<Flow(Ctx &)>;

struct CompiledFn {
  std::string name;
  StmtFn body;
  std::vector<int> params; // slot per parameter
  int slots = 0;
};

// Object held by a name: fixed id in main, frame slot inside functions.
struct ORef {
  bool fixed = true;
  int v = 0;
  int get(const Ctx &c) const { return fixed ? v : static_cast<int>(c.frame[v]); }
};

class Compiler {
public:
  Compiler(const Program &program, World &world);
  ~Compiler();

  const CompiledFn &function(const std::string &name);
  // Main is compiled with one flat frame; a name keeps its slot everywhere.
  StmtFn main_stmt(const Stmt &s);
  ExprFn main_expr(const Expr &e);
  int main_slot(const std::string &name);
  int main_slots() const;
  ORef main_object(const std::string &name) const;

  // Pushes `v` into collection `coll` of the context's memory (or buffer).
  static void add(Ctx &c, int coll, Val v);
  static Val key_of(const Memory &mem, const World &w, int coll, Val v);

private:
  struct Scope;
  ExprFn expr(const Expr &e, Scope &sc);
  StmtFn stmt(const Stmt &s, Scope &sc);
  StmtFn foreach_stmt(const Foreach &f, Scope &sc);
  ExprFn call(const Call &c, Scope &sc, const Expr &e);
  ExprFn method(const MethodCall &mc, Scope &sc, const Expr &e);
  ExprFn member(const Member &m, Scope &sc, const Expr &e);
  std::function<Val *(Ctx &)> address(const Expr &e, Scope &sc, bool &shared);
  ORef object(const std::string &name, Scope &sc, const char *what);
  ORef graph_of(const Expr &e, Scope &sc);

  const Program &program_;
  World &world_;
  std::map<std::string, std::unique_ptr<CompiledFn>> fns_;
  std::unique_ptr<Scope> main_;
};

} // namespace gdsl::rt
