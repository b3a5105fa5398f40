#include <atomic>
#include <limits>

#include "internal.hpp"

namespace gdsl::rt {

namespace {

inline std::size_t ix(Val v) { return static_cast<std::size_t>(v); }

[[noreturn]] void fail(const SourceLoc &loc, const std::string &msg) {
  throw RuntimeError(std::to_string(loc.line) + ":" + std::to_string(loc.col) + ": " + msg);
}

void check_index(Val i, std::size_t n, const char *what) {
  if (static_cast<std::uint64_t>(i) >= n)
    throw RuntimeError(std::string(what) + " index " + std::to_string(i) + " out of range (size " +
                       std::to_string(n) + ")");
}

Val load(Val *p) { return std::atomic_ref<Val>(*p).load(std::memory_order_relaxed); }
void store(Val *p, Val v, bool shared) {
  if (shared) std::atomic_ref<Val>(*p).store(v, std::memory_order_relaxed);
  else *p = v;
}

struct Binding {
  enum Kind { Slot, Fixed } kind = Slot;
  int v = 0;
};

struct NbrBind {
  std::string src, dst;
  int edgeSlot = 0;
};

} // namespace

struct Compiler::Scope {
  bool flat = false;
  std::vector<std::map<std::string, Binding>> levels{1};
  int next = 0;
  std::vector<NbrBind> nbrs;

  void push() {
    if (!flat) levels.emplace_back();
  }
  void pop() {
    if (!flat) levels.pop_back();
  }
  int declare(const std::string &name) {
    auto &lv = flat ? levels.front() : levels.back();
    auto it = lv.find(name);
    if (flat && it != lv.end() && it->second.kind == Binding::Slot) return it->second.v;
    lv[name] = {Binding::Slot, next};
    return next++;
  }
  int hidden() { return next++; }
  const Binding *lookup(const std::string &name) const {
    for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }
};

Compiler::Compiler(const Program &program, World &world)
    : program_(program), world_(world), main_(std::make_unique<Scope>()) {
  main_->flat = true;
  auto &top = main_->levels.front();
  for (std::size_t i = 0; i < world.graphNames.size(); ++i)
    top[world.graphNames[i]] = {Binding::Fixed, static_cast<int>(i)};
  for (std::size_t i = 0; i < world.sets.size(); ++i)
    top[world.sets[i].name] = {Binding::Fixed, static_cast<int>(i)};
  for (std::size_t i = 0; i < world.colls.size(); ++i)
    top[world.colls[i].name] = {Binding::Fixed, static_cast<int>(i)};
}

Compiler::~Compiler() = default;

const CompiledFn &Compiler::function(const std::string &name) {
  auto it = fns_.find(name);
  if (it != fns_.end()) return *it->second;
  const FunctionDecl *fd = program_.find_function(name);
  if (!fd) throw RuntimeError("undefined function '" + name + "'");
  auto &fn = fns_[name];
  fn = std::make_unique<CompiledFn>();
  fn->name = name;
  Scope sc;
  for (const auto &p : fd->params) fn->params.push_back(sc.declare(p.name));
  Block body = fd->body;
  fn->body = stmt(Stmt{std::move(body), fd->loc}, sc);
  fn->slots = sc.next;
  return *fn;
}

StmtFn Compiler::main_stmt(const Stmt &s) { return stmt(s, *main_); }
ExprFn Compiler::main_expr(const Expr &e) { return expr(e, *main_); }
int Compiler::main_slot(const std::string &name) { return main_->declare(name); }
int Compiler::main_slots() const { return main_->next; }

ORef Compiler::main_object(const std::string &name) const {
  const Binding *b = main_->lookup(name);
  if (!b) throw RuntimeError("unknown object '" + name + "'");
  return {b->kind == Binding::Fixed, b->v};
}

void Compiler::add(Ctx &c, int coll, Val v) {
  if (!c.host) {
    c.pushes.emplace_back(coll, v);
    return;
  }
  auto &wl = c.mem->colls[ix(coll)];
  if (!wl) throw RuntimeError("collection '" + c.world->colls[ix(coll)].name + "' is not allocated here");
  wl->push(v, key_of(*c.mem, *c.world, coll, v));
}

Val Compiler::key_of(const Memory &mem, const World &w, int coll, Val v) {
  int kp = w.colls[ix(coll)].keyProp;
  if (kp < 0) return 0;
  const auto &arr = mem.props[ix(kp)];
  check_index(v, arr.size(), "collection key");
  return std::atomic_ref<const Val>(arr[ix(v)]).load(std::memory_order_relaxed);
}

ORef Compiler::object(const std::string &name, Scope &sc, const char *what) {
  const Binding *b = sc.lookup(name);
  if (!b) throw RuntimeError(std::string("unknown ") + what + " '" + name + "'");
  return {b->kind == Binding::Fixed, b->v};
}

ORef Compiler::graph_of(const Expr &e, Scope &sc) {
  const std::string &g = e.info.value.graph;
  if (g.empty()) fail(e.loc, "cannot tell which graph this expression belongs to");
  return object(g, sc, "graph");
}

// --- expressions ---

ExprFn Compiler::member(const Member &m, Scope &sc, const Expr &e) {
  const Expr &obj = *m.object;
  const ExprInfo &oi = obj.info.value;
  if (oi.type == TypeKind::Graph) {
    ORef g = graph_of(obj, sc);
    if (m.field == "npoints") return [g](Ctx &c) { return c.world->graphs[ix(g.get(c))]->n; };
    if (m.field == "nedges") return [g](Ctx &c) { return c.world->graphs[ix(g.get(c))]->m; };
    fail(e.loc, "'" + m.field + "' can only be used with an index");
  }
  ExprFn idx = expr(obj, sc);
  ORef g = graph_of(obj, sc);
  if (oi.type == TypeKind::Edge && (m.field == "src" || m.field == "dst" || m.field == "weight")) {
    int which = m.field == "src" ? 0 : m.field == "dst" ? 1 : 2;
    return [g, idx, which](Ctx &c) {
      const auto &G = *c.world->graphs[ix(g.get(c))];
      Val i = idx(c);
      check_index(i, G.edgeList.size(), "edge");
      const WEdge &w = G.edgeList[ix(i)];
      return which == 0 ? w.src : which == 1 ? w.dst : w.weight;
    };
  }
  const std::string &prop = e.info.value.property;
  if (prop.empty()) fail(e.loc, "unsupported member '" + m.field + "'");
  auto pn = world_.propNames.find(prop);
  if (pn == world_.propNames.end()) fail(e.loc, "property '" + prop + "' is never added");
  int pid = pn->second;
  return [g, idx, pid](Ctx &c) {
    int slot = c.world->propSlot[ix(g.get(c))][ix(pid)];
    if (slot < 0) throw RuntimeError("property missing on this graph");
    auto &arr = c.mem->props[ix(slot)];
    Val i = idx(c);
    check_index(i, arr.size(), c.world->props[ix(slot)].name.c_str());
    return load(&arr[ix(i)]);
  };
}

std::function<Val *(Ctx &)> Compiler::address(const Expr &e, Scope &sc, bool &shared) {
  if (auto *v = e.get_if<VarRef>()) {
    if (const Binding *b = sc.lookup(v->name); b && b->kind == Binding::Slot) {
      shared = false;
      int k = b->v;
      return [k](Ctx &c) { return &c.frame[k]; };
    }
    for (std::size_t i = 0; i < world_.globalNames.size(); ++i)
      if (world_.globalNames[i] == v->name) {
        shared = true;
        return [i](Ctx &c) { return &c.mem->globals[i]; };
      }
    fail(e.loc, "'" + v->name + "' is not assignable");
  }
  if (auto *m = e.get_if<Member>()) {
    const std::string &prop = e.info.value.property;
    if (prop.empty() || (e.info.value.edge_property && prop == "weight"))
      fail(e.loc, "'" + m->field + "' is not assignable");
    auto pn = world_.propNames.find(prop);
    if (pn == world_.propNames.end()) fail(e.loc, "property '" + prop + "' is never added");
    int pid = pn->second;
    ExprFn idx = expr(*m->object, sc);
    ORef g = graph_of(*m->object, sc);
    shared = true;
    return [g, idx, pid](Ctx &c) {
      int slot = c.world->propSlot[ix(g.get(c))][ix(pid)];
      if (slot < 0) throw RuntimeError("property missing on this graph");
      auto &arr = c.mem->props[ix(slot)];
      Val i = idx(c);
      check_index(i, arr.size(), c.world->props[ix(slot)].name.c_str());
      return &arr[ix(i)];
    };
  }
  fail(e.loc, "expression is not assignable");
}

ExprFn Compiler::call(const Call &cl, Scope &sc, const Expr &e) {
  if (cl.callee == "MIN" || cl.callee == "MAX") {
    bool st = false, sf = false;
    auto target = address(cl.args[0], sc, st);
    ExprFn cand = expr(cl.args[1], sc);
    auto flag = address(cl.args[2], sc, sf);
    bool isMin = cl.callee == "MIN";
    return [target, cand, flag, st, sf, isMin](Ctx &c) -> Val {
      Val v = cand(c);
      Val *p = target(c);
      auto better = [&](Val cur) { return isMin ? v < cur : v > cur; };
      bool upd = false;
      if (st) {
        std::atomic_ref<Val> a(*p);
        Val cur = a.load(std::memory_order_relaxed);
        while (better(cur))
          if (a.compare_exchange_weak(cur, v, std::memory_order_relaxed)) {
            upd = true;
            break;
          }
      } else if (better(*p)) {
        *p = v;
        upd = true;
      }
      if (upd) store(flag(c), 1, sf);
      return upd;
    };
  }
  if (cl.callee == "RADD" || cl.callee == "RMUL") {
    bool st = false;
    auto target = address(cl.args[0], sc, st);
    ExprFn val = expr(cl.args[1], sc);
    if (cl.callee == "RADD")
      return [target, val, st](Ctx &c) -> Val {
        Val v = val(c);
        Val *p = target(c);
        if (st) return std::atomic_ref<Val>(*p).fetch_add(v, std::memory_order_relaxed) + v;
        return *p += v;
      };
    return [target, val](Ctx &c) -> Val {
      Val v = val(c);
      std::atomic_ref<Val> a(*target(c));
      Val cur = a.load(std::memory_order_relaxed);
      while (!a.compare_exchange_weak(cur, cur * v, std::memory_order_relaxed)) {
      }
      return cur * v;
    };
  }
  const CompiledFn *fn = &function(cl.callee);
  if (fn->params.size() != cl.args.size()) fail(e.loc, "argument count mismatch for '" + cl.callee + "'");
  std::vector<ExprFn> args;
  for (const auto &a : cl.args) args.push_back(expr(a, sc));
  return [fn, args](Ctx &c) -> Val {
    std::vector<Val> frame(ix(fn->slots), 0);
    for (std::size_t i = 0; i < args.size(); ++i) frame[ix(fn->params[i])] = args[i](c);
    Val *saved = c.frame;
    c.frame = frame.data();
    c.ret = 0;
    fn->body(c);
    c.frame = saved;
    return c.ret;
  };
}

ExprFn Compiler::method(const MethodCall &mc, Scope &sc, const Expr &e) {
  const Expr &obj = *mc.object;
  if (mc.method == "getweight") {
    ORef g = graph_of(obj, sc);
    auto *a = mc.args[0].get_if<VarRef>();
    auto *b = mc.args[1].get_if<VarRef>();
    if (a && b)
      for (auto it = sc.nbrs.rbegin(); it != sc.nbrs.rend(); ++it)
        if (it->src == a->name && it->dst == b->name) {
          // current edge of the enclosing neighbour loop
          int slot = it->edgeSlot;
          return [g, slot](Ctx &c) { return c.world->graphs[ix(g.get(c))]->edgeList[ix(c.frame[slot])].weight; };
        }
    ExprFn fa = expr(mc.args[0], sc), fb = expr(mc.args[1], sc);
    return [g, fa, fb](Ctx &c) -> Val {
      const auto &G = *c.world->graphs[ix(g.get(c))];
      Val u = fa(c), v = fb(c);
      check_index(u, ix(G.n), "point");
      for (Val k = G.csrOffsets[ix(u)]; k < G.csrOffsets[ix(u) + 1]; ++k)
        if (G.csrTargets[ix(k)] == v) return G.csrWeights[ix(k)];
      throw RuntimeError("getweight: no edge " + std::to_string(u) + " -> " + std::to_string(v));
    };
  }
  auto *ref = obj.get_if<VarRef>();
  if (!ref) fail(e.loc, "method '" + mc.method + "' needs a named object");
  if (mc.method == "find") {
    ORef s = object(ref->name, sc, "set");
    ExprFn fa = expr(mc.args[0], sc);
    return [s, fa](Ctx &c) -> Val {
      auto &set = c.mem->sets[ix(s.get(c))];
      if (!set) throw RuntimeError("set is not allocated here");
      return set->find(fa(c));
    };
  }
  if (mc.method == "union") {
    ORef s = object(ref->name, sc, "set");
    ExprFn fa = expr(mc.args[0], sc), fb = expr(mc.args[1], sc);
    return [s, fa, fb](Ctx &c) -> Val {
      auto &set = c.mem->sets[ix(s.get(c))];
      if (!set) throw RuntimeError("set is not allocated here");
      Val a = fa(c);
      return set->unite(a, fb(c)) ? 1 : 0;
    };
  }
  if (mc.method == "add") {
    ORef w = object(ref->name, sc, "collection");
    ExprFn fa = expr(mc.args[0], sc);
    return [w, fa](Ctx &c) -> Val {
      add(c, w.get(c), fa(c));
      return 0;
    };
  }
  if (mc.method == "size") {
    ORef w = object(ref->name, sc, "collection");
    return [w](Ctx &c) -> Val {
      auto &wl = c.mem->colls[ix(w.get(c))];
      if (!wl) throw RuntimeError("collection is not allocated here");
      return wl->size();
    };
  }
  fail(e.loc, "unsupported method '" + mc.method + "'");
}

ExprFn Compiler::expr(const Expr &e, Scope &sc) {
  if (auto *i = e.get_if<IntLit>()) {
    Val v = i->value;
    return [v](Ctx &) { return v; };
  }
  if (auto *b = e.get_if<BoolLit>()) {
    Val v = b->value ? 1 : 0;
    return [v](Ctx &) { return v; };
  }
  if (e.is<FloatLit>()) fail(e.loc, "floating point values are not supported by the executor");
  if (auto *v = e.get_if<VarRef>()) {
    if (const Binding *b = sc.lookup(v->name)) {
      if (b->kind == Binding::Fixed) {
        Val k = b->v;
        return [k](Ctx &) { return k; };
      }
      int k = b->v;
      return [k](Ctx &c) { return c.frame[k]; };
    }
    for (std::size_t g = 0; g < world_.globalNames.size(); ++g)
      if (world_.globalNames[g] == v->name) return [g](Ctx &c) { return load(&c.mem->globals[g]); };
    if (v->name == "MAX_INT") return [](Ctx &) -> Val { return std::numeric_limits<std::int32_t>::max(); };
    if (v->name == "MAX_LONG") return [](Ctx &) -> Val { return std::numeric_limits<Val>::max(); };
    fail(e.loc, "unknown name '" + v->name + "'");
  }
  if (auto *m = e.get_if<Member>()) return member(*m, sc, e);
  if (auto *x = e.get_if<Index>()) {
    auto *m = x->object->get_if<Member>();
    if (!m || (m->field != "points" && m->field != "edges")) fail(e.loc, "unsupported index expression");
    ORef g = graph_of(*m->object, sc);
    ExprFn idx = expr(*x->index, sc);
    bool points = m->field == "points";
    return [g, idx, points](Ctx &c) {
      const auto &G = *c.world->graphs[ix(g.get(c))];
      Val i = idx(c);
      check_index(i, ix(points ? G.n : G.m), points ? "point" : "edge");
      return i;
    };
  }
  if (auto *cl = e.get_if<Call>()) return call(*cl, sc, e);
  if (auto *mc = e.get_if<MethodCall>()) return method(*mc, sc, e);
  if (auto *u = e.get_if<Unary>()) {
    ExprFn a = expr(*u->operand, sc);
    if (u->op == UnaryOp::Neg) return [a](Ctx &c) { return -a(c); };
    return [a](Ctx &c) -> Val { return a(c) == 0; };
  }
  const auto &b = e.as<Binary>();
  ExprFn l = expr(*b.lhs, sc), r = expr(*b.rhs, sc);
  switch (b.op) {
  case BinaryOp::Add: return [l, r](Ctx &c) { return l(c) + r(c); };
  case BinaryOp::Sub: return [l, r](Ctx &c) { return l(c) - r(c); };
  case BinaryOp::Mul: return [l, r](Ctx &c) { return l(c) * r(c); };
  case BinaryOp::Div:
  case BinaryOp::Mod: {
    bool div = b.op == BinaryOp::Div;
    SourceLoc loc = e.loc;
    return [l, r, div, loc](Ctx &c) {
      Val x = l(c), y = r(c);
      if (y == 0) fail(loc, "division by zero");
      return div ? x / y : x % y;
    };
  }
  case BinaryOp::Lt: return [l, r](Ctx &c) -> Val { return l(c) < r(c); };
  case BinaryOp::Le: return [l, r](Ctx &c) -> Val { return l(c) <= r(c); };
  case BinaryOp::Gt: return [l, r](Ctx &c) -> Val { return l(c) > r(c); };
  case BinaryOp::Ge: return [l, r](Ctx &c) -> Val { return l(c) >= r(c); };
  case BinaryOp::Eq: return [l, r](Ctx &c) -> Val { return l(c) == r(c); };
  case BinaryOp::Ne: return [l, r](Ctx &c) -> Val { return l(c) != r(c); };
  case BinaryOp::And: return [l, r](Ctx &c) -> Val { return l(c) != 0 && r(c) != 0; };
  case BinaryOp::Or: return [l, r](Ctx &c) -> Val { return l(c) != 0 || r(c) != 0; };
  }
  fail(e.loc, "bad operator");
}

// --- statements ---

StmtFn Compiler::foreach_stmt(const Foreach &f, Scope &sc) {
  enum Kind { Points, Edges, Out, In, Both } kind = Points;
  ORef g;
  ExprFn src;
  switch (f.iterator) {
  case IteratorKind::Points: kind = Points; break;
  case IteratorKind::Edges: kind = Edges; break;
  case IteratorKind::OutNbrs: kind = Out; break;
  case IteratorKind::InNbrs: kind = In; break;
  case IteratorKind::Nbrs: kind = Both; break;
  case IteratorKind::Items:
    if (f.info.value.items != ItemsKind::SetItems)
      fail(f.subject.loc, "collection items can only be iterated by a kernel launch");
    kind = Points;
    break;
  }
  g = graph_of(f.subject, sc);
  if (kind == Out || kind == In || kind == Both) src = expr(f.subject, sc);
  sc.push();
  int slot = sc.declare(f.var);
  int es = sc.hidden();
  auto *sv = f.subject.get_if<VarRef>();
  bool bound = sv && kind != Both;
  if (bound) sc.nbrs.push_back(kind == In ? NbrBind{f.var, sv->name, es} : NbrBind{sv->name, f.var, es});
  ExprFn filter = f.filter ? expr(*f.filter, sc) : ExprFn{};
  StmtFn body = stmt(*f.body, sc);
  if (bound) sc.nbrs.pop_back();
  sc.pop();

  // returns true when the loop must stop; `out` carries Return
  auto visit = [filter, body](Ctx &c, Flow &out) {
    if (filter && !filter(c)) return false;
    Flow fl = body(c);
    if (fl == Flow::Break) return true;
    if (fl == Flow::Return) {
      out = fl;
      return true;
    }
    return false;
  };
  if (kind == Points || kind == Edges)
    return [g, slot, visit, kind](Ctx &c) {
      const auto &G = *c.world->graphs[ix(g.get(c))];
      Val n = kind == Points ? G.n : G.m;
      Flow out = Flow::Normal;
      for (Val v = 0; v < n; ++v) {
        c.frame[slot] = v;
        (kind == Points ? c.vertices : c.edges)++;
        if (visit(c, out)) break;
      }
      return out;
    };
  return [g, src, slot, es, visit, kind](Ctx &c) {
    const auto &G = *c.world->graphs[ix(g.get(c))];
    Val p = src(c);
    check_index(p, ix(G.n), "point");
    Flow out = Flow::Normal;
    if (kind != In)
      for (Val k = G.csrOffsets[ix(p)]; k < G.csrOffsets[ix(p) + 1]; ++k) {
        c.frame[slot] = G.csrTargets[ix(k)];
        c.frame[es] = G.csrEdge[ix(k)];
        ++c.edges;
        if (visit(c, out)) return out;
      }
    if (kind != Out) {
      const auto &off = G.in_offsets();
      const auto &srcs = G.in_sources();
      const auto &eids = G.in_edges();
      for (Val k = off[ix(p)]; k < off[ix(p) + 1]; ++k) {
        c.frame[slot] = srcs[ix(k)];
        c.frame[es] = eids[ix(k)];
        ++c.edges;
        if (visit(c, out)) return out;
      }
    }
    return out;
  };
}

StmtFn Compiler::stmt(const Stmt &s, Scope &sc) {
  if (auto *d = s.get_if<VarDecl>()) {
    if (d->type == TypeKind::Graph) {
      if (!sc.flat) fail(s.loc, "graphs can only be declared in main");
      return [](Ctx &) { return Flow::Normal; };
    }
    if (d->type == TypeKind::Set || d->type == TypeKind::Collection) {
      if (!sc.flat) fail(s.loc, "sets and collections can only be declared in main");
      bool set = d->type == TypeKind::Set;
      int id = main_object(d->name).v;
      return [id, set](Ctx &c) {
        const World &w = *c.world;
        if (set) {
          int g = w.sets[ix(id)].graph;
          c.mem->sets[ix(id)] = std::make_unique<UnionFindSet>(w.graphs[ix(g)]->n);
        } else {
          const CollInfo &ci = w.colls[ix(id)];
          c.mem->colls[ix(id)] = std::make_unique<Worklist>(w.graphs[ix(ci.graph)]->n, w.mode, ci.delta);
        }
        return Flow::Normal;
      };
    }
    if (d->type == TypeKind::Float) fail(s.loc, "floating point values are not supported by the executor");
    ExprFn init = d->init ? expr(*d->init, sc) : ExprFn{};
    int slot = sc.declare(d->name);
    return [slot, init](Ctx &c) {
      c.frame[slot] = init ? init(c) : 0;
      return Flow::Normal;
    };
  }
  if (auto *a = s.get_if<Assign>()) {
    bool shared = false;
    auto target = address(a->target, sc, shared);
    ExprFn val = expr(a->value, sc);
    if (a->op == AssignOp::Set)
      return [target, val, shared](Ctx &c) {
        Val v = val(c);
        store(target(c), v, shared);
        return Flow::Normal;
      };
    bool sub = a->op == AssignOp::Sub;
    return [target, val, shared, sub](Ctx &c) {
      Val v = val(c);
      if (sub) v = -v;
      Val *p = target(c);
      if (shared) std::atomic_ref<Val>(*p).fetch_add(v, std::memory_order_relaxed);
      else *p += v;
      return Flow::Normal;
    };
  }
  if (auto *i = s.get_if<If>()) {
    ExprFn cond = expr(i->cond, sc);
    StmtFn then = stmt(*i->then_branch, sc);
    StmtFn els = i->else_branch ? stmt(**i->else_branch, sc) : StmtFn{};
    return [cond, then, els](Ctx &c) {
      if (cond(c)) return then(c);
      return els ? els(c) : Flow::Normal;
    };
  }
  if (auto *w = s.get_if<While>()) {
    ExprFn cond = expr(w->cond, sc);
    StmtFn body = stmt(*w->body, sc);
    return [cond, body](Ctx &c) {
      while (cond(c)) {
        Flow f = body(c);
        if (f == Flow::Break) break;
        if (f == Flow::Return) return f;
      }
      return Flow::Normal;
    };
  }
  if (s.is<Break>()) return [](Ctx &) { return Flow::Break; };
  if (auto *r = s.get_if<Return>()) {
    ExprFn val = r->value ? expr(*r->value, sc) : ExprFn{};
    return [val](Ctx &c) {
      c.ret = val ? val(c) : 0;
      return Flow::Return;
    };
  }
  if (auto *x = s.get_if<ExprStmt>()) {
    ExprFn e = expr(x->expr, sc);
    return [e](Ctx &c) {
      e(c);
      return Flow::Normal;
    };
  }
  if (auto *f = s.get_if<Foreach>()) return foreach_stmt(*f, sc);
  if (auto *sg = s.get_if<Single>()) {
    if (sg->targets.empty()) fail(s.loc, "single needs a target");
    ORef g = graph_of(sg->targets[0], sc);
    std::vector<ExprFn> targets;
    for (const auto &t : sg->targets) targets.push_back(expr(t, sc));
    StmtFn then = stmt(*sg->then_branch, sc);
    StmtFn els = sg->else_branch ? stmt(**sg->else_branch, sc) : StmtFn{};
    return [g, targets, then, els](Ctx &c) {
      std::vector<Val> ids;
      for (const auto &t : targets) ids.push_back(t(c));
      SingleLock &lock = *c.world->locks[ix(g.get(c))];
      if (!lock.try_acquire(ids, c.worker)) return els ? els(c) : Flow::Normal;
      Flow f;
      try {
        f = then(c);
      } catch (...) {
        lock.release(ids, c.worker);
        throw;
      }
      lock.release(ids, c.worker);
      return f;
    };
  }
  if (auto *b = s.get_if<Block>()) {
    sc.push();
    std::vector<StmtFn> body;
    for (const auto &x : b->stmts) body.push_back(stmt(x, sc));
    sc.pop();
    return [body](Ctx &c) {
      for (const auto &f : body) {
        Flow fl = f(c);
        if (fl != Flow::Normal) return fl;
      }
      return Flow::Normal;
    };
  }
  if (auto *ap = s.get_if<AddProperty>()) {
    if (ap->type == TypeKind::Float) fail(s.loc, "floating point properties are not supported by the executor");
    int g = main_object(ap->graph).v;
    int slot = world_.propSlot[ix(g)][ix(world_.propNames.at(ap->name))];
    return [slot](Ctx &c) {
      c.mem->props[ix(slot)].assign(ix(c.world->size_of(slot)), 0);
      return Flow::Normal;
    };
  }
  if (s.is<ReadGraph>()) return [](Ctx &) { return Flow::Normal; }; // bound before execution
  fail(s.loc, "parallel sections are only allowed at the top of main");
}

} // namespace gdsl::rt
