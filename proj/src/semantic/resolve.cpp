#include "gdsl/semantic.hpp"

namespace gdsl {

SymbolTable::SymbolTable() { scopes_.emplace_back(); }

void SymbolTable::push_scope() { scopes_.emplace_back(); }

void SymbolTable::pop_scope() {
  if (scopes_.size() > 1) scopes_.pop_back();
}

bool SymbolTable::declare(const std::string &name, Symbol sym) {
  return scopes_.back().emplace(name, std::move(sym)).second;
}

const Symbol *SymbolTable::lookup(const std::string &name) const {
  for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
    auto f = it->find(name);
    if (f != it->end()) return &f->second;
  }
  return nullptr;
}

bool SymbolTable::declare_property(const std::string &graph, const std::string &name,
                                   TypeKind type, bool edge) {
  auto &table = edge ? edge_props_ : point_props_;
  return table[graph].emplace(name, type).second;
}

TypeKind SymbolTable::property_type(const std::string &graph, const std::string &name,
                                    bool edge) const {
  if (edge && name == "weight") return TypeKind::Int;
  const auto &table = edge ? edge_props_ : point_props_;
  auto g = table.find(graph);
  if (g != table.end()) {
    auto p = g->second.find(name);
    return p == g->second.end() ? TypeKind::Unknown : p->second;
  }
  for (const auto &[_, props] : table) {
    auto p = props.find(name);
    if (p != props.end()) return p->second;
  }
  return TypeKind::Unknown;
}

namespace {

bool compatible(TypeKind want, TypeKind got) {
  if (want == TypeKind::Unknown || got == TypeKind::Unknown) return true;
  if (is_scalar_type(want) && is_scalar_type(got)) return true;
  return want == got;
}

bool is_iter_of_graph(IteratorKind k) {
  return k == IteratorKind::Points || k == IteratorKind::Edges;
}

class Resolver {
public:
  std::vector<SemanticError> errors;
  SymbolTable st;

  void run(Program &p) {
    st.declare("MAX_INT", {TypeKind::Int, StorageClass::Builtin, ""});
    st.declare("MAX_LONG", {TypeKind::Int, StorageClass::Builtin, ""});

    for (auto &f : p.functions) {
      if (f.name == "main") error(f.loc, "function 'main' defined twice");
      if (!st.functions.emplace(f.name, FunctionSig{f.ret, f.params}).second)
        error(f.loc, "function '" + f.name + "' redefined");
    }
    collect_properties(p);

    for (std::size_t i = 0; i < p.globals.size(); ++i) {
      auto &g = p.globals[i];
      SourceLoc loc = i < p.global_locs.size() ? p.global_locs[i] : SourceLoc{};
      if (!is_scalar_type(g.type)) error(loc, "global '" + g.name + "' must have scalar type");
      if (g.init) {
        TypeKind t = expr(*g.init);
        if (!compatible(g.type, t)) error(loc, "type mismatch in initializer of '" + g.name + "'");
      }
      if (!st.declare(g.name, {g.type, StorageClass::Global, ""}))
        error(loc, "global '" + g.name + "' redeclared");
    }

    for (auto &f : p.functions) function(f);
    function(p.main);
  }

private:
  const FunctionDecl *fn_ = nullptr;
  int loop_depth_ = 0;
  int foreach_depth_ = 0;

  void error(SourceLoc loc, std::string msg) { errors.push_back({loc, std::move(msg)}); }

  void collect_properties(Program &p) {
    auto scan = [&](const Block &b) {
      visit_stmts(b, [&](const Stmt &s) {
        if (auto *ap = s.get_if<AddProperty>()) {
          if (ap->type != TypeKind::Int && ap->type != TypeKind::Float &&
              ap->type != TypeKind::Bool)
            error(s.loc, "property '" + ap->name + "' must have scalar type");
          if ((ap->edge && ap->name == "weight") ||
              !st.declare_property(ap->graph, ap->name, ap->type, ap->edge))
            error(s.loc, "property redeclaration: '" + ap->name + "' on '" + ap->graph + "'");
        }
      });
    };
    for (auto &f : p.functions) scan(f.body);
    scan(p.main.body);
  }

  void function(FunctionDecl &f) {
    fn_ = &f;
    loop_depth_ = 0;
    foreach_depth_ = 0;
    st.push_scope();
    std::string graph_param;
    int graph_params = 0;
    for (const auto &prm : f.params)
      if (prm.type == TypeKind::Graph) {
        graph_param = prm.name;
        ++graph_params;
      }
    if (graph_params != 1) graph_param.clear();
    for (const auto &prm : f.params) {
      if (prm.type == TypeKind::Void || prm.type == TypeKind::Unknown)
        error(f.loc, "parameter '" + prm.name + "' has no type");
      std::string g;
      if (prm.type == TypeKind::Point || prm.type == TypeKind::Edge || prm.type == TypeKind::Set ||
          prm.type == TypeKind::Collection)
        g = graph_param;
      if (!st.declare(prm.name, {prm.type, StorageClass::Param, g}))
        error(f.loc, "duplicate parameter '" + prm.name + "' in '" + f.name + "'");
    }
    for (auto &s : f.body.stmts) stmt(s);
    st.pop_scope();
  }

  bool is_lvalue(const Expr &e) {
    if (auto *v = e.get_if<VarRef>()) {
      const Symbol *s = st.lookup(v->name);
      return s && s->storage != StorageClass::Builtin && is_scalar_type(s->type);
    }
    if (e.is<Member>()) return !e.info.value.property.empty() && e.info.value.property != "weight";
    return false;
  }

  void check_lvalue(const Expr &e, const std::string &what) {
    if (!is_lvalue(e)) error(e.loc, what + " is not assignable");
  }

  void stmt(Stmt &s) {
    std::visit([&](auto &n) { stmt_node(s, n); }, s.node);
  }

  void body(Stmt &s) {
    st.push_scope();
    stmt(s);
    st.pop_scope();
  }

  void stmt_node(Stmt &s, VarDecl &d) {
    Symbol sym{d.type, StorageClass::Local, d.graph};
    if (d.type == TypeKind::Void || d.type == TypeKind::Unknown)
      error(s.loc, "variable '" + d.name + "' has no type");
    if (!d.graph.empty()) {
      const Symbol *g = st.lookup(d.graph);
      if (!g) error(s.loc, "undefined name '" + d.graph + "'");
      else if (g->type != TypeKind::Graph) error(s.loc, "'" + d.graph + "' is not a Graph");
    }
    if ((d.type == TypeKind::Set || d.type == TypeKind::Collection) && d.graph.empty())
      error(s.loc, "'" + d.name + "' needs a graph");
    if (!d.keyProp.empty() &&
        st.property_type(d.graph, d.keyProp, false) == TypeKind::Unknown)
      error(s.loc, "undefined property '" + d.keyProp + "'");
    if (d.init) {
      TypeKind t = expr(*d.init);
      if (!compatible(d.type, t)) error(s.loc, "type mismatch in initializer of '" + d.name + "'");
      if (sym.graph.empty() && (d.type == TypeKind::Point || d.type == TypeKind::Edge))
        sym.graph = d.init->info.value.graph;
    }
    if (!st.declare(d.name, sym)) error(s.loc, "'" + d.name + "' redeclared in the same scope");
  }

  void stmt_node(Stmt &s, Assign &a) {
    TypeKind lt = expr(a.target);
    TypeKind rt = expr(a.value);
    check_lvalue(a.target, "assignment target");
    if (!compatible(lt, rt)) error(s.loc, "type mismatch in assignment");
  }

  void stmt_node(Stmt &s, If &i) {
    scalar(i.cond, "condition");
    body(*i.then_branch);
    if (i.else_branch) body(**i.else_branch);
    (void)s;
  }

  void stmt_node(Stmt &, While &w) {
    scalar(w.cond, "condition");
    ++loop_depth_;
    body(*w.body);
    --loop_depth_;
  }

  void stmt_node(Stmt &s, Break &) {
    if (loop_depth_ == 0) error(s.loc, "break outside loop");
  }

  void stmt_node(Stmt &s, Return &r) {
    if (r.value) {
      TypeKind t = expr(*r.value);
      if (fn_->ret == TypeKind::Void) error(s.loc, "void function returns a value");
      else if (!compatible(fn_->ret, t)) error(s.loc, "type mismatch in return");
    } else if (fn_->ret != TypeKind::Void && fn_->name != "main") {
      error(s.loc, "missing return value");
    }
  }

  void stmt_node(Stmt &, ExprStmt &e) { expr(e.expr); }

  void stmt_node(Stmt &s, Foreach &f) {
    TypeKind st_type = expr(f.subject);
    const std::string &sg = f.subject.info.value.graph;
    TypeKind var_type = TypeKind::Point;
    ForeachInfo info;
    info.graph = sg;
    switch (f.iterator) {
    case IteratorKind::Points:
    case IteratorKind::Edges:
      if (st_type != TypeKind::Graph)
        error(s.loc, std::string("iterator '") + iterator_name(f.iterator) +
                         "' requires Graph subject");
      if (f.iterator == IteratorKind::Edges) var_type = TypeKind::Edge;
      break;
    case IteratorKind::Nbrs:
    case IteratorKind::InNbrs:
    case IteratorKind::OutNbrs:
      if (st_type != TypeKind::Point)
        error(s.loc, std::string("iterator '") + iterator_name(f.iterator) +
                         "' requires Point subject");
      break;
    case IteratorKind::Items:
      if (st_type == TypeKind::Set) info.items = ItemsKind::SetItems;
      else if (st_type == TypeKind::Collection) info.items = ItemsKind::CollectionItems;
      else error(s.loc, "foreach over items requires a Set or Collection subject");
      break;
    }
    info.outer = foreach_depth_ == 0 && is_iter_of_graph(f.iterator);
    f.info.value = info;

    st.push_scope();
    st.declare(f.var, {var_type, StorageClass::Local, sg});
    if (f.filter) scalar(*f.filter, "filter");
    int saved_loops = loop_depth_;
    loop_depth_ = 0;
    ++foreach_depth_;
    body(*f.body);
    --foreach_depth_;
    loop_depth_ = saved_loops;
    st.pop_scope();
  }

  void stmt_node(Stmt &s, Single &sg) {
    if (sg.targets.empty()) error(s.loc, "single needs at least one target");
    for (auto &t : sg.targets) {
      TypeKind k = expr(t);
      if (k != TypeKind::Point && k != TypeKind::Edge && k != TypeKind::Int &&
          k != TypeKind::Unknown)
        error(t.loc, "single target must be a Point or Edge");
    }
    body(*sg.then_branch);
    if (sg.else_branch) body(**sg.else_branch);
  }

  void stmt_node(Stmt &, Sections &sec) {
    for (auto &b : sec.sections) {
      st.push_scope();
      for (auto &x : b.stmts) stmt(x);
      st.pop_scope();
    }
  }

  void stmt_node(Stmt &, Block &b) {
    st.push_scope();
    for (auto &x : b.stmts) stmt(x);
    st.pop_scope();
  }

  void stmt_node(Stmt &s, AddProperty &ap) { need_graph(s.loc, ap.graph); }

  void stmt_node(Stmt &s, ReadGraph &rg) {
    need_graph(s.loc, rg.graph);
    if (!fn_->argv) error(s.loc, "read(argv[...]) outside main(argc, argv)");
  }

  void need_graph(SourceLoc loc, const std::string &name) {
    const Symbol *g = st.lookup(name);
    if (!g) error(loc, "undefined name '" + name + "'");
    else if (g->type != TypeKind::Graph) error(loc, "'" + name + "' is not a Graph");
  }

  void scalar(Expr &e, const std::string &what) {
    TypeKind t = expr(e);
    if (!is_scalar_type(t) && t != TypeKind::Unknown) error(e.loc, what + " must be scalar");
  }

  TypeKind set(Expr &e, TypeKind t, std::string graph = {}) {
    e.info.value.type = t;
    e.info.value.graph = std::move(graph);
    return t;
  }

  TypeKind expr(Expr &e) {
    return std::visit([&](auto &n) { return expr_node(e, n); }, e.node);
  }

  TypeKind expr_node(Expr &e, IntLit &) { return set(e, TypeKind::Int); }
  TypeKind expr_node(Expr &e, FloatLit &) { return set(e, TypeKind::Float); }
  TypeKind expr_node(Expr &e, BoolLit &) { return set(e, TypeKind::Bool); }

  TypeKind expr_node(Expr &e, VarRef &v) {
    const Symbol *s = st.lookup(v.name);
    if (!s) {
      error(e.loc, "undefined name '" + v.name + "'");
      return set(e, TypeKind::Unknown);
    }
    std::string g = s->type == TypeKind::Graph ? v.name : s->graph;
    TypeKind t = set(e, s->type, g);
    e.info.value.global = s->storage == StorageClass::Global;
    return t;
  }

  TypeKind expr_node(Expr &e, Member &m) {
    TypeKind ot = expr(*m.object);
    const std::string &g = m.object->info.value.graph;
    switch (ot) {
    case TypeKind::Unknown:
      return set(e, TypeKind::Unknown);
    case TypeKind::Graph:
      if (m.field == "npoints" || m.field == "nedges") return set(e, TypeKind::Int);
      if (m.field == "points" || m.field == "edges") {
        // only meaningful under an index; Index checks the shape
        return set(e, TypeKind::Unknown, g);
      }
      error(e.loc, "Graph has no member '" + m.field + "'");
      return set(e, TypeKind::Unknown);
    case TypeKind::Point: {
      TypeKind pt = st.property_type(g, m.field, false);
      if (pt == TypeKind::Unknown) {
        error(e.loc, "undefined property '" + m.field + "'");
        return set(e, TypeKind::Unknown);
      }
      set(e, pt, g);
      e.info.value.property = m.field;
      return pt;
    }
    case TypeKind::Edge: {
      if (m.field == "src" || m.field == "dst") return set(e, TypeKind::Point, g);
      TypeKind pt = st.property_type(g, m.field, true);
      if (pt == TypeKind::Unknown) {
        error(e.loc, "undefined property '" + m.field + "'");
        return set(e, TypeKind::Unknown);
      }
      set(e, pt, g);
      e.info.value.property = m.field;
      e.info.value.edge_property = true;
      return pt;
    }
    default:
      error(e.loc, std::string("member access '") + m.field + "' on " + type_name(ot));
      return set(e, TypeKind::Unknown);
    }
  }

  TypeKind expr_node(Expr &e, Index &ix) {
    expr(*ix.object);
    scalar(*ix.index, "index");
    if (auto *m = ix.object->get_if<Member>()) {
      if (m->object->info.value.type == TypeKind::Graph) {
        const std::string &g = m->object->info.value.graph;
        if (m->field == "points") return set(e, TypeKind::Point, g);
        if (m->field == "edges") return set(e, TypeKind::Edge, g);
      }
    }
    error(e.loc, "only graph.points[i] and graph.edges[i] can be indexed");
    return set(e, TypeKind::Unknown);
  }

  TypeKind expr_node(Expr &e, Call &c) {
    for (auto &a : c.args) expr(a);
    if (c.callee == "MIN" || c.callee == "MAX") {
      if (c.args.size() != 3) {
        error(e.loc, c.callee + " takes exactly three arguments");
      } else {
        check_lvalue(c.args[0], c.callee + " target");
        check_lvalue(c.args[2], c.callee + " flag");
        if (!is_scalar_type(c.args[1].info.value.type) &&
            c.args[1].info.value.type != TypeKind::Unknown)
          error(e.loc, c.callee + " candidate must be scalar");
      }
      return set(e, TypeKind::Void);
    }
    if (c.callee == "RADD" || c.callee == "RMUL") {
      if (c.args.size() != 2) error(e.loc, c.callee + " takes exactly two arguments");
      else check_lvalue(c.args[0], c.callee + " target");
      return set(e, TypeKind::Void);
    }
    auto it = st.functions.find(c.callee);
    if (it == st.functions.end()) {
      error(e.loc, "undefined function '" + c.callee + "'");
      return set(e, TypeKind::Unknown);
    }
    const auto &sig = it->second;
    if (sig.params.size() != c.args.size()) {
      error(e.loc, "'" + c.callee + "' expects " + std::to_string(sig.params.size()) +
                       " arguments, got " + std::to_string(c.args.size()));
    } else {
      for (std::size_t i = 0; i < c.args.size(); ++i)
        if (!compatible(sig.params[i].type, c.args[i].info.value.type))
          error(c.args[i].loc, "type mismatch for argument " + std::to_string(i + 1) + " of '" +
                                   c.callee + "'");
    }
    return set(e, sig.ret);
  }

  TypeKind expr_node(Expr &e, MethodCall &mc) {
    TypeKind ot = expr(*mc.object);
    for (auto &a : mc.args) expr(a);
    const std::string &g = mc.object->info.value.graph;
    auto arity = [&](std::size_t n) {
      if (mc.args.size() != n)
        error(e.loc, "'" + mc.method + "' expects " + std::to_string(n) + " arguments");
    };
    if (ot == TypeKind::Graph && mc.method == "getweight") {
      arity(2);
      return set(e, TypeKind::Int);
    }
    if (ot == TypeKind::Set && mc.method == "find") {
      arity(1);
      return set(e, TypeKind::Point, g);
    }
    if (ot == TypeKind::Set && mc.method == "union") {
      arity(2);
      return set(e, TypeKind::Bool);
    }
    if (ot == TypeKind::Collection && mc.method == "add") {
      arity(1);
      return set(e, TypeKind::Void);
    }
    if (ot == TypeKind::Collection && mc.method == "size") {
      arity(0);
      return set(e, TypeKind::Int);
    }
    if (ot != TypeKind::Unknown)
      error(e.loc, std::string(type_name(ot)) + " has no method '" + mc.method + "'");
    return set(e, TypeKind::Unknown);
  }

  TypeKind expr_node(Expr &e, Unary &u) {
    TypeKind t = expr(*u.operand);
    if (!is_scalar_type(t) && t != TypeKind::Unknown) error(e.loc, "operand must be scalar");
    if (u.op == UnaryOp::Not) return set(e, TypeKind::Bool);
    return set(e, t == TypeKind::Float ? TypeKind::Float : TypeKind::Int);
  }

  TypeKind expr_node(Expr &e, Binary &b) {
    TypeKind l = expr(*b.lhs);
    TypeKind r = expr(*b.rhs);
    for (TypeKind t : {l, r})
      if (!is_scalar_type(t) && t != TypeKind::Unknown) {
        error(e.loc, std::string("operand of '") + op_text(b.op) + "' must be scalar");
        return set(e, TypeKind::Unknown);
      }
    switch (b.op) {
    case BinaryOp::Add:
    case BinaryOp::Sub:
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod:
      return set(e, l == TypeKind::Float || r == TypeKind::Float ? TypeKind::Float
                                                                 : TypeKind::Int);
    default:
      return set(e, TypeKind::Bool);
    }
  }
};

} // namespace

Resolved resolve(const Program &program) {
  Resolved out{program, {}};
  Resolver r;
  r.run(out.program);
  if (!r.errors.empty()) throw SemanticErrors(std::move(r.errors));
  out.symbols = std::move(r.st);
  return out;
}

} // namespace gdsl
