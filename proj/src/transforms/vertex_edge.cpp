#include <map>

#include "gdsl/semantic.hpp"
#include "gdsl/transforms.hpp"

namespace gdsl {
namespace {

struct Launch {
  Stmt *stmt;
  Foreach *fe;
  Call *call;
  FunctionDecl *host;
};

void collect(Program &p, FunctionDecl &host, Stmt &s, int depth, IteratorKind want,
             std::vector<Launch> &out) {
  if (auto *fe = s.get_if<Foreach>()) {
    if (depth == 0 && fe->iterator == want) {
      if (const Call *c = launch_call(p, s)) out.push_back({&s, fe, const_cast<Call *>(c), &host});
    }
    collect(p, host, *fe->body, depth + 1, want, out);
  } else if (auto *b = s.get_if<Block>()) {
    for (auto &x : b->stmts) collect(p, host, x, depth, want, out);
  } else if (auto *i = s.get_if<If>()) {
    collect(p, host, *i->then_branch, depth, want, out);
    if (i->else_branch) collect(p, host, **i->else_branch, depth, want, out);
  } else if (auto *w = s.get_if<While>()) {
    collect(p, host, *w->body, depth, want, out);
  } else if (auto *sg = s.get_if<Single>()) {
    collect(p, host, *sg->then_branch, depth, want, out);
    if (sg->else_branch) collect(p, host, **sg->else_branch, depth, want, out);
  } else if (auto *sec = s.get_if<Sections>()) {
    for (auto &b : sec->sections)
      for (auto &x : b.stmts) collect(p, host, x, depth, want, out);
  }
}

std::map<std::string, std::vector<Launch>> launches_by_callee(Program &p, IteratorKind want) {
  std::vector<Launch> all;
  for (auto &f : p.functions)
    for (auto &s : f.body.stmts) collect(p, f, s, 0, want, all);
  for (auto &s : p.main.body.stmts) collect(p, p.main, s, 0, want, all);
  std::map<std::string, std::vector<Launch>> out;
  for (auto &l : all) out[l.call->callee].push_back(l);
  return out;
}

std::size_t count_calls(Program &p, const std::string &callee) {
  std::size_t n = 0;
  auto count = [&](Expr &e) {
    if (auto *c = e.get_if<Call>(); c && c->callee == callee) ++n;
  };
  for (auto &f : p.functions)
    for (auto &s : f.body.stmts) for_each_expr_mut(s, count);
  for (auto &s : p.main.body.stmts) for_each_expr_mut(s, count);
  return n;
}

bool is_var(const Expr &e, const std::string &name) {
  auto *v = e.get_if<VarRef>();
  return v && v->name == name;
}

Stmt make_stmt(Stmt::Node n) { return Stmt{std::move(n), {}}; }

Stmt point_local(const std::string &name, const std::string &graph, const std::string &edge,
                 const char *endpoint) {
  VarDecl d;
  d.type = TypeKind::Point;
  d.name = name;
  d.graph = graph;
  d.init = make_member(make_var(edge), endpoint);
  return make_stmt(std::move(d));
}

// Statements of a body, splicing a block.
std::vector<Stmt> body_stmts(Stmt body) {
  if (auto *b = body.get_if<Block>()) return std::move(b->stmts);
  std::vector<Stmt> v;
  v.push_back(std::move(body));
  return v;
}

Stmt wrap_body(std::vector<Stmt> stmts) {
  if (stmts.size() == 1 && !stmts[0].is<VarDecl>()) return std::move(stmts[0]);
  return make_stmt(Block{std::move(stmts)});
}

TransformResult not_applied(const Program &program, std::string reason) {
  TransformResult r{program, {}};
  r.report.reason = std::move(reason);
  return r;
}

// ---- vertex -> edge ----

std::string check_v2e(Program &p, FunctionDecl &f, const std::vector<Launch> &ls) {
  if (f.params.empty() || f.params[0].type != TypeKind::Point)
    return "'" + f.name + "': first parameter is not a Point";
  if (f.body.stmts.size() != 1 || !f.body.stmts[0].is<Foreach>())
    return "'" + f.name + "': body is not a single foreach over neighbors";
  const auto &inner = f.body.stmts[0].as<Foreach>();
  if (inner.iterator != IteratorKind::OutNbrs && inner.iterator != IteratorKind::InNbrs)
    return "'" + f.name + "': inner foreach must iterate outnbrs or innbrs";
  if (!is_var(inner.subject, f.params[0].name))
    return "'" + f.name + "': inner foreach does not iterate the point parameter";
  if (inner.subject.info.value.graph.empty())
    return "'" + f.name + "': cannot tell which graph the point parameter belongs to";
  for (const auto &l : ls)
    if (l.call->args.empty() || !is_var(l.call->args[0], l.fe->var))
      return "'" + f.name + "': call site does not pass the iteration point first";
  if (count_calls(p, f.name) != ls.size())
    return "'" + f.name + "': called outside an outer foreach over points";
  return "";
}

void apply_v2e(Program &p, FunctionDecl &f, std::vector<Launch> &ls) {
  const std::string en = fresh_name("e", names_in_use(p, f));
  Foreach inner = std::move(f.body.stmts[0].as<Foreach>());
  const std::string graph = inner.subject.info.value.graph;
  const std::string pname = f.params[0].name;
  const std::string tname = inner.var;
  const bool out = inner.iterator == IteratorKind::OutNbrs;

  std::vector<Stmt> stmts;
  if (out) {
    stmts.push_back(point_local(pname, graph, en, "src"));
    stmts.push_back(point_local(tname, graph, en, "dst"));
  } else {
    stmts.push_back(point_local(pname, graph, en, "dst"));
    stmts.push_back(point_local(tname, graph, en, "src"));
  }
  Stmt body = std::move(*inner.body);
  if (inner.filter) body = make_stmt(If{std::move(*inner.filter), Box<Stmt>(std::move(body)), {}});
  const std::string &src = out ? pname : tname;
  const std::string &dst = out ? tname : pname;
  for (auto &s : body_stmts(std::move(body))) {
    for_each_expr_mut(s, [&](Expr &e) {
      auto *mc = e.get_if<MethodCall>();
      if (mc && mc->method == "getweight" && mc->args.size() == 2 && is_var(mc->args[0], src) &&
          is_var(mc->args[1], dst) && is_var(*mc->object, graph))
        e = make_member(make_var(en), "weight");
    });
    stmts.push_back(std::move(s));
  }
  f.body.stmts = std::move(stmts);
  f.params[0] = Param{TypeKind::Edge, en};

  for (auto &l : ls) {
    std::set<std::string> host_used = names_in_use(p, *l.host);
    std::string old = l.fe->var;
    std::string ev = fresh_name("e", host_used);
    Expr endpoint = make_member(make_var(ev), out ? "src" : "dst");
    if (l.fe->filter) substitute_var(*l.fe->filter, old, endpoint);
    for (std::size_t i = 1; i < l.call->args.size(); ++i)
      substitute_var(l.call->args[i], old, endpoint);
    l.call->args[0] = make_var(ev);
    l.fe->var = ev;
    l.fe->iterator = IteratorKind::Edges;
  }
}

// ---- edge -> vertex ----

struct E2VPlan {
  std::string pname, tname;
  bool out = true;
  std::vector<Stmt> body;
  std::string graph;
};

const char *endpoint_of(const Expr &e, const std::string &edge) {
  auto *m = e.get_if<Member>();
  if (!m || !is_var(*m->object, edge)) return nullptr;
  if (m->field == "src") return "src";
  if (m->field == "dst") return "dst";
  return nullptr;
}

std::string plan_e2v(const Program &p, const FunctionDecl &f, E2VPlan &plan) {
  if (f.params.empty() || f.params[0].type != TypeKind::Edge)
    return "'" + f.name + "': first parameter is not an Edge";
  const std::string en = f.params[0].name;
  int graphs = 0;
  for (const auto &prm : f.params)
    if (prm.type == TypeKind::Graph) {
      plan.graph = prm.name;
      ++graphs;
    }
  if (graphs != 1) return "'" + f.name + "': needs exactly one Graph parameter";

  // endpoint locals: `Point (g) x = e.src;` or `Point (g) x;` ... `x = e.src;`
  std::string src_var, dst_var;
  std::string first;
  std::vector<bool> drop(f.body.stmts.size(), false);
  std::map<std::string, std::size_t> pending_decl;
  auto bind = [&](const std::string &name, const char *which) -> std::string {
    std::string &slot = std::string(which) == "src" ? src_var : dst_var;
    if (!slot.empty()) return "'" + f.name + "': edge endpoint bound twice";
    slot = name;
    if (first.empty()) first = which;
    return "";
  };
  for (std::size_t i = 0; i < f.body.stmts.size(); ++i) {
    const Stmt &s = f.body.stmts[i];
    if (auto *d = s.get_if<VarDecl>(); d && d->type == TypeKind::Point) {
      if (d->init) {
        if (const char *w = endpoint_of(*d->init, en)) {
          if (auto err = bind(d->name, w); !err.empty()) return err;
          drop[i] = true;
        }
      } else {
        pending_decl[d->name] = i;
      }
    } else if (auto *a = s.get_if<Assign>(); a && a->op == AssignOp::Set) {
      auto *v = a->target.get_if<VarRef>();
      if (v && pending_decl.count(v->name)) {
        if (const char *w = endpoint_of(a->value, en)) {
          if (auto err = bind(v->name, w); !err.empty()) return err;
          drop[i] = true;
          drop[pending_decl[v->name]] = true;
        }
      }
    }
  }
  for (std::size_t i = 0; i < f.body.stmts.size(); ++i)
    if (!drop[i]) plan.body.push_back(f.body.stmts[i]);

  for (const std::string &v : {src_var, dst_var}) {
    if (v.empty()) continue;
    bool reassigned = false;
    for (const auto &s : plan.body)
      visit_stmts(s, [&](const Stmt &x) {
        if (auto *a = x.get_if<Assign>(); a && is_var(a->target, v)) reassigned = true;
        if (auto *d = x.get_if<VarDecl>(); d && d->name == v) reassigned = true;
      });
    if (reassigned) return "'" + f.name + "': endpoint local '" + v + "' is reassigned";
  }

  // a lone endpoint keeps the out-neighbor orientation
  plan.out = first != "dst" || src_var.empty();
  std::set<std::string> used = names_in_use(p, f);
  if (src_var.empty()) {
    src_var = fresh_name(plan.out ? "p" : "t", used);
    used.insert(src_var);
  }
  if (dst_var.empty()) {
    dst_var = fresh_name(plan.out ? "t" : "p", used);
    used.insert(dst_var);
  }
  plan.pname = plan.out ? src_var : dst_var;
  plan.tname = plan.out ? dst_var : src_var;

  for (auto &s : plan.body) {
    for_each_expr_mut(s, [&](Expr &e) {
      auto *m = e.get_if<Member>();
      if (!m || !is_var(*m->object, en)) return;
      if (m->field == "src") e = make_var(src_var);
      else if (m->field == "dst") e = make_var(dst_var);
      else if (m->field == "weight")
        e = make_method(make_var(plan.graph), "getweight", {make_var(src_var), make_var(dst_var)});
    });
    if (mentions_var(s, en))
      return "'" + f.name + "': edge variable used beyond its endpoints and weight";
  }
  if (plan.body.empty()) return "'" + f.name + "': empty kernel body";
  return "";
}

// Rewrites a launch's filter/arguments from the edge variable to the point
// variable; false if the neighbor endpoint or the edge itself is needed.
bool rewrite_launch_e2v(Foreach &fe, Call &call, bool out, const std::string &pv,
                        std::string &reason) {
  const std::string ev = fe.var;
  const char *own = out ? "src" : "dst";
  auto fix = [&](Expr &x) {
    for_each_expr_mut(x, [&](Expr &e) {
      auto *m = e.get_if<Member>();
      if (m && is_var(*m->object, ev) && m->field == own) e = make_var(pv);
    });
    if (mentions_var(x, ev)) {
      reason = "launch reads the neighbor endpoint or the edge itself";
      return false;
    }
    return true;
  };
  if (fe.filter && !fix(*fe.filter)) return false;
  for (std::size_t i = 1; i < call.args.size(); ++i)
    if (!fix(call.args[i])) return false;
  call.args[0] = make_var(pv);
  fe.var = pv;
  fe.iterator = IteratorKind::Points;
  return true;
}

} // namespace

TransformResult vertex_to_edge(const Program &program) {
  Program out = resolve(program).program;
  auto by_fn = launches_by_callee(out, IteratorKind::Points);
  TransformReport report;
  std::string first_reason;
  for (auto &f : out.functions) {
    auto it = by_fn.find(f.name);
    if (it == by_fn.end()) continue;
    std::string why = check_v2e(out, f, it->second);
    if (!why.empty()) {
      if (first_reason.empty()) first_reason = why;
      continue;
    }
    if (!report.applied) {
      report.rewrittenForeach = it->second.front().stmt->loc;
      report.rewrittenFunction = f.name;
    }
    report.applied = true;
    report.rewrittenFunctions.push_back(f.name);
    apply_v2e(out, f, it->second);
  }
  if (!report.applied)
    return not_applied(program, first_reason.empty()
                                    ? "no outer foreach over points launches a target function"
                                    : first_reason);
  return {std::move(out), std::move(report)};
}

TransformResult edge_to_vertex(const Program &program) {
  Program out = resolve(program).program;
  auto by_fn = launches_by_callee(out, IteratorKind::Edges);
  TransformReport report;
  std::string first_reason;
  for (auto &f : out.functions) {
    auto it = by_fn.find(f.name);
    if (it == by_fn.end()) continue;
    std::string why;
    E2VPlan plan;
    if (count_calls(out, f.name) != it->second.size())
      why = "'" + f.name + "': called outside an outer foreach over edges";
    if (why.empty()) why = plan_e2v(out, f, plan);
    for (const auto &l : it->second)
      if (why.empty() && (l.call->args.empty() || !is_var(l.call->args[0], l.fe->var)))
        why = "'" + f.name + "': call site does not pass the iteration edge first";
    // dry run of the call-site rewrites
    if (why.empty()) {
      for (auto &l : it->second) {
        Foreach fe = *l.fe;
        Call call = *l.call;
        if (!rewrite_launch_e2v(fe, call, plan.out, "_", why)) break;
      }
    }
    if (!why.empty()) {
      if (first_reason.empty()) first_reason = why;
      continue;
    }
    if (!report.applied) {
      report.rewrittenForeach = it->second.front().stmt->loc;
      report.rewrittenFunction = f.name;
    }
    report.applied = true;
    report.rewrittenFunctions.push_back(f.name);

    Foreach inner;
    inner.var = plan.tname;
    inner.subject = make_var(plan.pname);
    inner.iterator = plan.out ? IteratorKind::OutNbrs : IteratorKind::InNbrs;
    inner.body = Box<Stmt>(wrap_body(std::move(plan.body)));
    f.body.stmts.clear();
    f.body.stmts.push_back(make_stmt(std::move(inner)));
    f.params[0] = Param{TypeKind::Point, plan.pname};

    for (auto &l : it->second) {
      std::set<std::string> used = names_in_use(out, *l.host);
      std::string pv = fresh_name("t", used);
      std::string ignored;
      rewrite_launch_e2v(*l.fe, *l.call, plan.out, pv, ignored);
    }
  }
  if (!report.applied)
    return not_applied(program, first_reason.empty()
                                    ? "no outer foreach over edges launches a target function"
                                    : first_reason);
  return {std::move(out), std::move(report)};
}

} // namespace gdsl
