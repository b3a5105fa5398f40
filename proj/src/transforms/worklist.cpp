#include <map>

#include "gdsl/parser.hpp"
#include "gdsl/semantic.hpp"
#include "gdsl/transforms.hpp"

namespace gdsl {
namespace {

Stmt make_stmt(Stmt::Node n) { return Stmt{std::move(n), {}}; }

bool is_var(const Expr &e, const std::string &name) {
  auto *v = e.get_if<VarRef>();
  return v && v->name == name;
}

const std::string *var_name(const Expr &e) {
  auto *v = e.get_if<VarRef>();
  return v ? &v->name : nullptr;
}

bool is_int(const Expr &e, std::int64_t value) {
  auto *i = e.get_if<IntLit>();
  return i && i->value == value;
}

// `obj.prop` where obj is VarRef `var`: returns prop, else null.
const std::string *prop_of(const Expr &e, const std::string &var) {
  auto *m = e.get_if<Member>();
  if (!m || !is_var(*m->object, var)) return nullptr;
  return &m->field;
}

bool is_true(const Expr &e) {
  if (auto *i = e.get_if<IntLit>()) return i->value != 0;
  if (auto *b = e.get_if<BoolLit>()) return b->value;
  return false;
}

// Flags tested by `F == 0 && G == 0 ...`; false if the shape differs.
bool convergence_flags(const Expr &e, std::set<std::string> &flags) {
  auto *b = e.get_if<Binary>();
  if (!b) return false;
  if (b->op == BinaryOp::And)
    return convergence_flags(*b->lhs, flags) && convergence_flags(*b->rhs, flags);
  if (b->op != BinaryOp::Eq) return false;
  const std::string *n = var_name(*b->lhs);
  if (!n || !is_int(*b->rhs, 0)) return false;
  flags.insert(*n);
  return true;
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

bool program_mentions(Program &p, const std::string &name) {
  for (auto &f : p.functions)
    for (auto &s : f.body.stmts)
      if (mentions_var(s, name)) return true;
  for (auto &s : p.main.body.stmts)
    if (mentions_var(s, name)) return true;
  for (auto &g : p.globals)
    if (g.init && mentions_var(*g.init, name)) return true;
  return false;
}

// A `while (1)` loop at the top of a block, with its index.
struct LoopSite {
  std::vector<Stmt> *block;
  std::size_t index;
};

void find_loops(Program &p, std::vector<Stmt> &block, std::vector<LoopSite> &out) {
  for (std::size_t i = 0; i < block.size(); ++i) {
    Stmt &s = block[i];
    if (auto *w = s.get_if<While>()) {
      bool has_launch = false;
      visit_stmts(*w->body, [&](const Stmt &x) {
        if (launch_call(p, x)) has_launch = true;
      });
      if (has_launch) out.push_back({&block, i});
    } else if (auto *sec = s.get_if<Sections>()) {
      for (auto &b : sec->sections) find_loops(p, b.stmts, out);
    }
  }
}

// Sentinel `C` of a bulk initialization `foreach (x In g.points) x.P = C;`
// appearing before `limit` in `block`.
std::optional<Expr> bulk_sentinel(const std::vector<Stmt> &block, std::size_t limit,
                                  const std::string &graph, const std::string &prop) {
  std::optional<Expr> found;
  for (std::size_t i = 0; i < limit; ++i) {
    const auto *fe = block[i].get_if<Foreach>();
    if (!fe || fe->iterator != IteratorKind::Points || !is_var(fe->subject, graph) || fe->filter)
      continue;
    const Stmt *body = fe->body.get();
    if (auto *b = body->get_if<Block>(); b && b->stmts.size() == 1) body = &b->stmts[0];
    const auto *a = body->get_if<Assign>();
    if (!a || a->op != AssignOp::Set) continue;
    const std::string *p = prop_of(a->target, fe->var);
    if (!p || *p != prop) continue;
    const Expr &c = a->value;
    bool constant = c.is<IntLit>() || is_var(c, "MAX_INT") || is_var(c, "MAX_LONG");
    found = constant ? std::optional<Expr>(c) : std::nullopt;
  }
  return found;
}

class Converter {
public:
  Converter(Program &p, LoopSite site) : p_(p), site_(site) {}

  std::string convert(TransformReport &report);

private:
  Program &p_;
  LoopSite site_;
  std::string reason_;

  std::string fail(std::string r) { return reason_ = std::move(r); }
};

std::string Converter::convert(TransformReport &report) {
  std::vector<Stmt> &block = *site_.block;
  While &loop = block[site_.index].as<While>();
  if (!is_true(loop.cond)) return fail("fixpoint loop condition is not constant true");
  std::vector<Stmt> body;
  if (auto *b = loop.body->get_if<Block>()) body = b->stmts;
  else body.push_back(*loop.body);

  // classify loop statements
  std::set<std::string> resets, tested, counters;
  std::vector<const Stmt *> counter_stmts;
  const Stmt *launch = nullptr;
  bool test_after_launch = false;
  for (const auto &s : body) {
    if (launch_call(p_, s)) {
      if (launch) return fail("fixpoint loop drives more than one kernel");
      launch = &s;
      continue;
    }
    if (auto *a = s.get_if<Assign>()) {
      const std::string *n = var_name(a->target);
      if (n && p_.is_global(*n)) {
        if (a->op == AssignOp::Set && is_int(a->value, 0)) {
          resets.insert(*n);
          continue;
        }
        if (a->op != AssignOp::Set && a->value.is<IntLit>()) {
          counters.insert(*n);
          counter_stmts.push_back(&s);
          continue;
        }
      }
    }
    if (auto *i = s.get_if<If>(); i && !i->else_branch && i->then_branch->is<Break>()) {
      if (convergence_flags(i->cond, tested)) {
        test_after_launch = launch != nullptr;
        continue;
      }
    }
    return fail("fixpoint loop has statements other than flag resets, one launch, the "
                "convergence test and counter increments");
  }
  if (!launch) return fail("fixpoint loop launches no kernel");
  if (tested.empty() || !test_after_launch) return fail("no convergence test after the launch");
  for (const auto &f : tested)
    if (!resets.count(f)) return fail("convergence flag '" + f + "' is not reset in the loop");

  const Foreach &lfe = launch->as<Foreach>();
  const Call &lcall = *launch_call(p_, *launch);
  if (lfe.iterator != IteratorKind::Points) return fail("launch does not iterate points");
  if (lcall.args.empty() || !is_var(lcall.args[0], lfe.var))
    return fail("launch does not pass the iteration point first");
  const std::string *graph = var_name(lfe.subject);
  if (!graph) return fail("launch subject is not a graph variable");
  FunctionDecl &k = *p_.find_function(lcall.callee);
  if (count_calls(p_, k.name) != 1) return fail("'" + k.name + "' is launched more than once");

  // step one: kernel shape and update targets
  if (k.params.empty() || k.params[0].type != TypeKind::Point || k.body.stmts.size() != 1 ||
      !k.body.stmts[0].is<Foreach>())
    return fail("'" + k.name + "' is not in vertex form with one neighbor loop");
  Foreach &inner = k.body.stmts[0].as<Foreach>();
  const std::string pname = k.params[0].name;
  const std::string tname = inner.var;
  if ((inner.iterator != IteratorKind::OutNbrs && inner.iterator != IteratorKind::InNbrs &&
       inner.iterator != IteratorKind::Nbrs) ||
      !is_var(inner.subject, pname))
    return fail("'" + k.name + "' is not in vertex form with one neighbor loop");

  RWSets ks = compute_rw_sets(p_, k);
  for (const auto &g : ks.write.globals)
    if (!tested.count(g)) return fail("'" + k.name + "' writes global '" + g + "'");
  for (const auto &g : ks.read.globals)
    if (tested.count(g)) return fail("'" + k.name + "' reads convergence flag '" + g + "'");

  std::string bad;
  bool has_single = false;
  visit_stmts(*inner.body, [&](const Stmt &s) {
    if (s.is<Single>()) has_single = true;
    if (auto *a = s.get_if<Assign>(); a && a->target.is<Member>() && !prop_of(a->target, tname))
      bad = print_expr(a->target);
  });
  if (has_single) return fail("'" + k.name + "' uses single");
  std::set<std::string> min_props;
  Stmt inner_copy = *inner.body;
  for_each_expr_mut(inner_copy, [&](Expr &e) {
    auto *c = e.get_if<Call>();
    if (!c || c->args.empty()) return;
    if (c->callee == "MIN" || c->callee == "MAX" || c->callee == "RADD" || c->callee == "RMUL") {
      if (c->args[0].is<Member>()) {
        const std::string *pp = prop_of(c->args[0], tname);
        if (!pp) bad = print_expr(c->args[0]);
        else if (c->callee == "MIN" || c->callee == "MAX") min_props.insert(*pp);
      }
    }
  });
  if (!bad.empty())
    return fail("'" + k.name + "' writes property '" + bad + "' of a non-iterator point");

  // level filter `v.P == X` with X a counter
  std::optional<std::pair<std::string, std::string>> level; // (prop, counter)
  std::size_t level_param = 0;
  if (lfe.filter) {
    const auto *b = lfe.filter->get_if<Binary>();
    const std::string *prop = nullptr, *ctr = nullptr;
    if (b && b->op == BinaryOp::Eq) {
      prop = prop_of(*b->lhs, lfe.var);
      ctr = var_name(*b->rhs);
      if (!prop) {
        prop = prop_of(*b->rhs, lfe.var);
        ctr = var_name(*b->lhs);
      }
    }
    if (!prop || !ctr || !counters.count(*ctr))
      return fail("launch filter is not of the form v.prop == counter");
    level = {*prop, *ctr};
    for (std::size_t i = 1; i < lcall.args.size(); ++i)
      if (is_var(lcall.args[i], *ctr)) level_param = i;
  }
  for (const auto &c : counters)
    if (!level || c != level->second)
      return fail("loop increments '" + c + "', which the worklist form cannot reproduce");

  std::optional<Expr> level_init;
  if (level) {
    const std::string &ctr = level->second;
    for (const auto &g : p_.globals)
      if (g.name == ctr && g.init && g.init->is<IntLit>()) level_init = *g.init;
    if (!level_init) return fail("counter '" + ctr + "' has no constant initializer");
    std::size_t writes = 0;
    for (auto &s : p_.main.body.stmts)
      visit_stmts(s, [&](const Stmt &x) {
        if (auto *a = x.get_if<Assign>(); a && is_var(a->target, ctr)) ++writes;
      });
    if (writes != counter_stmts.size())
      return fail("counter '" + ctr + "' is assigned outside the fixpoint loop");
    if (ks.write.globals.count(ctr)) return fail("'" + k.name + "' writes '" + ctr + "'");
  }

  // names
  std::set<std::string> used = names_in_use(p_, k);
  for (const auto &n : names_in_use(p_, p_.main)) used.insert(n);
  const std::string wl = fresh_name("_wl", used);
  used.insert(wl);
  const std::string upd = fresh_name("_upd", used);

  // step two: rewrite the kernel
  Stmt ibody = std::move(*inner.body);
  if (level) {
    Expr replacement = make_member(make_var(pname), level->first);
    if (level_param) substitute_var(ibody, k.params[level_param].name, replacement);
    substitute_var(ibody, level->second, replacement);
  }
  std::vector<Stmt> stmts;
  if (auto *b = ibody.get_if<Block>()) stmts = std::move(b->stmts);
  else stmts.push_back(std::move(ibody));

  // guarded assignment `if (t.P > E) { t.P = E; F = 1; }` becomes MIN(t.P, E, F)
  for (auto &s : stmts) {
    auto *i = s.get_if<If>();
    if (!i || i->else_branch) continue;
    auto *cmp = i->cond.get_if<Binary>();
    auto *blk = i->then_branch->get_if<Block>();
    if (!cmp || !blk || blk->stmts.size() != 2) continue;
    const char *fn = nullptr;
    const Expr *target = nullptr, *value = nullptr;
    if (prop_of(*cmp->lhs, tname) && (cmp->op == BinaryOp::Gt || cmp->op == BinaryOp::Lt)) {
      fn = cmp->op == BinaryOp::Gt ? "MIN" : "MAX";
      target = cmp->lhs.get();
      value = cmp->rhs.get();
    } else if (prop_of(*cmp->rhs, tname) &&
               (cmp->op == BinaryOp::Lt || cmp->op == BinaryOp::Gt)) {
      fn = cmp->op == BinaryOp::Lt ? "MIN" : "MAX";
      target = cmp->rhs.get();
      value = cmp->lhs.get();
    }
    if (!fn) continue;
    const Assign *set = nullptr;
    const std::string *flag = nullptr;
    for (const auto &x : blk->stmts) {
      auto *a = x.get_if<Assign>();
      if (!a || a->op != AssignOp::Set) continue;
      if (a->target == *target && a->value == *value) set = a;
      else if (var_name(a->target) && tested.count(*var_name(a->target)) && is_int(a->value, 1))
        flag = var_name(a->target);
    }
    if (!set || !flag) continue;
    min_props.insert(*prop_of(*target, tname));
    s = make_stmt(ExprStmt{make_call(fn, {*target, *value, make_var(*flag)})});
  }

  bool need_upd = false;
  std::string leftover;
  for (auto &s : stmts) {
    for_each_expr_mut(s, [&](Expr &e) {
      auto *c = e.get_if<Call>();
      if (c && (c->callee == "MIN" || c->callee == "MAX") && c->args.size() == 3) {
        const std::string *f = var_name(c->args[2]);
        if (f && tested.count(*f)) {
          c->args[2] = make_var(upd);
          need_upd = true;
        }
      }
    });
  }
  // a plain `F = 1;` pushes the neighbor directly
  Stmt push = make_stmt(ExprStmt{make_method(make_var(wl), "add", {make_var(tname)})});
  std::function<void(Stmt &)> replace_sets = [&](Stmt &s) {
    if (auto *a = s.get_if<Assign>()) {
      const std::string *n = var_name(a->target);
      if (n && tested.count(*n)) {
        if (a->op == AssignOp::Set && is_int(a->value, 1)) s = push;
        else leftover = *n;
      }
      return;
    }
    if (auto *b = s.get_if<Block>()) for (auto &x : b->stmts) replace_sets(x);
    if (auto *i = s.get_if<If>()) {
      replace_sets(*i->then_branch);
      if (i->else_branch) replace_sets(**i->else_branch);
    }
    if (auto *f = s.get_if<Foreach>()) replace_sets(*f->body);
  };
  for (auto &s : stmts) replace_sets(s);
  for (auto &s : stmts)
    for (const auto &f : tested)
      if (mentions_var(s, f)) leftover = f;
  if (!leftover.empty())
    return fail("'" + k.name + "' uses convergence flag '" + leftover + "' in a way that cannot "
                "become a push");

  if (need_upd) {
    VarDecl d;
    d.type = TypeKind::Int;
    d.name = upd;
    d.init = make_int(0);
    stmts.insert(stmts.begin(), make_stmt(std::move(d)));
    stmts.push_back(make_stmt(If{make_binary(BinaryOp::Eq, make_var(upd), make_int(1)),
                                 Box<Stmt>(push), {}}));
  }
  if (stmts.size() == 1) inner.body = Box<Stmt>(std::move(stmts[0]));
  else inner.body = Box<Stmt>(make_stmt(Block{std::move(stmts)}));

  if (level_param) k.params.erase(k.params.begin() + static_cast<std::ptrdiff_t>(level_param));
  k.params.push_back(Param{TypeKind::Collection, wl});

  // seeding condition
  std::optional<Expr> seed;
  const std::string &v = lfe.var;
  if (level) {
    seed = make_binary(BinaryOp::Eq, make_member(make_var(v), level->first), *level_init);
  } else if (min_props.size() == 1) {
    const std::string prop = *min_props.begin();
    std::optional<Expr> sentinel = bulk_sentinel(block, site_.index, *graph, prop);
    // every candidate must be `p.P` or `p.P + E`
    bool from_self = true;
    for (auto &s : k.body.stmts)
      for_each_expr_mut(s, [&](Expr &e) {
        auto *c = e.get_if<Call>();
        if (!c || c->callee != "MIN" || c->args.size() != 3) return;
        const Expr &cand = c->args[1];
        const Expr *base = &cand;
        if (auto *b = cand.get_if<Binary>(); b && b->op == BinaryOp::Add) base = b->lhs.get();
        const std::string *pp = prop_of(*base, pname);
        if (!pp || *pp != prop) from_self = false;
      });
    if (sentinel && from_self)
      seed = make_binary(BinaryOp::Ne, make_member(make_var(v), prop), *sentinel);
  }

  // step two: rewrite the host loop
  std::vector<Expr> args = lcall.args;
  if (level_param) args.erase(args.begin() + static_cast<std::ptrdiff_t>(level_param));
  args.push_back(make_var(wl));

  VarDecl decl;
  decl.type = TypeKind::Collection;
  decl.name = wl;
  decl.graph = *graph;
  if (min_props.size() == 1) decl.keyProp = *min_props.begin();

  Foreach seed_loop;
  seed_loop.var = v;
  seed_loop.subject = make_var(*graph);
  seed_loop.iterator = IteratorKind::Points;
  seed_loop.filter = seed;
  seed_loop.body = Box<Stmt>(make_stmt(ExprStmt{make_method(make_var(wl), "add", {make_var(v)})}));

  Foreach drain;
  drain.var = v;
  drain.subject = make_var(wl);
  drain.iterator = IteratorKind::Items;
  drain.body = Box<Stmt>(make_stmt(ExprStmt{make_call(k.name, std::move(args))}));
  While drain_loop;
  drain_loop.cond = make_binary(BinaryOp::Gt, make_method(make_var(wl), "size", {}), make_int(0));
  drain_loop.body = Box<Stmt>(make_stmt(std::move(drain)));

  SourceLoc loc = launch->loc;
  std::vector<Stmt> repl;
  repl.push_back(make_stmt(std::move(decl)));
  repl.push_back(make_stmt(std::move(seed_loop)));
  repl.push_back(make_stmt(std::move(drain_loop)));
  block.erase(block.begin() + static_cast<std::ptrdiff_t>(site_.index));
  block.insert(block.begin() + static_cast<std::ptrdiff_t>(site_.index),
               std::make_move_iterator(repl.begin()), std::make_move_iterator(repl.end()));

  if (!report.applied) {
    report.rewrittenForeach = loc;
    report.rewrittenFunction = k.name;
  }
  report.applied = true;
  report.rewrittenFunctions.push_back(k.name);

  std::set<std::string> candidates = tested;
  if (level) candidates.insert(level->second);
  for (const auto &g : candidates) {
    if (program_mentions(p_, g)) continue;
    for (auto it = p_.globals.begin(); it != p_.globals.end(); ++it) {
      if (it->name != g) continue;
      auto idx = static_cast<std::size_t>(it - p_.globals.begin());
      if (idx < p_.global_locs.size())
        p_.global_locs.erase(p_.global_locs.begin() + static_cast<std::ptrdiff_t>(idx));
      p_.globals.erase(it);
      report.removedGlobals.push_back(g);
      break;
    }
  }
  return "";
}

} // namespace

TransformResult to_worklist(const Program &program) {
  TransformResult fail{program, {}};
  Program work = program;

  // worklist conversion needs vertex form
  bool edge_launch = false;
  {
    Program r = resolve(work).program;
    for (const auto &t : find_target_functions(r))
      if (t.outer && t.callSite->as<Foreach>().iterator == IteratorKind::Edges) edge_launch = true;
  }
  if (edge_launch) {
    TransformResult v = edge_to_vertex(work);
    if (!v.report.applied) {
      fail.report.reason = "edge program cannot be brought to vertex form: " + v.report.reason;
      return fail;
    }
    work = std::move(v.program);
  }

  TransformReport report;
  std::string first_reason;
  // convert loops one at a time; indices shift after each rewrite
  for (std::size_t attempt = 0;; ++attempt) {
    Program candidate = resolve(work).program;
    std::vector<LoopSite> loops;
    find_loops(candidate, candidate.main.body.stmts, loops);
    if (attempt >= loops.size()) break;
    Converter c(candidate, loops[attempt]);
    TransformReport r = report;
    std::string why = c.convert(r);
    if (!why.empty()) {
      if (first_reason.empty()) first_reason = why;
      continue;
    }
    report = std::move(r);
    work = std::move(candidate);
    // the rewritten loop is no longer a fixpoint loop, so `attempt` now names the next one
    --attempt;
  }
  if (!report.applied) {
    fail.report.reason =
        first_reason.empty() ? "no fixpoint loop drives an outer foreach over points" : first_reason;
    return fail;
  }
  return {std::move(work), std::move(report)};
}

} // namespace gdsl
