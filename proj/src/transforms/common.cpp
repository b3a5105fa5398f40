#include <map>

#include "gdsl/transforms.hpp"

namespace gdsl {

std::set<std::string> names_in_use(const Program &program, const FunctionDecl &fn) {
  std::set<std::string> used;
  for (const auto &g : program.globals) used.insert(g.name);
  for (const auto &p : fn.params) used.insert(p.name);
  Stmt body{Block{fn.body}, {}};
  visit_stmts(body, [&](const Stmt &s) {
    if (auto *d = s.get_if<VarDecl>()) used.insert(d->name);
    if (auto *f = s.get_if<Foreach>()) used.insert(f->var);
  });
  for_each_expr_mut(body, [&](Expr &e) {
    if (auto *v = e.get_if<VarRef>()) used.insert(v->name);
  });
  return used;
}

std::string fresh_name(const std::string &base, const std::set<std::string> &used) {
  if (!used.count(base)) return base;
  for (int i = 0;; ++i) {
    std::string n = base + std::to_string(i);
    if (!used.count(n)) return n;
  }
}

void substitute_var(Expr &e, const std::string &name, const Expr &with) {
  for_each_expr_mut(e, [&](Expr &x) {
    if (auto *v = x.get_if<VarRef>(); v && v->name == name) x = with;
  });
}

void substitute_var(Stmt &s, const std::string &name, const Expr &with) {
  for_each_expr_mut(s, [&](Expr &x) {
    if (auto *v = x.get_if<VarRef>(); v && v->name == name) x = with;
  });
}

bool mentions_var(const Expr &e, const std::string &name) {
  bool found = false;
  visit_exprs(e, [&](const Expr &x) {
    if (auto *v = x.get_if<VarRef>(); v && v->name == name) found = true;
  });
  return found;
}

bool mentions_var(const Stmt &s, const std::string &name) {
  bool found = false;
  Stmt copy = s;
  for_each_expr_mut(copy, [&](Expr &x) {
    if (auto *v = x.get_if<VarRef>(); v && v->name == name) found = true;
  });
  visit_stmts(s, [&](const Stmt &x) {
    if (auto *d = x.get_if<VarDecl>(); d && d->graph == name) found = true;
  });
  return found;
}

namespace {

class Alpha {
public:
  void function(FunctionDecl &f) {
    counter_ = 0;
    scopes_.assign(1, {});
    for (auto &p : f.params) p.name = bind(p.name);
    for (auto &s : f.body.stmts) stmt(s);
  }

private:
  std::vector<std::map<std::string, std::string>> scopes_;
  int counter_ = 0;

  std::string bind(const std::string &name) {
    std::string n = "_l" + std::to_string(counter_++);
    scopes_.back()[name] = n;
    return n;
  }

  std::string lookup(const std::string &name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    return name;
  }

  void expr(Expr &e) {
    for_each_expr_mut(e, [&](Expr &x) {
      if (auto *v = x.get_if<VarRef>()) v->name = lookup(v->name);
    });
  }

  void scoped(Stmt &s) {
    scopes_.emplace_back();
    stmt(s);
    scopes_.pop_back();
  }

  void stmt(Stmt &s) {
    std::visit(
        [&](auto &n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, VarDecl>) {
            if (n.init) expr(*n.init);
            if (!n.graph.empty()) n.graph = lookup(n.graph);
            n.name = bind(n.name);
          } else if constexpr (std::is_same_v<N, Assign>) {
            expr(n.target);
            expr(n.value);
          } else if constexpr (std::is_same_v<N, If>) {
            expr(n.cond);
            scoped(*n.then_branch);
            if (n.else_branch) scoped(**n.else_branch);
          } else if constexpr (std::is_same_v<N, While>) {
            expr(n.cond);
            scoped(*n.body);
          } else if constexpr (std::is_same_v<N, Return>) {
            if (n.value) expr(*n.value);
          } else if constexpr (std::is_same_v<N, ExprStmt>) {
            expr(n.expr);
          } else if constexpr (std::is_same_v<N, Foreach>) {
            expr(n.subject);
            scopes_.emplace_back();
            n.var = bind(n.var);
            if (n.filter) expr(*n.filter);
            if (auto *b = n.body->template get_if<Block>();
                b && b->stmts.size() == 1 && !b->stmts[0].template is<VarDecl>()) {
              Stmt inner = std::move(b->stmts[0]);
              *n.body = std::move(inner);
            }
            scoped(*n.body);
            scopes_.pop_back();
          } else if constexpr (std::is_same_v<N, Single>) {
            for (auto &t : n.targets) expr(t);
            scoped(*n.then_branch);
            if (n.else_branch) scoped(**n.else_branch);
          } else if constexpr (std::is_same_v<N, Sections>) {
            for (auto &b : n.sections) {
              scopes_.emplace_back();
              for (auto &x : b.stmts) stmt(x);
              scopes_.pop_back();
            }
          } else if constexpr (std::is_same_v<N, Block>) {
            scopes_.emplace_back();
            for (auto &x : n.stmts) stmt(x);
            scopes_.pop_back();
          } else if constexpr (std::is_same_v<N, AddProperty>) {
            n.graph = lookup(n.graph);
          } else if constexpr (std::is_same_v<N, ReadGraph>) {
            n.graph = lookup(n.graph);
          }
        },
        s.node);
  }
};

} // namespace

Program alpha_normalize(const Program &program) {
  Program out = program;
  Alpha a;
  for (auto &f : out.functions) a.function(f);
  a.function(out.main);
  return out;
}

bool alpha_equivalent(const Program &a, const Program &b) {
  return alpha_normalize(a) == alpha_normalize(b);
}

} // namespace gdsl
