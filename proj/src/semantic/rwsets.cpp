#include <map>

#include "gdsl/semantic.hpp"

namespace gdsl {

void AccessSet::merge(const AccessSet &other) {
  globals.insert(other.globals.begin(), other.globals.end());
  properties.insert(other.properties.begin(), other.properties.end());
}

bool AccessSet::intersects(const AccessSet &other) const {
  for (const auto &g : globals)
    if (other.globals.count(g)) return true;
  for (const auto &p : properties)
    if (other.properties.count(p)) return true;
  return false;
}

bool AccessSet::has_property(const std::string &name) const {
  for (const auto &p : properties)
    if (p.second == name) return true;
  return false;
}

std::string AccessSet::str() const {
  std::set<std::string> items(globals.begin(), globals.end());
  for (const auto &[g, p] : properties) items.insert(p.empty() ? g : g + "." + p);
  std::string out;
  for (const auto &s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

namespace {

class Walker {
public:
  explicit Walker(const Program &program) : program_(program) {}

  RWSets function_sets(const FunctionDecl &fn) {
    auto memo = memo_.find(fn.name);
    if (memo != memo_.end()) return memo->second;
    for (const auto &name : active_) {
      if (name == fn.name) {
        std::string chain;
        for (const auto &n : active_) chain += n + " -> ";
        throw SemanticErrors({{fn.loc, "recursive call chain: " + chain + fn.name}});
      }
    }
    active_.push_back(fn.name);
    RWSets saved = std::move(cur_);
    cur_ = {};
    for (const auto &s : fn.body.stmts) stmt(s);
    RWSets result = std::move(cur_);
    cur_ = std::move(saved);
    active_.pop_back();
    memo_.emplace(fn.name, result);
    return result;
  }

  RWSets stmt_sets(const Stmt &s) {
    cur_ = {};
    stmt(s);
    return std::move(cur_);
  }

private:
  const Program &program_;
  RWSets cur_;
  std::vector<std::string> active_;
  std::map<std::string, RWSets> memo_;

  static std::string object_key(const Expr &e) {
    if (auto *v = e.get_if<VarRef>()) return v->name;
    return e.info.value.graph;
  }

  void read(const Expr &e) {
    std::visit(
        [&](const auto &n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, VarRef>) {
            if (e.info.value.global) cur_.read.globals.insert(n.name);
          } else if constexpr (std::is_same_v<N, Member>) {
            if (!e.info.value.property.empty())
              cur_.read.properties.insert({e.info.value.graph, e.info.value.property});
            read(*n.object);
          } else if constexpr (std::is_same_v<N, Index>) {
            read(*n.object);
            read(*n.index);
          } else if constexpr (std::is_same_v<N, Call>) {
            call(n);
          } else if constexpr (std::is_same_v<N, MethodCall>) {
            method(n);
          } else if constexpr (std::is_same_v<N, Unary>) {
            read(*n.operand);
          } else if constexpr (std::is_same_v<N, Binary>) {
            read(*n.lhs);
            read(*n.rhs);
          }
        },
        e.node);
  }

  void write(const Expr &target) {
    if (auto *v = target.get_if<VarRef>()) {
      if (target.info.value.global) cur_.write.globals.insert(v->name);
    } else if (auto *m = target.get_if<Member>()) {
      if (!target.info.value.property.empty())
        cur_.write.properties.insert({target.info.value.graph, target.info.value.property});
      read(*m->object);
    } else {
      read(target);
    }
  }

  void method(const MethodCall &mc) {
    TypeKind ot = mc.object->info.value.type;
    std::string key = object_key(*mc.object);
    if (ot == TypeKind::Graph && mc.method == "getweight") {
      cur_.read.properties.insert({key, "weight"});
    } else if (ot == TypeKind::Set || ot == TypeKind::Collection) {
      if (mc.method == "find" || mc.method == "size") cur_.read.properties.insert({key, ""});
      if (mc.method == "union") {
        cur_.read.properties.insert({key, ""});
        cur_.write.properties.insert({key, ""});
      }
      if (mc.method == "add") cur_.write.properties.insert({key, ""});
    }
    read(*mc.object);
    for (const auto &a : mc.args) read(a);
  }

  void call(const Call &c) {
    if (c.callee == "MIN" || c.callee == "MAX") {
      if (c.args.size() == 3) {
        write(c.args[0]);
        read(c.args[1]);
        write(c.args[2]);
      }
      return;
    }
    if (c.callee == "RADD" || c.callee == "RMUL") {
      if (c.args.size() == 2) {
        write(c.args[0]);
        read(c.args[1]);
      }
      return;
    }
    for (const auto &a : c.args) read(a);
    const FunctionDecl *fn = program_.find_function(c.callee);
    if (!fn) return;
    RWSets callee = function_sets(*fn);
    std::map<std::string, std::string> rename;
    for (std::size_t i = 0; i < fn->params.size() && i < c.args.size(); ++i)
      if (is_object_type(fn->params[i].type)) rename[fn->params[i].name] = object_key(c.args[i]);
    auto map_into = [&](const AccessSet &from, AccessSet &to) {
      to.globals.insert(from.globals.begin(), from.globals.end());
      for (const auto &[g, p] : from.properties) {
        auto r = rename.find(g);
        to.properties.insert({r == rename.end() ? g : r->second, p});
      }
    };
    map_into(callee.read, cur_.read);
    map_into(callee.write, cur_.write);
  }

  void stmt(const Stmt &s) {
    std::visit(
        [&](const auto &n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, VarDecl>) {
            if (n.init) read(*n.init);
          } else if constexpr (std::is_same_v<N, Assign>) {
            write(n.target);
            if (n.op != AssignOp::Set) read(n.target);
            read(n.value);
          } else if constexpr (std::is_same_v<N, If>) {
            read(n.cond);
            stmt(*n.then_branch);
            if (n.else_branch) stmt(**n.else_branch);
          } else if constexpr (std::is_same_v<N, While>) {
            read(n.cond);
            stmt(*n.body);
          } else if constexpr (std::is_same_v<N, Return>) {
            if (n.value) read(*n.value);
          } else if constexpr (std::is_same_v<N, ExprStmt>) {
            read(n.expr);
          } else if constexpr (std::is_same_v<N, Foreach>) {
            read(n.subject);
            if (n.info.value.items != ItemsKind::None) {
              std::string key = object_key(n.subject);
              cur_.read.properties.insert({key, ""});
              cur_.write.properties.insert({key, ""});
            }
            if (n.filter) read(*n.filter);
            stmt(*n.body);
          } else if constexpr (std::is_same_v<N, Single>) {
            for (const auto &t : n.targets) read(t);
            stmt(*n.then_branch);
            if (n.else_branch) stmt(**n.else_branch);
          } else if constexpr (std::is_same_v<N, Sections>) {
            for (const auto &b : n.sections)
              for (const auto &x : b.stmts) stmt(x);
          } else if constexpr (std::is_same_v<N, Block>) {
            for (const auto &x : n.stmts) stmt(x);
          }
        },
        s.node);
  }
};

} // namespace

RWSets compute_rw_sets(const Program &program, const FunctionDecl &fn) {
  Walker w(program);
  return w.function_sets(fn);
}

RWSets compute_stmt_rw_sets(const Program &program, const Stmt &stmt) {
  Walker w(program);
  return w.stmt_sets(stmt);
}

const Call *launch_call(const Program &program, const Stmt &stmt) {
  const auto *fe = stmt.get_if<Foreach>();
  if (!fe) return nullptr;
  const Stmt *body = fe->body.get();
  if (auto *b = body->get_if<Block>()) {
    if (b->stmts.size() != 1) return nullptr;
    body = &b->stmts[0];
  }
  const auto *es = body->get_if<ExprStmt>();
  if (!es) return nullptr;
  const auto *c = es->expr.get_if<Call>();
  if (!c || !program.find_function(c->callee)) return nullptr;
  return c;
}

namespace {

void collect_targets(const Program &program, const FunctionDecl &host, const Stmt &s,
                     int depth, std::vector<TargetFunctionInfo> &out) {
  if (auto *fe = s.get_if<Foreach>()) {
    if (const Call *c = launch_call(program, s)) {
      TargetFunctionInfo info;
      info.function = c->callee;
      info.callSite = &s;
      info.host = &host;
      info.outer = depth == 0 && (fe->iterator == IteratorKind::Points ||
                                  fe->iterator == IteratorKind::Edges);
      info.fn = compute_rw_sets(program, *program.find_function(c->callee));
      info.launch = compute_stmt_rw_sets(program, s);
      out.push_back(std::move(info));
    }
    collect_targets(program, host, *fe->body, depth + 1, out);
    return;
  }
  if (auto *b = s.get_if<Block>()) {
    for (const auto &x : b->stmts) collect_targets(program, host, x, depth, out);
  } else if (auto *i = s.get_if<If>()) {
    collect_targets(program, host, *i->then_branch, depth, out);
    if (i->else_branch) collect_targets(program, host, **i->else_branch, depth, out);
  } else if (auto *w = s.get_if<While>()) {
    collect_targets(program, host, *w->body, depth, out);
  } else if (auto *sg = s.get_if<Single>()) {
    collect_targets(program, host, *sg->then_branch, depth, out);
    if (sg->else_branch) collect_targets(program, host, **sg->else_branch, depth, out);
  } else if (auto *sec = s.get_if<Sections>()) {
    for (const auto &b : sec->sections)
      for (const auto &x : b.stmts) collect_targets(program, host, x, depth, out);
  }
}

} // namespace

std::vector<TargetFunctionInfo> find_target_functions(const Program &program) {
  std::vector<TargetFunctionInfo> out;
  for (const auto &f : program.functions)
    for (const auto &s : f.body.stmts) collect_targets(program, f, s, 0, out);
  for (const auto &s : program.main.body.stmts) collect_targets(program, program.main, s, 0, out);
  return out;
}

} // namespace gdsl
