#include "gdsl/ast.hpp"

namespace gdsl {

const char *type_name(TypeKind t) {
  switch (t) {
  case TypeKind::Unknown: return "<unknown>";
  case TypeKind::Void: return "void";
  case TypeKind::Int: return "int";
  case TypeKind::Float: return "float";
  case TypeKind::Bool: return "bool";
  case TypeKind::Graph: return "Graph";
  case TypeKind::Point: return "Point";
  case TypeKind::Edge: return "Edge";
  case TypeKind::Set: return "Set";
  case TypeKind::Collection: return "Collection";
  }
  return "?";
}

bool is_object_type(TypeKind t) {
  return t == TypeKind::Graph || t == TypeKind::Set || t == TypeKind::Collection;
}

bool is_scalar_type(TypeKind t) {
  return t == TypeKind::Int || t == TypeKind::Float || t == TypeKind::Bool ||
         t == TypeKind::Point || t == TypeKind::Edge;
}

const char *iterator_name(IteratorKind k) {
  switch (k) {
  case IteratorKind::Points: return "points";
  case IteratorKind::Edges: return "edges";
  case IteratorKind::Nbrs: return "nbrs";
  case IteratorKind::InNbrs: return "innbrs";
  case IteratorKind::OutNbrs: return "outnbrs";
  case IteratorKind::Items: return "";
  }
  return "?";
}

const char *op_text(BinaryOp op) {
  switch (op) {
  case BinaryOp::Add: return "+";
  case BinaryOp::Sub: return "-";
  case BinaryOp::Mul: return "*";
  case BinaryOp::Div: return "/";
  case BinaryOp::Mod: return "%";
  case BinaryOp::Lt: return "<";
  case BinaryOp::Le: return "<=";
  case BinaryOp::Gt: return ">";
  case BinaryOp::Ge: return ">=";
  case BinaryOp::Eq: return "==";
  case BinaryOp::Ne: return "!=";
  case BinaryOp::And: return "&&";
  case BinaryOp::Or: return "||";
  }
  return "?";
}

int op_precedence(BinaryOp op) {
  switch (op) {
  case BinaryOp::Or: return 1;
  case BinaryOp::And: return 2;
  case BinaryOp::Eq:
  case BinaryOp::Ne: return 3;
  case BinaryOp::Lt:
  case BinaryOp::Le:
  case BinaryOp::Gt:
  case BinaryOp::Ge: return 4;
  case BinaryOp::Add:
  case BinaryOp::Sub: return 5;
  case BinaryOp::Mul:
  case BinaryOp::Div:
  case BinaryOp::Mod: return 6;
  }
  return 0;
}

Expr make_int(std::int64_t v, SourceLoc loc) { return Expr{IntLit{v}, loc, {}}; }

Expr make_var(std::string name, SourceLoc loc) {
  return Expr{VarRef{std::move(name)}, loc, {}};
}

Expr make_member(Expr object, std::string field, SourceLoc loc) {
  return Expr{Member{Box<Expr>(std::move(object)), std::move(field)}, loc, {}};
}

Expr make_binary(BinaryOp op, Expr lhs, Expr rhs, SourceLoc loc) {
  return Expr{Binary{op, Box<Expr>(std::move(lhs)), Box<Expr>(std::move(rhs))}, loc, {}};
}

Expr make_call(std::string callee, std::vector<Expr> args, SourceLoc loc) {
  return Expr{Call{std::move(callee), std::move(args)}, loc, {}};
}

Expr make_method(Expr object, std::string method, std::vector<Expr> args, SourceLoc loc) {
  return Expr{MethodCall{Box<Expr>(std::move(object)), std::move(method), std::move(args)},
              loc,
              {}};
}

const FunctionDecl *Program::find_function(const std::string &name) const {
  if (name == "main") return &main;
  for (const auto &f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

FunctionDecl *Program::find_function(const std::string &name) {
  if (name == "main") return &main;
  for (auto &f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

bool Program::is_global(const std::string &name) const {
  for (const auto &g : globals)
    if (g.name == name) return true;
  return false;
}

void for_each_expr_mut(Expr &e, const std::function<void(Expr &)> &f) {
  std::visit(
      [&](auto &n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Member>) {
          for_each_expr_mut(*n.object, f);
        } else if constexpr (std::is_same_v<N, Index>) {
          for_each_expr_mut(*n.object, f);
          for_each_expr_mut(*n.index, f);
        } else if constexpr (std::is_same_v<N, Call>) {
          for (auto &a : n.args) for_each_expr_mut(a, f);
        } else if constexpr (std::is_same_v<N, MethodCall>) {
          for_each_expr_mut(*n.object, f);
          for (auto &a : n.args) for_each_expr_mut(a, f);
        } else if constexpr (std::is_same_v<N, Unary>) {
          for_each_expr_mut(*n.operand, f);
        } else if constexpr (std::is_same_v<N, Binary>) {
          for_each_expr_mut(*n.lhs, f);
          for_each_expr_mut(*n.rhs, f);
        }
      },
      e.node);
  f(e);
}

void for_each_expr_mut(Stmt &s, const std::function<void(Expr &)> &f) {
  std::visit(
      [&](auto &n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, VarDecl>) {
          if (n.init) for_each_expr_mut(*n.init, f);
        } else if constexpr (std::is_same_v<N, Assign>) {
          for_each_expr_mut(n.target, f);
          for_each_expr_mut(n.value, f);
        } else if constexpr (std::is_same_v<N, If>) {
          for_each_expr_mut(n.cond, f);
          for_each_expr_mut(*n.then_branch, f);
          if (n.else_branch) for_each_expr_mut(**n.else_branch, f);
        } else if constexpr (std::is_same_v<N, While>) {
          for_each_expr_mut(n.cond, f);
          for_each_expr_mut(*n.body, f);
        } else if constexpr (std::is_same_v<N, Return>) {
          if (n.value) for_each_expr_mut(*n.value, f);
        } else if constexpr (std::is_same_v<N, ExprStmt>) {
          for_each_expr_mut(n.expr, f);
        } else if constexpr (std::is_same_v<N, Foreach>) {
          for_each_expr_mut(n.subject, f);
          if (n.filter) for_each_expr_mut(*n.filter, f);
          for_each_expr_mut(*n.body, f);
        } else if constexpr (std::is_same_v<N, Single>) {
          for (auto &t : n.targets) for_each_expr_mut(t, f);
          for_each_expr_mut(*n.then_branch, f);
          if (n.else_branch) for_each_expr_mut(**n.else_branch, f);
        } else if constexpr (std::is_same_v<N, Sections>) {
          for (auto &b : n.sections)
            for (auto &st : b.stmts) for_each_expr_mut(st, f);
        } else if constexpr (std::is_same_v<N, Block>) {
          for (auto &st : n.stmts) for_each_expr_mut(st, f);
        }
      },
      s.node);
}

} // namespace gdsl
