#include <charconv>
#include <sstream>

#include "gdsl/parser.hpp"

namespace gdsl {
namespace {

std::string float_text(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  std::string s(buf, ptr);
  if (s.find('.') == std::string::npos) s += ".0";
  return s;
}

// Binding strength of an expression when used as an operand.
int strength(const Expr &e) {
  if (auto *b = e.get_if<Binary>()) return op_precedence(b->op);
  if (e.is<Unary>()) return 7;
  return 8;
}

void print_expr_to(std::string &out, const Expr &e);

void operand(std::string &out, const Expr &e, int min_strength) {
  if (strength(e) < min_strength) {
    out += '(';
    print_expr_to(out, e);
    out += ')';
  } else {
    print_expr_to(out, e);
  }
}

void arg_list(std::string &out, const std::vector<Expr> &args) {
  out += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    print_expr_to(out, args[i]);
  }
  out += ')';
}

void print_expr_to(std::string &out, const Expr &e) {
  std::visit(
      [&](const auto &n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, IntLit>) {
          out += std::to_string(n.value);
        } else if constexpr (std::is_same_v<N, FloatLit>) {
          out += float_text(n.value);
        } else if constexpr (std::is_same_v<N, BoolLit>) {
          out += n.value ? "true" : "false";
        } else if constexpr (std::is_same_v<N, VarRef>) {
          out += n.name;
        } else if constexpr (std::is_same_v<N, Member>) {
          operand(out, *n.object, 8);
          out += '.';
          out += n.field;
        } else if constexpr (std::is_same_v<N, Index>) {
          operand(out, *n.object, 8);
          out += '[';
          print_expr_to(out, *n.index);
          out += ']';
        } else if constexpr (std::is_same_v<N, Call>) {
          out += n.callee;
          arg_list(out, n.args);
        } else if constexpr (std::is_same_v<N, MethodCall>) {
          operand(out, *n.object, 8);
          out += '.';
          out += n.method;
          arg_list(out, n.args);
        } else if constexpr (std::is_same_v<N, Unary>) {
          out += n.op == UnaryOp::Neg ? "-" : "!";
          // nested unary gets parentheses so "--" never lexes as decrement
          operand(out, *n.operand, 8);
        } else if constexpr (std::is_same_v<N, Binary>) {
          int p = op_precedence(n.op);
          operand(out, *n.lhs, p);
          out += ' ';
          out += op_text(n.op);
          out += ' ';
          operand(out, *n.rhs, p + 1);
        }
      },
      e.node);
}

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 2, ' '); }

std::string type_text(TypeKind t) {
  if (t == TypeKind::Collection) return "Collection<Point>";
  return type_name(t);
}

void print_stmt_to(std::string &out, const Stmt &s, int indent);

void print_block_lines(std::string &out, const Block &b, int indent) {
  for (const auto &st : b.stmts) {
    print_stmt_to(out, st, indent);
    out += '\n';
  }
}

// Body of a compound statement: " {...}" for blocks, newline + indented otherwise.
void print_body(std::string &out, const Stmt &body, int indent) {
  if (auto *b = body.get_if<Block>()) {
    out += " {\n";
    print_block_lines(out, *b, indent + 1);
    out += pad(indent) + "}";
  } else if (body.is<If>() || body.is<While>() || body.is<Foreach>() || body.is<Single>() ||
             body.is<Sections>()) {
    out += '\n';
    print_stmt_to(out, body, indent + 1);
  } else {
    out += ' ';
    print_stmt_to(out, body, 0);
  }
}

void print_else(std::string &out, const Stmt &then_branch, const Stmt &else_branch,
                int indent) {
  if (then_branch.is<Block>())
    out += " else";
  else
    out += '\n' + pad(indent) + "else";
  print_body(out, else_branch, indent);
}

std::string decl_text(const VarDecl &d) {
  std::string out = type_text(d.type) + " ";
  if ((d.type == TypeKind::Point || d.type == TypeKind::Edge) && !d.graph.empty())
    out += "(" + d.graph + ") ";
  out += d.name;
  if (d.type == TypeKind::Set || d.type == TypeKind::Collection) {
    if (!d.graph.empty()) {
      out += "(" + d.graph;
      if (!d.keyProp.empty()) out += ", " + d.keyProp;
      out += ")";
    }
  } else if (d.init) {
    out += " = " + print_expr(*d.init);
  }
  return out + ";";
}

void print_stmt_to(std::string &out, const Stmt &s, int indent) {
  out += pad(indent);
  std::visit(
      [&](const auto &n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, VarDecl>) {
          out += decl_text(n);
        } else if constexpr (std::is_same_v<N, Assign>) {
          print_expr_to(out, n.target);
          const auto *lit = n.value.template get_if<IntLit>();
          if (n.op != AssignOp::Set && lit && lit->value == 1) {
            out += n.op == AssignOp::Add ? "++;" : "--;";
            return;
          }
          out += n.op == AssignOp::Set ? " = " : n.op == AssignOp::Add ? " += " : " -= ";
          print_expr_to(out, n.value);
          out += ';';
        } else if constexpr (std::is_same_v<N, If>) {
          out += "if (";
          print_expr_to(out, n.cond);
          out += ')';
          print_body(out, *n.then_branch, indent);
          if (n.else_branch) print_else(out, *n.then_branch, **n.else_branch, indent);
        } else if constexpr (std::is_same_v<N, While>) {
          out += "while (";
          print_expr_to(out, n.cond);
          out += ')';
          print_body(out, *n.body, indent);
        } else if constexpr (std::is_same_v<N, Break>) {
          out += "break;";
        } else if constexpr (std::is_same_v<N, Return>) {
          out += "return";
          if (n.value) {
            out += ' ';
            print_expr_to(out, *n.value);
          }
          out += ';';
        } else if constexpr (std::is_same_v<N, ExprStmt>) {
          print_expr_to(out, n.expr);
          out += ';';
        } else if constexpr (std::is_same_v<N, Foreach>) {
          out += "foreach (" + n.var + " In ";
          operand(out, n.subject, 8);
          if (n.iterator != IteratorKind::Items) {
            out += '.';
            out += iterator_name(n.iterator);
          }
          out += ')';
          if (n.filter) {
            out += " (";
            print_expr_to(out, *n.filter);
            out += ')';
          }
          print_body(out, *n.body, indent);
        } else if constexpr (std::is_same_v<N, Single>) {
          out += "single ";
          arg_list(out, n.targets);
          print_body(out, *n.then_branch, indent);
          if (n.else_branch) print_else(out, *n.then_branch, **n.else_branch, indent);
        } else if constexpr (std::is_same_v<N, Sections>) {
          out += "parallel sections {\n";
          for (const auto &b : n.sections) {
            out += pad(indent + 1) + "section {\n";
            print_block_lines(out, b, indent + 2);
            out += pad(indent + 1) + "}\n";
          }
          out += pad(indent) + "}";
        } else if constexpr (std::is_same_v<N, Block>) {
          out += "{\n";
          print_block_lines(out, n, indent + 1);
          out += pad(indent) + "}";
        } else if constexpr (std::is_same_v<N, AddProperty>) {
          out += n.graph + (n.edge ? ".addEdgeProperty(" : ".addPointProperty(") + n.name +
                 ", " + type_name(n.type) + ");";
        } else if constexpr (std::is_same_v<N, ReadGraph>) {
          out += n.graph + ".read(argv[" + std::to_string(n.arg) + "]);";
        }
      },
      s.node);
}

} // namespace

std::string print_expr(const Expr &e) {
  std::string out;
  print_expr_to(out, e);
  return out;
}

std::string print_stmt(const Stmt &s, int indent) {
  std::string out;
  print_stmt_to(out, s, indent);
  return out;
}

std::string print_function(const FunctionDecl &f) {
  std::string out = type_text(f.ret) + " " + f.name + "(";
  if (f.argv) {
    out += "int argc, char *argv[]";
  } else {
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (i) out += ", ";
      out += type_text(f.params[i].type) + " " + f.params[i].name;
    }
  }
  out += ") {\n";
  print_block_lines(out, f.body, 1);
  out += "}\n";
  return out;
}

std::string pretty_print(const Program &program) {
  std::string out;
  for (const auto &g : program.globals) out += decl_text(g) + "\n";
  for (const auto &f : program.functions) {
    if (!out.empty()) out += '\n';
    out += print_function(f);
  }
  if (!out.empty()) out += '\n';
  out += print_function(program.main);
  return out;
}

} // namespace gdsl
