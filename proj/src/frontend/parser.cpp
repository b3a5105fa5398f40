#include "gdsl/parser.hpp"

#include <charconv>
#include <optional>

#include "gdsl/diagnostics.hpp"

namespace gdsl {
namespace {

class Parser {
public:
  explicit Parser(const std::vector<Token> &tokens) : toks_(tokens) {
    if (toks_.empty() || toks_.back().kind != TokenKind::Eof)
      throw ParseError(1, 1, "token stream ending in end of input", "unterminated stream");
  }

  Program program() {
    Program prog;
    bool have_main = false;
    while (!at(TokenKind::Eof)) {
      SourceLoc loc = here();
      TypeKind type = parse_type();
      if (at(TokenKind::Ident) && peek(1).kind == TokenKind::LParen) {
        FunctionDecl fn = function(type, loc);
        if (fn.name == "main") {
          if (have_main) throw ParseError(loc.line, loc.col, "a single main function", "second main");
          prog.main = std::move(fn);
          have_main = true;
        } else {
          prog.functions.push_back(std::move(fn));
        }
        continue;
      }
      for (auto &d : declarators(type)) {
        prog.globals.push_back(std::move(d));
        prog.global_locs.push_back(loc);
      }
      expect(TokenKind::Semi);
    }
    if (!have_main) {
      const Token &t = cur();
      throw ParseError(t.line, t.col, "function 'main'", "end of input");
    }
    return prog;
  }

private:
  const Token &cur() const { return toks_[pos_]; }
  const Token &peek(std::size_t k) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at(TokenKind k) const { return cur().kind == k; }
  SourceLoc here() const { return {cur().line, cur().col}; }

  static std::string describe(const Token &t) {
    if (t.kind == TokenKind::Eof) return "end of input";
    return "'" + t.lexeme + "'";
  }

  [[noreturn]] void fail(const std::string &expected) const {
    throw ParseError(cur().line, cur().col, expected, describe(cur()));
  }

  const Token &expect(TokenKind k) {
    if (!at(k)) fail(token_kind_name(k));
    return toks_[pos_++];
  }

  bool accept(TokenKind k) {
    if (!at(k)) return false;
    ++pos_;
    return true;
  }

  std::string ident(const char *what = "identifier") {
    if (!at(TokenKind::Ident)) fail(what);
    return toks_[pos_++].lexeme;
  }

  static bool is_type_token(TokenKind k) {
    switch (k) {
    case TokenKind::Int:
    case TokenKind::Float:
    case TokenKind::Bool:
    case TokenKind::Void:
    case TokenKind::Graph:
    case TokenKind::Point:
    case TokenKind::Edge:
    case TokenKind::Set:
    case TokenKind::Collection: return true;
    default: return false;
    }
  }

  TypeKind parse_type() {
    TypeKind t;
    switch (cur().kind) {
    case TokenKind::Int: t = TypeKind::Int; break;
    case TokenKind::Float: t = TypeKind::Float; break;
    case TokenKind::Bool: t = TypeKind::Bool; break;
    case TokenKind::Void: t = TypeKind::Void; break;
    case TokenKind::Graph: t = TypeKind::Graph; break;
    case TokenKind::Point: t = TypeKind::Point; break;
    case TokenKind::Edge: t = TypeKind::Edge; break;
    case TokenKind::Set: t = TypeKind::Set; break;
    case TokenKind::Collection: t = TypeKind::Collection; break;
    default: fail("type name");
    }
    ++pos_;
    if (t == TypeKind::Collection && accept(TokenKind::Lt)) {
      expect(TokenKind::Point);
      expect(TokenKind::Gt);
    }
    return t;
  }

  FunctionDecl function(TypeKind ret, SourceLoc loc) {
    FunctionDecl fn;
    fn.ret = ret;
    fn.loc = loc;
    fn.name = ident();
    expect(TokenKind::LParen);
    if (fn.name == "main" && at(TokenKind::Int) && peek(1).kind == TokenKind::Ident &&
        peek(1).lexeme == "argc") {
      // int argc, char *argv[]
      pos_ += 2;
      expect(TokenKind::Comma);
      if (!(at(TokenKind::Ident) && cur().lexeme == "char")) fail("'char'");
      ++pos_;
      expect(TokenKind::Star);
      if (!(at(TokenKind::Ident) && cur().lexeme == "argv")) fail("'argv'");
      ++pos_;
      expect(TokenKind::LBracket);
      expect(TokenKind::RBracket);
      fn.argv = true;
    } else if (!at(TokenKind::RParen)) {
      do {
        Param p;
        p.type = parse_type();
        p.name = ident("parameter name");
        fn.params.push_back(std::move(p));
      } while (accept(TokenKind::Comma));
    }
    expect(TokenKind::RParen);
    if (!at(TokenKind::LBrace)) fail("'{'");
    fn.body = block();
    return fn;
  }

  std::vector<VarDecl> declarators(TypeKind type) {
    std::vector<VarDecl> out;
    do {
      VarDecl d;
      d.type = type;
      if ((type == TypeKind::Point || type == TypeKind::Edge) && accept(TokenKind::LParen)) {
        d.graph = ident("graph name");
        expect(TokenKind::RParen);
      }
      d.name = ident("variable name");
      if (type == TypeKind::Set || type == TypeKind::Collection) {
        if (accept(TokenKind::LParen)) {
          d.graph = ident("graph name");
          if (type == TypeKind::Collection && accept(TokenKind::Comma))
            d.keyProp = ident("property name");
          expect(TokenKind::RParen);
        }
      } else if (accept(TokenKind::Eq)) {
        d.init = expr();
      }
      out.push_back(std::move(d));
    } while (accept(TokenKind::Comma));
    return out;
  }

  Block block() {
    expect(TokenKind::LBrace);
    Block b;
    while (!at(TokenKind::RBrace)) {
      if (at(TokenKind::Eof)) fail("'}'");
      statement_into(b.stmts);
    }
    expect(TokenKind::RBrace);
    return b;
  }

  // Declarations may expand to several statements.
  void statement_into(std::vector<Stmt> &out) {
    if (is_type_token(cur().kind)) {
      SourceLoc loc = here();
      TypeKind t = parse_type();
      for (auto &d : declarators(t)) out.push_back(Stmt{std::move(d), loc});
      expect(TokenKind::Semi);
      return;
    }
    out.push_back(statement());
  }

  Stmt single_statement() {
    if (is_type_token(cur().kind)) fail("statement (declarations need an enclosing block)");
    return statement();
  }

  Stmt statement() {
    SourceLoc loc = here();
    switch (cur().kind) {
    case TokenKind::LBrace: return Stmt{block(), loc};
    case TokenKind::If: {
      ++pos_;
      expect(TokenKind::LParen);
      If s;
      s.cond = expr();
      expect(TokenKind::RParen);
      s.then_branch = single_statement();
      if (accept(TokenKind::Else)) s.else_branch = Box<Stmt>(single_statement());
      return Stmt{std::move(s), loc};
    }
    case TokenKind::While: {
      ++pos_;
      expect(TokenKind::LParen);
      While s;
      s.cond = expr();
      expect(TokenKind::RParen);
      s.body = single_statement();
      return Stmt{std::move(s), loc};
    }
    case TokenKind::Break:
      ++pos_;
      expect(TokenKind::Semi);
      return Stmt{Break{}, loc};
    case TokenKind::Return: {
      ++pos_;
      Return r;
      if (!at(TokenKind::Semi)) r.value = expr();
      expect(TokenKind::Semi);
      return Stmt{std::move(r), loc};
    }
    case TokenKind::Foreach: return foreach_stmt();
    case TokenKind::Single: {
      ++pos_;
      expect(TokenKind::LParen);
      Single s;
      do {
        s.targets.push_back(expr());
      } while (accept(TokenKind::Comma));
      expect(TokenKind::RParen);
      s.then_branch = single_statement();
      if (accept(TokenKind::Else)) s.else_branch = Box<Stmt>(single_statement());
      return Stmt{std::move(s), loc};
    }
    case TokenKind::Parallel: {
      ++pos_;
      expect(TokenKind::Sections);
      expect(TokenKind::LBrace);
      Sections s;
      while (!at(TokenKind::RBrace)) {
        if (!at(TokenKind::Section)) fail("'section'");
        ++pos_;
        if (!at(TokenKind::LBrace)) fail("'{'");
        s.sections.push_back(block());
      }
      expect(TokenKind::RBrace);
      return Stmt{std::move(s), loc};
    }
    default: break;
    }

    // graph.addPointProperty(name, type); graph.addEdgeProperty(...); graph.read(argv[k]);
    if (at(TokenKind::Ident) && peek(1).kind == TokenKind::Dot &&
        peek(2).kind == TokenKind::Ident && peek(3).kind == TokenKind::LParen) {
      const std::string &method = peek(2).lexeme;
      if (method == "addPointProperty" || method == "addEdgeProperty") {
        AddProperty a;
        a.graph = cur().lexeme;
        a.edge = method == "addEdgeProperty";
        pos_ += 4;
        a.name = ident("property name");
        expect(TokenKind::Comma);
        a.type = parse_type();
        expect(TokenKind::RParen);
        expect(TokenKind::Semi);
        return Stmt{std::move(a), loc};
      }
      if (method == "read") {
        ReadGraph r;
        r.graph = cur().lexeme;
        pos_ += 4;
        if (!(at(TokenKind::Ident) && cur().lexeme == "argv")) fail("'argv'");
        ++pos_;
        expect(TokenKind::LBracket);
        const Token &n = expect(TokenKind::IntLit);
        r.arg = std::stoi(n.lexeme);
        expect(TokenKind::RBracket);
        expect(TokenKind::RParen);
        expect(TokenKind::Semi);
        return Stmt{std::move(r), loc};
      }
    }

    Expr e = expr();
    if (at(TokenKind::Eq) || at(TokenKind::PlusEq) || at(TokenKind::MinusEq)) {
      AssignOp op = at(TokenKind::Eq)       ? AssignOp::Set
                    : at(TokenKind::PlusEq) ? AssignOp::Add
                                            : AssignOp::Sub;
      ++pos_;
      Expr v = expr();
      expect(TokenKind::Semi);
      return Stmt{Assign{std::move(e), op, std::move(v)}, loc};
    }
    if (at(TokenKind::PlusPlus) || at(TokenKind::MinusMinus)) {
      AssignOp op = at(TokenKind::PlusPlus) ? AssignOp::Add : AssignOp::Sub;
      SourceLoc ol = here();
      ++pos_;
      expect(TokenKind::Semi);
      return Stmt{Assign{std::move(e), op, make_int(1, ol)}, loc};
    }
    expect(TokenKind::Semi);
    return Stmt{ExprStmt{std::move(e)}, loc};
  }

  Stmt foreach_stmt() {
    SourceLoc loc = here();
    expect(TokenKind::Foreach);
    expect(TokenKind::LParen);
    Foreach f;
    f.var = ident("iteration variable");
    expect(TokenKind::In);
    Expr subject = postfix();
    f.iterator = IteratorKind::Items;
    if (auto *m = subject.get_if<Member>()) {
      static const std::pair<const char *, IteratorKind> kIters[] = {
          {"points", IteratorKind::Points}, {"edges", IteratorKind::Edges},
          {"nbrs", IteratorKind::Nbrs},     {"innbrs", IteratorKind::InNbrs},
          {"outnbrs", IteratorKind::OutNbrs}};
      for (const auto &[name, kind] : kIters) {
        if (m->field == name) {
          f.iterator = kind;
          Expr obj = std::move(*m->object);
          subject = std::move(obj);
          break;
        }
      }
    }
    f.subject = std::move(subject);
    expect(TokenKind::RParen);
    if (accept(TokenKind::LParen)) {
      f.filter = expr();
      expect(TokenKind::RParen);
    }
    f.body = single_statement();
    return Stmt{std::move(f), loc};
  }

  // expression grammar: precedence climbing over binary operators
  Expr expr() { return binary(1); }

  std::optional<BinaryOp> binop() const {
    switch (cur().kind) {
    case TokenKind::OrOr: return BinaryOp::Or;
    case TokenKind::AndAnd: return BinaryOp::And;
    case TokenKind::EqEq: return BinaryOp::Eq;
    case TokenKind::NotEq: return BinaryOp::Ne;
    case TokenKind::Lt: return BinaryOp::Lt;
    case TokenKind::Le: return BinaryOp::Le;
    case TokenKind::Gt: return BinaryOp::Gt;
    case TokenKind::Ge: return BinaryOp::Ge;
    case TokenKind::Plus: return BinaryOp::Add;
    case TokenKind::Minus: return BinaryOp::Sub;
    case TokenKind::Star: return BinaryOp::Mul;
    case TokenKind::Slash: return BinaryOp::Div;
    case TokenKind::Percent: return BinaryOp::Mod;
    default: return std::nullopt;
    }
  }

  Expr binary(int min_prec) {
    Expr lhs = unary();
    while (true) {
      auto op = binop();
      if (!op || op_precedence(*op) < min_prec) break;
      SourceLoc loc = here();
      ++pos_;
      Expr rhs = binary(op_precedence(*op) + 1);
      lhs = make_binary(*op, std::move(lhs), std::move(rhs), loc);
    }
    return lhs;
  }

  Expr unary() {
    SourceLoc loc = here();
    if (accept(TokenKind::Minus))
      return Expr{Unary{UnaryOp::Neg, Box<Expr>(unary())}, loc, {}};
    if (accept(TokenKind::Bang))
      return Expr{Unary{UnaryOp::Not, Box<Expr>(unary())}, loc, {}};
    return postfix();
  }

  std::vector<Expr> args() {
    std::vector<Expr> out;
    expect(TokenKind::LParen);
    if (!at(TokenKind::RParen)) {
      do {
        out.push_back(expr());
      } while (accept(TokenKind::Comma));
    }
    expect(TokenKind::RParen);
    return out;
  }

  Expr postfix() {
    Expr e = primary();
    while (true) {
      SourceLoc loc = here();
      if (accept(TokenKind::Dot)) {
        std::string name = ident("member name");
        if (at(TokenKind::LParen)) {
          e = make_method(std::move(e), std::move(name), args(), loc);
        } else {
          e = make_member(std::move(e), std::move(name), loc);
        }
      } else if (accept(TokenKind::LBracket)) {
        Expr idx = expr();
        expect(TokenKind::RBracket);
        e = Expr{Index{Box<Expr>(std::move(e)), Box<Expr>(std::move(idx))}, loc, {}};
      } else {
        break;
      }
    }
    return e;
  }

  Expr primary() {
    SourceLoc loc = here();
    switch (cur().kind) {
    case TokenKind::IntLit: {
      const std::string &s = cur().lexeme;
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(loc.line, loc.col, "64-bit integer literal", "'" + s + "'");
      ++pos_;
      return make_int(v, loc);
    }
    case TokenKind::FloatLit: {
      double v = std::stod(cur().lexeme);
      ++pos_;
      return Expr{FloatLit{v}, loc, {}};
    }
    case TokenKind::True: ++pos_; return Expr{BoolLit{true}, loc, {}};
    case TokenKind::False: ++pos_; return Expr{BoolLit{false}, loc, {}};
    case TokenKind::Ident: {
      std::string name = cur().lexeme;
      ++pos_;
      if (at(TokenKind::LParen)) return make_call(std::move(name), args(), loc);
      return make_var(std::move(name), loc);
    }
    case TokenKind::LParen: {
      ++pos_;
      Expr e = expr();
      expect(TokenKind::RParen);
      return e;
    }
    default: fail("expression");
    }
  }

  const std::vector<Token> &toks_;
  std::size_t pos_ = 0;
};

} // namespace

Program parse(const std::vector<Token> &tokens) { return Parser(tokens).program(); }

Program parse_source(std::string_view source) { return parse(tokenize(source)); }

} // namespace gdsl
