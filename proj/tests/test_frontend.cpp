#include <doctest.h>

#include <set>

#include "gdsl/diagnostics.hpp"
#include "gdsl/lexer.hpp"
#include "gdsl/parser.hpp"
#include "support.hpp"

using namespace gdsl;

namespace {

std::vector<TokenKind> kinds(const std::string &src) {
  std::vector<TokenKind> out;
  for (const auto &t : tokenize(src)) out.push_back(t.kind);
  return out;
}

const char *kCorpus[] = {"bfs.fal", "bfs_edge.fal", "sssp.fal", "sssp_edge.fal", "cc.fal",
                         "mst.fal", "bfs_sssp.fal", "bfs_sssp_sections.fal",
                         "cc_two_graphs.fal"};

} // namespace

TEST_CASE("tokenize declaration") {
  using K = TokenKind;
  CHECK(kinds("int x = 0;") == std::vector<K>{K::Int, K::Ident, K::Eq, K::IntLit, K::Semi, K::Eof});
}

TEST_CASE("tokenize foreach header") {
  auto toks = tokenize("foreach (t In p.outnbrs)");
  REQUIRE(toks.size() == 9);
  CHECK(toks[0].kind == TokenKind::Foreach);
  CHECK(toks[2].lexeme == "t");
  CHECK(toks[3].kind == TokenKind::In);
  CHECK(toks[6].lexeme == "outnbrs");
}

TEST_CASE("illegal character position") {
  try {
    tokenize("@");
    FAIL("expected LexError");
  } catch (const LexError &e) {
    CHECK(e.line() == 1);
    CHECK(e.col() == 1);
  }
  try {
    tokenize("int x;\n  y = @;");
    FAIL("expected LexError");
  } catch (const LexError &e) {
    CHECK(e.line() == 2);
    CHECK(e.col() == 7);
  }
}

TEST_CASE("comments and positions") {
  auto toks = tokenize("a // note\n  b");
  REQUIRE(toks.size() == 3);
  CHECK(toks[1].line == 2);
  CHECK(toks[1].col == 3);
}

TEST_CASE("lexemes reconstruct comment-free source") {
  for (const char *name : kCorpus) {
    std::string src = read_corpus(name);
    std::string stripped;
    std::size_t i = 0;
    while (i < src.size()) {
      if (src.compare(i, 2, "//") == 0) {
        while (i < src.size() && src[i] != '\n') ++i;
        continue;
      }
      if (!std::isspace(static_cast<unsigned char>(src[i]))) stripped += src[i];
      ++i;
    }
    std::string joined;
    for (const auto &t : tokenize(src)) joined += t.lexeme;
    CHECK_MESSAGE(joined == stripped, name);
  }
}

TEST_CASE("empty main") {
  Program p = parse_source("int main(){ }");
  CHECK(p.functions.empty());
  CHECK(p.globals.empty());
  CHECK(p.main.body.stmts.empty());
}

TEST_CASE("parse error reports expected token") {
  try {
    parse_source("int main() { int x = ; }");
    FAIL("expected ParseError");
  } catch (const ParseError &e) {
    CHECK(e.line() == 1);
    CHECK(e.col() == 22);
  }
  CHECK_THROWS_AS(parse_source("int main() { foreach (t In g.points) }"), ParseError);
  CHECK_THROWS_AS(parse_source("int main() { x = 99999999999999999999; }"), ParseError);
}

TEST_CASE("foreach forms") {
  Program p = parse_source(R"(
void k(Point p, Graph graph) {
  foreach (t In p.innbrs) (t.dist > 0) t.dist = 0;
}
int main() {
  Graph g;
  Collection<Point> wl(g, dist);
  foreach (t In wl) k(t, g);
}
)");
  const auto &fe = p.functions[0].body.stmts[0].as<Foreach>();
  CHECK(fe.iterator == IteratorKind::InNbrs);
  CHECK(fe.filter.has_value());
  const auto &decl = p.main.body.stmts[1].as<VarDecl>();
  CHECK(decl.type == TypeKind::Collection);
  CHECK(decl.graph == "g");
  CHECK(decl.keyProp == "dist");
  CHECK(p.main.body.stmts[2].as<Foreach>().iterator == IteratorKind::Items);
}

TEST_CASE("precedence and printing") {
  Program p = parse_source("int main() { int x = 1 + 2 * 3 - (4 - 5) - -(-6); }");
  std::string text = pretty_print(p);
  CHECK(text.find("int x = 1 + 2 * 3 - (4 - 5) - -(-6);") != std::string::npos);
  CHECK(parse_source(text) == p);
}

TEST_CASE("increment desugars") {
  Program p = parse_source("int lev = 0; int main() { lev++; lev += 2; }");
  const auto &a = p.main.body.stmts[0].as<Assign>();
  CHECK(a.op == AssignOp::Add);
  CHECK(a.value.as<IntLit>().value == 1);
  CHECK(pretty_print(p).find("lev++;") != std::string::npos);
}

TEST_CASE("corpus roundtrip") {
  for (const char *name : kCorpus) {
    Program p = parse_source(read_corpus(name));
    std::string text = pretty_print(p);
    Program q = parse_source(text);
    CHECK_MESSAGE(q == p, name);
    CHECK_MESSAGE(pretty_print(q) == text, name);
  }
}

TEST_CASE("sections and single") {
  Program p = parse_source(read_corpus("mst.fal"));
  bool saw_single = false;
  for (const auto &f : p.functions)
    visit_stmts(f.body, [&](const Stmt &s) {
      if (auto *sg = s.get_if<Single>()) {
        saw_single = true;
        CHECK(sg->else_branch.has_value());
      }
    });
  CHECK(saw_single);
  Program q = parse_source(read_corpus("cc_two_graphs.fal"));
  const Sections *sec = nullptr;
  for (const auto &s : q.main.body.stmts)
    if (auto *x = s.get_if<Sections>()) sec = x;
  REQUIRE(sec);
  CHECK(sec->sections.size() == 2);
}
