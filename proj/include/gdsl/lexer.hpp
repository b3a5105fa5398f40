#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace gdsl {

enum class TokenKind {
  // keywords
  Int,
  Float,
  Bool,
  Void,
  Graph,
  Point,
  Edge,
  Set,
  Collection,
  Foreach,
  In,
  If,
  Else,
  While,
  Break,
  Return,
  Single,
  Parallel,
  Sections,
  Section,
  True,
  False,
  // literals and names
  Ident,
  IntLit,
  FloatLit,
  // punctuation
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Comma,
  Semi,
  Dot,
  Eq,     // =
  EqEq,   // ==
  NotEq,  // !=
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  Bang,
  AndAnd,
  OrOr,
  PlusPlus,
  MinusMinus,
  PlusEq,
  MinusEq,
  Eof,
};

const char *token_kind_name(TokenKind k);

struct Token {
  TokenKind kind = TokenKind::Eof;
  std::string lexeme;
  int line = 1;
  int col = 1;
  std::size_t offset = 0;
};

// Splits source text into tokens; `//` comments and whitespace are dropped.
// Throws LexError on an illegal character.
std::vector<Token> tokenize(std::string_view source);

} // namespace gdsl
