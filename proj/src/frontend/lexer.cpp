#include "gdsl/lexer.hpp"

#include <cctype>
#include <unordered_map>

#include "gdsl/diagnostics.hpp"

namespace gdsl {

const char *token_kind_name(TokenKind k) {
  switch (k) {
  case TokenKind::Int: return "'int'";
  case TokenKind::Float: return "'float'";
  case TokenKind::Bool: return "'bool'";
  case TokenKind::Void: return "'void'";
  case TokenKind::Graph: return "'Graph'";
  case TokenKind::Point: return "'Point'";
  case TokenKind::Edge: return "'Edge'";
  case TokenKind::Set: return "'Set'";
  case TokenKind::Collection: return "'Collection'";
  case TokenKind::Foreach: return "'foreach'";
  case TokenKind::In: return "'In'";
  case TokenKind::If: return "'if'";
  case TokenKind::Else: return "'else'";
  case TokenKind::While: return "'while'";
  case TokenKind::Break: return "'break'";
  case TokenKind::Return: return "'return'";
  case TokenKind::Single: return "'single'";
  case TokenKind::Parallel: return "'parallel'";
  case TokenKind::Sections: return "'sections'";
  case TokenKind::Section: return "'section'";
  case TokenKind::True: return "'true'";
  case TokenKind::False: return "'false'";
  case TokenKind::Ident: return "identifier";
  case TokenKind::IntLit: return "integer literal";
  case TokenKind::FloatLit: return "float literal";
  case TokenKind::LParen: return "'('";
  case TokenKind::RParen: return "')'";
  case TokenKind::LBrace: return "'{'";
  case TokenKind::RBrace: return "'}'";
  case TokenKind::LBracket: return "'['";
  case TokenKind::RBracket: return "']'";
  case TokenKind::Comma: return "','";
  case TokenKind::Semi: return "';'";
  case TokenKind::Dot: return "'.'";
  case TokenKind::Eq: return "'='";
  case TokenKind::EqEq: return "'=='";
  case TokenKind::NotEq: return "'!='";
  case TokenKind::Lt: return "'<'";
  case TokenKind::Le: return "'<='";
  case TokenKind::Gt: return "'>'";
  case TokenKind::Ge: return "'>='";
  case TokenKind::Plus: return "'+'";
  case TokenKind::Minus: return "'-'";
  case TokenKind::Star: return "'*'";
  case TokenKind::Slash: return "'/'";
  case TokenKind::Percent: return "'%'";
  case TokenKind::Bang: return "'!'";
  case TokenKind::AndAnd: return "'&&'";
  case TokenKind::OrOr: return "'||'";
  case TokenKind::PlusPlus: return "'++'";
  case TokenKind::MinusMinus: return "'--'";
  case TokenKind::PlusEq: return "'+='";
  case TokenKind::MinusEq: return "'-='";
  case TokenKind::Eof: return "end of input";
  }
  return "?";
}

namespace {

const std::unordered_map<std::string_view, TokenKind> &keywords() {
  static const std::unordered_map<std::string_view, TokenKind> table = {
      {"int", TokenKind::Int},
      {"float", TokenKind::Float},
      {"bool", TokenKind::Bool},
      {"void", TokenKind::Void},
      {"Graph", TokenKind::Graph},
      {"Point", TokenKind::Point},
      {"Edge", TokenKind::Edge},
      {"Edges", TokenKind::Edge}, // accepted alias
      {"Set", TokenKind::Set},
      {"Collection", TokenKind::Collection},
      {"foreach", TokenKind::Foreach},
      {"In", TokenKind::In},
      {"if", TokenKind::If},
      {"else", TokenKind::Else},
      {"while", TokenKind::While},
      {"break", TokenKind::Break},
      {"return", TokenKind::Return},
      {"single", TokenKind::Single},
      {"parallel", TokenKind::Parallel},
      {"sections", TokenKind::Sections},
      {"section", TokenKind::Section},
      {"true", TokenKind::True},
      {"false", TokenKind::False},
  };
  return table;
}

struct TwoChar {
  char a, b;
  TokenKind kind;
};

constexpr TwoChar kTwoChar[] = {
    {'=', '=', TokenKind::EqEq},     {'!', '=', TokenKind::NotEq},
    {'<', '=', TokenKind::Le},       {'>', '=', TokenKind::Ge},
    {'&', '&', TokenKind::AndAnd},   {'|', '|', TokenKind::OrOr},
    {'+', '+', TokenKind::PlusPlus}, {'-', '-', TokenKind::MinusMinus},
    {'+', '=', TokenKind::PlusEq},   {'-', '=', TokenKind::MinusEq},
};

bool one_char(char c, TokenKind &kind) {
  switch (c) {
  case '(': kind = TokenKind::LParen; return true;
  case ')': kind = TokenKind::RParen; return true;
  case '{': kind = TokenKind::LBrace; return true;
  case '}': kind = TokenKind::RBrace; return true;
  case '[': kind = TokenKind::LBracket; return true;
  case ']': kind = TokenKind::RBracket; return true;
  case ',': kind = TokenKind::Comma; return true;
  case ';': kind = TokenKind::Semi; return true;
  case '.': kind = TokenKind::Dot; return true;
  case '=': kind = TokenKind::Eq; return true;
  case '<': kind = TokenKind::Lt; return true;
  case '>': kind = TokenKind::Gt; return true;
  case '+': kind = TokenKind::Plus; return true;
  case '-': kind = TokenKind::Minus; return true;
  case '*': kind = TokenKind::Star; return true;
  case '/': kind = TokenKind::Slash; return true;
  case '%': kind = TokenKind::Percent; return true;
  case '!': kind = TokenKind::Bang; return true;
  default: return false;
  }
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

} // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }

    Token tok;
    tok.line = line;
    tok.col = col;
    tok.offset = i;
    std::size_t len = 0;

    if (ident_start(c)) {
      while (i + len < src.size() && ident_char(src[i + len])) ++len;
      std::string_view word = src.substr(i, len);
      auto it = keywords().find(word);
      tok.kind = it == keywords().end() ? TokenKind::Ident : it->second;
    } else if (digit(c)) {
      while (i + len < src.size() && digit(src[i + len])) ++len;
      tok.kind = TokenKind::IntLit;
      if (i + len + 1 < src.size() && src[i + len] == '.' && digit(src[i + len + 1])) {
        ++len;
        while (i + len < src.size() && digit(src[i + len])) ++len;
        tok.kind = TokenKind::FloatLit;
      }
    } else {
      bool matched = false;
      if (i + 1 < src.size()) {
        for (const auto &tc : kTwoChar) {
          if (tc.a == c && tc.b == src[i + 1]) {
            tok.kind = tc.kind;
            len = 2;
            matched = true;
            break;
          }
        }
      }
      if (!matched) {
        if (!one_char(c, tok.kind)) {
          std::string shown = std::isprint(static_cast<unsigned char>(c))
                                  ? std::string(1, c)
                                  : "\\x" + std::to_string(static_cast<unsigned char>(c));
          throw LexError(line, col, "illegal character '" + shown + "'");
        }
        len = 1;
      }
    }
    tok.lexeme = std::string(src.substr(i, len));
    advance(len);
    out.push_back(std::move(tok));
  }

  Token eof;
  eof.kind = TokenKind::Eof;
  eof.line = line;
  eof.col = col;
  eof.offset = src.size();
  out.push_back(std::move(eof));
  return out;
}

} // namespace gdsl
