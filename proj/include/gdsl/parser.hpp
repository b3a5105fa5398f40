#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gdsl/ast.hpp"
#include "gdsl/lexer.hpp"

namespace gdsl {

// Parses a token stream (ending in Eof) into a Program. Throws ParseError.
Program parse(const std::vector<Token> &tokens);

// tokenize + parse.
Program parse_source(std::string_view source);

// Canonical rendering; parse(pretty_print(p)) == p.
std::string pretty_print(const Program &program);
std::string print_expr(const Expr &e);
// Renders one statement at the given indent (two spaces per level), no trailing newline.
std::string print_stmt(const Stmt &s, int indent = 0);
std::string print_function(const FunctionDecl &f);

} // namespace gdsl
