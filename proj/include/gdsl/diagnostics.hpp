#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gdsl/ast.hpp"

namespace gdsl {

// Base for every error that carries a source position.
class Diagnostic : public std::runtime_error {
public:
  Diagnostic(std::string kind, int line, int col, const std::string &message)
      : std::runtime_error(format(kind, line, col, message)), kind_(std::move(kind)),
        line_(line), col_(col), message_(message) {}

  const std::string &kind() const { return kind_; }
  int line() const { return line_; }
  int col() const { return col_; }
  const std::string &message() const { return message_; }

private:
  static std::string format(const std::string &kind, int line, int col,
                            const std::string &message) {
    return kind + " at " + std::to_string(line) + ":" + std::to_string(col) + ": " + message;
  }

  std::string kind_;
  int line_;
  int col_;
  std::string message_;
};

class LexError : public Diagnostic {
public:
  LexError(int line, int col, const std::string &message)
      : Diagnostic("lex error", line, col, message) {}
};

class ParseError : public Diagnostic {
public:
  ParseError(int line, int col, std::string expected, std::string found)
      : Diagnostic("parse error", line, col,
                   "expected " + expected + ", found " + found),
        expected_(std::move(expected)), found_(std::move(found)) {}

  const std::string &expected() const { return expected_; }
  const std::string &found() const { return found_; }

private:
  std::string expected_;
  std::string found_;
};

struct SemanticError {
  SourceLoc loc;
  std::string message;
};

// All semantic errors of one resolve() pass.
class SemanticErrors : public std::runtime_error {
public:
  explicit SemanticErrors(std::vector<SemanticError> errors)
      : std::runtime_error(render(errors)), errors_(std::move(errors)) {}

  const std::vector<SemanticError> &errors() const { return errors_; }

private:
  static std::string render(const std::vector<SemanticError> &errors) {
    std::string out;
    for (const auto &e : errors) {
      if (!out.empty()) out += '\n';
      out += "semantic error at " + std::to_string(e.loc.line) + ":" +
             std::to_string(e.loc.col) + ": " + e.message;
    }
    return out;
  }

  std::vector<SemanticError> errors_;
};

} // namespace gdsl
