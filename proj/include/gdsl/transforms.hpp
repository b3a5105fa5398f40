#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "gdsl/ast.hpp"

namespace gdsl {

struct TransformReport {
  bool applied = false;
  SourceLoc rewrittenForeach;
  std::string rewrittenFunction;
  std::vector<std::string> rewrittenFunctions;
  std::string reason; // why nothing was rewritten
  std::vector<std::string> removedGlobals;
};

struct TransformResult {
  Program program;
  TransformReport report;
};

// Each transform returns its input unchanged (and applied=false) when the
// program is not eligible. Ill-formed input raises SemanticErrors.
TransformResult vertex_to_edge(const Program &program);
TransformResult edge_to_vertex(const Program &program);
TransformResult to_worklist(const Program &program);

// Renames every parameter, local and iteration variable to `_l0`, `_l1`, ...
// in declaration order (per function) and unwraps single-statement blocks
// used as foreach bodies. Globals and function names are kept.
Program alpha_normalize(const Program &program);
bool alpha_equivalent(const Program &a, const Program &b);

// --- helpers shared by the rewrites ---

// Every name declared or referenced anywhere in the function, plus globals.
std::set<std::string> names_in_use(const Program &program, const FunctionDecl &fn);
std::string fresh_name(const std::string &base, const std::set<std::string> &used);
// Replaces each VarRef `name` (post-order) with a copy of `with`.
void substitute_var(Stmt &s, const std::string &name, const Expr &with);
void substitute_var(Expr &e, const std::string &name, const Expr &with);
bool mentions_var(const Stmt &s, const std::string &name);
bool mentions_var(const Expr &e, const std::string &name);

} // namespace gdsl
