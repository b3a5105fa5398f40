#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gdsl/ast.hpp"
#include "gdsl/diagnostics.hpp"

namespace gdsl {

enum class StorageClass { Global, Param, Local, Property, Builtin };

struct Symbol {
  TypeKind type = TypeKind::Unknown;
  StorageClass storage = StorageClass::Local;
  std::string graph; // Point/Edge binding, or ctor graph of Set/Collection
};

struct FunctionSig {
  TypeKind ret = TypeKind::Void;
  std::vector<Param> params;
};

class SymbolTable {
public:
  SymbolTable();

  void push_scope();
  void pop_scope();
  // False if the name already exists in the innermost scope.
  bool declare(const std::string &name, Symbol sym);
  const Symbol *lookup(const std::string &name) const;
  std::size_t depth() const { return scopes_.size(); }

  // Property namespace, per graph variable.
  bool declare_property(const std::string &graph, const std::string &name, TypeKind type,
                        bool edge);
  // Type of property `name` on `graph`; when graph is empty or unknown, any graph's
  // declaration is accepted. Unknown if undeclared.
  TypeKind property_type(const std::string &graph, const std::string &name, bool edge) const;
  const std::map<std::string, std::map<std::string, TypeKind>> &point_properties() const {
    return point_props_;
  }
  const std::map<std::string, std::map<std::string, TypeKind>> &edge_properties() const {
    return edge_props_;
  }

  std::map<std::string, FunctionSig> functions;

private:
  std::vector<std::map<std::string, Symbol>> scopes_;
  std::map<std::string, std::map<std::string, TypeKind>> point_props_;
  std::map<std::string, std::map<std::string, TypeKind>> edge_props_;
};

struct Resolved {
  Program program;
  SymbolTable symbols; // global scope only, plus properties and function signatures
};

// Binds names, types expressions and marks outer foreach statements.
// Throws SemanticErrors listing every problem found.
Resolved resolve(const Program &program);

// Reads/writes of globals and shared state. A property is keyed by
// (graph variable, property name); Set and Collection objects appear
// with an empty property name.
struct AccessSet {
  std::set<std::string> globals;
  std::set<std::pair<std::string, std::string>> properties;

  bool empty() const { return globals.empty() && properties.empty(); }
  void merge(const AccessSet &other);
  bool intersects(const AccessSet &other) const;
  bool has_property(const std::string &name) const; // any graph
  // Sorted, comma separated: "changed, graph.dist".
  std::string str() const;
  bool operator==(const AccessSet &) const = default;
};

struct RWSets {
  AccessSet read;
  AccessSet write;
  bool operator==(const RWSets &) const = default;
};

// Flow-insensitive sets of a function body, including its callees. Property
// graphs are named by the function's own parameters. Throws SemanticError on
// recursive call chains.
RWSets compute_rw_sets(const Program &program, const FunctionDecl &fn);

// Sets of one statement of a host function. For a launch (foreach whose body is
// a single target call) this is the callee's sets mapped to the call-site
// arguments, plus the filter and argument reads.
RWSets compute_stmt_rw_sets(const Program &program, const Stmt &stmt);

struct TargetFunctionInfo {
  std::string function;
  const Stmt *callSite = nullptr;     // the enclosing Foreach
  const FunctionDecl *host = nullptr; // function containing the call site
  bool outer = false;
  RWSets fn;     // sets of the callee, in callee parameter names
  RWSets launch; // sets of the launch statement as a whole
};

// The call expression of a launch, or null when `stmt` is not a foreach whose
// body is exactly one call of a user function.
const Call *launch_call(const Program &program, const Stmt &stmt);

std::vector<TargetFunctionInfo> find_target_functions(const Program &program);

} // namespace gdsl
