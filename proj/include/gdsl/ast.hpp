#pragma once

// Abstract syntax tree of the graph DSL.
//
// Nodes are plain value types. Structural equality (operator==) ignores
// source locations and semantic annotations, so two trees compare equal
// iff they print to the same canonical text.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gdsl {

struct SourceLoc {
  int line = 0;
  int col = 0;
  bool operator==(const SourceLoc &) const { return true; }
};

// Heap-allocated value with deep copy and deep comparison.
template <typename T> class Box {
public:
  Box() : ptr_(std::make_unique<T>()) {}
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box &other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box &&) noexcept = default;
  Box &operator=(const Box &other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box &operator=(Box &&) noexcept = default;

  T &operator*() { return *ptr_; }
  const T &operator*() const { return *ptr_; }
  T *operator->() { return ptr_.get(); }
  const T *operator->() const { return ptr_.get(); }
  T *get() { return ptr_.get(); }
  const T *get() const { return ptr_.get(); }

  bool operator==(const Box &other) const { return *ptr_ == *other.ptr_; }

private:
  std::unique_ptr<T> ptr_;
};

// Annotation slot filled by semantic analysis; invisible to equality.
template <typename T> struct Annot {
  T value{};
  bool operator==(const Annot &) const { return true; }
};

enum class TypeKind {
  Unknown,
  Void,
  Int,
  Float,
  Bool,
  Graph,
  Point,
  Edge,
  Set,
  Collection,
};

const char *type_name(TypeKind t);
bool is_object_type(TypeKind t); // Graph, Set, Collection
bool is_scalar_type(TypeKind t); // Int, Float, Bool, Point, Edge

enum class IteratorKind {
  Points,
  Edges,
  Nbrs,
  InNbrs,
  OutNbrs,
  Items, // resolved to set or collection items by semantic analysis
};

const char *iterator_name(IteratorKind k);

enum class ItemsKind { None, SetItems, CollectionItems };

enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

const char *op_text(BinaryOp op);
int op_precedence(BinaryOp op);

// Semantic annotation attached to expressions.
struct ExprInfo {
  TypeKind type = TypeKind::Unknown;
  std::string graph;    // graph variable a Point/Edge (or property access) belongs to
  std::string property; // set on Member nodes that read a point/edge property
  bool edge_property = false;
  bool global = false;  // VarRef bound to a global variable
};

struct Expr;

struct IntLit {
  std::int64_t value = 0;
  bool operator==(const IntLit &) const = default;
};
struct FloatLit {
  double value = 0;
  bool operator==(const FloatLit &) const = default;
};
struct BoolLit {
  bool value = false;
  bool operator==(const BoolLit &) const = default;
};
struct VarRef {
  std::string name;
  bool operator==(const VarRef &) const = default;
};
// `obj.field`: point/edge properties, e.src, e.dst, e.weight, graph.points ...
struct Member {
  Box<Expr> object;
  std::string field;
  bool operator==(const Member &) const = default;
};
struct Index {
  Box<Expr> object;
  Box<Expr> index;
  bool operator==(const Index &) const = default;
};
// Free call: user function or builtin (MIN, MAX, RADD, RMUL).
struct Call {
  std::string callee;
  std::vector<Expr> args;
  bool operator==(const Call &) const = default;
};
struct MethodCall {
  Box<Expr> object;
  std::string method;
  std::vector<Expr> args;
  bool operator==(const MethodCall &) const = default;
};
struct Unary {
  UnaryOp op{};
  Box<Expr> operand;
  bool operator==(const Unary &) const = default;
};
struct Binary {
  BinaryOp op{};
  Box<Expr> lhs;
  Box<Expr> rhs;
  bool operator==(const Binary &) const = default;
};

struct Expr {
  using Node = std::variant<IntLit, FloatLit, BoolLit, VarRef, Member, Index, Call,
                            MethodCall, Unary, Binary>;
  Node node;
  SourceLoc loc;
  Annot<ExprInfo> info;

  template <typename T> bool is() const { return std::holds_alternative<T>(node); }
  template <typename T> T &as() { return std::get<T>(node); }
  template <typename T> const T &as() const { return std::get<T>(node); }
  template <typename T> T *get_if() { return std::get_if<T>(&node); }
  template <typename T> const T *get_if() const { return std::get_if<T>(&node); }

  bool operator==(const Expr &) const = default;
};

Expr make_int(std::int64_t v, SourceLoc loc = {});
Expr make_var(std::string name, SourceLoc loc = {});
Expr make_member(Expr object, std::string field, SourceLoc loc = {});
Expr make_binary(BinaryOp op, Expr lhs, Expr rhs, SourceLoc loc = {});
Expr make_call(std::string callee, std::vector<Expr> args, SourceLoc loc = {});
Expr make_method(Expr object, std::string method, std::vector<Expr> args, SourceLoc loc = {});

struct Stmt;

struct Block {
  std::vector<Stmt> stmts;
  bool operator==(const Block &) const = default;
};

// `int x = 0;`, `Point (graph) p = e.src;`, `Set s(graph);`,
// `Collection<Point> wl(graph, dist);`
struct VarDecl {
  TypeKind type = TypeKind::Int;
  std::string name;
  std::string graph;    // `(graph)` binding of Point/Edge, or ctor graph of Set/Collection
  std::string keyProp;  // Collection priority property (delta-stepping key)
  std::optional<Expr> init;
  bool operator==(const VarDecl &) const = default;
};

enum class AssignOp { Set, Add, Sub };

struct Assign {
  Expr target;
  AssignOp op = AssignOp::Set;
  Expr value;
  bool operator==(const Assign &) const = default;
};
struct If {
  Expr cond;
  Box<Stmt> then_branch;
  std::optional<Box<Stmt>> else_branch;
  bool operator==(const If &) const = default;
};
struct While {
  Expr cond;
  Box<Stmt> body;
  bool operator==(const While &) const = default;
};
struct Break {
  bool operator==(const Break &) const = default;
};
struct Return {
  std::optional<Expr> value;
  bool operator==(const Return &) const = default;
};
struct ExprStmt {
  Expr expr;
  bool operator==(const ExprStmt &) const = default;
};

struct ForeachInfo {
  bool outer = false;              // level-0 foreach over points/edges
  ItemsKind items = ItemsKind::None;
  std::string graph;               // graph iterated (points/edges/nbrs)
};

// `foreach (v In subject.iterator) (filter) body`
struct Foreach {
  std::string var;
  Expr subject;
  IteratorKind iterator = IteratorKind::Points;
  std::optional<Expr> filter;
  Box<Stmt> body;
  Annot<ForeachInfo> info;
  bool operator==(const Foreach &) const = default;
};
// `single (t) {...} else {...}`; multiple targets lock all of them.
struct Single {
  std::vector<Expr> targets;
  Box<Stmt> then_branch;
  std::optional<Box<Stmt>> else_branch;
  bool operator==(const Single &) const = default;
};
struct Sections {
  std::vector<Block> sections;
  bool operator==(const Sections &) const = default;
};
// `graph.addPointProperty(dist, int);` / `graph.addEdgeProperty(...)`
struct AddProperty {
  std::string graph;
  std::string name;
  TypeKind type = TypeKind::Int;
  bool edge = false;
  bool operator==(const AddProperty &) const = default;
};
// `graph.read(argv[k]);`
struct ReadGraph {
  std::string graph;
  int arg = 1;
  bool operator==(const ReadGraph &) const = default;
};

struct Stmt {
  using Node = std::variant<VarDecl, Assign, If, While, Break, Return, ExprStmt, Foreach,
                            Single, Sections, Block, AddProperty, ReadGraph>;
  Node node;
  SourceLoc loc;

  template <typename T> bool is() const { return std::holds_alternative<T>(node); }
  template <typename T> T &as() { return std::get<T>(node); }
  template <typename T> const T &as() const { return std::get<T>(node); }
  template <typename T> T *get_if() { return std::get_if<T>(&node); }
  template <typename T> const T *get_if() const { return std::get_if<T>(&node); }

  bool operator==(const Stmt &) const = default;
};

struct Param {
  TypeKind type = TypeKind::Int;
  std::string name;
  bool operator==(const Param &) const = default;
};

struct FunctionDecl {
  TypeKind ret = TypeKind::Void;
  std::string name;
  std::vector<Param> params;
  bool argv = false; // main(int argc, char *argv[])
  Block body;
  SourceLoc loc;
  bool operator==(const FunctionDecl &) const = default;
};

struct Program {
  std::vector<VarDecl> globals;
  std::vector<SourceLoc> global_locs;
  std::vector<FunctionDecl> functions;
  FunctionDecl main;

  const FunctionDecl *find_function(const std::string &name) const;
  FunctionDecl *find_function(const std::string &name);
  bool is_global(const std::string &name) const;
  bool operator==(const Program &other) const {
    return globals == other.globals && functions == other.functions && main == other.main;
  }
};

// Generic pre-order visitors over statement trees.
template <typename F> void visit_stmts(const Stmt &s, F &&f);
template <typename F> void visit_stmts(const Block &b, F &&f) {
  for (const auto &s : b.stmts) visit_stmts(s, f);
}
template <typename F> void visit_stmts(const Stmt &s, F &&f) {
  f(s);
  if (auto *b = s.get_if<Block>()) {
    visit_stmts(*b, f);
  } else if (auto *i = s.get_if<If>()) {
    visit_stmts(*i->then_branch, f);
    if (i->else_branch) visit_stmts(**i->else_branch, f);
  } else if (auto *w = s.get_if<While>()) {
    visit_stmts(*w->body, f);
  } else if (auto *fe = s.get_if<Foreach>()) {
    visit_stmts(*fe->body, f);
  } else if (auto *sg = s.get_if<Single>()) {
    visit_stmts(*sg->then_branch, f);
    if (sg->else_branch) visit_stmts(**sg->else_branch, f);
  } else if (auto *sec = s.get_if<Sections>()) {
    for (const auto &blk : sec->sections) visit_stmts(blk, f);
  }
}

// Pre-order visit of every expression reachable from an expression.
template <typename F> void visit_exprs(const Expr &e, F &&f) {
  f(e);
  std::visit(
      [&](const auto &n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Member>) {
          visit_exprs(*n.object, f);
        } else if constexpr (std::is_same_v<N, Index>) {
          visit_exprs(*n.object, f);
          visit_exprs(*n.index, f);
        } else if constexpr (std::is_same_v<N, Call>) {
          for (const auto &a : n.args) visit_exprs(a, f);
        } else if constexpr (std::is_same_v<N, MethodCall>) {
          visit_exprs(*n.object, f);
          for (const auto &a : n.args) visit_exprs(a, f);
        } else if constexpr (std::is_same_v<N, Unary>) {
          visit_exprs(*n.operand, f);
        } else if constexpr (std::is_same_v<N, Binary>) {
          visit_exprs(*n.lhs, f);
          visit_exprs(*n.rhs, f);
        }
      },
      e.node);
}

// Mutable variants used by rewrites.
void for_each_expr_mut(Stmt &s, const std::function<void(Expr &)> &f);
void for_each_expr_mut(Expr &e, const std::function<void(Expr &)> &f);

} // namespace gdsl
