#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gdsl/ast.hpp"
#include "gdsl/async.hpp"
#include "gdsl/semantic.hpp"

namespace gdsl {

enum class TargetKind { HostThreads, SimDevice, SimMultiDevice };

// Abstract cost units.
struct CostModel {
  double perEdgeWork = 1;
  double perVertexWork = 1;
  double transferLatency = 100;
  double transferPerByte = 0.01;
};

struct Target {
  TargetKind kind = TargetKind::HostThreads;
  int threadCount = 1;
  int deviceCount = 1;
  CostModel cost;

  static Target host(int threads);
  static Target device();
  static Target multi(int devices);
};

class LoweringError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kHostDevice = -1;

enum class Direction { ToHost, ToDevice };

// One launch statement (`foreach ... kernel(args);`) of the lowered program.
struct KernelSite {
  Stmt launch;
  std::string function;
  RWSets sets; // sets of the launch statement
};

struct PlanStep;
using StepList = std::vector<PlanStep>;

struct HostStep {
  Stmt stmt;
  RWSets sets;
  bool fullWrite = false; // plain `g = expr;` of a scalar global
};

struct GroupMember {
  bool launch = false;
  int site = -1;  // launch members
  HostStep host;  // plain members
};

struct LaunchGroupStep {
  int device = kHostDevice;
  std::vector<GroupMember> members; // program order
  bool barrierAfter = true;

  std::vector<int> kernels() const; // site ids of the launch members
};

struct TransferStep {
  int device = 0;
  std::string object;
  Direction direction = Direction::ToDevice;
  bool wholeArray = false;
};

struct AllocStep {
  int device = 0;
  std::string object;
};

struct LoopStep {
  Expr cond;
  RWSets condSets;
  StepList body;
};

struct BranchStep {
  Expr cond;
  RWSets condSets;
  StepList then_steps;
  StepList else_steps;
  bool has_else = false;
};

struct BreakStep {};

struct SectionPlan {
  int device = kHostDevice;
  StepList steps;
};

struct SectionsStep {
  std::vector<SectionPlan> sections;
};

struct PlanStep {
  using Node = std::variant<HostStep, LaunchGroupStep, TransferStep, AllocStep, LoopStep,
                            BranchStep, BreakStep, SectionsStep>;
  Node node;

  template <typename T> bool is() const { return std::holds_alternative<T>(node); }
  template <typename T> T &as() { return std::get<T>(node); }
  template <typename T> const T &as() const { return std::get<T>(node); }
  template <typename T> const T *get_if() const { return std::get_if<T>(&node); }
};

struct ExecutionPlan {
  Target target;
  Program program;                 // globals and function bodies for the executor
  std::vector<std::string> kernels; // target functions, declaration order
  std::vector<KernelSite> sites;
  std::vector<std::string> deviceGlobals; // globals used inside target functions
  StepList steps;
};

// Lowers main. `schedule` must have been derived from a CFG of this very
// `program` object (statement identity is used to find groups); launches
// missing from it become singleton groups with a barrier.
ExecutionPlan lower(const Program &program, const Schedule &schedule, const Target &target);

// Adds DeviceAlloc steps (before the outermost step that first needs them).
ExecutionPlan insert_allocs(const ExecutionPlan &plan);

// Residency-driven host/device Transfer insertion. Identity on HostThreads plans.
ExecutionPlan insert_transfers(const ExecutionPlan &plan);

// One step per line, two-space nesting; kernels and sites first.
std::string emit_text(const ExecutionPlan &plan);

// Object names tracked for residency: device globals, `graph.prop`, sets and
// collections. Graph topology and edge weights are never transferred.
std::set<std::string> device_objects(const ExecutionPlan &plan);
std::set<std::string> objects_of(const AccessSet &a, const ExecutionPlan &plan);

// Declaration order of objects in main: graphs, then properties, then sets
// and collections, then globals.
struct ObjectOrder {
  std::map<std::string, std::pair<int, int>> rank; // object -> (kind, index)

  explicit ObjectOrder(const Program &p);
  bool operator()(const std::string &a, const std::string &b) const;
  std::vector<std::string> sorted(const std::set<std::string> &objs) const;
};

// Replays every path of the plan (loops to a fixpoint over the set of reachable
// residency states) and reports each stale read, stale transfer source or
// missing allocation. Empty means coherent.
std::vector<std::string> replay_residency(const ExecutionPlan &plan);

// Counts of steps, recursively.
std::size_t count_transfers(const StepList &steps, Direction dir, const std::string &object = "");
std::size_t count_launch_groups(const StepList &steps);

} // namespace gdsl
