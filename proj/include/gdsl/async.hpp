#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gdsl/ast.hpp"
#include "gdsl/semantic.hpp"

namespace gdsl {

enum class CfgKind { Plain, KernelLaunch };

struct CfgNode {
  int id = 0;
  const Stmt *stmt = nullptr; // null for the exit node
  CfgKind kind = CfgKind::Plain;
  bool control = false; // branch, loop header, break, return, sections fork, exit
  int visited = 0;
  bool barrier = false;
  int predecessor_count = 0;
  AccessSet rset; // grows by union while marking
  AccessSet wset;
  AccessSet own_rset; // the node's own sets, never widened
  AccessSet own_wset;
  std::vector<int> successors;
};

struct Cfg {
  int root = 0;
  int exit = 0;
  std::vector<CfgNode> nodes;
  std::set<std::pair<int, int>> back_edges; // filled by count_predecessors

  std::size_t edge_count() const;
};

// One node per simple statement, branch, loop header and launch, plus an exit
// node. Non-launch foreach statements are single plain nodes.
Cfg build_cfg(const Program &program, const FunctionDecl &host);

// In-degree over forward edges reachable from root; DFS back-edges are excluded.
void count_predecessors(Cfg &cfg);

// The recursive parallelize(node, knode) pass; returns the number of visits
// made (for termination checks).
std::size_t mark_barriers(Cfg &cfg);

struct ConcurrentGroup {
  // node ids in program order: launches and interleaved plain statements
  std::vector<int> members;
  std::vector<int> launches;
  std::vector<const Stmt *> stmts; // statements of `members`, same order
  bool barrierAfter = true;
};

struct Schedule {
  std::vector<ConcurrentGroup> orderedGroups;

  // Group containing the launch statement, or null.
  const ConcurrentGroup *group_of(const Stmt *launch, const Cfg &cfg) const;
};

Schedule derive_schedule(const Cfg &cfg);

// Every launch in its own group with a barrier after it.
Schedule synchronous_schedule(const Cfg &cfg);

// True when all members of every group are pairwise set-disjoint.
bool schedule_is_safe(const Cfg &cfg, const Schedule &s);

// `id kind barrier pred_count -> succ,... R{...} W{...}` per node.
std::string dump_cfg(const Cfg &cfg);

// build_cfg + count_predecessors + mark_barriers on main.
Cfg analyze_main(const Program &program);

} // namespace gdsl
