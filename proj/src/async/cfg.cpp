#include <algorithm>
#include <functional>

#include "gdsl/async.hpp"

namespace gdsl {

std::size_t Cfg::edge_count() const {
  std::size_t n = 0;
  for (const auto &nd : nodes) n += nd.successors.size();
  return n;
}

namespace {

bool conflicts(const AccessSet &r1, const AccessSet &w1, const AccessSet &r2,
               const AccessSet &w2) {
  return r1.intersects(w2) || w1.intersects(r2) || w1.intersects(w2);
}

bool constant_true(const Expr &e) {
  if (auto *i = e.get_if<IntLit>()) return i->value != 0;
  if (auto *b = e.get_if<BoolLit>()) return b->value;
  return false;
}

class Builder {
public:
  Builder(const Program &p, Cfg &cfg) : p_(p), cfg_(cfg) {}

  void build(const FunctionDecl &host) {
    std::vector<int> outs = seq(host.body.stmts, {});
    int exit = add(nullptr, CfgKind::Plain, true);
    connect(outs, exit);
    connect(returns_, exit);
    cfg_.exit = exit;
    cfg_.root = cfg_.nodes.size() > 1 ? 0 : exit;
  }

private:
  const Program &p_;
  Cfg &cfg_;
  std::vector<std::vector<int>> breaks_;
  std::vector<int> returns_;

  int add(const Stmt *s, CfgKind kind, bool control, const Expr *cond = nullptr) {
    CfgNode n;
    n.id = static_cast<int>(cfg_.nodes.size());
    n.stmt = s;
    n.kind = kind;
    n.control = control;
    if (s) {
      RWSets sets;
      if (cond) {
        Stmt probe{ExprStmt{*cond}, {}};
        sets = compute_stmt_rw_sets(p_, probe);
      } else if (!control) {
        sets = compute_stmt_rw_sets(p_, *s);
      }
      n.own_rset = n.rset = sets.read;
      n.own_wset = n.wset = sets.write;
    }
    cfg_.nodes.push_back(std::move(n));
    return cfg_.nodes.back().id;
  }

  void connect(const std::vector<int> &preds, int to) {
    for (int p : preds) {
      auto &succ = cfg_.nodes[static_cast<std::size_t>(p)].successors;
      if (std::find(succ.begin(), succ.end(), to) == succ.end()) succ.push_back(to);
    }
  }

  std::vector<int> seq(const std::vector<Stmt> &stmts, std::vector<int> preds) {
    for (const auto &s : stmts) preds = stmt(s, std::move(preds));
    return preds;
  }

  std::vector<int> stmt(const Stmt &s, std::vector<int> preds) {
    if (auto *b = s.get_if<Block>()) return seq(b->stmts, std::move(preds));
    if (auto *i = s.get_if<If>()) {
      int id = add(&s, CfgKind::Plain, true, &i->cond);
      connect(preds, id);
      std::vector<int> outs = stmt(*i->then_branch, {id});
      std::vector<int> other = i->else_branch ? stmt(**i->else_branch, {id}) : std::vector<int>{id};
      for (int o : other)
        if (std::find(outs.begin(), outs.end(), o) == outs.end()) outs.push_back(o);
      return outs;
    }
    if (auto *w = s.get_if<While>()) {
      int h = add(&s, CfgKind::Plain, true, &w->cond);
      connect(preds, h);
      breaks_.emplace_back();
      std::vector<int> body = stmt(*w->body, {h});
      connect(body, h);
      std::vector<int> exits = std::move(breaks_.back());
      breaks_.pop_back();
      if (!constant_true(w->cond)) exits.push_back(h);
      return exits;
    }
    if (s.is<Break>()) {
      int id = add(&s, CfgKind::Plain, true);
      connect(preds, id);
      if (!breaks_.empty()) breaks_.back().push_back(id);
      return {};
    }
    if (s.is<Return>()) {
      int id = add(&s, CfgKind::Plain, true);
      connect(preds, id);
      returns_.push_back(id);
      return {};
    }
    if (auto *sec = s.get_if<Sections>()) {
      int id = add(&s, CfgKind::Plain, true);
      connect(preds, id);
      std::vector<int> outs;
      for (const auto &b : sec->sections)
        for (int o : seq(b.stmts, {id}))
          if (std::find(outs.begin(), outs.end(), o) == outs.end()) outs.push_back(o);
      return outs;
    }
    CfgKind kind = launch_call(p_, s) ? CfgKind::KernelLaunch : CfgKind::Plain;
    int id = add(&s, kind, false);
    connect(preds, id);
    return {id};
  }
};

} // namespace

Cfg build_cfg(const Program &program, const FunctionDecl &host) {
  Cfg cfg;
  Builder(program, cfg).build(host);
  return cfg;
}

void count_predecessors(Cfg &cfg) {
  cfg.back_edges.clear();
  for (auto &n : cfg.nodes) n.predecessor_count = 0;
  // back-edges: edges into a node on the current DFS path
  std::vector<int> state(cfg.nodes.size(), 0); // 0 new, 1 on path, 2 done
  std::function<void(int)> dfs = [&](int u) {
    state[static_cast<std::size_t>(u)] = 1;
    for (int v : cfg.nodes[static_cast<std::size_t>(u)].successors) {
      if (state[static_cast<std::size_t>(v)] == 1) cfg.back_edges.insert({u, v});
      else if (state[static_cast<std::size_t>(v)] == 0) dfs(v);
    }
    state[static_cast<std::size_t>(u)] = 2;
  };
  dfs(cfg.root);
  for (const auto &n : cfg.nodes) {
    if (state[static_cast<std::size_t>(n.id)] == 0) continue;
    for (int v : n.successors)
      if (!cfg.back_edges.count({n.id, v})) ++cfg.nodes[static_cast<std::size_t>(v)].predecessor_count;
  }
}

std::size_t mark_barriers(Cfg &cfg) {
  for (auto &n : cfg.nodes) {
    n.visited = 0;
    n.barrier = false;
    n.rset = n.own_rset;
    n.wset = n.own_wset;
  }
  std::size_t visits = 0;
  std::function<void(int, int)> parallelize = [&](int id, int knode) {
    ++visits;
    CfgNode &node = cfg.nodes[static_cast<std::size_t>(id)];
    if (node.kind == CfgKind::KernelLaunch) {
      const AccessSet &rset = node.own_rset;
      const AccessSet &wset = node.own_wset;
      if (knode >= 0) {
        CfgNode &k = cfg.nodes[static_cast<std::size_t>(knode)];
        if (conflicts(rset, wset, k.rset, k.wset)) {
          k.barrier = true;
        } else {
          node.rset.merge(k.rset);
          node.wset.merge(k.wset);
        }
      }
      knode = id;
    } else if (knode >= 0) {
      CfgNode &k = cfg.nodes[static_cast<std::size_t>(knode)];
      if (conflicts(node.own_rset, node.own_wset, k.rset, k.wset)) {
        k.barrier = true;
        knode = -1;
      }
    }
    node.visited += 1;
    if (node.predecessor_count == 0 || node.visited == node.predecessor_count) {
      std::vector<int> succ = node.successors;
      for (int nd : succ) parallelize(nd, knode);
    }
  };
  if (!cfg.nodes.empty()) parallelize(cfg.root, -1);
  return visits;
}

const ConcurrentGroup *Schedule::group_of(const Stmt *launch, const Cfg &cfg) const {
  for (const auto &g : orderedGroups)
    for (int id : g.launches)
      if (cfg.nodes[static_cast<std::size_t>(id)].stmt == launch) return &g;
  return nullptr;
}

namespace {

bool joins_cleanly(const Cfg &cfg, int from, int to) {
  const CfgNode &a = cfg.nodes[static_cast<std::size_t>(from)];
  const CfgNode &b = cfg.nodes[static_cast<std::size_t>(to)];
  if (a.successors.size() != 1 || b.predecessor_count != 1) return false;
  for (const auto &[u, v] : cfg.back_edges)
    if (v == to) return false;
  return !b.control;
}

bool disjoint_from_all(const Cfg &cfg, int id, const std::vector<int> &members) {
  const CfgNode &n = cfg.nodes[static_cast<std::size_t>(id)];
  for (int m : members) {
    const CfgNode &o = cfg.nodes[static_cast<std::size_t>(m)];
    if (conflicts(n.own_rset, n.own_wset, o.own_rset, o.own_wset)) return false;
  }
  return true;
}

} // namespace

Schedule derive_schedule(const Cfg &cfg) {
  Schedule s;
  std::vector<bool> taken(cfg.nodes.size(), false);
  for (const auto &start : cfg.nodes) {
    if (start.kind != CfgKind::KernelLaunch || taken[static_cast<std::size_t>(start.id)]) continue;
    ConcurrentGroup g;
    g.members.push_back(start.id);
    g.launches.push_back(start.id);
    taken[static_cast<std::size_t>(start.id)] = true;
    int cur = start.id;
    int last_launch = start.id;
    while (!cfg.nodes[static_cast<std::size_t>(last_launch)].barrier) {
      const CfgNode &c = cfg.nodes[static_cast<std::size_t>(cur)];
      if (c.successors.empty()) break;
      int next = c.successors[0];
      if (!joins_cleanly(cfg, cur, next)) break;
      if (!disjoint_from_all(cfg, next, g.members)) break;
      const CfgNode &n = cfg.nodes[static_cast<std::size_t>(next)];
      g.members.push_back(next);
      taken[static_cast<std::size_t>(next)] = true;
      if (n.kind == CfgKind::KernelLaunch) {
        g.launches.push_back(next);
        last_launch = next;
      }
      cur = next;
    }
    // trailing plain statements run after the join instead
    while (g.members.back() != last_launch) {
      taken[static_cast<std::size_t>(g.members.back())] = false;
      g.members.pop_back();
    }
    for (int m : g.members) g.stmts.push_back(cfg.nodes[static_cast<std::size_t>(m)].stmt);
    g.barrierAfter = cfg.nodes[static_cast<std::size_t>(last_launch)].barrier;
    s.orderedGroups.push_back(std::move(g));
  }
  return s;
}

Schedule synchronous_schedule(const Cfg &cfg) {
  Schedule s;
  for (const auto &n : cfg.nodes)
    if (n.kind == CfgKind::KernelLaunch) {
      ConcurrentGroup g;
      g.members = {n.id};
      g.launches = {n.id};
      g.stmts = {n.stmt};
      g.barrierAfter = true;
      s.orderedGroups.push_back(std::move(g));
    }
  return s;
}

bool schedule_is_safe(const Cfg &cfg, const Schedule &s) {
  for (const auto &g : s.orderedGroups)
    for (std::size_t i = 0; i < g.members.size(); ++i) {
      std::vector<int> rest(g.members.begin() + static_cast<std::ptrdiff_t>(i) + 1, g.members.end());
      if (!disjoint_from_all(cfg, g.members[i], rest)) return false;
    }
  return true;
}

std::string dump_cfg(const Cfg &cfg) {
  std::string out;
  for (const auto &n : cfg.nodes) {
    out += std::to_string(n.id);
    out += n.kind == CfgKind::KernelLaunch ? " KERNEL_LAUNCH " : " PLAIN ";
    out += n.barrier ? "1 " : "0 ";
    out += std::to_string(n.predecessor_count) + " ->";
    for (std::size_t i = 0; i < n.successors.size(); ++i)
      out += (i ? "," : " ") + std::to_string(n.successors[i]);
    out += " R{" + n.own_rset.str() + "} W{" + n.own_wset.str() + "}\n";
  }
  return out;
}

Cfg analyze_main(const Program &program) {
  Cfg cfg = build_cfg(program, program.main);
  count_predecessors(cfg);
  mark_barriers(cfg);
  return cfg;
}

} // namespace gdsl
