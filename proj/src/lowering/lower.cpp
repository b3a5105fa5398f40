#include <algorithm>
#include <map>

#include "gdsl/lowering.hpp"

namespace gdsl {

Target Target::host(int threads) {
  Target t;
  t.kind = TargetKind::HostThreads;
  t.threadCount = std::max(1, threads);
  return t;
}

Target Target::device() {
  Target t;
  t.kind = TargetKind::SimDevice;
  t.deviceCount = 1;
  return t;
}

Target Target::multi(int devices) {
  Target t;
  t.kind = TargetKind::SimMultiDevice;
  t.deviceCount = std::max(2, devices);
  return t;
}

std::vector<int> LaunchGroupStep::kernels() const {
  std::vector<int> out;
  for (const auto &m : members)
    if (m.launch) out.push_back(m.site);
  return out;
}

std::set<std::string> objects_of(const AccessSet &a, const ExecutionPlan &plan) {
  std::set<std::string> out;
  for (const auto &g : a.globals)
    if (std::find(plan.deviceGlobals.begin(), plan.deviceGlobals.end(), g) !=
        plan.deviceGlobals.end())
      out.insert(g);
  for (const auto &[g, p] : a.properties) {
    if (p.empty()) out.insert(g);
    else if (p != "weight") out.insert(g + "." + p);
  }
  return out;
}

std::set<std::string> device_objects(const ExecutionPlan &plan) {
  std::set<std::string> out;
  if (plan.target.kind == TargetKind::HostThreads) return out;
  for (const auto &s : plan.sites) {
    out.merge(objects_of(s.sets.read, plan));
    out.merge(objects_of(s.sets.write, plan));
  }
  return out;
}

ObjectOrder::ObjectOrder(const Program &p) {
  int idx = 0;
  for (const auto &s : p.main.body.stmts)
    visit_stmts(s, [&](const Stmt &x) {
      if (auto *d = x.get_if<VarDecl>()) {
        if (d->type == TypeKind::Graph) rank.emplace(d->name, std::make_pair(0, idx++));
        if (d->type == TypeKind::Set || d->type == TypeKind::Collection)
          rank.emplace(d->name, std::make_pair(2, idx++));
      }
      if (auto *a = x.get_if<AddProperty>())
        rank.emplace(a->graph + "." + a->name, std::make_pair(1, idx++));
    });
  for (const auto &g : p.globals) rank.emplace(g.name, std::make_pair(3, idx++));
}

bool ObjectOrder::operator()(const std::string &a, const std::string &b) const {
  auto ra = rank.count(a) ? rank.at(a) : std::make_pair(4, 0);
  auto rb = rank.count(b) ? rank.at(b) : std::make_pair(4, 0);
  return ra != rb ? ra < rb : a < b;
}

std::vector<std::string> ObjectOrder::sorted(const std::set<std::string> &objs) const {
  std::vector<std::string> out(objs.begin(), objs.end());
  std::sort(out.begin(), out.end(), *this);
  return out;
}

namespace {

bool needs_structure(const Program &p, const Stmt &s) {
  bool found = false;
  visit_stmts(s, [&](const Stmt &x) {
    if (x.is<Break>() || x.is<Sections>() || x.is<While>() || launch_call(p, x)) found = true;
  });
  return found;
}

void flatten(const Stmt &s, std::vector<const Stmt *> &out) {
  if (auto *b = s.get_if<Block>()) {
    for (const auto &x : b->stmts) flatten(x, out);
  } else {
    out.push_back(&s);
  }
}

RWSets cond_sets(const Program &p, const Expr &cond) {
  Stmt probe{ExprStmt{cond}, {}};
  return compute_stmt_rw_sets(p, probe);
}

class Lowerer {
public:
  Lowerer(const Program &p, const Schedule &sched, const Target &t, ExecutionPlan &plan)
      : p_(p), t_(t), plan_(plan) {
    for (const auto &g : sched.orderedGroups)
      for (const Stmt *s : g.stmts) group_of_[s] = &g;
  }

  StepList list(const std::vector<const Stmt *> &roots, int device) {
    std::vector<const Stmt *> flat;
    for (const Stmt *s : roots) flatten(*s, flat);
    StepList out;
    for (std::size_t i = 0; i < flat.size(); ++i) {
      const Stmt &s = *flat[i];
      if (launch_call(p_, s)) {
        i = group(flat, i, device, out);
      } else if (auto *w = s.get_if<While>()) {
        LoopStep l{w->cond, cond_sets(p_, w->cond), {}};
        l.body = list({w->body.get()}, device);
        out.push_back({std::move(l)});
      } else if (auto *f = s.get_if<If>(); f && needs_structure(p_, s)) {
        BranchStep b{f->cond, cond_sets(p_, f->cond), {}, {}, false};
        b.then_steps = list({f->then_branch.get()}, device);
        if (f->else_branch) {
          b.has_else = true;
          b.else_steps = list({f->else_branch->get()}, device);
        }
        out.push_back({std::move(b)});
      } else if (s.is<Break>()) {
        out.push_back({BreakStep{}});
      } else if (auto *sec = s.get_if<Sections>()) {
        SectionsStep st;
        for (std::size_t k = 0; k < sec->sections.size(); ++k) {
          int dev = kHostDevice;
          if (t_.kind == TargetKind::SimDevice) dev = 0;
          if (t_.kind == TargetKind::SimMultiDevice)
            dev = static_cast<int>(k) % t_.deviceCount;
          std::vector<const Stmt *> roots;
          for (const auto &x : sec->sections[k].stmts) roots.push_back(&x);
          st.sections.push_back({dev, list(roots, dev)});
        }
        out.push_back({std::move(st)});
      } else {
        out.push_back({host_step(s)});
      }
    }
    return out;
  }

private:
  const Program &p_;
  const Target &t_;
  ExecutionPlan &plan_;
  std::map<const Stmt *, const ConcurrentGroup *> group_of_;

  HostStep host_step(const Stmt &s) {
    HostStep h{s, compute_stmt_rw_sets(p_, s), false};
    if (auto *a = s.get_if<Assign>(); a && a->op == AssignOp::Set)
      if (auto *v = a->target.get_if<VarRef>(); v && p_.is_global(v->name)) h.fullWrite = true;
    return h;
  }

  int site(const Stmt &s) {
    const Call *c = launch_call(p_, s);
    plan_.sites.push_back({s, c->callee, compute_stmt_rw_sets(p_, s)});
    return static_cast<int>(plan_.sites.size()) - 1;
  }

  // Consumes the group starting at flat[i]; returns the index of its last member.
  std::size_t group(const std::vector<const Stmt *> &flat, std::size_t i, int device,
                    StepList &out) {
    auto it = group_of_.find(flat[i]);
    const ConcurrentGroup *g =
        it != group_of_.end() && it->second->stmts.front() == flat[i] ? it->second : nullptr;
    bool single_thread = t_.kind == TargetKind::HostThreads && t_.threadCount == 1;
    if (!g || single_thread || g->stmts.size() == 1) {
      LaunchGroupStep l;
      l.device = device;
      l.members.push_back({true, site(*flat[i]), {}});
      l.barrierAfter = g && !single_thread ? g->barrierAfter : true;
      out.push_back({std::move(l)});
      return i;
    }
    LaunchGroupStep l;
    l.device = device;
    l.barrierAfter = g->barrierAfter;
    std::size_t j = i;
    for (std::size_t k = 0; k < g->stmts.size() && j < flat.size(); ++k, ++j) {
      if (flat[j] != g->stmts[k]) break;
      if (launch_call(p_, *flat[j])) l.members.push_back({true, site(*flat[j]), {}});
      else l.members.push_back({false, -1, host_step(*flat[j])});
    }
    // a truncated group must not end on a plain member
    while (!l.members.back().launch) {
      l.members.pop_back();
      --j;
    }
    if (j - i < g->stmts.size()) l.barrierAfter = true;
    out.push_back({std::move(l)});
    return j - 1;
  }
};

bool contains_sections(const Block &b) {
  bool found = false;
  for (const auto &s : b.stmts)
    visit_stmts(s, [&](const Stmt &x) {
      if (x.is<Sections>()) found = true;
    });
  return found;
}

using Needs = std::set<std::pair<int, std::string>>;

void launch_needs(const ExecutionPlan &plan, const KernelSite &site, int device, Needs &out) {
  for (const AccessSet *a : {&site.sets.read, &site.sets.write}) {
    for (const auto &o : objects_of(*a, plan)) out.insert({device, o});
    for (const auto &pr : a->properties)
      if (!pr.second.empty()) out.insert({device, pr.first});
  }
  if (auto *f = site.launch.get_if<Foreach>(); f && !f->info.value.graph.empty())
    out.insert({device, f->info.value.graph});
}

void step_needs(const ExecutionPlan &plan, const PlanStep &s, Needs &out) {
  std::visit(
      [&](const auto &n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, LaunchGroupStep>) {
          if (n.device == kHostDevice) return;
          for (int k : n.kernels())
            launch_needs(plan, plan.sites[static_cast<std::size_t>(k)], n.device, out);
        } else if constexpr (std::is_same_v<N, LoopStep>) {
          for (const auto &x : n.body) step_needs(plan, x, out);
        } else if constexpr (std::is_same_v<N, BranchStep>) {
          for (const auto &x : n.then_steps) step_needs(plan, x, out);
          for (const auto &x : n.else_steps) step_needs(plan, x, out);
        } else if constexpr (std::is_same_v<N, SectionsStep>) {
          for (const auto &sec : n.sections)
            for (const auto &x : sec.steps) step_needs(plan, x, out);
        }
      },
      s.node);
}

class AllocPass {
public:
  AllocPass(const ExecutionPlan &plan) : plan_(plan), order_(plan.program) {}

  StepList run(const StepList &steps, bool top) {
    std::set<std::string> declared;
    if (top)
      for (const auto &g : plan_.program.globals) declared.insert(g.name);
    for (const auto &s : steps) {
      auto *h = s.get_if<HostStep>();
      if (!h) continue;
      if (auto *d = h->stmt.get_if<VarDecl>()) declared.insert(d->name);
      if (auto *a = h->stmt.get_if<AddProperty>()) declared.insert(a->graph + "." + a->name);
    }
    StepList out;
    for (const auto &s : steps) {
      Needs needs;
      step_needs(plan_, s, needs);
      std::map<int, std::vector<std::string>> fresh;
      for (const auto &[d, o] : needs)
        if (declared.count(o) && !allocated_.count({d, o})) {
          allocated_.insert({d, o});
          fresh[d].push_back(o);
        }
      for (auto &[d, objs] : fresh) {
        std::sort(objs.begin(), objs.end(), order_);
        for (const auto &o : objs) out.push_back({AllocStep{d, o}});
      }
      out.push_back(recurse(s));
    }
    return out;
  }

private:
  const ExecutionPlan &plan_;
  ObjectOrder order_;
  Needs allocated_;

  PlanStep recurse(const PlanStep &s) {
    PlanStep c = s;
    if (auto *l = std::get_if<LoopStep>(&c.node)) l->body = run(l->body, false);
    if (auto *b = std::get_if<BranchStep>(&c.node)) {
      b->then_steps = run(b->then_steps, false);
      b->else_steps = run(b->else_steps, false);
    }
    if (auto *sec = std::get_if<SectionsStep>(&c.node))
      for (auto &x : sec->sections) x.steps = run(x.steps, false);
    return c;
  }
};

} // namespace

ExecutionPlan insert_allocs(const ExecutionPlan &plan) {
  if (plan.target.kind == TargetKind::HostThreads) return plan;
  ExecutionPlan out = plan;
  out.steps = AllocPass(plan).run(plan.steps, true);
  return out;
}

ExecutionPlan lower(const Program &program, const Schedule &schedule, const Target &target) {
  if (target.threadCount < 1 || target.deviceCount < 1)
    throw LoweringError("target needs at least one thread and one device");
  if (target.kind == TargetKind::SimMultiDevice && !contains_sections(program.main.body))
    throw LoweringError("multi-device target requires a parallel sections statement in main");
  ExecutionPlan plan;
  plan.target = target;
  plan.program = program;
  int device = target.kind == TargetKind::HostThreads ? kHostDevice : 0;
  std::vector<const Stmt *> roots;
  for (const auto &s : program.main.body.stmts) roots.push_back(&s);
  plan.steps = Lowerer(program, schedule, target, plan).list(roots, device);

  std::set<std::string> used;
  for (const auto &s : plan.sites) used.insert(s.function);
  std::set<std::string> globals;
  for (const auto &f : program.functions) {
    if (!used.count(f.name)) continue;
    plan.kernels.push_back(f.name);
    RWSets sets = compute_rw_sets(program, f);
    globals.insert(sets.read.globals.begin(), sets.read.globals.end());
    globals.insert(sets.write.globals.begin(), sets.write.globals.end());
  }
  for (const auto &g : program.globals)
    if (globals.count(g.name)) plan.deviceGlobals.push_back(g.name);
  return insert_transfers(insert_allocs(plan));
}

} // namespace gdsl
