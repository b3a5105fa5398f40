#include <algorithm>
#include <map>

#include "gdsl/lowering.hpp"

namespace gdsl {

namespace {

// object -> locations holding its latest value (kHostDevice for the host)
using Fresh = std::map<std::string, std::set<int>>;

bool constant_true(const Expr &e) {
  if (auto *i = e.get_if<IntLit>()) return i->value != 0;
  if (auto *b = e.get_if<BoolLit>()) return b->value;
  return false;
}

bool whole_array(const ExecutionPlan &plan, const std::string &o) {
  return std::find(plan.deviceGlobals.begin(), plan.deviceGlobals.end(), o) ==
         plan.deviceGlobals.end();
}

struct Summary {
  std::set<std::string> host_reads, host_writes, dev_written;
  std::map<int, std::set<std::string>> dev_access;
};

class TransferPass {
public:
  explicit TransferPass(const ExecutionPlan &plan)
      : plan_(plan), tracked_(device_objects(plan)), order_(plan.program) {}

  StepList run() {
    Fresh f;
    for (const auto &o : tracked_) f[o] = {kHostDevice};
    Flow flow = walk(plan_.steps, f, {});
    return std::move(flow.out);
  }

private:
  struct Flow {
    StepList out;
    bool falls = true;
    Fresh fall;
    std::vector<Fresh> breaks;
  };

  const ExecutionPlan &plan_;
  std::set<std::string> tracked_;
  ObjectOrder order_;

  std::set<std::string> objs(const AccessSet &a) const {
    std::set<std::string> out;
    for (const auto &o : objects_of(a, plan_))
      if (tracked_.count(o)) out.insert(o);
    return out;
  }

  std::vector<std::string> ordered(const AccessSet &a) const { return order_.sorted(objs(a)); }

  void transfer(int device, const std::string &o, Direction d, StepList &out) {
    out.push_back({TransferStep{device, o, d, whole_array(plan_, o)}});
  }

  void need(Fresh &f, const std::string &o, int loc, StepList &out) {
    std::set<int> &at = f[o];
    if (at.count(loc)) return;
    if (loc == kHostDevice) {
      transfer(*at.begin(), o, Direction::ToHost, out);
      at.insert(kHostDevice);
      return;
    }
    need(f, o, kHostDevice, out);
    transfer(loc, o, Direction::ToDevice, out);
    at.insert(loc);
  }

  void host(Fresh &f, const HostStep &h, StepList &out) {
    for (const auto &o : ordered(h.sets.read)) need(f, o, kHostDevice, out);
    for (const auto &o : ordered(h.sets.write)) {
      if (!(h.fullWrite && !whole_array(plan_, o))) need(f, o, kHostDevice, out);
      f[o] = {kHostDevice};
    }
  }

  // kernels write only some elements, so the device copy must be current first
  void kernel(Fresh &f, int d, const KernelSite &s, StepList &out) {
    std::set<std::string> all = objs(s.sets.read);
    all.merge(objs(s.sets.write));
    for (const auto &o : order_.sorted(all)) need(f, o, d, out);
    for (const auto &o : objs(s.sets.write)) f[o] = {d};
  }

  void summarize(const StepList &steps, Summary &sum) const {
    for (const auto &s : steps)
      std::visit(
          [&](const auto &n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, HostStep>) {
              sum.host_reads.merge(objs(n.sets.read));
              sum.host_writes.merge(objs(n.sets.write));
            } else if constexpr (std::is_same_v<N, LaunchGroupStep>) {
              for (const auto &m : n.members) {
                if (!m.launch) {
                  sum.host_reads.merge(objs(m.host.sets.read));
                  sum.host_writes.merge(objs(m.host.sets.write));
                  continue;
                }
                const KernelSite &k = plan_.sites[static_cast<std::size_t>(m.site)];
                if (n.device == kHostDevice) continue;
                sum.dev_access[n.device].merge(objs(k.sets.read));
                std::set<std::string> w = objs(k.sets.write);
                sum.dev_access[n.device].insert(w.begin(), w.end());
                sum.dev_written.merge(w);
              }
            } else if constexpr (std::is_same_v<N, LoopStep>) {
              sum.host_reads.merge(objs(n.condSets.read));
              summarize(n.body, sum);
            } else if constexpr (std::is_same_v<N, BranchStep>) {
              sum.host_reads.merge(objs(n.condSets.read));
              summarize(n.then_steps, sum);
              summarize(n.else_steps, sum);
            } else if constexpr (std::is_same_v<N, SectionsStep>) {
              for (const auto &sec : n.sections) summarize(sec.steps, sum);
            }
          },
          s.node);
  }

  // Intersects `into` with `other`; objects left with no fresh location are
  // normalized by copying to the host on both paths first.
  void join(Fresh &into, StepList &into_out, Fresh other, StepList &other_out) {
    for (auto &[o, at] : into) {
      std::set<int> &b = other[o];
      std::set<int> both;
      std::set_intersection(at.begin(), at.end(), b.begin(), b.end(),
                            std::inserter(both, both.begin()));
      if (both.empty()) {
        need(into, o, kHostDevice, into_out);
        need(other, o, kHostDevice, other_out);
        both = {kHostDevice};
      }
      at = both;
    }
  }

  Flow walk(const StepList &steps, Fresh f, const Fresh &break_norm) {
    Flow flow;
    for (const auto &s : steps) {
      if (!flow.falls) {
        flow.out.push_back(s);
        continue;
      }
      if (auto *h = s.get_if<HostStep>()) {
        host(f, *h, flow.out);
        flow.out.push_back(s);
      } else if (auto *g = s.get_if<LaunchGroupStep>()) {
        if (g->device != kHostDevice)
          for (const auto &m : g->members) {
            if (m.launch) kernel(f, g->device, plan_.sites[static_cast<std::size_t>(m.site)], flow.out);
            else host(f, m.host, flow.out);
          }
        flow.out.push_back(s);
      } else if (auto *t = s.get_if<TransferStep>()) {
        if (tracked_.count(t->object)) {
          if (t->direction == Direction::ToHost) f[t->object].insert(kHostDevice);
          else f[t->object].insert(t->device);
        }
        flow.out.push_back(s);
      } else if (s.is<AllocStep>()) {
        flow.out.push_back(s);
      } else if (auto *l = s.get_if<LoopStep>()) {
        loop(*l, f, flow);
      } else if (auto *b = s.get_if<BranchStep>()) {
        for (const auto &o : ordered(b->condSets.read)) need(f, o, kHostDevice, flow.out);
        Flow t = walk(b->then_steps, f, break_norm);
        Flow e = walk(b->else_steps, f, break_norm);
        BranchStep nb{b->cond, b->condSets, {}, {}, b->has_else};
        if (t.falls && e.falls) {
          join(t.fall, t.out, e.fall, e.out);
          f = t.fall;
        } else if (t.falls) {
          f = t.fall;
        } else if (e.falls) {
          f = e.fall;
        } else {
          flow.falls = false;
        }
        if (!e.out.empty()) nb.has_else = true;
        nb.then_steps = std::move(t.out);
        nb.else_steps = std::move(e.out);
        for (auto &x : t.breaks) flow.breaks.push_back(std::move(x));
        for (auto &x : e.breaks) flow.breaks.push_back(std::move(x));
        flow.out.push_back({std::move(nb)});
      } else if (s.is<BreakStep>()) {
        for (const auto &[o, locs] : break_norm)
          for (int loc : locs) need(f, o, loc, flow.out);
        flow.breaks.push_back(f);
        flow.falls = false;
        flow.out.push_back(s);
      } else if (auto *sec = s.get_if<SectionsStep>()) {
        sections(*sec, f, flow);
      }
    }
    flow.fall = f;
    return flow;
  }

  void loop(const LoopStep &l, Fresh &f, Flow &flow) {
    Summary sum;
    summarize(l.body, sum);
    std::set<std::string> cond_reads = objs(l.condSets.read);
    // preheader: copies the body needs and never invalidates from the other side
    for (const auto &[d, os] : sum.dev_access)
      for (const auto &o : order_.sorted(os))
        if (!sum.host_writes.count(o)) need(f, o, d, flow.out);
    std::set<std::string> hr = sum.host_reads;
    hr.insert(cond_reads.begin(), cond_reads.end());
    for (const auto &o : order_.sorted(hr))
      if (!sum.dev_written.count(o)) need(f, o, kHostDevice, flow.out);
    for (const auto &o : cond_reads) need(f, o, kHostDevice, flow.out);

    Fresh head = f, norm;
    for (int iter = 0; iter < 64; ++iter) {
      Flow body = walk(l.body, head, norm);
      Fresh next = head;
      if (body.falls) {
        for (const auto &o : cond_reads) need(body.fall, o, kHostDevice, body.out);
        for (auto &[o, at] : next) {
          std::set<int> &b = body.fall[o];
          for (int loc : at)
            if (!b.count(loc) && std::none_of(at.begin(), at.end(), [&](int x) { return b.count(x); }))
              need(body.fall, o, loc, body.out);
          std::set<int> both;
          std::set_intersection(at.begin(), at.end(), b.begin(), b.end(),
                                std::inserter(both, both.begin()));
          at = both;
        }
      }
      std::vector<Fresh> exits = body.breaks;
      if (!constant_true(l.cond)) exits.push_back(next);
      Fresh out;
      Fresh next_norm = norm;
      if (!exits.empty()) {
        out = exits.front();
        for (std::size_t k = 1; k < exits.size(); ++k)
          for (auto &[o, at] : out) {
            const std::set<int> &b = exits[k][o];
            std::set<int> both;
            std::set_intersection(at.begin(), at.end(), b.begin(), b.end(),
                                  std::inserter(both, both.begin()));
            if (both.empty()) next_norm[o] = {kHostDevice};
            at = both;
          }
      }
      if (next == head && next_norm == norm) {
        flow.out.push_back({LoopStep{l.cond, l.condSets, std::move(body.out)}});
        if (exits.empty()) flow.falls = false;
        f = out;
        return;
      }
      head = std::move(next);
      norm = std::move(next_norm);
    }
    throw LoweringError("transfer placement did not converge");
  }

  void sections(const SectionsStep &s, Fresh &f, Flow &flow) {
    SectionsStep ns;
    std::vector<Flow> parts;
    std::map<std::string, std::set<int>> writers; // object -> devices writing it
    for (const auto &sec : s.sections) {
      Summary sum;
      summarize(sec.steps, sum);
      for (const auto &o : sum.dev_written) writers[o].insert(sec.device);
      parts.push_back(walk(sec.steps, f, {}));
    }
    for (const auto &[o, devs] : writers)
      if (devs.size() > 1)
        throw LoweringError("attribute '" + o + "' is written on devices " +
                            std::to_string(*devs.begin()) + " and " +
                            std::to_string(*devs.rbegin()));
    Fresh joined = f;
    for (auto &[o, at] : joined) {
      std::vector<std::size_t> changed;
      for (std::size_t k = 0; k < parts.size(); ++k)
        if (parts[k].fall[o] != at) changed.push_back(k);
      if (changed.size() == 1) {
        at = parts[changed[0]].fall[o];
      } else if (changed.size() > 1) {
        for (std::size_t k : changed) need(parts[k].fall, o, kHostDevice, parts[k].out);
        at = {kHostDevice};
      }
    }
    for (std::size_t k = 0; k < parts.size(); ++k)
      ns.sections.push_back({s.sections[k].device, std::move(parts[k].out)});
    f = joined;
    flow.out.push_back({std::move(ns)});
  }
};

// Replay over sets of concrete residency states.
struct State {
  Fresh fresh;
  std::set<std::pair<int, std::string>> alloc;
  bool operator<(const State &o) const {
    return std::tie(fresh, alloc) < std::tie(o.fresh, o.alloc);
  }
  bool operator==(const State &o) const = default;
};

class Replay {
public:
  explicit Replay(const ExecutionPlan &plan) : plan_(plan), tracked_(device_objects(plan)) {}

  std::vector<std::string> run() {
    State s;
    for (const auto &o : tracked_) s.fresh[o] = {kHostDevice};
    std::set<State> breaks;
    walk(plan_.steps, {s}, breaks);
    return {errors_.begin(), errors_.end()};
  }

private:
  const ExecutionPlan &plan_;
  std::set<std::string> tracked_;
  std::set<std::string> errors_;

  std::set<std::string> objs(const AccessSet &a) const {
    std::set<std::string> out;
    for (const auto &o : objects_of(a, plan_))
      if (tracked_.count(o)) out.insert(o);
    return out;
  }

  std::string where(int d) const { return d == kHostDevice ? "host" : "device " + std::to_string(d); }

  void check(const State &s, const std::string &o, int loc, const std::string &what) {
    auto it = s.fresh.find(o);
    if (it == s.fresh.end() || !it->second.count(loc))
      errors_.insert(what + " reads stale '" + o + "' on " + where(loc));
  }

  void host(State &s, const HostStep &h) {
    for (const auto &o : objs(h.sets.read)) check(s, o, kHostDevice, "host statement");
    for (const auto &o : objs(h.sets.write)) {
      bool scalar = std::find(plan_.deviceGlobals.begin(), plan_.deviceGlobals.end(), o) !=
                    plan_.deviceGlobals.end();
      if (!(h.fullWrite && scalar)) check(s, o, kHostDevice, "host statement");
      s.fresh[o] = {kHostDevice};
    }
  }

  void kernel(State &s, int d, const KernelSite &k) {
    for (const AccessSet *a : {&k.sets.read, &k.sets.write})
      for (const auto &pr : a->properties)
        if (!pr.second.empty() && !s.alloc.count({d, pr.first}))
          errors_.insert("graph '" + pr.first + "' used on " + where(d) + " before allocation");
    for (const AccessSet *a : {&k.sets.read, &k.sets.write})
      for (const auto &o : objs(*a)) {
        if (!s.alloc.count({d, o}))
          errors_.insert("'" + o + "' used on " + where(d) + " before allocation");
        check(s, o, d, "kernel " + k.function);
      }
    for (const auto &o : objs(k.sets.write)) s.fresh[o] = {d};
  }

  void step(State &s, const PlanStep &p) {
    if (auto *h = p.get_if<HostStep>()) {
      host(s, *h);
    } else if (auto *g = p.get_if<LaunchGroupStep>()) {
      if (g->device == kHostDevice) return;
      for (const auto &m : g->members) {
        if (m.launch) kernel(s, g->device, plan_.sites[static_cast<std::size_t>(m.site)]);
        else host(s, m.host);
      }
    } else if (auto *t = p.get_if<TransferStep>()) {
      if (!tracked_.count(t->object)) return;
      if (!s.alloc.count({t->device, t->object}))
        errors_.insert("transfer of '" + t->object + "' to unallocated " + where(t->device));
      if (t->direction == Direction::ToHost) {
        check(s, t->object, t->device, "toHost transfer");
        s.fresh[t->object].insert(kHostDevice);
      } else {
        check(s, t->object, kHostDevice, "toDevice transfer");
        s.fresh[t->object].insert(t->device);
      }
    } else if (auto *a = p.get_if<AllocStep>()) {
      s.alloc.insert({a->device, a->object});
    }
  }

  std::set<State> walk(const StepList &steps, std::set<State> in, std::set<State> &breaks) {
    for (const auto &p : steps) {
      if (in.empty()) break;
      if (auto *l = p.get_if<LoopStep>()) {
        std::set<State> head = in, exits;
        for (;;) {
          for (const auto &s : head)
            for (const auto &o : objs(l->condSets.read)) check(s, o, kHostDevice, "loop condition");
          std::set<State> inner_breaks;
          std::set<State> back = walk(l->body, head, inner_breaks);
          exits.insert(inner_breaks.begin(), inner_breaks.end());
          std::size_t before = head.size();
          head.insert(back.begin(), back.end());
          if (head.size() == before) break;
        }
        if (!constant_true(l->cond)) exits.insert(head.begin(), head.end());
        in = std::move(exits);
      } else if (auto *b = p.get_if<BranchStep>()) {
        for (const auto &s : in)
          for (const auto &o : objs(b->condSets.read)) check(s, o, kHostDevice, "branch condition");
        std::set<State> t = walk(b->then_steps, in, breaks);
        std::set<State> e = walk(b->else_steps, in, breaks);
        t.insert(e.begin(), e.end());
        in = std::move(t);
      } else if (p.is<BreakStep>()) {
        breaks.insert(in.begin(), in.end());
        in.clear();
      } else if (auto *sec = p.get_if<SectionsStep>()) {
        for (const auto &part : sec->sections) in = walk(part.steps, in, breaks);
      } else {
        std::set<State> out;
        for (State s : in) {
          step(s, p);
          out.insert(std::move(s));
        }
        in = std::move(out);
      }
    }
    return in;
  }
};

} // namespace

ExecutionPlan insert_transfers(const ExecutionPlan &plan) {
  if (plan.target.kind == TargetKind::HostThreads) return plan;
  ExecutionPlan out = plan;
  out.steps = TransferPass(plan).run();
  return out;
}

std::vector<std::string> replay_residency(const ExecutionPlan &plan) {
  if (plan.target.kind == TargetKind::HostThreads) return {};
  return Replay(plan).run();
}

} // namespace gdsl
