#include <algorithm>
#include <condition_variable>
#include <exception>
#include <set>
#include <thread>

#include "internal.hpp"

namespace gdsl {

namespace {

using rt::Ctx;
using rt::ExprFn;
using rt::Flow;
using rt::Memory;
using rt::StmtFn;
using rt::Val;

inline std::size_t ix(Val v) { return static_cast<std::size_t>(v); }

constexpr int kHostWorker = 1 << 20; // lock owner id of the host thread

// Fixed set of threads running one job at a time.
class Pool {
public:
  explicit Pool(int n) {
    for (int w = 0; w < n; ++w) threads_.emplace_back([this, w] { loop(w); });
  }
  ~Pool() {
    {
      std::lock_guard lk(mu_);
      stop_ = true;
      ++gen_;
    }
    cv_.notify_all();
    for (auto &t : threads_) t.join();
  }
  void start(std::function<void(int)> job) {
    {
      std::lock_guard lk(mu_);
      job_ = std::move(job);
      remaining_ = static_cast<int>(threads_.size());
      error_ = nullptr;
      ++gen_;
    }
    cv_.notify_all();
  }
  void wait() {
    std::unique_lock lk(mu_);
    done_.wait(lk, [this] { return remaining_ == 0; });
    if (error_) std::rethrow_exception(error_);
  }

private:
  void loop(int w) {
    std::uint64_t seen = 0;
    for (;;) {
      std::function<void(int)> job;
      {
        std::unique_lock lk(mu_);
        cv_.wait(lk, [&] { return gen_ != seen; });
        seen = gen_;
        if (stop_) return;
        job = job_;
      }
      try {
        job(w);
      } catch (...) {
        std::lock_guard lk(mu_);
        if (!error_) error_ = std::current_exception();
      }
      std::lock_guard lk(mu_);
      if (--remaining_ == 0) done_.notify_all();
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_, done_;
  std::function<void(int)> job_;
  std::uint64_t gen_ = 0;
  int remaining_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

struct Site {
  enum Domain { Points, Edges, Coll } domain = Points;
  rt::ORef obj; // graph, or collection for Coll
  int var = 0;
  ExprFn filter;
  const rt::CompiledFn *fn = nullptr;
  std::vector<ExprFn> args;
  std::vector<int> reads, writes;
  std::vector<double> workerEdges;
  double totalWork = 0;
};

struct XStep;
using XList = std::vector<XStep>;

struct XMember {
  bool launch = false;
  int site = -1;
  StmtFn host;
  std::vector<int> reads, writes;
  bool fullWrite = false;
};

struct XStep {
  enum Kind { Host, Group, Transfer, Alloc, Loop, Branch, Break, Sections } kind = Host;
  XMember host;                       // Host
  int device = kHostDevice;           // Group, Transfer, Alloc
  std::vector<XMember> members;       // Group
  int object = -1;                    // Transfer, Alloc
  Direction dir = Direction::ToDevice;
  ExprFn cond;                        // Loop, Branch
  std::vector<int> condReads;
  XList body, other;
  std::vector<XList> sections;
};

struct ObjRef {
  enum Kind { Prop, Set, Coll, Global } kind = Prop;
  int id = 0;
};

class Executor {
public:
  Executor(const ExecutionPlan &plan, const std::vector<std::shared_ptr<GraphStore>> &inputs,
           const ExecOptions &opt)
      : plan_(plan), opt_(opt), comp_(nullptr) {
    if (opt.threads < 1) throw RuntimeError("thread count must be at least 1");
    if (opt.worklist == WorklistMode::DeltaStepping && opt.delta && *opt.delta <= 0)
      throw DeltaError("delta must be positive, got " + std::to_string(*opt.delta));
    setup_world(inputs);
    comp_ = std::make_unique<rt::Compiler>(plan.program, world_);
    setup_memory();
    compile_sites();
    steps_ = compile(plan.steps);
    hostFrame_.assign(ix(comp_->main_slots()), 0);
    if (opt.threads > 1) pool_ = std::make_unique<Pool>(opt.threads);
  }

  ExecResult run() {
    init_globals();
    double total = 0;
    Flow f = run_list(steps_, total);
    if (f == Flow::Break) throw RuntimeError("break outside a loop");
    res_.cost.total = total;
    collect();
    return std::move(res_);
  }

private:
  // --- setup ---

  void setup_world(const std::vector<std::shared_ptr<GraphStore>> &inputs) {
    std::map<std::string, int> readArg;
    std::vector<const VarDecl *> setDecls, collDecls;
    std::vector<const AddProperty *> propDecls;
    visit_stmts(plan_.program.main.body, [&](const Stmt &s) {
      if (auto *d = s.get_if<VarDecl>()) {
        if (d->type == TypeKind::Graph) world_.graphNames.push_back(d->name);
        if (d->type == TypeKind::Set) setDecls.push_back(d);
        if (d->type == TypeKind::Collection) collDecls.push_back(d);
      } else if (auto *r = s.get_if<ReadGraph>()) {
        readArg[r->graph] = r->arg;
      } else if (auto *a = s.get_if<AddProperty>()) {
        propDecls.push_back(a);
      }
    });
    auto graph_id = [&](const std::string &name) {
      auto it = std::find(world_.graphNames.begin(), world_.graphNames.end(), name);
      if (it == world_.graphNames.end()) throw RuntimeError("unknown graph '" + name + "'");
      return static_cast<int>(it - world_.graphNames.begin());
    };
    for (const auto &g : world_.graphNames) {
      auto it = readArg.find(g);
      if (it == readArg.end()) {
        world_.graphs.push_back(build_graph_store(EdgeList{}));
        continue;
      }
      std::size_t k = static_cast<std::size_t>(it->second - 1);
      if (it->second < 1 || k >= inputs.size() || !inputs[k])
        throw RuntimeError("program reads argv[" + std::to_string(it->second) + "] but " +
                           std::to_string(inputs.size()) + " input graph(s) were given");
      world_.graphs.push_back(inputs[k]);
    }
    for (const auto &g : world_.graphs) world_.locks.push_back(std::make_unique<SingleLock>(ix(g->n)));
    world_.propSlot.assign(world_.graphNames.size(), {});
    for (const auto *a : propDecls) {
      int g = graph_id(a->graph);
      int pid = world_.propNames.emplace(a->name, static_cast<int>(world_.propNames.size())).first->second;
      for (auto &row : world_.propSlot) row.resize(world_.propNames.size(), -1);
      world_.propSlot[ix(g)][ix(pid)] = static_cast<int>(world_.props.size());
      world_.props.push_back({a->graph + "." + a->name, g, a->edge});
    }
    for (const auto *d : setDecls) world_.sets.push_back({d->name, graph_id(d->graph)});
    world_.mode = opt_.worklist;
    for (const auto *d : collDecls) {
      rt::CollInfo ci{d->name, graph_id(d->graph), -1, 1};
      if (!d->keyProp.empty()) {
        auto pn = world_.propNames.find(d->keyProp);
        if (pn != world_.propNames.end()) ci.keyProp = world_.propSlot[ix(ci.graph)][ix(pn->second)];
      }
      if (opt_.delta) {
        ci.delta = *opt_.delta;
      } else {
        const auto &G = *world_.graphs[ix(ci.graph)];
        Val sum = 0;
        for (const auto &e : G.edgeList) sum += e.weight;
        ci.delta = std::max<Val>(1, G.m ? sum / G.m : 1);
      }
      world_.colls.push_back(ci);
    }
    for (const auto &g : plan_.program.globals) world_.globalNames.push_back(g.name);
    Val maxN = 0;
    for (const auto &g : world_.graphs) maxN = std::max(maxN, g->n);
    cap_ = opt_.iterationCap ? *opt_.iterationCap : std::max<Val>(16, 10 * maxN);

    auto add = [&](const std::string &name, ObjRef r) {
      objects_[name] = static_cast<int>(objList_.size());
      objList_.push_back(r);
    };
    for (std::size_t i = 0; i < world_.props.size(); ++i) add(world_.props[i].name, {ObjRef::Prop, static_cast<int>(i)});
    for (std::size_t i = 0; i < world_.sets.size(); ++i) add(world_.sets[i].name, {ObjRef::Set, static_cast<int>(i)});
    for (std::size_t i = 0; i < world_.colls.size(); ++i) add(world_.colls[i].name, {ObjRef::Coll, static_cast<int>(i)});
    for (std::size_t i = 0; i < world_.globalNames.size(); ++i)
      add(world_.globalNames[i], {ObjRef::Global, static_cast<int>(i)});
    fresh_.assign(objList_.size(), 1);
    for (const auto &g : plan_.deviceGlobals) deviceGlobal_.insert(g);
  }

  void setup_memory() {
    int devices = 0;
    if (plan_.target.kind == TargetKind::SimDevice) devices = 1;
    if (plan_.target.kind == TargetKind::SimMultiDevice) devices = plan_.target.deviceCount;
    mems_.resize(ix(devices) + 1);
    for (auto &m : mems_) {
      m.props.resize(world_.props.size());
      m.globals.assign(world_.globalNames.size(), 0);
      m.sets.resize(world_.sets.size());
      m.colls.resize(world_.colls.size());
    }
  }

  std::vector<int> object_ids(const AccessSet &a) const {
    std::vector<int> out;
    for (const auto &name : objects_of(a, plan_)) {
      auto it = objects_.find(name);
      if (it != objects_.end()) out.push_back(it->second);
    }
    return out;
  }

  void compile_sites() {
    for (const auto &ks : plan_.sites) {
      const auto &fe = ks.launch.as<Foreach>();
      Site s;
      const Call *call = launch_call(plan_.program, ks.launch);
      if (!call) throw RuntimeError("site is not a launch");
      if (fe.iterator == IteratorKind::Points || fe.iterator == IteratorKind::Edges) {
        s.domain = fe.iterator == IteratorKind::Points ? Site::Points : Site::Edges;
        s.obj = comp_->main_object(fe.subject.info.value.graph);
      } else if (fe.iterator == IteratorKind::Items && fe.info.value.items == ItemsKind::CollectionItems) {
        s.domain = Site::Coll;
        s.obj = comp_->main_object(fe.subject.as<VarRef>().name);
      } else if (fe.iterator == IteratorKind::Items) {
        s.domain = Site::Points;
        s.obj = comp_->main_object(fe.subject.info.value.graph);
      } else {
        throw RuntimeError("launches over neighbours are not supported");
      }
      s.var = comp_->main_slot(fe.var);
      if (fe.filter) s.filter = comp_->main_expr(*fe.filter);
      s.fn = &comp_->function(call->callee);
      for (const auto &a : call->args) s.args.push_back(comp_->main_expr(a));
      s.reads = object_ids(ks.sets.read);
      s.writes = object_ids(ks.sets.write);
      s.workerEdges.assign(ix(opt_.threads), 0);
      sites_.push_back(std::move(s));
    }
  }

  XMember host_member(const HostStep &h) {
    XMember m;
    m.host = comp_->main_stmt(h.stmt);
    m.reads = object_ids(h.sets.read);
    m.writes = object_ids(h.sets.write);
    m.fullWrite = h.fullWrite;
    return m;
  }

  XList compile(const StepList &steps) {
    XList out;
    for (const auto &ps : steps) {
      XStep x;
      std::visit(
          [&](const auto &s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, HostStep>) {
              x.kind = XStep::Host;
              x.host = host_member(s);
            } else if constexpr (std::is_same_v<S, LaunchGroupStep>) {
              x.kind = XStep::Group;
              x.device = s.device;
              for (const auto &m : s.members) {
                if (m.launch) {
                  XMember xm;
                  xm.launch = true;
                  xm.site = m.site;
                  x.members.push_back(std::move(xm));
                } else {
                  x.members.push_back(host_member(m.host));
                }
              }
            } else if constexpr (std::is_same_v<S, TransferStep> || std::is_same_v<S, AllocStep>) {
              x.kind = std::is_same_v<S, TransferStep> ? XStep::Transfer : XStep::Alloc;
              x.device = s.device;
              if constexpr (std::is_same_v<S, TransferStep>) x.dir = s.direction;
              auto it = objects_.find(s.object);
              x.object = it == objects_.end() ? -1 : it->second; // graph topology
            } else if constexpr (std::is_same_v<S, LoopStep> || std::is_same_v<S, BranchStep>) {
              x.cond = comp_->main_expr(s.cond);
              x.condReads = object_ids(s.condSets.read);
              if constexpr (std::is_same_v<S, LoopStep>) {
                x.kind = XStep::Loop;
                x.body = compile(s.body);
              } else {
                x.kind = XStep::Branch;
                x.body = compile(s.then_steps);
                x.other = compile(s.else_steps);
              }
            } else if constexpr (std::is_same_v<S, BreakStep>) {
              x.kind = XStep::Break;
            } else {
              x.kind = XStep::Sections;
              for (const auto &sec : s.sections) x.sections.push_back(compile(sec.steps));
            }
          },
          ps.node);
      out.push_back(std::move(x));
    }
    return out;
  }

  void init_globals() {
    Ctx c = host_ctx();
    for (std::size_t i = 0; i < plan_.program.globals.size(); ++i) {
      const auto &g = plan_.program.globals[i];
      if (g.type == TypeKind::Float) throw RuntimeError("floating point values are not supported by the executor");
      mems_[0].globals[i] = g.init ? comp_->main_expr(*g.init)(c) : 0;
    }
  }

  // --- execution ---

  static int loc(int device) { return device == kHostDevice ? 0 : device + 1; }

  Ctx host_ctx() {
    Ctx c;
    c.mem = &mems_[0];
    c.world = &world_;
    c.frame = hostFrame_.data();
    c.worker = kHostWorker;
    c.host = true;
    return c;
  }

  void charge(double &acc, double x, int device) {
    acc += x;
    res_.cost.perDevice[device] += x;
    if (sectionDepth_ == 0) res_.cost.host += x;
  }

  double work(Val vertices, Val edges) const {
    const auto &cm = plan_.target.cost;
    return cm.perVertexWork * static_cast<double>(vertices) + cm.perEdgeWork * static_cast<double>(edges);
  }

  std::string object_name(int o) const {
    for (const auto &[name, id] : objects_)
      if (id == o) return name;
    return "?";
  }

  // Every tracked object a step touches must be current at the location running it.
  void require(const std::vector<int> &objs, int location, const char *what) const {
    if (mems_.size() == 1) return;
    for (int o : objs)
      if (!(fresh_[ix(o)] >> location & 1))
        throw RuntimeError(std::string(what) + " uses stale '" + object_name(o) + "' at " +
                           (location == 0 ? "host" : "device " + std::to_string(location - 1)));
  }

  void wrote(const std::vector<int> &objs, int location) {
    for (int o : objs) fresh_[ix(o)] = std::uint64_t{1} << location;
  }

  Flow run_host(const XMember &m, double &acc) {
    require(m.reads, 0, "host statement");
    if (!m.fullWrite) require(m.writes, 0, "host statement");
    Ctx c = host_ctx();
    Flow f = m.host(c);
    wrote(m.writes, 0);
    charge(acc, work(c.vertices, c.edges), kHostDevice);
    return f;
  }

  Flow run_list(const XList &steps, double &acc) {
    for (const auto &s : steps) {
      Flow f = run_step(s, acc);
      if (f != Flow::Normal) return f;
    }
    return Flow::Normal;
  }

  Flow run_step(const XStep &s, double &acc) {
    switch (s.kind) {
    case XStep::Host: {
      Flow f = run_host(s.host, acc);
      if (f == Flow::Return) throw RuntimeError("return from main is not supported");
      return f;
    }
    case XStep::Group:
      run_group(s, acc);
      return Flow::Normal;
    case XStep::Transfer:
      transfer(s, acc);
      return Flow::Normal;
    case XStep::Alloc:
      alloc(s);
      return Flow::Normal;
    case XStep::Loop: {
      Val iters = 0;
      for (;;) {
        require(s.condReads, 0, "loop condition");
        Ctx c = host_ctx();
        if (!s.cond(c)) break;
        if (++iters > cap_)
          throw DivergenceError("loop did not terminate within " + std::to_string(cap_) + " iterations");
        ++res_.loopIterations;
        if (run_list(s.body, acc) == Flow::Break) break;
      }
      return Flow::Normal;
    }
    case XStep::Branch: {
      require(s.condReads, 0, "branch condition");
      Ctx c = host_ctx();
      return run_list(s.cond(c) ? s.body : s.other, acc);
    }
    case XStep::Break:
      return Flow::Break;
    case XStep::Sections: {
      std::vector<double> costs;
      ++sectionDepth_;
      for (const auto &sec : s.sections) {
        double c = 0;
        if (run_list(sec, c) != Flow::Normal) throw RuntimeError("break out of a parallel section");
        costs.push_back(c);
      }
      --sectionDepth_;
      double combined = 0;
      for (double c : costs)
        combined = plan_.target.kind == TargetKind::SimMultiDevice ? std::max(combined, c) : combined + c;
      acc += combined;
      res_.cost.sections = costs;
      return Flow::Normal;
    }
    }
    return Flow::Normal;
  }

  void transfer(const XStep &s, double &acc) {
    ++res_.transferCount;
    if (s.object < 0) return;
    int dev = loc(s.device);
    int from = s.dir == Direction::ToDevice ? 0 : dev;
    int to = s.dir == Direction::ToDevice ? dev : 0;
    if (!(fresh_[ix(s.object)] >> from & 1))
      throw RuntimeError("transfer of stale '" + object_name(s.object) + "'");
    Memory &src = mems_[ix(from)], &dst = mems_[ix(to)];
    const ObjRef &r = objList_[ix(s.object)];
    double bytes = 8;
    switch (r.kind) {
    case ObjRef::Prop:
      dst.props[ix(r.id)] = src.props[ix(r.id)];
      bytes = 8.0 * static_cast<double>(src.props[ix(r.id)].size());
      break;
    case ObjRef::Set:
      if (!src.sets[ix(r.id)]) throw RuntimeError("transfer of unallocated set");
      dst.sets[ix(r.id)] = std::make_unique<UnionFindSet>(*src.sets[ix(r.id)]);
      bytes = 16.0 * static_cast<double>(src.sets[ix(r.id)]->size());
      break;
    case ObjRef::Coll:
      if (!src.colls[ix(r.id)]) throw RuntimeError("transfer of unallocated collection");
      dst.colls[ix(r.id)] = std::make_unique<Worklist>(*src.colls[ix(r.id)]);
      bytes = 8.0 * static_cast<double>(src.colls[ix(r.id)]->size() + 1);
      break;
    case ObjRef::Global:
      dst.globals[ix(r.id)] = src.globals[ix(r.id)];
      break;
    }
    fresh_[ix(s.object)] |= std::uint64_t{1} << to;
    const auto &cm = plan_.target.cost;
    double cost = cm.transferLatency + bytes * cm.transferPerByte;
    res_.cost.transfers += cost;
    charge(acc, cost, s.device);
  }

  void alloc(const XStep &s) {
    if (s.object < 0) return;
    Memory &m = mems_[ix(loc(s.device))];
    const ObjRef &r = objList_[ix(s.object)];
    if (r.kind == ObjRef::Prop) {
      m.props[ix(r.id)].assign(ix(world_.size_of(r.id)), 0);
    } else if (r.kind == ObjRef::Set) {
      m.sets[ix(r.id)] = std::make_unique<UnionFindSet>(world_.graphs[ix(world_.sets[ix(r.id)].graph)]->n);
    } else if (r.kind == ObjRef::Coll) {
      const auto &ci = world_.colls[ix(r.id)];
      m.colls[ix(r.id)] = std::make_unique<Worklist>(world_.graphs[ix(ci.graph)]->n, world_.mode, ci.delta);
    }
  }

  // Elements of one launch in this round.
  struct Round {
    std::vector<Val> items;
    bool listed = false;
    Val size = 0;
  };

  Round round_of(const Site &s, Memory &mem) {
    Round r;
    if (s.domain == Site::Coll) {
      int id = s.obj.v;
      auto &wl = mem.colls[ix(id)];
      if (!wl) throw RuntimeError("collection '" + world_.colls[ix(id)].name + "' is not allocated here");
      r.items = wl->take([&](Val v) { return rt::Compiler::key_of(mem, world_, id, v); });
      if (wl->mode() == WorklistMode::DeltaStepping && !r.items.empty())
        res_.bucketTrace.push_back(wl->last_bucket());
      r.listed = true;
      r.size = static_cast<Val>(r.items.size());
    } else {
      const auto &G = *world_.graphs[ix(s.obj.v)];
      r.size = s.domain == Site::Points ? G.n : G.m;
    }
    return r;
  }

  struct WorkerState {
    Ctx ctx;
    std::vector<Val> siteFrame, kernelFrame;
    std::vector<std::pair<Val, Val>> counts; // per launch member: vertices, edges
    Val calls = 0;
  };

  void run_range(const Site &s, const Round &r, WorkerState &ws, Val begin, Val end) {
    Ctx &c = ws.ctx;
    ws.kernelFrame.resize(ix(s.fn->slots));
    for (Val i = begin; i < end; ++i) {
      Val x = r.listed ? r.items[ix(i)] : i;
      c.frame = ws.siteFrame.data();
      ws.siteFrame[ix(s.var)] = x;
      (s.domain == Site::Edges ? c.edges : c.vertices)++;
      if (s.filter && !s.filter(c)) continue;
      for (std::size_t a = 0; a < s.args.size(); ++a) ws.kernelFrame[ix(s.fn->params[a])] = s.args[a](c);
      c.frame = ws.kernelFrame.data();
      ++ws.calls;
      s.fn->body(c);
    }
  }

  void run_group(const XStep &g, double &acc) {
    const int location = loc(g.device);
    Memory &mem = mems_[ix(location)];
    if (location != 0)
      for (std::size_t i = 0; i < world_.globalNames.size(); ++i)
        if (!deviceGlobal_.count(world_.globalNames[i])) mem.globals[i] = mems_[0].globals[i]; // by value

    const int T = opt_.threads;
    std::vector<Round> rounds(g.members.size());
    for (std::size_t k = 0; k < g.members.size(); ++k) {
      const auto &m = g.members[k];
      if (!m.launch) continue;
      const Site &s = sites_[ix(m.site)];
      require(s.reads, location, "kernel");
      require(s.writes, location, "kernel");
      rounds[k] = round_of(s, mem);
      ++res_.launches;
    }

    std::vector<WorkerState> ws(ix(T));
    for (int w = 0; w < T; ++w) {
      ws[ix(w)].ctx.mem = &mem;
      ws[ix(w)].ctx.world = &world_;
      ws[ix(w)].ctx.worker = w;
      ws[ix(w)].ctx.host = false;
      ws[ix(w)].siteFrame = hostFrame_;
      ws[ix(w)].counts.assign(g.members.size(), {0, 0});
    }
    auto job = [&](int w) {
      auto &st = ws[ix(w)];
      for (std::size_t k = 0; k < g.members.size(); ++k) {
        if (!g.members[k].launch) continue;
        const Round &r = rounds[k];
        Val chunk = (r.size + T - 1) / T;
        Val b = std::min(r.size, chunk * w), e = std::min(r.size, b + chunk);
        Val v0 = st.ctx.vertices, e0 = st.ctx.edges;
        run_range(sites_[ix(g.members[k].site)], r, st, b, e);
        st.counts[k] = {st.ctx.vertices - v0, st.ctx.edges - e0};
      }
    };

    double plainCost = 0;
    auto plain = [&] {
      for (const auto &m : g.members)
        if (!m.launch && run_host(m, plainCost) != Flow::Normal)
          throw RuntimeError("control flow out of a launch group");
    };
    if (pool_) {
      pool_->start(job);
      try {
        plain();
      } catch (...) {
        pool_->wait();
        throw;
      }
      pool_->wait();
    } else {
      // members in program order
      for (std::size_t k = 0; k < g.members.size(); ++k) {
        if (g.members[k].launch) {
          auto &st = ws[0];
          const Round &r = rounds[k];
          run_range(sites_[ix(g.members[k].site)], r, st, 0, r.size);
          st.counts[k] = {st.ctx.vertices, st.ctx.edges};
          st.ctx.vertices = st.ctx.edges = 0;
        } else if (run_host(g.members[k], plainCost) != Flow::Normal) {
          throw RuntimeError("control flow out of a launch group");
        }
      }
    }

    for (auto &st : ws) res_.kernelInvocations += st.calls;
    for (auto &st : ws)
      for (auto [coll, v] : st.ctx.pushes) {
        auto &wl = mem.colls[ix(coll)];
        if (!wl) throw RuntimeError("collection is not allocated here");
        wl->push(v, rt::Compiler::key_of(mem, world_, coll, v));
      }

    double cost = plainCost;
    for (std::size_t k = 0; k < g.members.size(); ++k) {
      if (!g.members[k].launch) continue;
      Site &s = sites_[ix(g.members[k].site)];
      double kernel = 0;
      for (int w = 0; w < T; ++w) {
        auto [v, e] = ws[ix(w)].counts[k];
        kernel = std::max(kernel, work(v, e));
        s.workerEdges[ix(w)] += static_cast<double>(e);
        s.totalWork += work(v, e);
      }
      cost = std::max(cost, kernel);
      wrote(s.writes, location);
    }
    // plain members already charged their own cost to the host
    if (sectionDepth_ == 0) res_.cost.host -= plainCost;
    res_.cost.perDevice[kHostDevice] -= plainCost;
    charge(acc, cost, g.device);
  }

  void collect() {
    auto source = [&](int obj) {
      std::uint64_t f = fresh_[ix(obj)];
      if (f & 1) return 0;
      for (int l = 1; l < static_cast<int>(mems_.size()); ++l)
        if (f >> l & 1) return l;
      return 0;
    };
    for (std::size_t i = 0; i < world_.props.size(); ++i) {
      int l = source(objects_.at(world_.props[i].name));
      res_.properties[world_.props[i].name] = mems_[ix(l)].props[i];
    }
    for (std::size_t i = 0; i < world_.globalNames.size(); ++i) {
      int l = source(objects_.at(world_.globalNames[i]));
      res_.globals[world_.globalNames[i]] = mems_[ix(l)].globals[i];
    }
    const Site *best = nullptr;
    for (const auto &s : sites_)
      if (!best || s.totalWork > best->totalWork) best = &s;
    if (best && best->totalWork > 0) res_.perWorkerWork = best->workerEdges;
  }

  const ExecutionPlan &plan_;
  ExecOptions opt_;
  rt::World world_;
  std::unique_ptr<rt::Compiler> comp_;
  std::vector<Memory> mems_;
  std::vector<Site> sites_;
  XList steps_;
  std::vector<Val> hostFrame_;
  std::unique_ptr<Pool> pool_;
  std::map<std::string, int> objects_;
  std::vector<ObjRef> objList_;
  std::vector<std::uint64_t> fresh_;
  std::set<std::string> deviceGlobal_;
  Val cap_ = 0;
  int sectionDepth_ = 0;
  ExecResult res_;
};

} // namespace

ExecResult execute(const ExecutionPlan &plan, const std::vector<std::shared_ptr<GraphStore>> &inputs,
                   const ExecOptions &options) {
  Executor ex(plan, inputs, options);
  return ex.run();
}

ExecResult worklist_drain(const ExecutionPlan &plan, const std::vector<std::shared_ptr<GraphStore>> &inputs,
                          WorklistMode mode, int threads, std::optional<std::int64_t> delta) {
  ExecOptions o;
  o.threads = threads;
  o.worklist = mode;
  o.delta = delta;
  return execute(plan, inputs, o);
}

} // namespace gdsl
