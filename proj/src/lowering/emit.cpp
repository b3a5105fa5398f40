#include "gdsl/lowering.hpp"
#include "gdsl/parser.hpp"

namespace gdsl {

namespace {

// Collapses a multi-line rendering onto one line.
std::string flat(const std::string &text) {
  std::string out;
  bool space = false;
  for (char c : text) {
    if (c == '\n' || c == ' ' || c == '\t') {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::string dev(int d) { return d == kHostDevice ? "host" : std::to_string(d); }

class Emitter {
public:
  explicit Emitter(const ExecutionPlan &plan) : plan_(plan) {}

  std::string run() {
    for (const auto &k : plan_.kernels)
      if (const FunctionDecl *f = plan_.program.find_function(k))
        line(0, "KERNEL " + flat(print_function(*f)));
    for (std::size_t i = 0; i < plan_.sites.size(); ++i)
      line(0, "SITE " + std::to_string(i) + " " + flat(print_stmt(plan_.sites[i].launch)));
    steps(plan_.steps, 0);
    return out_;
  }

private:
  const ExecutionPlan &plan_;
  std::string out_;

  void line(int depth, const std::string &text) {
    out_.append(static_cast<std::size_t>(depth) * 2, ' ');
    out_ += text;
    out_ += '\n';
  }

  void steps(const StepList &list, int depth) {
    for (const auto &s : list) step(s, depth);
  }

  void step(const PlanStep &s, int depth) {
    std::visit(
        [&](const auto &n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, HostStep>) {
            line(depth, "HOST " + flat(print_stmt(n.stmt)));
          } else if constexpr (std::is_same_v<N, LaunchGroupStep>) {
            std::string names;
            for (int k : n.kernels()) {
              if (!names.empty()) names += ", ";
              names += plan_.sites[static_cast<std::size_t>(k)].function;
            }
            line(depth, "LAUNCH dev=" + dev(n.device) + " group=[" + names + "] barrier=" +
                            (n.barrierAfter ? "1" : "0"));
            for (const auto &m : n.members)
              if (!m.launch) line(depth + 1, "HOST " + flat(print_stmt(m.host.stmt)));
          } else if constexpr (std::is_same_v<N, TransferStep>) {
            line(depth, "TRANSFER dev=" + dev(n.device) + " " + n.object +
                            (n.direction == Direction::ToHost ? " toHost" : " toDevice") +
                            " whole=" + (n.wholeArray ? "1" : "0"));
          } else if constexpr (std::is_same_v<N, AllocStep>) {
            line(depth, "ALLOC dev=" + dev(n.device) + " " + n.object);
          } else if constexpr (std::is_same_v<N, LoopStep>) {
            line(depth, "LOOP " + print_expr(n.cond));
            steps(n.body, depth + 1);
            line(depth, "END");
          } else if constexpr (std::is_same_v<N, BranchStep>) {
            line(depth, "BRANCH " + print_expr(n.cond));
            steps(n.then_steps, depth + 1);
            if (n.has_else) {
              line(depth, "ELSE");
              steps(n.else_steps, depth + 1);
            }
            line(depth, "END");
          } else if constexpr (std::is_same_v<N, BreakStep>) {
            line(depth, "BREAK");
          } else if constexpr (std::is_same_v<N, SectionsStep>) {
            line(depth, "SECTIONS");
            for (const auto &sec : n.sections) {
              line(depth + 1, "SECTION dev=" + dev(sec.device));
              steps(sec.steps, depth + 2);
              line(depth + 1, "END");
            }
            line(depth, "END");
          }
        },
        s.node);
  }
};

} // namespace

std::string emit_text(const ExecutionPlan &plan) { return Emitter(plan).run(); }

std::size_t count_transfers(const StepList &steps, Direction dir, const std::string &object) {
  std::size_t n = 0;
  for (const auto &s : steps) {
    if (auto *t = s.get_if<TransferStep>())
      n += t->direction == dir && (object.empty() || t->object == object);
    if (auto *l = s.get_if<LoopStep>()) n += count_transfers(l->body, dir, object);
    if (auto *b = s.get_if<BranchStep>())
      n += count_transfers(b->then_steps, dir, object) + count_transfers(b->else_steps, dir, object);
    if (auto *sec = s.get_if<SectionsStep>())
      for (const auto &p : sec->sections) n += count_transfers(p.steps, dir, object);
  }
  return n;
}

std::size_t count_launch_groups(const StepList &steps) {
  std::size_t n = 0;
  for (const auto &s : steps) {
    n += s.is<LaunchGroupStep>();
    if (auto *l = s.get_if<LoopStep>()) n += count_launch_groups(l->body);
    if (auto *b = s.get_if<BranchStep>())
      n += count_launch_groups(b->then_steps) + count_launch_groups(b->else_steps);
    if (auto *sec = s.get_if<SectionsStep>())
      for (const auto &p : sec->sections) n += count_launch_groups(p.steps);
  }
  return n;
}

} // namespace gdsl
