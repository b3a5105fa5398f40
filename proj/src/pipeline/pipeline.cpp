#include "gdsl/pipeline.hpp"

#include "gdsl/parser.hpp"

namespace gdsl {

const char *mode_name(Mode m) {
  switch (m) {
  case Mode::AsWritten: return "as-written";
  case Mode::Vertex: return "vertex";
  case Mode::Edge: return "edge";
  case Mode::Worklist: return "worklist";
  }
  return "?";
}

std::optional<Mode> parse_mode(const std::string &s) {
  if (s == "vertex") return Mode::Vertex;
  if (s == "edge") return Mode::Edge;
  if (s == "worklist") return Mode::Worklist;
  if (s == "as-written") return Mode::AsWritten;
  return std::nullopt;
}

Form launch_form(const Program &resolved) {
  Form form = Form::None;
  for (const auto &t : find_target_functions(resolved)) {
    if (t.host != &resolved.main || !t.callSite) continue;
    const auto &fe = t.callSite->as<Foreach>();
    Form f = Form::Mixed;
    if (fe.iterator == IteratorKind::Points) f = Form::Vertex;
    else if (fe.iterator == IteratorKind::Edges) f = Form::Edge;
    else if (fe.info.value.items == ItemsKind::CollectionItems) f = Form::Worklist;
    if (form == Form::None) form = f;
    else if (form != f) form = Form::Mixed;
  }
  return form;
}

namespace {

// Applies `t` and records the report; false when it did not apply.
bool apply(Program &p, Compilation &out, TransformResult (*t)(const Program &)) {
  TransformResult r = t(p);
  out.transforms.push_back(r.report);
  if (!r.report.applied) return false;
  p = resolve(r.program).program;
  return true;
}

} // namespace

Compilation compile_program(const Program &parsed, const CompileOptions &o) {
  if (o.mode == Mode::Worklist && o.target.kind != TargetKind::HostThreads && !o.force)
    throw UsageError("worklist mode is restricted to the cpu target (worklist code does not benefit "
                     "from a GPU); pass --force to override");
  Compilation out;
  Program source = resolve(parsed).program;
  Program p = source;
  Form form = launch_form(p);
  bool ok = true;
  switch (o.mode) {
  case Mode::AsWritten: break;
  case Mode::Vertex:
    if (form == Form::Edge) ok = apply(p, out, edge_to_vertex);
    else if (form != Form::Vertex) ok = false;
    break;
  case Mode::Edge:
    if (form == Form::Vertex) ok = apply(p, out, vertex_to_edge);
    else if (form != Form::Edge) ok = false;
    break;
  case Mode::Worklist:
    if (form == Form::Edge) ok = apply(p, out, edge_to_vertex);
    if (ok && form != Form::Worklist) ok = apply(p, out, to_worklist);
    break;
  }
  if (!ok) {
    std::string reason = out.transforms.empty() || out.transforms.back().reason.empty()
                             ? "program has no convertible launch"
                             : out.transforms.back().reason;
    if (!o.allowFallback)
      throw IneligibleError(std::string("cannot compile in ") + mode_name(o.mode) + " mode: " + reason);
    out.fellBack = true;
    out.fallbackReason = reason;
    p = source;
  }
  if (o.normalize) p = resolve(alpha_normalize(p)).program;
  out.program = std::move(p);
  out.cfg = analyze_main(out.program);
  out.schedule = o.async ? derive_schedule(out.cfg) : synchronous_schedule(out.cfg);
  out.plan = lower(out.program, out.schedule, o.target);
  return out;
}

Compilation compile_source(const std::string &source, const CompileOptions &options) {
  return compile_program(parse_source(source), options);
}

} // namespace gdsl
