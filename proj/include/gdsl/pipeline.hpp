#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gdsl/async.hpp"
#include "gdsl/lowering.hpp"
#include "gdsl/transforms.hpp"

namespace gdsl {

enum class Mode { AsWritten, Vertex, Edge, Worklist };

const char *mode_name(Mode m);
std::optional<Mode> parse_mode(const std::string &s);

// Form of the outer launches in main.
enum class Form { None, Vertex, Edge, Worklist, Mixed };
Form launch_form(const Program &resolved);

struct CompileOptions {
  Mode mode = Mode::AsWritten;
  bool async = false;
  Target target;
  bool normalize = false;     // alpha-normalize after the transforms
  bool allowFallback = false; // keep the source form when a transform does not apply
  bool force = false;         // allow worklist on a simulated device
};

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IneligibleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Compilation {
  Program program; // resolved program that was lowered
  std::vector<TransformReport> transforms;
  bool fellBack = false;
  std::string fallbackReason;
  Cfg cfg;
  Schedule schedule;
  ExecutionPlan plan;
};

// parse -> resolve -> transforms -> CFG and schedule -> lower.
// Throws ParseError/LexError/SemanticErrors, UsageError, IneligibleError, LoweringError.
Compilation compile_source(const std::string &source, const CompileOptions &options);
Compilation compile_program(const Program &parsed, const CompileOptions &options);

} // namespace gdsl
