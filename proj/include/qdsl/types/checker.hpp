#pragma once

#include <set>
#include <string>
#include <vector>

#include "qdsl/support/diagnostics.hpp"
#include "qdsl/types/program.hpp"

namespace qdsl::types {

/// Name resolution and type checking over a set of parsed files.
///
/// Usage: collect() every file (prelude first), then resolve_signatures(),
/// then check_bodies(). Expressions are annotated in place.
class Checker {
 public:
  Checker(ProgramModel& model, std::vector<Diagnostic>& diags) : model_(model), diags_(diags) {}

  void collect(ast::Program& program, const SourceFile& source, bool prelude);
  void resolve_signatures();
  void check_bodies();

  /// Checks a block produced by specialization generation. `controls` names
  /// the control register local, or is empty.
  bool check_generated(CallableDef& def, ast::Block& block, const std::string& controls);

  /// Callables whose provided bodies checked without errors.
  bool body_ok(const CallableDef& def) const;

 private:
  ProgramModel& model_;
  std::vector<Diagnostic>& diags_;
  std::set<const CallableDef*> failed_;
  struct PendingOpen {
    std::string name;
    Span span;
    const SourceFile* source;
  };
  std::vector<PendingOpen> pending_opens_;
};

}  // namespace qdsl::types
