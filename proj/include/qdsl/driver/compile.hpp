#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qdsl/support/diagnostics.hpp"
#include "qdsl/support/source.hpp"
#include "qdsl/syntax/ast.hpp"
#include "qdsl/types/program.hpp"

namespace qdsl {

struct SourceInput {
  std::string name;
  std::string text;
};

struct CompileOptions {
  bool prelude = true;
};

/// Everything produced by compiling a set of files. Owns the sources and
/// syntax trees that the program model points into.
struct Compilation {
  std::vector<std::unique_ptr<SourceFile>> sources;
  std::vector<std::unique_ptr<ast::Program>> programs;
  std::unique_ptr<types::ProgramModel> model = std::make_unique<types::ProgramModel>();
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return !has_errors(diagnostics); }
  /// Diagnostics for user files only (prelude diagnostics indicate a bug).
  std::vector<Diagnostic> user_diagnostics() const;
};

/// Parses, checks and generates specializations for `inputs`, on top of the
/// language core and (optionally) the standard prelude.
std::unique_ptr<Compilation> compile(const std::vector<SourceInput>& inputs, const CompileOptions& options = {});

}  // namespace qdsl
