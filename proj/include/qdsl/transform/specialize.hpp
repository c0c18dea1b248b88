#pragma once

#include <optional>
#include <string>

#include "qdsl/support/diagnostics.hpp"
#include "qdsl/syntax/ast.hpp"
#include "qdsl/types/checker.hpp"
#include "qdsl/types/program.hpp"

namespace qdsl::transform {

/// Name of the control register local in generated controlled blocks.
inline constexpr const char* kControls = "__controls";

/// Reverses a type-annotated operation body: classical statements run first
/// in their original order, then the quantum statements in reverse, each
/// operation call replaced by its adjoint. Reports E03xx on ineligible bodies.
std::optional<ast::Block> generate_adjoint(const ast::Block& body, const std::string& callable, DiagnosticSink& sink);

/// Rewrites every operation call `op(args)` into `(Controlled op)(controls, args)`.
std::optional<ast::Block> generate_controlled(const ast::Block& body, const std::string& controls,
                                              const std::string& callable, DiagnosticSink& sink);

/// Fills in every `auto` specialization of the checked callables and re-checks
/// the generated blocks. Returns false if any generation failed.
bool generate_specializations(types::ProgramModel& model, types::Checker& checker, std::vector<Diagnostic>& diags);

}  // namespace qdsl::transform
