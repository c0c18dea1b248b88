#pragma once

#include <optional>
#include <vector>

#include "qdsl/support/diagnostics.hpp"
#include "qdsl/syntax/ast.hpp"
#include "qdsl/syntax/token.hpp"

namespace qdsl::syntax {

/// Parses a whole compilation unit. Errors are reported to `sink`; the parser
/// resynchronizes at statement and declaration boundaries so one call can
/// report several independent errors.
ast::Program parse(const std::vector<Token>& tokens, DiagnosticSink& sink);

/// Parses a bare statement sequence (snippets, REPL-style tests).
std::vector<ast::Stmt> parse_statements(const std::vector<Token>& tokens, DiagnosticSink& sink);

std::optional<ast::Expr> parse_expression(const std::vector<Token>& tokens, DiagnosticSink& sink);

/// tokenize + parse over a source file.
ast::Program parse_source(const SourceFile& file, std::vector<Diagnostic>& diags);

}  // namespace qdsl::syntax
