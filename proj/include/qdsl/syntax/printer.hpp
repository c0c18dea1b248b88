#pragma once

#include <string>
#include <vector>

#include "qdsl/syntax/ast.hpp"

namespace qdsl::syntax {

/// Canonical source text. Re-parsing the output yields a tree equal to the
/// input under dump_ast.
std::string pretty_print(const ast::Program& program);
std::string pretty_print(const ast::CallableDecl& callable, int indent = 0);
std::string pretty_print(const ast::Stmt& stmt, int indent = 0);
std::string pretty_print(const ast::Block& block, int indent = 0);
std::string pretty_print(const ast::Expr& expr);
std::string pretty_print(const ast::TypeNode& type);
std::string pretty_print(const ast::Pattern& pattern);

/// Span-free S-expression rendering used for structural comparison.
std::string dump_ast(const ast::Program& program);
std::string dump_ast(const ast::Stmt& stmt);
std::string dump_ast(const ast::Expr& expr);

/// Nodes whose span does not contain the spans of all their children.
std::vector<std::string> span_violations(const ast::Program& program);

}  // namespace qdsl::syntax
