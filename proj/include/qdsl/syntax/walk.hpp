#pragma once

#include <type_traits>
#include <vector>

#include "qdsl/syntax/ast.hpp"

namespace qdsl::ast {

/// Direct subexpressions of `e`, in source order.
inline void children(const Expr& e, std::vector<const Expr*>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, InterpString>) {
          for (const auto& p : n.parts) {
            for (const auto& x : p.expr) out.push_back(&x);
          }
        } else if constexpr (std::is_same_v<N, TupleExpr> || std::is_same_v<N, ArrayExpr>) {
          for (const auto& x : n.items) out.push_back(&x);
        } else if constexpr (std::is_same_v<N, NewArray>) {
          out.push_back(n.size.get());
        } else if constexpr (std::is_same_v<N, RangeExpr>) {
          out.push_back(n.start.get());
          if (n.step) out.push_back(n.step->get());
          out.push_back(n.end.get());
        } else if constexpr (std::is_same_v<N, Unary> || std::is_same_v<N, FunctorApp>) {
          out.push_back(n.operand.get());
        } else if constexpr (std::is_same_v<N, Binary>) {
          out.push_back(n.lhs.get());
          out.push_back(n.rhs.get());
        } else if constexpr (std::is_same_v<N, Call>) {
          out.push_back(n.callee.get());
          out.push_back(n.args.get());
        } else if constexpr (std::is_same_v<N, Index>) {
          out.push_back(n.base.get());
          out.push_back(n.index.get());
        } else if constexpr (std::is_same_v<N, CopyUpdate>) {
          out.push_back(n.base.get());
          out.push_back(n.index.get());
          out.push_back(n.value.get());
        }
      },
      e.node);
}

template <class F>
inline void walk(const Expr& e, const F& f) {
  f(e);
  std::vector<const Expr*> kids;
  children(e, kids);
  for (const Expr* k : kids) walk(*k, f);
}

/// Expressions owned directly by a statement, and its nested blocks.
inline void stmt_parts(const Stmt& s, std::vector<const Expr*>& exprs, std::vector<const Block*>& blocks) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ExprStmt>) {
          exprs.push_back(&n.expr);
        } else if constexpr (std::is_same_v<N, LetStmt> || std::is_same_v<N, MutableStmt> ||
                             std::is_same_v<N, SetStmt> || std::is_same_v<N, ReturnStmt>) {
          exprs.push_back(&n.value);
        } else if constexpr (std::is_same_v<N, FailStmt>) {
          exprs.push_back(&n.message);
        } else if constexpr (std::is_same_v<N, IfStmt>) {
          for (const auto& c : n.clauses) {
            exprs.push_back(&c.condition);
            blocks.push_back(&c.body);
          }
          if (n.else_body) blocks.push_back(&*n.else_body);
        } else if constexpr (std::is_same_v<N, ForStmt>) {
          exprs.push_back(&n.range);
          blocks.push_back(&n.body);
        } else if constexpr (std::is_same_v<N, RepeatStmt>) {
          exprs.push_back(&n.until);
          blocks.push_back(&n.body);
          if (n.fixup) blocks.push_back(&*n.fixup);
        } else if constexpr (std::is_same_v<N, QubitAllocStmt>) {
          if (n.count) exprs.push_back(&*n.count);
          blocks.push_back(&n.body);
        }
      },
      s.node);
}

template <class FE, class FS>
inline void walk_stmt(const Stmt& s, const FE& fe, const FS& fs) {
  fs(s);
  std::vector<const Expr*> exprs;
  std::vector<const Block*> blocks;
  stmt_parts(s, exprs, blocks);
  for (const Expr* e : exprs) walk(*e, fe);
  for (const Block* b : blocks) {
    for (const Stmt& st : b->stmts) walk_stmt(st, fe, fs);
  }
}

}  // namespace qdsl::ast
