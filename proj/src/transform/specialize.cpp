#include "qdsl/transform/specialize.hpp"

#include <algorithm>
#include <set>

#include "qdsl/syntax/walk.hpp"
#include "qdsl/types/type.hpp"

namespace qdsl::transform {

namespace {

using namespace ast;

const char* const kRangeReverse = "Microsoft.Quantum.Core.RangeReverse";
const char* const kArrayReverse = "Microsoft.Quantum.Core.ArrayReverse";

bool expr_calls_operation(const Expr& e) {
  bool found = false;
  walk(e, [&](const Expr& x) { found |= x.call_kind == CallKind::Operation; });
  return found;
}

bool is_quantum(const Stmt& s) {
  bool found = false;
  walk_stmt(
      s, [&](const Expr& x) { found |= x.call_kind == CallKind::Operation; },
      [&](const Stmt& st) { found |= std::holds_alternative<QubitAllocStmt>(st.node); });
  return found;
}

bool own_exprs_call_operation(const Stmt& s) {
  std::vector<const Expr*> exprs;
  std::vector<const Block*> blocks;
  stmt_parts(s, exprs, blocks);
  return std::any_of(exprs.begin(), exprs.end(), [](const Expr* e) { return expr_calls_operation(*e); });
}

void pattern_names(const Pattern& p, std::set<std::string>& out) {
  if (const auto* n = std::get_if<Pattern::Name>(&p.node)) out.insert(n->name);
  if (const auto* t = std::get_if<Pattern::Tuple>(&p.node)) {
    for (const auto& i : t->items) pattern_names(i, out);
  }
}

std::set<std::string> bound_names(const Stmt& s) {
  std::set<std::string> out;
  if (const auto* l = std::get_if<LetStmt>(&s.node)) pattern_names(l->pattern, out);
  if (const auto* m = std::get_if<MutableStmt>(&s.node)) pattern_names(m->pattern, out);
  return out;
}

// Variables assigned by `s` that it does not itself declare.
std::set<std::string> outer_sets(const Stmt& s) {
  std::set<std::string> sets;
  std::set<std::string> declared;
  walk_stmt(
      s, [](const Expr&) {},
      [&](const Stmt& st) {
        if (const auto* set = std::get_if<SetStmt>(&st.node)) sets.insert(set->name);
        if (&st != &s) {
          auto b = bound_names(st);
          declared.insert(b.begin(), b.end());
        }
        if (const auto* f = std::get_if<ForStmt>(&st.node)) declared.insert(f->variable);
      });
  std::set<std::string> out;
  for (const auto& n : sets) {
    if (!declared.count(n)) out.insert(n);
  }
  return out;
}

std::set<std::string> local_refs(const Stmt& s) {
  std::set<std::string> out;
  walk_stmt(
      s,
      [&](const Expr& x) {
        if (const auto* id = get_if<Ident>(x); id && x.resolution == Resolution::Local) out.insert(id->name);
      },
      [](const Stmt&) {});
  return out;
}

Expr make_expr(Expr::Node node, Span span) {
  Expr e;
  e.node = std::move(node);
  e.span = span;
  return e;
}

Expr ident(const std::string& name, Span span) { return make_expr(Ident{name}, span); }

std::string callee_label(const Expr& callee) {
  if (!callee.resolved_name.empty()) return "'" + callee.resolved_name + "'";
  if (const auto* id = get_if<Ident>(callee)) return "'" + id->name + "'";
  if (const auto* f = get_if<FunctorApp>(callee)) return callee_label(*f->operand);
  return "operation";
}

uint8_t callee_variants(const Expr& callee) { return callee.type ? callee.type->variants : 0; }

class Adjointer {
 public:
  Adjointer(const std::string& callable, DiagnosticSink& sink) : callable_(callable), sink_(sink) {}

  bool ok() const { return ok_; }

  Block block(const Block& b, bool nested, std::set<std::string> declared) {
    std::vector<Stmt> prologue;
    std::vector<Stmt> tail;
    bool seen_quantum = false;
    std::set<std::string> quantum_refs;
    for (const Stmt& s : b.stmts) {
      if (std::holds_alternative<RepeatStmt>(s.node)) {
        fail(s.span, "repeat-until loops cannot be reversed");
        continue;
      }
      if (std::holds_alternative<ReturnStmt>(s.node)) {
        fail(s.span, "return statements cannot be reversed");
        continue;
      }
      if (!is_quantum(s)) {
        for (const auto& name : outer_sets(s)) {
          if (seen_quantum) {
            fail(s.span, "'" + name + "' is set after an operation call");
          } else if (nested && !declared.count(name)) {
            fail(s.span, "'" + name + "' is set inside a reversed block but declared outside it");
          }
        }
        for (const auto& name : bound_names(s)) {
          if (quantum_refs.count(name)) fail(s.span, "binding '" + name + "' would move above an operation that uses an outer '" + name + "'");
          declared.insert(name);
        }
        prologue.push_back(s);
        continue;
      }
      seen_quantum = true;
      auto refs = local_refs(s);
      quantum_refs.insert(refs.begin(), refs.end());
      if (auto r = quantum(s)) tail.push_back(std::move(*r));
    }
    Block out;
    out.span = b.span;
    out.stmts = std::move(prologue);
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) out.stmts.push_back(std::move(*it));
    return out;
  }

 private:
  void fail(Span span, const std::string& why) {
    sink_.error(Code::AdjointIneligible, span, "cannot generate an adjoint for '" + callable_ + "': " + why);
    ok_ = false;
  }

  std::optional<Stmt> quantum(const Stmt& s) {
    if (const auto* es = std::get_if<ExprStmt>(&s.node)) {
      const auto* call = get_if<Call>(es->expr);
      if (call == nullptr || es->expr.call_kind != CallKind::Operation || expr_calls_operation(*call->callee) ||
          expr_calls_operation(*call->args)) {
        fail(s.span, "the result of an operation is used");
        return std::nullopt;
      }
      if (es->expr.type && !es->expr.type->is_unit()) {
        fail(s.span, "measurements and other operations returning values cannot be reversed");
        return std::nullopt;
      }
      if (!(callee_variants(*call->callee) & types::kAdjointable)) {
        sink_.error(Code::NotAdjointable, s.span,
                    "cannot generate an adjoint for '" + callable_ + "': " + callee_label(*call->callee) +
                        " has no adjoint");
        ok_ = false;
        return std::nullopt;
      }
      Expr callee;
      if (const auto* f = get_if<FunctorApp>(*call->callee); f && f->functor == Functor::Adjoint) {
        callee = *f->operand;
      } else {
        callee = make_expr(FunctorApp{Functor::Adjoint, Box<Expr>(*call->callee)}, call->callee->span);
      }
      Expr e = make_expr(Call{Box<Expr>(std::move(callee)), Box<Expr>(*call->args)}, es->expr.span);
      return Stmt{ExprStmt{std::move(e)}, s.span};
    }
    if (std::holds_alternative<LetStmt>(s.node) || std::holds_alternative<MutableStmt>(s.node) ||
        std::holds_alternative<SetStmt>(s.node)) {
      fail(s.span, "the result of an operation is bound to a variable");
      return std::nullopt;
    }
    if (const auto* i = std::get_if<IfStmt>(&s.node)) {
      IfStmt out;
      for (const auto& c : i->clauses) {
        if (expr_calls_operation(c.condition)) {
          fail(c.condition.span, "the condition calls an operation");
          return std::nullopt;
        }
        out.clauses.push_back({c.condition, block(c.body, true, {})});
      }
      if (i->else_body) out.else_body = block(*i->else_body, true, {});
      return Stmt{std::move(out), s.span};
    }
    if (const auto* f = std::get_if<ForStmt>(&s.node)) {
      if (expr_calls_operation(f->range)) {
        fail(f->range.span, "the loop range calls an operation");
        return std::nullopt;
      }
      ForStmt out;
      out.variable = f->variable;
      out.variable_span = f->variable_span;
      out.range = reversed(f->range);
      out.body = block(f->body, true, {f->variable});
      return Stmt{std::move(out), s.span};
    }
    if (const auto* q = std::get_if<QubitAllocStmt>(&s.node)) {
      fail(s.span, std::string(q->kind == AllocKind::Using ? "using" : "borrowing") + " blocks cannot be reversed");
      return std::nullopt;
    }
    fail(s.span, "statement calls an operation");
    return std::nullopt;
  }

  static Expr reversed(const Expr& range) {
    if (const auto* r = get_if<RangeExpr>(range); r && !r->step) {
      Expr minus_one = make_expr(Unary{UnaryOp::Negate, Box<Expr>(make_expr(IntLit{1}, range.span))}, range.span);
      return make_expr(RangeExpr{r->end, Box<Expr>(std::move(minus_one)), r->start}, range.span);
    }
    bool array = range.type && range.type->kind != types::Kind::Range;
    return make_expr(Call{Box<Expr>(ident(array ? kArrayReverse : kRangeReverse, range.span)), Box<Expr>(range)},
                     range.span);
  }

  std::string callable_;
  DiagnosticSink& sink_;
  bool ok_ = true;
};

class Controller {
 public:
  Controller(const std::string& controls, const std::string& callable, DiagnosticSink& sink)
      : controls_(controls), callable_(callable), sink_(sink) {}

  bool ok() const { return ok_; }

  Block block(const Block& b) {
    Block out;
    out.span = b.span;
    for (const Stmt& s : b.stmts) {
      if (auto r = stmt(s)) out.stmts.push_back(std::move(*r));
    }
    return out;
  }

 private:
  void fail(Span span, const std::string& why) {
    sink_.error(Code::ControlledIneligible, span, "cannot generate a controlled version of '" + callable_ + "': " + why);
    ok_ = false;
  }

  std::optional<Stmt> stmt(const Stmt& s) {
    if (const auto* es = std::get_if<ExprStmt>(&s.node)) {
      const auto* call = get_if<Call>(es->expr);
      if (call != nullptr && es->expr.call_kind == CallKind::Operation) {
        if (expr_calls_operation(*call->callee) || expr_calls_operation(*call->args)) {
          fail(s.span, "the result of an operation is used");
          return std::nullopt;
        }
        if (es->expr.type && !es->expr.type->is_unit()) {
          fail(s.span, "measurements and other operations returning values cannot be controlled");
          return std::nullopt;
        }
        if (!(callee_variants(*call->callee) & types::kControllable)) {
          sink_.error(Code::NotControllable, s.span,
                      "cannot generate a controlled version of '" + callable_ + "': " + callee_label(*call->callee) +
                          " has no controlled variant");
          ok_ = false;
          return std::nullopt;
        }
        return Stmt{ExprStmt{controlled_call(es->expr, *call)}, s.span};
      }
    }
    if (own_exprs_call_operation(s)) {
      fail(s.span, "the result of an operation is used");
      return std::nullopt;
    }
    Stmt out = s;
    std::visit(
        [&](auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, IfStmt>) {
            for (auto& c : n.clauses) c.body = block(c.body);
            if (n.else_body) n.else_body = block(*n.else_body);
          } else if constexpr (std::is_same_v<N, ForStmt> || std::is_same_v<N, QubitAllocStmt>) {
            n.body = block(n.body);
          } else if constexpr (std::is_same_v<N, RepeatStmt>) {
            n.body = block(n.body);
            if (n.fixup) n.fixup = block(*n.fixup);
          }
        },
        out.node);
    return out;
  }

  Expr controlled_call(const Expr& e, const Call& call) {
    Span span = e.span;
    Expr ctl = ident(controls_, span);
    // (Controlled g)(c, rest) under more controls keeps one flat register
    if (const auto* f = get_if<FunctorApp>(*call.callee); f && f->functor == Functor::Controlled) {
      if (const auto* t = get_if<TupleExpr>(*call.args); t && t->items.size() == 2) {
        Expr joined = make_expr(Binary{BinaryOp::Add, Box<Expr>(std::move(ctl)), Box<Expr>(t->items[0])}, span);
        TupleExpr args;
        args.items.push_back(std::move(joined));
        args.items.push_back(t->items[1]);
        return make_expr(Call{Box<Expr>(*call.callee), Box<Expr>(make_expr(std::move(args), call.args->span))}, span);
      }
    }
    Expr callee = make_expr(FunctorApp{Functor::Controlled, Box<Expr>(*call.callee)}, call.callee->span);
    TupleExpr args;
    args.items.push_back(std::move(ctl));
    args.items.push_back(*call.args);
    return make_expr(Call{Box<Expr>(std::move(callee)), Box<Expr>(make_expr(std::move(args), call.args->span))}, span);
  }

  std::string controls_;
  std::string callable_;
  DiagnosticSink& sink_;
  bool ok_ = true;
};

}  // namespace

std::optional<Block> generate_adjoint(const Block& body, const std::string& callable, DiagnosticSink& sink) {
  Adjointer a(callable, sink);
  Block out = a.block(body, false, {});
  if (!a.ok()) return std::nullopt;
  return out;
}

std::optional<Block> generate_controlled(const Block& body, const std::string& controls, const std::string& callable,
                                         DiagnosticSink& sink) {
  Controller c(controls, callable, sink);
  Block out = c.block(body);
  if (!c.ok()) return std::nullopt;
  return out;
}

bool generate_specializations(types::ProgramModel& model, types::Checker& checker, std::vector<Diagnostic>& diags) {
  using K = SpecKind;
  using G = SpecGen;
  bool all_ok = true;
  for (auto& [name, dp] : model.callables) {
    types::CallableDef& def = *dp;
    if (!def.is_operation || def.is_intrinsic() || !checker.body_ok(def)) continue;
    const Block* body = def.spec(K::Body).block;
    if (body == nullptr) continue;
    DiagnosticSink sink(def.source, &diags);
    auto install = [&](types::Specialization& sp, std::optional<Block> b, const std::string& controls) {
      if (!b) {
        all_ok = false;
        return;
      }
      sp.generated = std::make_unique<Block>(std::move(*b));
      sp.block = sp.generated.get();
      sp.controls = controls;
      if (!checker.check_generated(def, *sp.generated, controls)) all_ok = false;
    };
    types::Specialization& adj = def.spec(K::Adjoint);
    types::Specialization& ctl = def.spec(K::Controlled);
    types::Specialization& both = def.spec(K::ControlledAdjoint);
    if (adj.present && adj.gen == G::Auto) install(adj, generate_adjoint(*body, def.short_name, sink), "");
    if (ctl.present && ctl.gen == G::Auto) install(ctl, generate_controlled(*body, kControls, def.short_name, sink), kControls);
    if (both.present && both.gen == G::Auto) {
      const Block* source = nullptr;
      if (adj.gen == G::Self) {
        source = body;
      } else {
        source = adj.block;  // generated or provided
      }
      if (source != nullptr) install(both, generate_controlled(*source, kControls, def.short_name, sink), kControls);
    }
  }
  return all_ok;
}

}  // namespace qdsl::transform
