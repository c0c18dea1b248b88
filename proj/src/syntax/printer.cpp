#include "qdsl/syntax/printer.hpp"

#include <charconv>
#include <sstream>

namespace qdsl::syntax {

using namespace qdsl::ast;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Binding strength, loosest first. Mirrors the parser's levels.
enum Prec : int {
  kCopyUpdate = 1,
  kRange,
  kOr,
  kAnd,
  kBitOr,
  kBitXor,
  kBitAnd,
  kEquality,
  kCompare,
  kShift,
  kAdditive,
  kMultiplicative,
  kUnary,
  kPow,
  kFunctor,
  kPostfix,
  kPrimary,
};

int binary_prec(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return kOr;
    case BinaryOp::And: return kAnd;
    case BinaryOp::BitOr: return kBitOr;
    case BinaryOp::BitXor: return kBitXor;
    case BinaryOp::BitAnd: return kBitAnd;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return kEquality;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return kCompare;
    case BinaryOp::Shl:
    case BinaryOp::Shr: return kShift;
    case BinaryOp::Add:
    case BinaryOp::Sub: return kAdditive;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return kMultiplicative;
    case BinaryOp::Pow: return kPow;
  }
  return kPrimary;
}

std::string_view binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return "||";
    case BinaryOp::And: return "&&";
    case BinaryOp::BitOr: return "|||";
    case BinaryOp::BitXor: return "^^^";
    case BinaryOp::BitAnd: return "&&&";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Shl: return "<<<";
    case BinaryOp::Shr: return ">>>";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Pow: return "^";
  }
  return "?";
}

std::string_view unary_symbol(UnaryOp op) {
  switch (op) {
    case UnaryOp::Negate: return "-";
    case UnaryOp::Not: return "!";
    case UnaryOp::BitNot: return "~~~";
  }
  return "?";
}

std::string_view pauli_name(PauliKind p) {
  static constexpr std::string_view names[] = {"PauliI", "PauliX", "PauliY", "PauliZ"};
  return names[static_cast<int>(p)];
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string escape(std::string_view text, bool interpolated) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '{':
      case '}':
        if (interpolated) out.push_back('\\');
        out.push_back(c);
        break;
      default: out.push_back(c);
    }
  }
  return out;
}

int expr_prec(const Expr& e) {
  return std::visit(overloaded{
                        [](const CopyUpdate&) { return int(kCopyUpdate); },
                        [](const RangeExpr&) { return int(kRange); },
                        [](const Binary& b) { return binary_prec(b.op); },
                        [](const Unary&) { return int(kUnary); },
                        [](const IntLit& i) { return i.value < 0 ? int(kUnary) : int(kPrimary); },
                        [](const DoubleLit& d) { return d.value < 0 ? int(kUnary) : int(kPrimary); },
                        [](const FunctorApp&) { return int(kFunctor); },
                        [](const Call&) { return int(kPostfix); },
                        [](const Index&) { return int(kPostfix); },
                        [](const auto&) { return int(kPrimary); },
                    },
                    e.node);
}

class Printer {
 public:
  std::string str() const { return out_.str(); }

  void type(const TypeNode& t) {
    std::visit(overloaded{
                   [&](const NamedType& n) { out_ << n.name; },
                   [&](const ParamType& p) { out_ << p.name; },
                   [&](const TupleType& tt) {
                     out_ << '(';
                     for (std::size_t i = 0; i < tt.items.size(); ++i) {
                       if (i) out_ << ", ";
                       type(tt.items[i]);
                     }
                     out_ << ')';
                   },
                   [&](const ArrayType& a) {
                     type(*a.element);
                     out_ << "[]";
                   },
                   [&](const CallableType& c) {
                     out_ << '(';
                     type(*c.input);
                     out_ << (c.is_operation ? " => " : " -> ");
                     type(*c.output);
                     if (!c.variants.empty()) {
                       out_ << " : ";
                       for (std::size_t i = 0; i < c.variants.size(); ++i) {
                         if (i) out_ << ", ";
                         out_ << (c.variants[i] == Functor::Adjoint ? "Adjoint" : "Controlled");
                       }
                     }
                     out_ << ')';
                   },
               },
               t.node);
  }

  void expr(const Expr& e, int min_prec = kCopyUpdate) {
    bool wrap = expr_prec(e) < min_prec;
    if (wrap) out_ << '(';
    expr_inner(e);
    if (wrap) out_ << ')';
  }

  void pattern(const Pattern& p) {
    std::visit(overloaded{
                   [&](const Pattern::Name& n) { out_ << n.name; },
                   [&](const Pattern::Discard&) { out_ << '_'; },
                   [&](const Pattern::Tuple& t) {
                     out_ << '(';
                     for (std::size_t i = 0; i < t.items.size(); ++i) {
                       if (i) out_ << ", ";
                       pattern(t.items[i]);
                     }
                     out_ << ')';
                   },
               },
               p.node);
  }

  void block(const Block& b, int indent) {
    if (b.stmts.empty()) {
      out_ << "{}";
      return;
    }
    out_ << "{\n";
    for (const auto& s : b.stmts) stmt(s, indent + 1);
    pad(indent);
    out_ << '}';
  }

  void stmt(const Stmt& s, int indent) {
    pad(indent);
    std::visit(overloaded{
                   [&](const ExprStmt& x) {
                     expr(x.expr);
                     out_ << ';';
                   },
                   [&](const LetStmt& x) {
                     out_ << "let ";
                     pattern(x.pattern);
                     out_ << " = ";
                     expr(x.value);
                     out_ << ';';
                   },
                   [&](const MutableStmt& x) {
                     out_ << "mutable ";
                     pattern(x.pattern);
                     out_ << " = ";
                     expr(x.value);
                     out_ << ';';
                   },
                   [&](const SetStmt& x) {
                     out_ << "set " << x.name << " = ";
                     expr(x.value);
                     out_ << ';';
                   },
                   [&](const IfStmt& x) {
                     for (std::size_t i = 0; i < x.clauses.size(); ++i) {
                       out_ << (i == 0 ? "if (" : " elif (");
                       expr(x.clauses[i].condition);
                       out_ << ") ";
                       block(x.clauses[i].body, indent);
                     }
                     if (x.else_body) {
                       out_ << " else ";
                       block(*x.else_body, indent);
                     }
                   },
                   [&](const ForStmt& x) {
                     out_ << "for (" << x.variable << " in ";
                     expr(x.range);
                     out_ << ") ";
                     block(x.body, indent);
                   },
                   [&](const RepeatStmt& x) {
                     out_ << "repeat ";
                     block(x.body, indent);
                     out_ << " until (";
                     expr(x.until);
                     out_ << ')';
                     if (x.fixup) {
                       out_ << " fixup ";
                       block(*x.fixup, indent);
                     } else {
                       out_ << ';';
                     }
                   },
                   [&](const ReturnStmt& x) {
                     if (get_if<UnitLit>(x.value)) {
                       out_ << "return;";
                     } else {
                       out_ << "return ";
                       expr(x.value);
                       out_ << ';';
                     }
                   },
                   [&](const FailStmt& x) {
                     out_ << "fail ";
                     expr(x.message);
                     out_ << ';';
                   },
                   [&](const QubitAllocStmt& x) {
                     out_ << (x.kind == AllocKind::Using ? "using (" : "borrowing (") << x.name << " = Qubit";
                     if (x.single || !x.count) {
                       out_ << "()";
                     } else {
                       out_ << '[';
                       expr(*x.count);
                       out_ << ']';
                     }
                     out_ << ") ";
                     block(x.body, indent);
                   },
               },
               s.node);
    out_ << '\n';
  }

  void params(const ParamNode& p) {
    if (!p.is_tuple) {
      out_ << p.name << " : ";
      if (p.type) type(*p.type);
      return;
    }
    out_ << '(';
    for (std::size_t i = 0; i < p.items.size(); ++i) {
      if (i) out_ << ", ";
      params(p.items[i]);
    }
    out_ << ')';
  }

  void callable(const CallableDecl& c, int indent) {
    pad(indent);
    out_ << (c.is_operation ? "operation " : "function ") << c.name;
    if (!c.type_params.empty()) {
      out_ << '<';
      for (std::size_t i = 0; i < c.type_params.size(); ++i) {
        if (i) out_ << ", ";
        out_ << c.type_params[i];
      }
      out_ << '>';
    }
    out_ << ' ';
    params(c.params);
    out_ << " : ";
    type(c.return_type);
    out_ << " {\n";
    if (c.implicit_body && c.specs.size() == 1 && c.specs[0].body) {
      for (const auto& s : c.specs[0].body->stmts) stmt(s, indent + 1);
    } else {
      for (const auto& s : c.specs) spec(s, indent + 1);
    }
    pad(indent);
    out_ << "}\n";
  }

  void spec(const SpecDecl& s, int indent) {
    pad(indent);
    out_ << spec_kind_name(s.kind);
    switch (s.gen) {
      case SpecGen::Auto: out_ << " auto\n"; return;
      case SpecGen::Self: out_ << " self\n"; return;
      case SpecGen::Intrinsic: out_ << " intrinsic\n"; return;
      case SpecGen::Provided: break;
    }
    if (s.controls) out_ << " (" << *s.controls << ')';
    out_ << ' ';
    if (s.body) {
      block(*s.body, indent);
    } else {
      out_ << "{}";
    }
    out_ << '\n';
  }

  void item(const Item& it, int indent) {
    std::visit(overloaded{
                   [&](const OpenDecl& o) {
                     pad(indent);
                     out_ << "open " << o.name << ";\n";
                   },
                   [&](const NewtypeDecl& n) {
                     pad(indent);
                     out_ << "newtype " << n.name << " = ";
                     type(n.base);
                     out_ << ";\n";
                   },
                   [&](const CallableDecl& c) { callable(c, indent); },
               },
               it);
  }

  void program(const Program& p) {
    bool first = true;
    for (const auto& ns : p.namespaces) {
      if (!first) out_ << '\n';
      first = false;
      int indent = 0;
      if (!ns.name.empty()) {
        out_ << "namespace " << ns.name << " {\n";
        indent = 1;
      }
      for (std::size_t i = 0; i < ns.items.size(); ++i) {
        bool prev_open = i > 0 && std::holds_alternative<OpenDecl>(ns.items[i - 1]);
        bool this_open = std::holds_alternative<OpenDecl>(ns.items[i]);
        if (i > 0 && !(prev_open && this_open)) out_ << '\n';
        item(ns.items[i], indent);
      }
      if (!ns.name.empty()) out_ << "}\n";
    }
  }

 private:
  void pad(int indent) {
    for (int i = 0; i < indent; ++i) out_ << "    ";
  }

  void list(const std::vector<Expr>& items, std::string_view sep) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out_ << sep;
      expr(items[i]);
    }
  }

  void call_args(const Expr& args) {
    if (get_if<UnitLit>(args)) {
      out_ << "()";
    } else if (const auto* t = get_if<TupleExpr>(args)) {
      out_ << '(';
      list(t->items, ", ");
      out_ << ')';
    } else {
      out_ << '(';
      expr(args);
      out_ << ')';
    }
  }

  void expr_inner(const Expr& e) {
    std::visit(overloaded{
                   [&](const UnitLit&) { out_ << "()"; },
                   [&](const IntLit& x) { out_ << x.value; },
                   [&](const DoubleLit& x) { out_ << format_double(x.value); },
                   [&](const BoolLit& x) { out_ << (x.value ? "true" : "false"); },
                   [&](const StringLit& x) { out_ << '"' << escape(x.value, false) << '"'; },
                   [&](const ResultLit& x) { out_ << (x.value == ResultKind::One ? "One" : "Zero"); },
                   [&](const PauliLit& x) { out_ << pauli_name(x.value); },
                   [&](const InterpString& x) {
                     out_ << "$\"";
                     for (const auto& part : x.parts) {
                       if (part.text) {
                         out_ << escape(*part.text, true);
                       } else if (!part.expr.empty()) {
                         out_ << '{';
                         expr(part.expr.front());
                         out_ << '}';
                       }
                     }
                     out_ << '"';
                   },
                   [&](const Ident& x) { out_ << x.name; },
                   [&](const Placeholder&) { out_ << '_'; },
                   [&](const TupleExpr& x) {
                     out_ << '(';
                     list(x.items, ", ");
                     out_ << ')';
                   },
                   [&](const ArrayExpr& x) {
                     out_ << '[';
                     list(x.items, "; ");
                     out_ << ']';
                   },
                   [&](const NewArray& x) {
                     out_ << "new ";
                     type(x.element);
                     out_ << '[';
                     expr(*x.size);
                     out_ << ']';
                   },
                   [&](const RangeExpr& x) {
                     expr(*x.start, kOr);
                     out_ << " .. ";
                     if (x.step) {
                       expr(**x.step, kOr);
                       out_ << " .. ";
                     }
                     expr(*x.end, kOr);
                   },
                   [&](const Unary& x) {
                     out_ << unary_symbol(x.op);
                     // keep "- -x" from lexing as something else
                     if (x.op == UnaryOp::Negate) {
                       if (const auto* inner = get_if<Unary>(*x.operand); inner && inner->op == UnaryOp::Negate) {
                         out_ << ' ';
                       }
                       const auto* il = get_if<IntLit>(*x.operand);
                       const auto* dl = get_if<DoubleLit>(*x.operand);
                       if ((il && il->value < 0) || (dl && dl->value < 0)) out_ << ' ';
                     }
                     expr(*x.operand, kUnary);
                   },
                   [&](const Binary& x) {
                     if (x.op == BinaryOp::Pow) {
                       expr(*x.lhs, kFunctor);
                       out_ << " ^ ";
                       expr(*x.rhs, kUnary);
                       return;
                     }
                     int p = binary_prec(x.op);
                     expr(*x.lhs, p);
                     out_ << ' ' << binary_symbol(x.op) << ' ';
                     expr(*x.rhs, p + 1);
                   },
                   [&](const Call& x) {
                     expr(*x.callee, kPostfix);
                     call_args(*x.args);
                   },
                   [&](const FunctorApp& x) {
                     out_ << (x.functor == Functor::Adjoint ? "Adjoint " : "Controlled ");
                     if (get_if<FunctorApp>(*x.operand)) {
                       expr(*x.operand, kFunctor);
                     } else {
                       expr(*x.operand, kPrimary);
                     }
                   },
                   [&](const Index& x) {
                     expr(*x.base, kPostfix);
                     out_ << '[';
                     expr(*x.index);
                     out_ << ']';
                   },
                   [&](const CopyUpdate& x) {
                     expr(*x.base, kCopyUpdate);
                     out_ << " w/ ";
                     expr(*x.index, kRange);
                     out_ << " <- ";
                     expr(*x.value, kRange);
                   },
               },
               e.node);
  }

  std::ostringstream out_;
};

// ---------------------------------------------------------------------------
// Structural dump

class Dumper {
 public:
  std::string str() const { return out_.str(); }

  void type(const TypeNode& t) {
    std::visit(overloaded{
                   [&](const NamedType& n) { out_ << "(named " << n.name << ')'; },
                   [&](const ParamType& p) { out_ << "(param " << p.name << ')'; },
                   [&](const TupleType& tt) {
                     out_ << "(tuple";
                     for (const auto& i : tt.items) {
                       out_ << ' ';
                       type(i);
                     }
                     out_ << ')';
                   },
                   [&](const ArrayType& a) {
                     out_ << "(array ";
                     type(*a.element);
                     out_ << ')';
                   },
                   [&](const CallableType& c) {
                     out_ << (c.is_operation ? "(op " : "(fn ");
                     type(*c.input);
                     out_ << ' ';
                     type(*c.output);
                     for (auto v : c.variants) out_ << (v == Functor::Adjoint ? " Adj" : " Ctl");
                     out_ << ')';
                   },
               },
               t.node);
  }

  void expr(const Expr& e) {
    std::visit(overloaded{
                   [&](const UnitLit&) { out_ << "(unit)"; },
                   [&](const IntLit& x) { out_ << "(int " << x.value << ')'; },
                   [&](const DoubleLit& x) { out_ << "(double " << format_double(x.value) << ')'; },
                   [&](const BoolLit& x) { out_ << "(bool " << x.value << ')'; },
                   [&](const StringLit& x) { out_ << "(string \"" << escape(x.value, false) << "\")"; },
                   [&](const ResultLit& x) { out_ << (x.value == ResultKind::One ? "(One)" : "(Zero)"); },
                   [&](const PauliLit& x) { out_ << '(' << pauli_name(x.value) << ')'; },
                   [&](const InterpString& x) {
                     out_ << "(interp";
                     for (const auto& p : x.parts) {
                       if (p.text) {
                         out_ << " \"" << escape(*p.text, true) << '"';
                       } else {
                         for (const auto& sub : p.expr) {
                           out_ << ' ';
                           expr(sub);
                         }
                       }
                     }
                     out_ << ')';
                   },
                   [&](const Ident& x) { out_ << "(ident " << x.name << ')'; },
                   [&](const Placeholder&) { out_ << "(_)"; },
                   [&](const TupleExpr& x) { seq("tuple", x.items); },
                   [&](const ArrayExpr& x) { seq("array", x.items); },
                   [&](const NewArray& x) {
                     out_ << "(new ";
                     type(x.element);
                     out_ << ' ';
                     expr(*x.size);
                     out_ << ')';
                   },
                   [&](const RangeExpr& x) {
                     out_ << "(range ";
                     expr(*x.start);
                     out_ << ' ';
                     if (x.step) {
                       expr(**x.step);
                     } else {
                       out_ << '-';
                     }
                     out_ << ' ';
                     expr(*x.end);
                     out_ << ')';
                   },
                   [&](const Unary& x) {
                     out_ << '(' << unary_symbol(x.op) << ' ';
                     expr(*x.operand);
                     out_ << ')';
                   },
                   [&](const Binary& x) {
                     out_ << '(' << binary_symbol(x.op) << ' ';
                     expr(*x.lhs);
                     out_ << ' ';
                     expr(*x.rhs);
                     out_ << ')';
                   },
                   [&](const Call& x) {
                     out_ << "(call ";
                     expr(*x.callee);
                     out_ << ' ';
                     expr(*x.args);
                     out_ << ')';
                   },
                   [&](const FunctorApp& x) {
                     out_ << (x.functor == Functor::Adjoint ? "(Adjoint " : "(Controlled ");
                     expr(*x.operand);
                     out_ << ')';
                   },
                   [&](const Index& x) {
                     out_ << "(index ";
                     expr(*x.base);
                     out_ << ' ';
                     expr(*x.index);
                     out_ << ')';
                   },
                   [&](const CopyUpdate& x) {
                     out_ << "(update ";
                     expr(*x.base);
                     out_ << ' ';
                     expr(*x.index);
                     out_ << ' ';
                     expr(*x.value);
                     out_ << ')';
                   },
               },
               e.node);
  }

  void pattern(const Pattern& p) {
    std::visit(overloaded{
                   [&](const Pattern::Name& n) { out_ << n.name; },
                   [&](const Pattern::Discard&) { out_ << '_'; },
                   [&](const Pattern::Tuple& t) {
                     out_ << '(';
                     for (std::size_t i = 0; i < t.items.size(); ++i) {
                       if (i) out_ << ' ';
                       pattern(t.items[i]);
                     }
                     out_ << ')';
                   },
               },
               p.node);
  }

  void block(const Block& b) {
    out_ << "(block";
    for (const auto& s : b.stmts) {
      out_ << ' ';
      stmt(s);
    }
    out_ << ')';
  }

  void stmt(const Stmt& s) {
    std::visit(overloaded{
                   [&](const ExprStmt& x) {
                     out_ << "(expr ";
                     expr(x.expr);
                     out_ << ')';
                   },
                   [&](const LetStmt& x) {
                     out_ << "(let ";
                     pattern(x.pattern);
                     out_ << ' ';
                     expr(x.value);
                     out_ << ')';
                   },
                   [&](const MutableStmt& x) {
                     out_ << "(mutable ";
                     pattern(x.pattern);
                     out_ << ' ';
                     expr(x.value);
                     out_ << ')';
                   },
                   [&](const SetStmt& x) {
                     out_ << "(set " << x.name << ' ';
                     expr(x.value);
                     out_ << ')';
                   },
                   [&](const IfStmt& x) {
                     out_ << "(if";
                     for (const auto& c : x.clauses) {
                       out_ << ' ';
                       expr(c.condition);
                       out_ << ' ';
                       block(c.body);
                     }
                     if (x.else_body) {
                       out_ << " else ";
                       block(*x.else_body);
                     }
                     out_ << ')';
                   },
                   [&](const ForStmt& x) {
                     out_ << "(for " << x.variable << ' ';
                     expr(x.range);
                     out_ << ' ';
                     block(x.body);
                     out_ << ')';
                   },
                   [&](const RepeatStmt& x) {
                     out_ << "(repeat ";
                     block(x.body);
                     out_ << ' ';
                     expr(x.until);
                     if (x.fixup) {
                       out_ << ' ';
                       block(*x.fixup);
                     }
                     out_ << ')';
                   },
                   [&](const ReturnStmt& x) {
                     out_ << "(return ";
                     expr(x.value);
                     out_ << ')';
                   },
                   [&](const FailStmt& x) {
                     out_ << "(fail ";
                     expr(x.message);
                     out_ << ')';
                   },
                   [&](const QubitAllocStmt& x) {
                     out_ << (x.kind == AllocKind::Using ? "(using " : "(borrowing ") << x.name << ' ';
                     if (x.count) {
                       expr(*x.count);
                     } else {
                       out_ << "single";
                     }
                     out_ << ' ';
                     block(x.body);
                     out_ << ')';
                   },
               },
               s.node);
  }

  void params(const ParamNode& p) {
    if (!p.is_tuple) {
      out_ << '(' << p.name << ' ';
      if (p.type) type(*p.type);
      out_ << ')';
      return;
    }
    out_ << "(params";
    for (const auto& i : p.items) {
      out_ << ' ';
      params(i);
    }
    out_ << ')';
  }

  void program(const Program& p) {
    for (const auto& ns : p.namespaces) {
      out_ << "(namespace " << (ns.name.empty() ? "<root>" : ns.name);
      for (const auto& it : ns.items) {
        out_ << "\n  ";
        std::visit(overloaded{
                       [&](const OpenDecl& o) { out_ << "(open " << o.name << ')'; },
                       [&](const NewtypeDecl& n) {
                         out_ << "(newtype " << n.name << ' ';
                         type(n.base);
                         out_ << ')';
                       },
                       [&](const CallableDecl& c) {
                         out_ << (c.is_operation ? "(operation " : "(function ") << c.name;
                         for (const auto& tp : c.type_params) out_ << ' ' << tp;
                         out_ << ' ';
                         params(c.params);
                         out_ << ' ';
                         type(c.return_type);
                         if (c.implicit_body) out_ << " implicit";
                         for (const auto& s : c.specs) {
                           out_ << "\n    (" << spec_kind_name(s.kind);
                           static constexpr std::string_view gens[] = {"provided", "auto", "self", "intrinsic"};
                           out_ << ' ' << gens[static_cast<int>(s.gen)];
                           if (s.controls) out_ << " (" << *s.controls << ')';
                           if (s.body) {
                             out_ << ' ';
                             block(*s.body);
                           }
                           out_ << ')';
                         }
                         out_ << ')';
                       },
                   },
                   it);
      }
      out_ << ")\n";
    }
  }

 private:
  void seq(std::string_view tag, const std::vector<Expr>& items) {
    out_ << '(' << tag;
    for (const auto& i : items) {
      out_ << ' ';
      expr(i);
    }
    out_ << ')';
  }

  std::ostringstream out_;
};

// ---------------------------------------------------------------------------
// Span containment

class SpanChecker {
 public:
  std::vector<std::string> problems;

  void expr(const Expr& e) {
    auto child = [&](const Expr& c) {
      within(e.span, c.span, "expression");
      expr(c);
    };
    std::visit(overloaded{
                   [&](const InterpString& x) {
                     for (const auto& p : x.parts)
                       for (const auto& sub : p.expr) child(sub);
                   },
                   [&](const TupleExpr& x) {
                     for (const auto& i : x.items) child(i);
                   },
                   [&](const ArrayExpr& x) {
                     for (const auto& i : x.items) child(i);
                   },
                   [&](const NewArray& x) {
                     within(e.span, x.element.span, "new-array type");
                     child(*x.size);
                   },
                   [&](const RangeExpr& x) {
                     child(*x.start);
                     if (x.step) child(**x.step);
                     child(*x.end);
                   },
                   [&](const Unary& x) { child(*x.operand); },
                   [&](const Binary& x) {
                     child(*x.lhs);
                     child(*x.rhs);
                   },
                   [&](const Call& x) {
                     child(*x.callee);
                     child(*x.args);
                   },
                   [&](const FunctorApp& x) { child(*x.operand); },
                   [&](const Index& x) {
                     child(*x.base);
                     child(*x.index);
                   },
                   [&](const CopyUpdate& x) {
                     child(*x.base);
                     child(*x.index);
                     child(*x.value);
                   },
                   [&](const auto&) {},
               },
               e.node);
  }

  void block(Span parent, const Block& b) {
    within(parent, b.span, "block");
    for (const auto& s : b.stmts) stmt(b.span, s);
  }

  void stmt(Span parent, const Stmt& s) {
    within(parent, s.span, "statement");
    auto ex = [&](const Expr& e) {
      within(s.span, e.span, "statement expression");
      expr(e);
    };
    std::visit(overloaded{
                   [&](const ExprStmt& x) { ex(x.expr); },
                   [&](const LetStmt& x) {
                     within(s.span, x.pattern.span, "pattern");
                     ex(x.value);
                   },
                   [&](const MutableStmt& x) {
                     within(s.span, x.pattern.span, "pattern");
                     ex(x.value);
                   },
                   [&](const SetStmt& x) { ex(x.value); },
                   [&](const IfStmt& x) {
                     for (const auto& c : x.clauses) {
                       ex(c.condition);
                       block(s.span, c.body);
                     }
                     if (x.else_body) block(s.span, *x.else_body);
                   },
                   [&](const ForStmt& x) {
                     ex(x.range);
                     block(s.span, x.body);
                   },
                   [&](const RepeatStmt& x) {
                     block(s.span, x.body);
                     ex(x.until);
                     if (x.fixup) block(s.span, *x.fixup);
                   },
                   [&](const ReturnStmt& x) { ex(x.value); },
                   [&](const FailStmt& x) { ex(x.message); },
                   [&](const QubitAllocStmt& x) {
                     if (x.count) ex(*x.count);
                     block(s.span, x.body);
                   },
               },
               s.node);
  }

  void program(const Program& p) {
    for (const auto& ns : p.namespaces) {
      within(p.span, ns.span, "namespace");
      for (const auto& it : ns.items) {
        std::visit(overloaded{
                       [&](const OpenDecl& o) { within(ns.span, o.span, "open"); },
                       [&](const NewtypeDecl& n) {
                         within(ns.span, n.span, "newtype");
                         within(n.span, n.base.span, "newtype base");
                       },
                       [&](const CallableDecl& c) {
                         within(ns.span, c.span, "callable");
                         within(c.span, c.params.span, "parameters");
                         within(c.span, c.return_type.span, "return type");
                         for (const auto& s : c.specs) {
                           within(c.span, s.span, "specialization");
                           if (s.body) block(s.span, *s.body);
                         }
                       },
                   },
                   it);
      }
    }
  }

 private:
  void within(Span parent, Span child, std::string_view what) {
    if (!parent.contains(child)) {
      std::ostringstream os;
      os << what << " [" << child.begin << ", " << child.end << ") escapes parent [" << parent.begin << ", "
         << parent.end << ")";
      problems.push_back(os.str());
    }
  }
};

}  // namespace

}  // namespace qdsl::syntax

namespace qdsl::ast {

std::string_view spec_kind_name(SpecKind kind) {
  switch (kind) {
    case SpecKind::Body: return "body";
    case SpecKind::Adjoint: return "adjoint";
    case SpecKind::Controlled: return "controlled";
    case SpecKind::ControlledAdjoint: return "controlled adjoint";
  }
  return "?";
}

}  // namespace qdsl::ast

namespace qdsl::syntax {

std::string pretty_print(const Program& program) {
  Printer p;
  p.program(program);
  return p.str();
}

std::string pretty_print(const CallableDecl& callable, int indent) {
  Printer p;
  p.callable(callable, indent);
  return p.str();
}

std::string pretty_print(const Stmt& stmt, int indent) {
  Printer p;
  p.stmt(stmt, indent);
  return p.str();
}

std::string pretty_print(const Block& block, int indent) {
  Printer p;
  p.block(block, indent);
  return p.str();
}

std::string pretty_print(const Expr& expr) {
  Printer p;
  p.expr(expr);
  return p.str();
}

std::string pretty_print(const TypeNode& type) {
  Printer p;
  p.type(type);
  return p.str();
}

std::string pretty_print(const Pattern& pattern) {
  Printer p;
  p.pattern(pattern);
  return p.str();
}

std::string dump_ast(const Program& program) {
  Dumper d;
  d.program(program);
  return d.str();
}

std::string dump_ast(const Stmt& stmt) {
  Dumper d;
  d.stmt(stmt);
  return d.str();
}

std::string dump_ast(const Expr& expr) {
  Dumper d;
  d.expr(expr);
  return d.str();
}

std::vector<std::string> span_violations(const Program& program) {
  SpanChecker c;
  c.program(program);
  return std::move(c.problems);
}

}  // namespace qdsl::syntax
