#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qdsl/support/box.hpp"
#include "qdsl/support/source.hpp"

namespace qdsl::types {
struct Type;
}

namespace qdsl::ast {

using TypeRef = std::shared_ptr<const types::Type>;

// ---------------------------------------------------------------------------
// Type syntax

struct TypeNode;

struct NamedType {
  std::string name;  // possibly dotted
};
struct ParamType {
  std::string name;  // includes the leading backtick
};
struct TupleType {
  std::vector<TypeNode> items;
};
struct ArrayType {
  Box<TypeNode> element;
};
enum class Functor { Adjoint, Controlled };
struct CallableType {
  Box<TypeNode> input;
  Box<TypeNode> output;
  bool is_operation = true;
  std::vector<Functor> variants;
};

struct TypeNode {
  std::variant<NamedType, ParamType, TupleType, ArrayType, CallableType> node;
  Span span;
};

// ---------------------------------------------------------------------------
// Expressions

struct Expr;

enum class PauliKind : uint8_t { I, X, Y, Z };
enum class ResultKind : uint8_t { Zero, One };
enum class UnaryOp { Negate, Not, BitNot };
enum class BinaryOp { Or, And, BitOr, BitXor, BitAnd, Eq, Ne, Lt, Le, Gt, Ge, Shl, Shr, Add, Sub, Mul, Div, Mod, Pow };

struct UnitLit {};
struct IntLit {
  int64_t value = 0;
};
struct DoubleLit {
  double value = 0.0;
};
struct BoolLit {
  bool value = false;
};
struct StringLit {
  std::string value;
};
struct ResultLit {
  ResultKind value = ResultKind::Zero;
};
struct PauliLit {
  PauliKind value = PauliKind::I;
};
struct InterpString {
  // Alternating text fragments and embedded expressions, in source order.
  struct Part {
    std::optional<std::string> text;
    std::vector<Expr> expr;  // exactly one element when !text
  };
  std::vector<Part> parts;
};
struct Ident {
  std::string name;  // possibly dotted
};
struct Placeholder {};
struct TupleExpr {
  std::vector<Expr> items;  // never exactly one
};
struct ArrayExpr {
  std::vector<Expr> items;
};
struct NewArray {
  TypeNode element;
  Box<Expr> size;
};
struct RangeExpr {
  Box<Expr> start;
  std::optional<Box<Expr>> step;
  Box<Expr> end;
};
struct Unary {
  UnaryOp op;
  Box<Expr> operand;
};
struct Binary {
  BinaryOp op;
  Box<Expr> lhs;
  Box<Expr> rhs;
};
struct Call {
  Box<Expr> callee;
  Box<Expr> args;  // UnitLit, a TupleExpr, or a single expression
};
struct FunctorApp {
  Functor functor;
  Box<Expr> operand;
};
struct Index {
  Box<Expr> base;
  Box<Expr> index;
};
struct CopyUpdate {
  Box<Expr> base;
  Box<Expr> index;
  Box<Expr> value;
};

enum class Resolution : uint8_t { None, Local, Callable, Udt };
enum class CallKind : uint8_t { None, Operation, Function, UdtConstructor, Partial };

struct Expr {
  using Node = std::variant<UnitLit, IntLit, DoubleLit, BoolLit, StringLit, ResultLit, PauliLit, InterpString, Ident,
                            Placeholder, TupleExpr, ArrayExpr, NewArray, RangeExpr, Unary, Binary, Call, FunctorApp,
                            Index, CopyUpdate>;
  Node node;
  Span span;

  // Filled in by the type checker.
  TypeRef type;
  Resolution resolution = Resolution::None;
  std::string resolved_name;  // fully qualified, for Callable/Udt identifiers
  CallKind call_kind = CallKind::None;
  TypeRef element_type;  // NewArray: resolved element type
};

template <class T>
T* get_if(Expr& e) {
  return std::get_if<T>(&e.node);
}
template <class T>
const T* get_if(const Expr& e) {
  return std::get_if<T>(&e.node);
}

// ---------------------------------------------------------------------------
// Statements

struct Stmt;

struct Block {
  std::vector<Stmt> stmts;
  Span span;
};

struct Pattern {
  struct Name {
    std::string name;
  };
  struct Discard {};
  struct Tuple {
    std::vector<Pattern> items;
  };
  std::variant<Name, Discard, Tuple> node;
  Span span;
};

struct ExprStmt {
  Expr expr;
};
struct LetStmt {
  Pattern pattern;
  Expr value;
};
struct MutableStmt {
  Pattern pattern;
  Expr value;
};
struct SetStmt {
  std::string name;
  Span name_span;
  Expr value;
};
struct IfStmt {
  struct Clause {
    Expr condition;
    Block body;
  };
  std::vector<Clause> clauses;  // if + elifs
  std::optional<Block> else_body;
};
struct ForStmt {
  std::string variable;
  Span variable_span;
  Expr range;
  Block body;
};
struct RepeatStmt {
  Block body;
  Expr until;
  std::optional<Block> fixup;
};
struct ReturnStmt {
  Expr value;
};
struct FailStmt {
  Expr message;
};
enum class AllocKind { Using, Borrowing };
struct QubitAllocStmt {
  AllocKind kind = AllocKind::Using;
  std::string name;
  Span name_span;
  bool single = false;         // Qubit()
  std::optional<Expr> count;   // Qubit[count]
  Block body;
};

struct Stmt {
  std::variant<ExprStmt, LetStmt, MutableStmt, SetStmt, IfStmt, ForStmt, RepeatStmt, ReturnStmt, FailStmt,
               QubitAllocStmt>
      node;
  Span span;
};

// ---------------------------------------------------------------------------
// Declarations

struct ParamNode {
  // Either a named, typed parameter or a nested parameter tuple.
  std::string name;
  std::optional<TypeNode> type;
  std::vector<ParamNode> items;
  bool is_tuple = false;
  Span span;
};

enum class SpecKind { Body, Adjoint, Controlled, ControlledAdjoint };
enum class SpecGen { Provided, Auto, Self, Intrinsic };

struct SpecDecl {
  SpecKind kind = SpecKind::Body;
  SpecGen gen = SpecGen::Provided;
  std::optional<std::string> controls;  // controlled specializations with a provided body
  std::optional<Block> body;
  Span span;
};

struct CallableDecl {
  bool is_operation = true;
  std::string name;
  Span name_span;
  std::vector<std::string> type_params;
  ParamNode params;  // always a tuple
  TypeNode return_type;
  std::vector<SpecDecl> specs;
  bool implicit_body = false;  // body written as bare statements
  Span span;
};

struct NewtypeDecl {
  std::string name;
  Span name_span;
  TypeNode base;
  Span span;
};

struct OpenDecl {
  std::string name;
  Span span;
};

using Item = std::variant<OpenDecl, CallableDecl, NewtypeDecl>;

struct NamespaceDecl {
  std::string name;  // empty for declarations outside any namespace
  std::vector<Item> items;
  Span span;
};

struct Program {
  std::vector<NamespaceDecl> namespaces;
  Span span;
};

std::string_view spec_kind_name(SpecKind kind);

}  // namespace qdsl::ast
