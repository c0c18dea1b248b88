#include <regex>

#include "doctest.h"
#include "qdsl/syntax/walk.hpp"
#include "qdsl/types/type.hpp"
#include "test_util.hpp"

using namespace qdsl;
using namespace qdsl::testing;

namespace {

struct Expectation {
  std::string code;
  uint32_t line = 0;
  uint32_t column = 0;
};

Expectation expectation_of(const std::string& text) {
  static const std::regex header(R"(^// expect: (\w+) at (\d+):(\d+))");
  std::smatch m;
  Expectation e;
  if (std::regex_search(text, m, header)) {
    e.code = m[1];
    e.line = static_cast<uint32_t>(std::stoul(m[2]));
    e.column = static_cast<uint32_t>(std::stoul(m[3]));
  }
  return e;
}

std::vector<Diagnostic> errors(const Compilation& c) {
  std::vector<Diagnostic> out;
  for (const auto& d : c.diagnostics) {
    if (d.severity == Severity::Error) out.push_back(d);
  }
  return out;
}

std::vector<std::string> codes(const Compilation& c) {
  std::vector<std::string> out;
  for (const auto& d : errors(c)) out.emplace_back(code_name(d.code));
  return out;
}

bool has_code(const Compilation& c, const char* code) {
  for (const auto& d : c.diagnostics) {
    if (code_name(d.code) == code) return true;
  }
  return false;
}

const ast::Expr* let_value(const Compilation& c, const std::string& callable, const std::string& name) {
  const auto* d = c.model->find_callable(callable);
  if (d == nullptr) return nullptr;
  const ast::Block* b = d->spec(ast::SpecKind::Body).block;
  const ast::Expr* found = nullptr;
  for (const auto& s : b->stmts) {
    ast::walk_stmt(
        s, [](const ast::Expr&) {},
        [&](const ast::Stmt& st) {
          if (const auto* l = std::get_if<ast::LetStmt>(&st.node)) {
            const auto* n = std::get_if<ast::Pattern::Name>(&l->pattern.node);
            if (n && n->name == name) found = &l->value;
          }
        });
  }
  return found;
}

std::string type_of_let(const Compilation& c, const std::string& callable, const std::string& name) {
  const ast::Expr* e = let_value(c, callable, name);
  REQUIRE(e != nullptr);
  REQUIRE(e->type != nullptr);
  return types::to_string(e->type);
}

}  // namespace

TEST_CASE("accept corpus compiles without errors") {
  auto files = corpus("accept");
  REQUIRE(files.size() >= 7);
  for (const auto& f : files) {
    CAPTURE(f.string());
    auto c = compile_file(f);
    CHECK_MESSAGE(c->ok(), errors_of(*c));
  }
}

TEST_CASE("every expression of an accepted program carries a normalized type") {
  std::size_t seen = 0;
  for (const auto& f : corpus("accept")) {
    auto c = compile_file(f);
    REQUIRE(c->ok());
    for (const auto& [name, d] : c->model->callables) {
      for (const auto& sp : d->specs) {
        if (!sp.present || sp.block == nullptr) continue;
        for (const auto& s : sp.block->stmts) {
          ast::walk_stmt(
              s,
              [&](const ast::Expr& e) {
                ++seen;
                CAPTURE(name);
                REQUIRE(e.type != nullptr);
                CHECK(types::is_normalized(e.type));
                CHECK_FALSE(types::contains_error(e.type));
              },
              [](const ast::Stmt&) {});
        }
      }
    }
  }
  CHECK(seen > 100);
}

TEST_CASE("reject corpus reports exactly the expected code at the expected position") {
  auto files = corpus("reject");
  REQUIRE(files.size() >= 15);
  std::set<std::string> distinct;
  for (const auto& f : files) {
    CAPTURE(f.string());
    std::string text = read_file(f);
    Expectation want = expectation_of(text);
    REQUIRE_FALSE(want.code.empty());
    distinct.insert(want.code);
    auto c = compile({SourceInput{f.string(), text}});
    auto errs = errors(*c);
    REQUIRE_MESSAGE(!errs.empty(), "no error reported");
    for (const auto& d : errs) CHECK_MESSAGE(code_name(d.code) == want.code, format_diagnostic(d));
    CHECK(errs[0].start.line == want.line);
    CHECK(errs[0].start.column == want.column);
  }
  CHECK(distinct.size() >= 15);
}

TEST_CASE("partial application leaves a singleton-equivalent input") {
  auto c = compile_file(test_dir() / "corpus" / "accept" / "partial_application.qds");
  REQUIRE_MESSAGE(c->ok(), errors_of(*c));
  CHECK(type_of_let(*c, "Samples.Partial.Apply", "partial") == "((Qubit, Int) => ())");
}

TEST_CASE("partial application keeps the functor variants of its base") {
  auto c = compile_text(R"(
namespace T {
  open Microsoft.Quantum.Primitive;
  operation Rot(k : Int, q : Qubit) : () {
    body { R1Frac(1, k, q); }
    adjoint auto
    controlled auto
    controlled adjoint auto
  }
  operation Use(c : Qubit, q : Qubit) : () {
    body {
      let p = Rot(2, _);
      (Controlled Adjoint p)([c], q);
    }
  }
}
)");
  REQUIRE_MESSAGE(c->ok(), errors_of(*c));
  CHECK(type_of_let(*c, "T.Use", "p") == "(Qubit => () : Adjoint, Controlled)");
}

TEST_CASE("functions may build operations by partial application") {
  auto c = compile_text(R"(
namespace T {
  open Microsoft.Quantum.Primitive;
  function Builder(k : Int) : (Qubit => () : Adjoint, Controlled) {
    return R1Frac(1, k, _);
  }
}
)");
  CHECK_MESSAGE(c->ok(), errors_of(*c));
}

TEST_CASE("generic callables are instantiated independently at each use") {
  auto c = compile_text(R"(
namespace T {
  open Microsoft.Quantum.Primitive;
  open Microsoft.Quantum.Canon;
  function Sq(x : Int) : Int { return x * x; }
  function IsOne(r : Result) : Bool { return r == One; }
  function Both() : (Int[], Bool[]) {
    let pair = (Map(Sq, [1; 2]), Map(IsOne, [One; Zero]));
    return pair;
  }
  function Lengths() : Int[] {
    let ls = Map(Length, [[1; 2]; [3]]);
    return ls;
  }
}
)");
  REQUIRE_MESSAGE(c->ok(), errors_of(*c));
  CHECK(type_of_let(*c, "T.Both", "pair") == "(Int[], Bool[])");
  CHECK(type_of_let(*c, "T.Lengths", "ls") == "Int[]");
}

TEST_CASE("an unapplied generic that never resolves is an error") {
  auto c = compile_text(R"(
namespace T {
  open Microsoft.Quantum.Primitive;
  function F() : () {
    let f = Length;
  }
}
)");
  CHECK(codes(*c) == std::vector<std::string>{"E0223"});
}

TEST_CASE("user-defined types upcast to their base but not back") {
  auto ok = compile_text(R"(
namespace T {
  open Microsoft.Quantum.Primitive;
  open Microsoft.Quantum.Canon;
  operation Count(qs : Qubit[]) : Int {
    body { return Length(qs); }
  }
  operation Use(qs : Qubit[]) : Int {
    body { return Count(BigEndian(qs)); }
  }
}
)");
  CHECK_MESSAGE(ok->ok(), errors_of(*ok));
  auto bad = compile_text(R"(
namespace T {
  open Microsoft.Quantum.Canon;
  function F(qs : Qubit[]) : BigEndian {
    return qs;
  }
}
)");
  CHECK(codes(*bad) == std::vector<std::string>{"E0210"});
}

TEST_CASE("Int promotes to Double in arithmetic") {
  auto c = compile_text(R"(
namespace T {
  function F() : Double {
    let x = 1.5 * 2;
    return x;
  }
}
)");
  REQUIRE_MESSAGE(c->ok(), errors_of(*c));
  CHECK(type_of_let(*c, "T.F", "x") == "Double");
}

TEST_CASE("ambiguous names from two opened namespaces") {
  auto c = compile_text(R"(
namespace A { function F() : Int { return 1; } }
namespace B { function F() : Int { return 2; } }
namespace C {
  open A;
  open B;
  function G() : Int { return F(); }
  function H() : Int { return A.F(); }
}
)");
  CHECK(codes(*c) == std::vector<std::string>{"E0204"});
}

TEST_CASE("redefining a name in the same scope is rejected, shadowing an outer one is not") {
  auto same = compile_text(R"(
namespace T {
  function F() : Int {
    let x = 1;
    let x = 2;
    return x;
  }
}
)");
  CHECK(codes(*same) == std::vector<std::string>{"E0203"});
  auto nested = compile_text(R"(
namespace T {
  function F() : Int {
    let x = 1;
    if (true) {
      let x = 2.0;
    }
    return x;
  }
}
)");
  CHECK_MESSAGE(nested->ok(), errors_of(*nested));
}

TEST_CASE("warnings do not fail a compilation") {
  auto empty = compile_text("");
  CHECK(empty->ok());
  CHECK(has_code(*empty, "W0001"));

  auto unused = compile_text(R"(
namespace T {
  function F() : () { 1 + 2; }
}
)");
  CHECK(unused->ok());
  CHECK(has_code(*unused, "W0002"));
}

TEST_CASE("return is allowed inside loops and conditionals") {
  auto c = compile_text(R"(
namespace T {
  open Microsoft.Quantum.Primitive;
  function Find(xs : Int[], v : Int) : Int {
    for (i in 0 .. Length(xs) - 1) {
      if (xs[i] == v) { return i; }
    }
    return -1;
  }
}
)");
  CHECK_MESSAGE(c->ok(), errors_of(*c));
}

TEST_CASE("mutable arrays of a user-defined type keep their exact type on set") {
  auto c = compile_text(R"(
namespace T {
  open Microsoft.Quantum.Canon;
  operation F(qs : Qubit[]) : () {
    body {
      mutable r = BigEndian(qs);
      set r = BigEndian(qs[0 .. 0]);
    }
  }
}
)");
  CHECK_MESSAGE(c->ok(), errors_of(*c));
}

TEST_CASE("copy-and-update builds a new array") {
  auto c = compile_text(R"(
namespace T {
  function F() : Int[] {
    mutable xs = new Int[3];
    set xs = xs w/ 1 <- 5;
    return xs;
  }
}
)");
  CHECK_MESSAGE(c->ok(), errors_of(*c));
}

TEST_CASE("a failing specialization rule names the callable") {
  auto c = compile_text(R"(
namespace T {
  open Microsoft.Quantum.Primitive;
  operation F(q : Qubit) : () {
    body { H(q); }
    adjoint auto
    controlled auto
  }
}
)");
  CHECK(codes(*c) == std::vector<std::string>{"E0221"});
}
