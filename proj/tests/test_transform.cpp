#include <map>

#include "doctest.h"
#include "prelude_subjects.hpp"
#include "program_gen.hpp"
#include "qdsl/syntax/printer.hpp"
#include "qdsl/transform/specialize.hpp"
#include "quantum_util.hpp"
#include "test_util.hpp"

using namespace qdsl;
using namespace qdsl::testing;
using runtime::Value;

namespace {

const char* kEmpty = "namespace Empty { function F() : () { } }";

void check_adjoint_restores(Harness& h, const Value& op, const Subject& s, uint64_t seed, int states = 50) {
  Value adj = runtime::apply_functor(ast::Functor::Adjoint, op);
  std::mt19937_64 rng(seed);
  for (int k = 0; k < states; ++k) {
    State in = random_state(s.qubits, rng);
    State out = h.apply2(op, adj, s.qubits, s.arg, in);
    REQUIRE(max_diff(in, out) < 1e-10);
  }
}

void check_controlled_matrix(Harness& h, const Value& op, const Subject& s) {
  Value ctl = runtime::apply_functor(ast::Functor::Controlled, op);
  Matrix u = h.unitary(op, s.qubits, s.arg);
  Matrix cu = h.unitary(ctl, s.qubits + 1, controlled_args(1, s.arg));
  CHECK(max_diff(cu, controlled_expectation(u)) < 1e-10);
}

Matrix dagger(const Matrix& m) {
  Matrix d(m.size(), State(m.size()));
  for (std::size_t c = 0; c < m.size(); ++c) {
    for (std::size_t r = 0; r < m.size(); ++r) d[r][c] = std::conj(m[c][r]);
  }
  return d;
}

}  // namespace

TEST_CASE("adjoint of every adjointable prelude operation restores random states") {
  Harness h(kEmpty);
  auto subjects = prelude_subjects();
  std::size_t covered = 0;
  for (const auto& [name, def] : h.compilation().model->callables) {
    if (!def->from_prelude || !def->is_operation || !(def->variants & types::kAdjointable)) continue;
    CAPTURE(name);
    auto it = subjects.find(name);
    REQUIRE_MESSAGE(it != subjects.end(), "no test subject for this operation");
    check_adjoint_restores(h, h.callable(name), it->second, std::hash<std::string>{}(name));
    ++covered;
  }
  CHECK(covered == subjects.size());
}

TEST_CASE("controlled prelude operations act as block-diag(I, U)") {
  Harness h(kEmpty);
  for (const auto& [name, s] : prelude_subjects()) {
    CAPTURE(name);
    check_controlled_matrix(h, h.callable(name), s);
  }
}

TEST_CASE("generated adjoint-auto programs") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    int n = 2 + static_cast<int>(seed % 5);
    std::string text = ProgramGenerator(seed, n).generate();
    CAPTURE(seed);
    CAPTURE(text);
    Harness h(text);
    Value op = h.callable("Gen.Target");
    Subject s{static_cast<std::size_t>(n), qubit_array};
    check_adjoint_restores(h, op, s, seed * 7919);
    if (n <= 5) check_controlled_matrix(h, op, s);
  }
}

TEST_CASE("functor algebra") {
  Harness h(kEmpty);
  Value qft = h.callable("Microsoft.Quantum.Canon.QFT");
  using ast::Functor;
  auto adj = [](const Value& v) { return runtime::apply_functor(Functor::Adjoint, v); };
  auto ctl = [](const Value& v) { return runtime::apply_functor(Functor::Controlled, v); };
  const std::size_t n = 3;

  Matrix u = h.unitary(qft, n, big_endian);
  Matrix ua = h.unitary(adj(qft), n, big_endian);
  CHECK(max_diff(ua, dagger(u)) < 1e-10);
  CHECK(max_diff(h.unitary(adj(adj(qft)), n, big_endian), u) < 1e-10);

  auto cargs = controlled_args(1, big_endian);
  Matrix ca = h.unitary(ctl(adj(qft)), n + 1, cargs);
  Matrix ac = h.unitary(adj(ctl(qft)), n + 1, cargs);
  CHECK(max_diff(ca, ac) < 1e-10);
  CHECK(max_diff(ca, controlled_expectation(ua)) < 1e-10);

  // two Controlled applications take two control registers
  auto ccargs = [](const std::vector<Value>& qs) {
    std::vector<Value> rest(qs.begin() + 2, qs.end());
    Value inner = Value(runtime::TupleValue{{runtime::make_array({qs[1]}), big_endian(rest)}});
    return Value(runtime::TupleValue{{runtime::make_array({qs[0]}), inner}});
  };
  Matrix cc = h.unitary(ctl(ctl(qft)), n + 2, ccargs);
  Matrix expected = controlled_expectation(controlled_expectation(u));
  CHECK(max_diff(cc, expected) < 1e-10);
}

TEST_CASE("generated adjoint of ApproximateQFT reverses its loops") {
  auto c = compile_file(test_dir() / "corpus" / "accept" / "approximate_qft.qds");
  REQUIRE_MESSAGE(c->ok(), errors_of(*c));
  const auto* d = c->model->find_callable("Microsoft.Quantum.Canon.ApproximateQFT");
  REQUIRE(d != nullptr);
  const auto& sp = d->spec(ast::SpecKind::Adjoint);
  REQUIRE(sp.generated != nullptr);
  std::string text = syntax::pretty_print(*sp.generated);
  CAPTURE(text);
  CHECK(text.find("let nQubits = Length(qs);") < text.find("Adjoint SwapReverseRegister"));
  CHECK(text.find("Adjoint SwapReverseRegister") < text.find("for (i in nQubits - 1 .. -1 .. 0)"));
  CHECK(text.find("for (j in i - 1 .. -1 .. 0)") != std::string::npos);
  CHECK(text.find("Adjoint Controlled R1Frac") != std::string::npos);
}

TEST_CASE("generated adjoint text round-trips through the compiler") {
  auto c = compile({});
  const auto* d = c->model->find_callable("Microsoft.Quantum.Canon.ApproximateQFT");
  REQUIRE(d != nullptr);
  std::string body = syntax::pretty_print(*d->spec(ast::SpecKind::Adjoint).generated, 2);
  std::string text =
      "namespace RoundTrip {\n"
      "    open Microsoft.Quantum.Primitive;\n"
      "    open Microsoft.Quantum.Canon;\n"
      "    operation Inverse (a : Int, qs : BigEndian) : () {\n"
      "        body " +
      body +
      "\n    }\n"
      "}\n";
  CAPTURE(text);
  Harness h(text);
  for (int64_t a = 1; a <= 4; ++a) {
    auto arg = [a](const std::vector<Value>& qs) { return Value(runtime::TupleValue{{a, big_endian(qs)}}); };
    Matrix printed = h.unitary(h.callable("RoundTrip.Inverse"), 4, arg);
    Matrix generated =
        h.unitary(runtime::apply_functor(ast::Functor::Adjoint, h.callable("Microsoft.Quantum.Canon.ApproximateQFT")), 4, arg);
    CHECK(max_diff(printed, generated) < 1e-12);
  }
}

TEST_CASE("generated controlled body threads the control register") {
  auto c = compile({});
  const auto* d = c->model->find_callable("Microsoft.Quantum.Canon.ApproximateQFT");
  const auto& sp = d->spec(ast::SpecKind::Controlled);
  REQUIRE(sp.generated != nullptr);
  CHECK(sp.controls == transform::kControls);
  std::string text = syntax::pretty_print(*sp.generated);
  CAPTURE(text);
  CHECK(text.find("(Controlled R1Frac)(__controls + [qs[i]], (1, i - j, qs[j]))") != std::string::npos);
  CHECK(text.find("(Controlled H)(__controls, qs[i])") != std::string::npos);
  CHECK(text.find("(Controlled SwapReverseRegister)(__controls, qs)") != std::string::npos);
}

TEST_CASE("both orderings of the controlled adjoint keyword are accepted") {
  for (const char* kw : {"controlled adjoint auto", "adjoint controlled auto"}) {
    std::string text = std::string(R"(
namespace T {
  open Microsoft.Quantum.Primitive;
  operation F(q : Qubit) : () {
    body { T(q); H(q); }
    adjoint auto
    controlled auto
    )") + kw + R"(
  }
}
)";
    auto c = compile_text(text);
    CHECK_MESSAGE(c->ok(), errors_of(*c));
  }
}

TEST_CASE("provided adjoint is used instead of generating one") {
  Harness h(R"(
namespace T {
  open Microsoft.Quantum.Primitive;
  operation F(q : Qubit) : () {
    body { T(q); }
    adjoint { T(q); T(q); T(q); T(q); T(q); T(q); T(q); }
  }
}
)");
  Value f = h.callable("T.F");
  Subject s{1, [](const std::vector<Value>& qs) { return qs[0]; }};
  check_adjoint_restores(h, f, s, 3, 10);
  const auto* d = h.compilation().model->find_callable("T.F");
  CHECK(d->spec(ast::SpecKind::Adjoint).generated == nullptr);
}

TEST_CASE("classical statements stay ahead of the reversed quantum tail") {
  Harness h(R"(
namespace T {
  open Microsoft.Quantum.Primitive;
  operation F(qs : Qubit[]) : () {
    body {
      let k = Length(qs) - 1;
      H(qs[0]);
      for (i in 1 .. k) {
        let p = i + 1;
        R1Frac(1, p, qs[i]);
        CNOT(qs[i - 1], qs[i]);
      }
    }
    adjoint auto
  }
}
)");
  Subject s{4, qubit_array};
  check_adjoint_restores(h, h.callable("T.F"), s, 11);
}
