#include "doctest.h"
#include "qft_oracle.hpp"
#include "quantum_util.hpp"
#include "test_util.hpp"

using namespace qdsl;
using namespace qdsl::testing;
using runtime::format_value;
using runtime::Value;

namespace {

const char* kEmpty = "namespace Empty { function F() : () { } }";

Value aqft_args(int64_t a, const std::vector<Value>& qs) { return runtime::TupleValue{{a, big_endian(qs)}}; }

double norm_diff(const State& a, const State& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

std::string run_main(const std::string& body) {
  std::string text = "namespace T {\n  open Microsoft.Quantum.Primitive;\n  open Microsoft.Quantum.Canon;\n" + body + "\n}\n";
  return format_value(run_program(text, "T.Main").value);
}

}  // namespace

TEST_CASE("QFT matches the bit-reversed DFT on every basis state") {
  Harness h(kEmpty);
  Value qft = h.callable("Microsoft.Quantum.Canon.QFT");
  Value aqft = h.callable("Microsoft.Quantum.Canon.ApproximateQFT");
  for (std::size_t n = 1; n <= 5; ++n) {
    CAPTURE(n);
    auto oracle = dft_big_endian(n);
    Matrix full = h.unitary(aqft, n, [n](const auto& qs) { return aqft_args(static_cast<int64_t>(n), qs); });
    CHECK(max_diff_up_to_phase(full, oracle) < 1e-10);
    CHECK(max_diff(full, oracle) < 1e-10);
    CHECK(max_diff(h.unitary(qft, n, big_endian), oracle) < 1e-10);
  }
}

TEST_CASE("approximate QFT stays within the dropped-rotation bound") {
  Harness h(kEmpty);
  Value aqft = h.callable("Microsoft.Quantum.Canon.ApproximateQFT");
  const std::size_t n = 5;
  auto oracle = dft_big_endian(n);
  std::mt19937_64 rng(17);
  for (std::size_t a = n; a >= 1; --a) {
    CAPTURE(a);
    double bound = aqft_error_bound(n, a);
    double worst = 0;
    for (int k = 0; k < 20; ++k) {
      State in = random_state(n, rng);
      State got = h.apply(aqft, n, [a](const auto& qs) { return aqft_args(static_cast<int64_t>(a), qs); }, in);
      State want(in.size());
      for (std::size_t c = 0; c < in.size(); ++c) {
        for (std::size_t r = 0; r < in.size(); ++r) want[r] += oracle[c][r] * in[c];
      }
      worst = std::max(worst, norm_diff(got, want));
    }
    CHECK(worst <= bound + 1e-10);
    if (a == n) CHECK(worst < 1e-10);
    if (a < n) CHECK(worst > 1e-6);  // cutting rotations must change something
  }
}

TEST_CASE("CCNOT truth table") {
  Harness h(kEmpty);
  Value ccnot = h.callable("Microsoft.Quantum.Primitive.CCNOT");
  auto args = [](const std::vector<Value>& qs) { return Value(runtime::TupleValue{{qs[0], qs[1], qs[2]}}); };
  Matrix m = h.unitary(ccnot, 3, args);
  for (std::size_t b = 0; b < 8; ++b) {
    std::size_t want = (b & 1) && (b & 2) ? b ^ 4 : b;
    CHECK(max_diff(m[b], basis_state(3, want)) < 1e-12);
  }
}

TEST_CASE("SWAP and SwapReverseRegister permute basis states") {
  Harness h(kEmpty);
  Value rev = h.callable("Microsoft.Quantum.Canon.SwapReverseRegister");
  // |100> (qs[0] set) becomes |001>
  CHECK(max_diff(h.apply(rev, 3, qubit_array, basis_state(3, 0b001)), basis_state(3, 0b100)) < 1e-12);
  for (std::size_t n = 1; n <= 5; ++n) {
    Matrix m = h.unitary(rev, n, qubit_array);
    for (std::size_t b = 0; b < m.size(); ++b) CHECK(max_diff(m[b], basis_state(n, reverse_bits(b, n))) < 1e-12);
  }
  Value swap = h.callable("Microsoft.Quantum.Canon.SWAP");
  auto pair = [](const std::vector<Value>& qs) { return Value(runtime::TupleValue{{qs[0], qs[1]}}); };
  Matrix s = h.unitary(swap, 2, pair);
  CHECK(max_diff(s[1], basis_state(2, 2)) < 1e-12);
  CHECK(max_diff(s[2], basis_state(2, 1)) < 1e-12);
  CHECK(max_diff(s[3], basis_state(2, 3)) < 1e-12);
}

TEST_CASE("Map and Fold") {
  CHECK(run_main(R"(
  function Sq(x : Int) : Int { return x * x; }
  function Main() : Int[] { return Map(Sq, [1; 2; 3]); }
)") == "[1; 4; 9]");
  CHECK(run_main(R"(
  function Concat(acc : String, x : Int) : String { return $"{acc}{x}"; }
  function Main() : String { return Fold(Concat, "", [3; 1; 2]); }
)") == "\"312\"");
  CHECK(run_main(R"(
  function Id(x : Int) : Int { return x; }
  function Main() : Int[] { return Map(Id, new Int[0]); }
)") == "[]");
}

TEST_CASE("OperationPow applies the oracle power times") {
  Harness h(kEmpty);
  Value pow = h.callable("Microsoft.Quantum.Canon.OperationPow");
  Value t = h.callable("Microsoft.Quantum.Primitive.T");
  for (int64_t k = 0; k <= 8; ++k) {
    Value op = h.interpreter().invoke(pow, runtime::TupleValue{{t, k}});
    Matrix m = h.unitary(op, 1, [](const auto& qs) { return qs[0]; });
    std::complex<double> phase = std::polar(1.0, std::numbers::pi / 4 * static_cast<double>(k));
    CHECK(std::abs(m[0][0] - 1.0) < 1e-12);
    CHECK(std::abs(m[1][1] - phase) < 1e-12);
  }
}

TEST_CASE("M and Reset") {
  CHECK(run_main(R"(
  operation Main() : (Result, Result) {
    body {
      mutable r = (Zero, Zero);
      using (q = Qubit()) {
        X(q);
        let first = M(q);
        Reset(q);
        set r = (first, M(q));
      }
      return r;
    }
  }
)") == "(One, Zero)");
}

TEST_CASE("user definitions replace prelude ones of the same name") {
  auto c = compile_text(R"(
namespace Microsoft.Quantum.Canon {
  function Map<`T, `U> (mapper : (`T -> `U), array : `T[]) : `U[] { return new `U[0]; }
}
namespace T {
  open Microsoft.Quantum.Canon;
  function Sq(x : Int) : Int { return x * x; }
  function Main() : Int[] { return Map(Sq, [1; 2]); }
}
)");
  REQUIRE_MESSAGE(c->ok(), errors_of(*c));
  runtime::Interpreter it(*c->model);
  CHECK(format_value(it.call("T.Main", runtime::unit())) == "[]");
}

TEST_CASE("the language core works without the prelude") {
  CompileOptions o;
  o.prelude = false;
  auto c = compile({SourceInput{"core.qds", R"(
namespace T {
  function Main() : Int[] { return Microsoft.Quantum.Core.ArrayReverse([1; 2; 3]); }
}
)"}},
                   o);
  REQUIRE_MESSAGE(c->ok(), errors_of(*c));
  CHECK(c->model->find_callable("Microsoft.Quantum.Primitive.H") == nullptr);
  runtime::Interpreter it(*c->model);
  CHECK(format_value(it.call("T.Main", runtime::unit())) == "[3; 2; 1]");
}
