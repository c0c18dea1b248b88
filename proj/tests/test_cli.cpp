#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "json.hpp"
#include "qdsl/cli/cli.hpp"
#include "quantum_util.hpp"
#include "test_util.hpp"

using namespace qdsl;
using namespace qdsl::testing;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qdsl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

/// Writes `text` to a scratch file and returns its path.
std::string scratch(const std::string& name, const std::string& text) {
  auto dir = std::filesystem::temp_directory_path() / "qdsl_cli_test";
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::ofstream(p) << text;
  return p.string();
}

const char* kCoin = R"(
namespace Coin {
  open Microsoft.Quantum.Primitive;
  operation Flip() : Result {
    body {
      mutable r = Zero;
      using (q = Qubit()) {
        H(q);
        set r = M(q);
        Reset(q);
      }
      return r;
    }
  }
}
)";

}  // namespace

TEST_CASE("run corpus: exit code and exact standard output") {
  auto files = corpus("run");
  REQUIRE(files.size() >= 8);
  for (const auto& f : files) {
    CAPTURE(f.filename().string());
    std::string text = read_file(f);
    std::istringstream lines(text);
    std::string run_line, expected_out;
    int expected_exit = -1;
    for (std::string line; std::getline(lines, line) && line.rfind("//", 0) == 0;) {
      if (line.rfind("// run: ", 0) == 0) run_line = line.substr(8);
      if (line.rfind("// exit: ", 0) == 0) expected_exit = std::stoi(line.substr(9));
      if (line.rfind("// out: ", 0) == 0) expected_out += line.substr(8) + "\n";
    }
    REQUIRE(!run_line.empty());
    REQUIRE(expected_exit >= 0);
    auto words = split_words(run_line);
    words.insert(words.begin() + 1, f.string());
    CliResult r = run_cli(words);
    CAPTURE(r.err);
    CHECK(r.code == expected_exit);
    CHECK(r.out == expected_out);
  }
}

TEST_CASE("diagnostics and failures go to standard error") {
  auto path = [](const char* name) { return (test_dir() / "corpus" / "run" / name).string(); };
  CliResult empty = run_cli({"check", path("empty.qds")});
  CHECK(empty.code == cli::kOk);
  CHECK(empty.err.find("[W0001]") != std::string::npos);

  CliResult bad = run_cli({"check", path("function_calls_gate.qds")});
  CHECK(bad.code == cli::kCompileError);
  CHECK(bad.err.find("[E0211]") != std::string::npos);

  CliResult json = run_cli({"check", "--json", path("function_calls_gate.qds")});
  CHECK(json.code == cli::kCompileError);
  auto doc = nlohmann::json::parse(json.out);
  CHECK(doc["version"] == 1);
  REQUIRE(doc["diagnostics"].size() == 1);
  CHECK(doc["diagnostics"][0]["code"] == "E0211");
  CHECK(doc["diagnostics"][0]["line"] == 7);

  CliResult fail = run_cli({"run", path("fail.qds")});
  CHECK(fail.code == cli::kRuntimeFailure);
  CHECK(fail.err.find("error: no answer") != std::string::npos);
  CHECK(fail.err.find("at Samples.Fail.Main") != std::string::npos);

  CliResult dirty = run_cli({"run", "--permissive-release", path("dirty_release.qds")});
  CHECK(dirty.err.find("warning: qubit q0 released by the using block") != std::string::npos);
}

TEST_CASE("usage errors exit with 3") {
  auto answer = (test_dir() / "corpus" / "run" / "answer.qds").string();
  auto args = (test_dir() / "corpus" / "run" / "arguments.qds").string();
  CHECK(run_cli({}).code == cli::kUsageError);
  CHECK(run_cli({"frobnicate"}).code == cli::kUsageError);
  CHECK(run_cli({"run", answer, "--bogus"}).code == cli::kUsageError);
  CHECK(run_cli({"run", answer, "--shots", "0"}).code == cli::kUsageError);
  CHECK(run_cli({"run", answer, "--entry", "Nope"}).code == cli::kUsageError);
  CHECK(run_cli({"run", answer, "--strict-release", "--permissive-release"}).code == cli::kUsageError);
  CHECK(run_cli({"run", args, "--entry", "Scale", "--arg", "1"}).code == cli::kUsageError);
  CHECK(run_cli({"run", args, "--entry", "Scale", "--arg", "x", "--arg", "1.0", "--arg", "[]"}).code ==
        cli::kUsageError);
  CHECK(run_cli({"run", answer, "--max-qubits", "99"}).code == cli::kUsageError);
  CliResult help = run_cli({"--help"});
  CHECK(help.code == cli::kOk);
  CHECK(help.out.find("trace") != std::string::npos);
  CliResult version = run_cli({"--version"});
  CHECK(version.code == cli::kOk);
  CHECK(version.out == std::string(cli::kVersion) + "\n");
  CHECK(run_cli({"run", "/nonexistent/x.qds"}).code == cli::kCompileError);
}

TEST_CASE("histogram of a fair coin over 10000 shots") {
  auto c = compile_text(kCoin);
  REQUIRE_MESSAGE(c->ok(), errors_of(*c));
  cli::RunConfig config;
  config.shots = 10000;
  config.seed = 1;
  cli::RunReport report = cli::execute(*c, config);
  REQUIRE(report.has_histogram);
  REQUIRE(report.results.size() == 10000);
  uint64_t ones = report.histogram["One"];
  CHECK(ones + report.histogram["Zero"] == 10000);
  CHECK(ones >= 4850);
  CHECK(ones <= 5150);
  for (const auto& r : report.results) CHECK(r.leaked_qubits == 0);
}

TEST_CASE("JSON output is byte-identical for a fixed seed") {
  std::string file = scratch("coin.qds", kCoin);
  CliResult a = run_cli({"run", file, "--shots", "200", "--seed", "7", "--json"});
  CliResult b = run_cli({"run", file, "--shots", "200", "--seed", "7", "--json"});
  CliResult other = run_cli({"run", file, "--shots", "200", "--seed", "8", "--json"});
  REQUIRE(a.code == cli::kOk);
  CHECK(a.out == b.out);
  CHECK(a.out != other.out);
  auto doc = nlohmann::json::parse(a.out);
  CHECK(doc["entry"] == "Coin.Flip");
  CHECK(doc["seed"] == 7);
  CHECK(doc["results"].size() == 200);
  CHECK(doc["results"][5]["shot"] == 5);
  uint64_t total = 0;
  for (const auto& [k, v] : doc["histogram"].items()) total += v.get<uint64_t>();
  CHECK(total == 200);
}

TEST_CASE("shot k uses seed xor k") {
  auto c = compile_text(kCoin);
  cli::RunConfig many;
  many.shots = 16;
  many.seed = 3;
  cli::RunReport all = cli::execute(*c, many);
  for (uint64_t k = 0; k < 16; ++k) {
    cli::RunConfig one;
    one.seed = 3 ^ k;
    CHECK(cli::execute(*c, one).results[0].value == all.results[k].value);
  }
}

TEST_CASE("a failing shot stops the run") {
  std::string file = scratch("sometimes.qds", R"(
namespace S {
  open Microsoft.Quantum.Primitive;
  operation Main() : Result {
    body {
      mutable r = Zero;
      using (q = Qubit()) {
        H(q);
        set r = M(q);
        if (r == One) { fail "heads"; }
      }
      return r;
    }
  }
}
)");
  CliResult r = run_cli({"run", file, "--shots", "100", "--json"});
  CHECK(r.code == cli::kRuntimeFailure);
  auto doc = nlohmann::json::parse(r.out);
  auto results = doc["results"];
  REQUIRE(!results.empty());
  CHECK(results.size() < 100);
  CHECK(results.back()["value"].is_null());
  CHECK(results.back()["failure"]["message"] == "heads");
  CHECK(results.back()["failure"]["stack"][0] == "at S.Main");
  for (std::size_t i = 0; i + 1 < results.size(); ++i) CHECK(results[i]["value"] == "Zero");
}

TEST_CASE("flags change runtime behaviour") {
  std::string file = scratch("flags.qds", R"(
namespace F {
  open Microsoft.Quantum.Primitive;
  operation Main() : Int {
    body {
      Message("hello");
      using (qs = Qubit[3]) {
        X(qs[0]);
        X(qs[0]);
      }
      return 1;
    }
  }
}
)");
  CHECK(run_cli({"run", file}).out == "hello\n1\n");
  CHECK(run_cli({"run", file, "--elide-diagnostics"}).out == "1\n");

  CliResult dump = run_cli({"run", file, "--dump-state"});
  CHECK(dump.code == cli::kOk);
  CHECK(!dump.err.empty());
  CHECK(dump.out == "hello\n1\n");

  CliResult small = run_cli({"run", file, "--max-qubits", "2"});
  CHECK(small.code == cli::kRuntimeFailure);

  CHECK(run_cli({"trace", file}).out == "message: hello\nalloc [q0, q1, q2]\nX q0\nX q0\nrelease [q2, q1, q0]\n1\n");
}

TEST_CASE("environment variables supply defaults") {
  std::string file = scratch("coin_env.qds", kCoin);
  CliResult flag = run_cli({"run", file, "--seed", "11", "--shots", "20", "--json"});
  ::setenv("QDSL_SEED", "11", 1);
  ::setenv("QDSL_SHOTS", "20", 1);
  CliResult env = run_cli({"run", file, "--json"});
  ::unsetenv("QDSL_SEED");
  ::unsetenv("QDSL_SHOTS");
  CHECK(env.code == cli::kOk);
  CHECK(env.out == flag.out);
}

TEST_CASE("entry selection") {
  std::string two = scratch("two.qds", R"(
namespace E {
  function A() : Int { return 1; }
  function B() : Int { return 2; }
  function C(x : Int) : Int { return x; }
}
)");
  CHECK(run_cli({"run", two}).code == cli::kUsageError);
  CHECK(run_cli({"run", two, "--entry", "B"}).out == "2\n");
  CHECK(run_cli({"run", two, "--entry", "E.A"}).out == "1\n");
  CHECK(run_cli({"run", two, "-e", "C", "-a", "5"}).out == "5\n");
  std::string one = scratch("one.qds", R"(
namespace E {
  function A() : Int { return 1; }
  function C(x : Int) : Int { return x; }
}
)");
  CHECK(run_cli({"run", one}).out == "1\n");
}

TEST_CASE("emitted controlled specialization") {
  std::string file = scratch("ctl.qds", R"(
namespace G {
  open Microsoft.Quantum.Primitive;
  operation Flip(q : Qubit) : () {
    body { X(q); }
    controlled auto
  }
  operation Main() : () {
    body {
      using (qs = Qubit[2]) {
        (Controlled Flip)([qs[0]], qs[1]);
      }
    }
  }
}
)");
  CliResult r = run_cli({"trace", file, "--emit-specializations"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("// generated for G.Flip\ncontrolled (") != std::string::npos);
  CHECK(r.out.find("(Controlled X)(") != std::string::npos);
}

TEST_CASE("the ApproximateQFT sample checks clean") {
  auto file = (test_dir() / "corpus" / "accept" / "approximate_qft.qds").string();
  CliResult r = run_cli({"check", file});
  CHECK(r.code == cli::kOk);
  CHECK(r.err.empty());
}

TEST_CASE("emitted adjoint of the ApproximateQFT sample round-trips") {
  auto sample = test_dir() / "corpus" / "accept" / "approximate_qft.qds";
  std::string driver = scratch("aqft_driver.qds", R"(
namespace Driver {
  open Microsoft.Quantum.Primitive;
  open Microsoft.Quantum.Canon;
  operation Main() : () {
    body {
      using (qs = Qubit[3]) {
        ApproximateQFT(3, BigEndian(qs));
        (Adjoint ApproximateQFT)(3, BigEndian(qs));
      }
    }
  }
}
)");
  CliResult r = run_cli({"trace", sample.string(), driver, "--emit-specializations"});
  REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
  const std::string marker = "// generated for Microsoft.Quantum.Canon.ApproximateQFT\nadjoint ";
  auto start = r.out.find(marker);
  REQUIRE(start != std::string::npos);
  start += marker.size();
  auto end = r.out.find("\n}\n", start);
  REQUIRE(end != std::string::npos);
  std::string adjoint = r.out.substr(start, end + 2 - start);
  CAPTURE(adjoint);
  CHECK(adjoint.find("for (i in nQubits - 1 .. -1 .. 0)") != std::string::npos);
  CHECK(adjoint.find("for (j in i - 1 .. -1 .. 0)") != std::string::npos);
  CHECK(r.out.find("release [q2, q1, q0]") != std::string::npos);

  // Provide the printed text as the adjoint and compare with the generated one.
  std::string text = read_file(sample);
  auto at = text.find("adjoint auto");
  REQUIRE(at != std::string::npos);
  std::string provided = text;
  provided.replace(at, 12, "adjoint " + adjoint);
  auto provided_c = compile_text(provided);
  REQUIRE_MESSAGE(provided_c->ok(), errors_of(*provided_c));
  const auto* d = provided_c->model->find_callable("Microsoft.Quantum.Canon.ApproximateQFT");
  CHECK(d->spec(ast::SpecKind::Adjoint).gen == ast::SpecGen::Provided);
  Harness generated(text);
  Harness printed(provided);
  const std::string name = "Microsoft.Quantum.Canon.ApproximateQFT";
  for (int64_t a = 1; a <= 4; ++a) {
    CAPTURE(a);
    auto arg = [a](const std::vector<runtime::Value>& qs) { return runtime::Value(runtime::TupleValue{{a, big_endian(qs)}}); };
    Matrix want = generated.unitary(runtime::apply_functor(ast::Functor::Adjoint, generated.callable(name)), 4, arg);
    Matrix got = printed.unitary(runtime::apply_functor(ast::Functor::Adjoint, printed.callable(name)), 4, arg);
    CHECK(max_diff(want, got) < 1e-12);
    std::mt19937_64 rng(static_cast<uint64_t>(a));
    State in = random_state(4, rng);
    State back = printed.apply2(printed.callable(name), runtime::apply_functor(ast::Functor::Adjoint, printed.callable(name)), 4, arg, in);
    CHECK(max_diff(in, back) < 1e-10);
  }
}

TEST_CASE("shots do not see each other's state") {
  std::string file = scratch("sentinel.qds", R"(
namespace Sentinel {
  open Microsoft.Quantum.Primitive;
  operation Main() : Result {
    body {
      mutable first = Zero;
      using (qs = Qubit[2]) {
        set first = M(qs[0]);
        X(qs[0]);
        H(qs[1]);
      }
      return first;
    }
  }
}
)");
  CliResult r = run_cli({"run", file, "--shots", "50", "--permissive-release", "--json"});
  REQUIRE(r.code == cli::kOk);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["histogram"] == nlohmann::json{{"Zero", 50}});
}
