#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qdsl/cli/cli.hpp"
#include "qdsl/driver/compile.hpp"
#include "qdsl/sim/simulator.hpp"
#include "qdsl/syntax/parser.hpp"
#include "qdsl/syntax/printer.hpp"
#include "qdsl/syntax/token.hpp"

namespace py = pybind11;
using namespace qdsl;

namespace {

using Sources = std::vector<std::pair<std::string, std::string>>;

std::unique_ptr<Compilation> compile_sources(const Sources& sources, bool prelude) {
  std::vector<SourceInput> inputs;
  for (const auto& [name, text] : sources) inputs.push_back({name, text});
  CompileOptions o;
  o.prelude = prelude;
  return compile(inputs, o);
}

py::tuple tokenize(const std::string& source, const std::string& name) {
  SourceFile file(name, source);
  std::vector<Diagnostic> diags;
  DiagnosticSink sink(&file, &diags);
  auto tokens = syntax::tokenize(file.text(), sink);
  py::list out;
  for (const auto& t : tokens) {
    if (t.kind == syntax::TokenKind::Eof) break;
    LineCol at = file.locate(t.span.begin);
    out.append(py::make_tuple(std::string(syntax::token_kind_name(t.kind)), t.lexeme, at.line, at.column));
  }
  return py::make_tuple(out, format_diagnostics_json(diags));
}

py::tuple pretty_print(const std::string& source, const std::string& name) {
  SourceFile file(name, source);
  std::vector<Diagnostic> diags;
  ast::Program program = syntax::parse_source(file, diags);
  std::string text = has_errors(diags) ? std::string() : syntax::pretty_print(program);
  return py::make_tuple(text, format_diagnostics_json(diags));
}

std::string check(const Sources& sources, bool prelude) {
  return format_diagnostics_json(compile_sources(sources, prelude)->user_diagnostics());
}

py::tuple run(const Sources& sources, const cli::RunConfig& config, bool with_trace) {
  auto c = compile_sources(sources, config.prelude);
  std::string diags = format_diagnostics_json(c->user_diagnostics());
  if (!c->ok()) return py::make_tuple(diags, py::none(), py::list());
  cli::RunReport report;
  try {
    py::gil_scoped_release release;
    report = cli::execute(*c, config, with_trace);
  } catch (const cli::UsageError& e) {
    throw py::value_error(e.what());
  }
  std::vector<std::string> trace;
  for (const auto& r : report.results) trace.insert(trace.end(), r.trace.begin(), r.trace.end());
  return py::make_tuple(diags, cli::report_json(report), trace);
}

sim::Mat2 gate(const std::string& name) {
  if (name == "H") return sim::gates::h();
  if (name == "X") return sim::gates::x();
  if (name == "Y") return sim::gates::y();
  if (name == "Z") return sim::gates::z();
  if (name == "I") return sim::gates::i();
  if (name == "T") return sim::gates::t();
  throw py::value_error("unknown gate '" + name + "'");
}

sim::Pauli pauli(const std::string& name) {
  if (name == "PauliI" || name == "I") return sim::Pauli::I;
  if (name == "PauliX" || name == "X") return sim::Pauli::X;
  if (name == "PauliY" || name == "Y") return sim::Pauli::Y;
  if (name == "PauliZ" || name == "Z") return sim::Pauli::Z;
  throw py::value_error("unknown Pauli '" + name + "'");
}

std::vector<sim::Pauli> paulis(const std::vector<std::string>& names) {
  std::vector<sim::Pauli> out;
  for (const auto& n : names) out.push_back(pauli(n));
  return out;
}

}  // namespace

PYBIND11_MODULE(_qdsl, m) {
  m.doc() = "Native core of the qdsl toolchain";
  m.attr("__version__") = cli::kVersion;

  m.def("tokenize", &tokenize, py::arg("source"), py::arg("name") = "<string>");
  m.def("pretty_print", &pretty_print, py::arg("source"), py::arg("name") = "<string>");
  m.def("check", &check, py::arg("sources"), py::arg("prelude") = true);
  m.def("run", &run, py::arg("sources"), py::arg("config"), py::arg("with_trace") = false);

  py::class_<cli::RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("entry", &cli::RunConfig::entry)
      .def_readwrite("args", &cli::RunConfig::args)
      .def_readwrite("shots", &cli::RunConfig::shots)
      .def_readwrite("seed", &cli::RunConfig::seed)
      .def_readwrite("strict_release", &cli::RunConfig::strict_release)
      .def_readwrite("elide_diagnostics", &cli::RunConfig::elide_diagnostics)
      .def_readwrite("dump_state", &cli::RunConfig::dump_state)
      .def_readwrite("prelude", &cli::RunConfig::prelude)
      .def_readwrite("max_qubits", &cli::RunConfig::max_qubits)
      .def_readwrite("max_iterations", &cli::RunConfig::max_iterations);

  py::register_exception<sim::SimError>(m, "SimulatorError", PyExc_RuntimeError);

  py::class_<sim::Simulator>(m, "Simulator")
      .def(py::init<std::size_t, uint64_t>(), py::arg("capacity") = 24, py::arg("seed") = 0)
      .def_property_readonly("num_qubits", &sim::Simulator::num_qubits)
      .def_property_readonly("ids", &sim::Simulator::ids)
      .def("allocate", &sim::Simulator::allocate, py::arg("id"))
      .def("release", &sim::Simulator::release, py::arg("id"))
      .def(
          "apply",
          [](sim::Simulator& s, const std::string& name, uint32_t target, const std::vector<uint32_t>& controls,
             bool adjoint) {
            sim::Mat2 u = gate(name);
            s.apply(adjoint ? sim::gates::adjoint(u) : u, target, controls);
          },
          py::arg("gate"), py::arg("target"), py::arg("controls") = std::vector<uint32_t>{},
          py::arg("adjoint") = false)
      .def(
          "r1frac",
          [](sim::Simulator& s, int64_t numerator, int64_t power, uint32_t target,
             const std::vector<uint32_t>& controls) { s.apply(sim::gates::r1frac(numerator, power), target, controls); },
          py::arg("numerator"), py::arg("power"), py::arg("target"), py::arg("controls") = std::vector<uint32_t>{})
      .def(
          "measure",
          [](sim::Simulator& s, const std::vector<std::string>& bases, const std::vector<uint32_t>& targets) {
            return s.measure(paulis(bases), targets) == sim::Result::One ? "One" : "Zero";
          },
          py::arg("bases"), py::arg("targets"))
      .def(
          "probability_zero",
          [](const sim::Simulator& s, const std::vector<std::string>& bases, const std::vector<uint32_t>& targets) {
            return s.probability_zero(paulis(bases), targets);
          },
          py::arg("bases"), py::arg("targets"))
      .def("prob_one", &sim::Simulator::prob_one, py::arg("id"))
      .def_property_readonly("amplitudes", &sim::Simulator::amplitudes)
      .def("set_amplitudes", &sim::Simulator::set_amplitudes, py::arg("amplitudes"))
      .def("seed", &sim::Simulator::seed, py::arg("seed"))
      .def("dump", &sim::Simulator::dump);
}
