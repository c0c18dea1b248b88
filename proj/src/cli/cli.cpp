#include "qdsl/cli/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "qdsl/runtime/interpreter.hpp"
#include "qdsl/syntax/printer.hpp"

namespace qdsl::cli {

namespace {

using nlohmann::ordered_json;

bool results_only(const types::TypeRef& t, const types::UdtTable& udts) {
  using types::Kind;
  switch (t->kind) {
    case Kind::Result: return true;
    case Kind::Array: return results_only(t->element(), udts);
    case Kind::Tuple:
      if (t->items.empty()) return false;
      for (const auto& i : t->items) {
        if (!results_only(i, udts)) return false;
      }
      return true;
    case Kind::Udt: {
      const types::TypeRef* base = udts.base_of(t->name);
      return base != nullptr && results_only(*base, udts);
    }
    default: return false;
  }
}

void flatten(const types::TypeRef& t, std::vector<types::TypeRef>& out) {
  if (t->kind == types::Kind::Tuple) {
    for (const auto& i : t->items) flatten(i, out);
    return;
  }
  out.push_back(t);
}

runtime::Value build(const types::TypeRef& t, const std::vector<runtime::Value>& leaves, std::size_t& next) {
  if (t->kind == types::Kind::Tuple) {
    std::vector<runtime::Value> items;
    for (const auto& i : t->items) items.push_back(build(i, leaves, next));
    return runtime::make_tuple(std::move(items));
  }
  return leaves[next++];
}

const types::CallableDef* select_entry(const Compilation& c, const std::string& name) {
  if (!name.empty()) {
    std::string error;
    const auto* d = runtime::find_entry(*c.model, name, &error);
    if (d == nullptr) throw UsageError(error);
    return d;
  }
  const types::CallableDef* found = nullptr;
  for (const auto& [q, d] : c.model->callables) {
    if (d->from_prelude || !d->input->is_unit()) continue;
    if (found != nullptr) throw UsageError("several callables take (); choose one with --entry");
    found = d.get();
  }
  if (found == nullptr) throw UsageError("no callable taking () to run; name one with --entry");
  return found;
}

void print_diagnostics(const Compilation& c, std::ostream& err) {
  for (const auto& d : c.diagnostics) err << format_diagnostic(d) << "\n";
}

std::string read_text(const std::string& path, bool& ok) {
  std::ifstream in(path, std::ios::binary);
  ok = static_cast<bool>(in);
  std::ostringstream ss;
  if (ok) ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::unique_ptr<Compilation> load(const std::vector<std::string>& files, bool prelude) {
  std::vector<SourceInput> inputs;
  std::vector<Diagnostic> io;
  for (const auto& f : files) {
    bool ok = false;
    std::string text = read_text(f, ok);
    if (!ok) {
      Diagnostic d;
      d.code = Code::Io;
      d.file = f;
      d.message = "cannot read '" + f + "'";
      io.push_back(std::move(d));
      continue;
    }
    inputs.push_back({f, std::move(text)});
  }
  CompileOptions options;
  options.prelude = prelude;
  auto c = compile(inputs, options);
  c->diagnostics.insert(c->diagnostics.begin(), io.begin(), io.end());
  return c;
}

runtime::Value entry_argument(const types::CallableDef& entry, const std::vector<std::string>& args,
                              const types::UdtTable& udts) {
  if (!entry.type_params.empty()) throw UsageError("entry point '" + entry.name + "' is generic");
  std::vector<types::TypeRef> leaves;
  flatten(entry.input, leaves);
  if (leaves.size() != args.size()) {
    throw UsageError("entry point '" + entry.name + "' takes " + std::to_string(leaves.size()) + " argument(s) of type " +
                     types::to_string(entry.input) + ", got " + std::to_string(args.size()));
  }
  std::vector<runtime::Value> values;
  for (std::size_t i = 0; i < args.size(); ++i) {
    try {
      values.push_back(runtime::parse_literal(args[i], leaves[i], udts));
    } catch (const runtime::ValueError& e) {
      throw UsageError(e.what());
    }
  }
  std::size_t next = 0;
  return build(entry.input, values, next);
}

RunReport execute(const Compilation& c, const RunConfig& config, bool with_trace) {
  if (config.shots == 0) throw UsageError("--shots must be at least 1");
  const types::CallableDef* entry = select_entry(c, config.entry);
  runtime::Value arg = entry_argument(*entry, config.args, c.model->udt_table);

  RunReport report;
  report.entry = entry->name;
  report.seed = config.seed;
  report.shots = config.shots;
  report.has_histogram = results_only(entry->output, c.model->udt_table);

  for (uint64_t shot = 0; shot < config.shots; ++shot) {
    ShotResult r;
    r.shot = shot;
    runtime::RunOptions options;
    options.seed = config.seed ^ shot;
    options.strict_release = config.strict_release;
    options.elide_diagnostics = config.elide_diagnostics;
    options.dump_state = config.dump_state;
    options.max_qubits = config.max_qubits;
    options.max_iterations = config.max_iterations;
    runtime::RunHooks hooks;
    hooks.message = [&](const std::string& m) {
      r.messages.push_back(m);
      if (with_trace) r.trace.push_back("message: " + m);
    };
    hooks.notice = [&](const std::string& n) { r.notices.push_back(n); };
    hooks.dump = [&](const std::string& d) { r.dumps.push_back(d); };
    if (with_trace) hooks.trace = [&](const std::string& t) { r.trace.push_back(t); };
    try {
      if (options.max_qubits > 30) throw runtime::Failure("--max-qubits cannot exceed 30");
      runtime::Interpreter interp(*c.model, options, hooks);
      runtime::Value v = interp.call(entry->name, arg);
      r.value = runtime::format_value(v);
      r.leaked_qubits = interp.ledger().used().size();
      if (report.has_histogram) ++report.histogram[r.value];
    } catch (const runtime::Failure& f) {
      r.ok = false;
      r.failure = f.what();
      r.stack = f.stack();
    }
    report.results.push_back(std::move(r));
    if (!report.results.back().ok) break;
  }
  return report;
}

std::string report_json(const RunReport& report) {
  ordered_json root;
  root["version"] = 1;
  root["entry"] = report.entry;
  root["seed"] = report.seed;
  root["shots"] = report.shots;
  root["results"] = ordered_json::array();
  for (const auto& r : report.results) {
    ordered_json j;
    j["shot"] = r.shot;
    if (r.ok) {
      j["value"] = r.value;
    } else {
      j["value"] = nullptr;
      j["failure"] = {{"message", r.failure}, {"stack", r.stack}};
    }
    j["messages"] = r.messages;
    if (!r.notices.empty()) j["notices"] = r.notices;
    root["results"].push_back(std::move(j));
  }
  if (report.has_histogram) {
    root["histogram"] = ordered_json::object();
    for (const auto& [k, n] : report.histogram) root["histogram"][k] = n;
  } else {
    root["histogram"] = nullptr;
  }
  return root.dump();
}

std::string emitted_specializations(const Compilation& c) {
  std::ostringstream os;
  for (const auto& [name, d] : c.model->callables) {
    if (d->from_prelude) continue;
    bool header = false;
    for (auto kind : {ast::SpecKind::Adjoint, ast::SpecKind::Controlled, ast::SpecKind::ControlledAdjoint}) {
      const auto& sp = d->spec(kind);
      if (sp.generated == nullptr) continue;
      if (!header) {
        os << "// generated for " << name << "\n";
        header = true;
      }
      os << ast::spec_kind_name(kind) << " ";
      if (kind != ast::SpecKind::Adjoint) os << "(" << sp.controls << ") ";
      os << syntax::pretty_print(*sp.generated, 0) << "\n";
    }
  }
  return os.str();
}

int cmd_check(const std::vector<std::string>& files, bool json, bool prelude, std::ostream& out, std::ostream& err) {
  auto c = load(files, prelude);
  if (json) {
    out << format_diagnostics_json(c->user_diagnostics()) << "\n";
  } else {
    print_diagnostics(*c, err);
  }
  return c->ok() ? kOk : kCompileError;
}

namespace {

void print_failure(const ShotResult& r, std::ostream& err) {
  err << "error: " << r.failure << "\n";
  for (const auto& s : r.stack) err << "    " << s << "\n";
}

int finish(const RunReport& report, const RunConfig& config, std::ostream& out, std::ostream& err, bool trace) {
  for (const auto& r : report.results) {
    for (const auto& n : r.notices) err << "warning: " << n << "\n";
    for (const auto& d : r.dumps) err << d;
  }
  if (config.json) {
    out << report_json(report) << "\n";
  } else {
    for (const auto& r : report.results) {
      if (trace) {
        for (const auto& t : r.trace) out << t << "\n";
      } else {
        for (const auto& m : r.messages) out << m << "\n";
      }
      if (!r.ok) break;
      if (report.shots == 1) {
        out << r.value << "\n";
      } else {
        out << "shot " << r.shot << ": " << r.value << "\n";
      }
    }
    if (report.has_histogram && report.shots > 1 && !report.failed()) {
      out << "histogram:\n";
      for (const auto& [k, n] : report.histogram) out << "  " << k << ": " << n << "\n";
    }
  }
  if (report.failed()) {
    print_failure(report.results.back(), err);
    return kRuntimeFailure;
  }
  return kOk;
}

int run_or_trace(const RunConfig& config, std::ostream& out, std::ostream& err, bool trace) {
  auto c = load(config.files, config.prelude);
  print_diagnostics(*c, err);
  if (!c->ok()) return kCompileError;
  if (trace && config.emit_specializations) out << emitted_specializations(*c);
  try {
    RunReport report = execute(*c, config, trace);
    return finish(report, config, out, err, trace);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return run_or_trace(config, out, err, false);
}

int cmd_trace(const RunConfig& config, std::ostream& out, std::ostream& err) {
  RunConfig one = config;
  one.shots = 1;
  return run_or_trace(one, out, err, true);
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compiler, simulator and test harness for qdsl quantum programs", "qdsl"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::vector<std::string> check_files;
  bool check_json = false;
  bool check_no_prelude = false;
  auto* check = app.add_subcommand("check", "Type-check source files");
  check->add_option("files", check_files, "Source files")->required();
  check->add_flag("--json", check_json, "Print diagnostics as JSON on standard output")->envname("QDSL_JSON");
  check->add_flag("--no-prelude", check_no_prelude, "Compile against the language core only");

  RunConfig config;
  bool permissive = false;
  bool no_prelude = false;
  auto add_run_options = [&](CLI::App* sub, bool shots) {
    sub->add_option("files", config.files, "Source files")->required();
    sub->add_option("-e,--entry", config.entry, "Callable to run (qualified or unique short name)")
        ->envname("QDSL_ENTRY");
    sub->add_option("-a,--arg", config.args, "Literal argument for the entry point (repeatable)")->allow_extra_args(false);
    if (shots) {
      sub->add_option("-n,--shots", config.shots, "Number of independent runs")
          ->check(CLI::PositiveNumber)
          ->envname("QDSL_SHOTS");
    }
    sub->add_option("-s,--seed", config.seed, "Random seed; shot k uses seed xor k")->envname("QDSL_SEED");
    sub->add_flag("--json", config.json, "Print results as JSON")->envname("QDSL_JSON");
    auto* strict = sub->add_flag("--strict-release", "Fail when a released qubit is not |0> (default)");
    sub->add_flag("--permissive-release", permissive, "Reset dirty qubits on release with a warning")
        ->envname("QDSL_PERMISSIVE_RELEASE")
        ->excludes(strict);
    sub->add_flag("--elide-diagnostics", config.elide_diagnostics, "Skip calls to functions returning ()")
        ->envname("QDSL_ELIDE_DIAGNOSTICS");
    sub->add_flag("--dump-state", config.dump_state, "Print amplitudes at the end of each allocation block")
        ->envname("QDSL_DUMP_STATE");
    sub->add_option("--max-qubits", config.max_qubits, "Qubit capacity of the simulator")
        ->check(CLI::Range(1, 30))
        ->envname("QDSL_MAX_QUBITS");
    sub->add_option("--max-iterations", config.max_iterations, "Iteration cap for repeat loops")
        ->check(CLI::PositiveNumber)
        ->envname("QDSL_MAX_ITERATIONS");
    sub->add_flag("--no-prelude", no_prelude, "Compile against the language core only");
  };
  auto* run = app.add_subcommand("run", "Run an entry point for a number of shots");
  add_run_options(run, true);
  auto* trace = app.add_subcommand("trace", "Run once, logging gates, measurements and qubit events");
  add_run_options(trace, false);
  trace->add_flag("--emit-specializations", config.emit_specializations,
                  "Print generated adjoint and controlled specializations first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }
  config.strict_release = !permissive;
  config.prelude = !no_prelude;

  if (check->parsed()) return cmd_check(check_files, check_json, !check_no_prelude, out, err);
  if (run->parsed()) return cmd_run(config, out, err);
  return cmd_trace(config, out, err);
}

}  // namespace qdsl::cli
