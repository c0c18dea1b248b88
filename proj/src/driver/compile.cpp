#include "qdsl/driver/compile.hpp"

#include "qdsl/stdlib/prelude.hpp"
#include "qdsl/syntax/parser.hpp"
#include "qdsl/transform/specialize.hpp"
#include "qdsl/types/checker.hpp"

namespace qdsl {

std::vector<Diagnostic> Compilation::user_diagnostics() const {
  std::vector<Diagnostic> out;
  for (const auto& d : diagnostics) {
    if (d.file.empty() || d.file[0] != '<') out.push_back(d);
  }
  return out;
}

std::unique_ptr<Compilation> compile(const std::vector<SourceInput>& inputs, const CompileOptions& options) {
  auto c = std::make_unique<Compilation>();
  struct Unit {
    std::size_t index;
    bool prelude;
  };
  std::vector<Unit> units;
  auto add = [&](const std::string& name, const std::string& text, bool prelude) {
    c->sources.push_back(std::make_unique<SourceFile>(name, text));
    c->programs.push_back(std::make_unique<ast::Program>(syntax::parse_source(*c->sources.back(), c->diagnostics)));
    units.push_back({c->sources.size() - 1, prelude});
  };
  add(stdlib::core_file().name, stdlib::core_file().text, true);
  if (options.prelude) {
    for (const auto& f : stdlib::prelude_files()) add(f.name, f.text, true);
  }
  for (const auto& in : inputs) add(in.name, in.text, false);
  if (!c->ok()) return c;

  types::Checker checker(*c->model, c->diagnostics);
  for (const auto& u : units) checker.collect(*c->programs[u.index], *c->sources[u.index], u.prelude);
  checker.resolve_signatures();
  checker.check_bodies();
  transform::generate_specializations(*c->model, checker, c->diagnostics);

  for (const auto& u : units) {
    if (u.prelude) continue;
    bool any = false;
    for (const auto& ns : c->programs[u.index]->namespaces) {
      for (const auto& item : ns.items) any |= std::holds_alternative<ast::CallableDecl>(item);
    }
    if (!any) {
      DiagnosticSink sink(c->sources[u.index].get(), &c->diagnostics);
      sink.warning(Code::NoCallables, Span{0, 0}, "file declares no operations or functions");
    }
  }
  return c;
}

}  // namespace qdsl
