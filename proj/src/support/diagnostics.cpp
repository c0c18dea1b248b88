#include "qdsl/support/diagnostics.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace qdsl {

std::string_view code_name(Code code) {
  switch (code) {
    case Code::IllegalCharacter: return "E0001";
    case Code::UnterminatedString: return "E0002";
    case Code::InvalidNumber: return "E0003";
    case Code::UnexpectedToken: return "E0101";
    case Code::MissingBody: return "E0102";
    case Code::StrayStatement: return "E0103";
    case Code::DuplicateSpecialization: return "E0104";
    case Code::InvalidInterpolation: return "E0105";
    case Code::UnknownName: return "E0201";
    case Code::UnknownType: return "E0202";
    case Code::DuplicateDefinition: return "E0203";
    case Code::AmbiguousName: return "E0204";
    case Code::TypeMismatch: return "E0210";
    case Code::FunctionCallsOperation: return "E0211";
    case Code::SetImmutable: return "E0212";
    case Code::SetTypeChanged: return "E0213";
    case Code::ReturnInAllocation: return "E0214";
    case Code::MissingVariant: return "E0215";
    case Code::PartialShape: return "E0216";
    case Code::NotCallable: return "E0218";
    case Code::MissingReturn: return "E0219";
    case Code::MisplacedPlaceholder: return "E0220";
    case Code::InvalidSpecialization: return "E0221";
    case Code::AllocationInFunction: return "E0222";
    case Code::UnresolvedTypeParameter: return "E0223";
    case Code::RecursiveNewtype: return "E0224";
    case Code::NoDefaultValue: return "E0227";
    case Code::AdjointIneligible: return "E0301";
    case Code::NotAdjointable: return "E0302";
    case Code::NotControllable: return "E0303";
    case Code::ControlledIneligible: return "E0304";
    case Code::NoCallables: return "W0001";
    case Code::UnusedValue: return "W0002";
    case Code::Io: return "E0900";
  }
  return "E????";
}

void DiagnosticSink::report(Severity severity, Code code, Span span, std::string message) {
  Diagnostic d;
  d.severity = severity;
  d.code = code;
  d.message = std::move(message);
  d.span = span;
  if (source_ != nullptr) {
    d.file = source_->name();
    d.start = source_->locate(span.begin);
    d.end = source_->locate(span.end);
  }
  if (severity == Severity::Error) ++errors_;
  out_->push_back(std::move(d));
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

namespace {

std::string_view severity_name(Severity s) {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Note: return "note";
  }
  return "error";
}

}  // namespace

std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream os;
  os << (d.file.empty() ? "<input>" : d.file) << ':' << d.start.line << ':' << d.start.column << ": "
     << severity_name(d.severity) << ": " << d.message << " [" << code_name(d.code) << ']';
  return os.str();
}

std::string format_diagnostics_json(const std::vector<Diagnostic>& diags) {
  nlohmann::ordered_json root;
  root["version"] = 1;
  root["diagnostics"] = nlohmann::ordered_json::array();
  for (const auto& d : diags) {
    nlohmann::ordered_json j;
    j["file"] = d.file;
    j["line"] = d.start.line;
    j["column"] = d.start.column;
    j["end_line"] = d.end.line;
    j["end_column"] = d.end.column;
    j["severity"] = severity_name(d.severity);
    j["code"] = code_name(d.code);
    j["message"] = d.message;
    root["diagnostics"].push_back(std::move(j));
  }
  return root.dump();
}

}  // namespace qdsl
