#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qdsl/support/source.hpp"

namespace qdsl {

enum class Severity { Error, Warning, Note };

// Stable diagnostic codes. The numeric part never changes once published;
// E00xx lexical, E01xx syntax, E02xx typing, E03xx specialization generation.
enum class Code {
  IllegalCharacter,        // E0001
  UnterminatedString,      // E0002
  InvalidNumber,           // E0003
  UnexpectedToken,         // E0101
  MissingBody,             // E0102
  StrayStatement,          // E0103
  DuplicateSpecialization, // E0104
  InvalidInterpolation,    // E0105
  UnknownName,             // E0201
  UnknownType,             // E0202
  DuplicateDefinition,     // E0203
  AmbiguousName,           // E0204
  TypeMismatch,            // E0210
  FunctionCallsOperation,  // E0211
  SetImmutable,            // E0212
  SetTypeChanged,          // E0213
  ReturnInAllocation,      // E0214
  MissingVariant,          // E0215
  PartialShape,            // E0216
  NotCallable,             // E0218
  MissingReturn,           // E0219
  MisplacedPlaceholder,    // E0220
  InvalidSpecialization,   // E0221
  AllocationInFunction,    // E0222
  UnresolvedTypeParameter, // E0223
  RecursiveNewtype,        // E0224
  NoDefaultValue,          // E0227
  AdjointIneligible,       // E0301
  NotAdjointable,          // E0302
  NotControllable,         // E0303
  ControlledIneligible,    // E0304
  NoCallables,             // W0001
  UnusedValue,             // W0002
  Io,                      // E0900
};

std::string_view code_name(Code code);

struct Diagnostic {
  Severity severity = Severity::Error;
  Code code = Code::UnexpectedToken;
  std::string message;
  std::string file;
  Span span;
  LineCol start;
  LineCol end;
};

/// Collects diagnostics against one source file.
class DiagnosticSink {
 public:
  explicit DiagnosticSink(const SourceFile* source, std::vector<Diagnostic>* out) : source_(source), out_(out) {}

  void report(Severity severity, Code code, Span span, std::string message);
  void error(Code code, Span span, std::string message) { report(Severity::Error, code, span, std::move(message)); }
  void warning(Code code, Span span, std::string message) { report(Severity::Warning, code, span, std::move(message)); }

  const SourceFile* source() const { return source_; }
  std::size_t error_count() const { return errors_; }

 private:
  const SourceFile* source_;
  std::vector<Diagnostic>* out_;
  std::size_t errors_ = 0;
};

bool has_errors(const std::vector<Diagnostic>& diags);

// `file:line:col: severity: message [code]`
std::string format_diagnostic(const Diagnostic& diag);
std::string format_diagnostics_json(const std::vector<Diagnostic>& diags);

}  // namespace qdsl
