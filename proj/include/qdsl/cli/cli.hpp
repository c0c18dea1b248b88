#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdsl/driver/compile.hpp"
#include "qdsl/runtime/value.hpp"

namespace qdsl::cli {

enum ExitCode : int { kOk = 0, kCompileError = 1, kRuntimeFailure = 2, kUsageError = 3 };

inline constexpr const char* kVersion = "0.1.0";

/// Bad entry point or arguments.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<std::string> files;
  std::string entry;              // empty: the single user callable taking ()
  std::vector<std::string> args;  // literals for the entry's input
  uint64_t shots = 1;
  uint64_t seed = 0;
  bool json = false;
  bool strict_release = true;
  bool elide_diagnostics = false;
  bool dump_state = false;
  bool emit_specializations = false;
  bool prelude = true;
  std::size_t max_qubits = 24;
  uint64_t max_iterations = 1000000;
};

struct ShotResult {
  uint64_t shot = 0;
  bool ok = true;
  std::string value;  // literal rendering of the return value
  std::vector<std::string> messages;
  std::vector<std::string> notices;
  std::vector<std::string> trace;
  std::vector<std::string> dumps;
  std::string failure;
  std::vector<std::string> stack;
  std::size_t leaked_qubits = 0;
};

struct RunReport {
  std::string entry;
  uint64_t seed = 0;
  uint64_t shots = 0;
  std::vector<ShotResult> results;
  bool has_histogram = false;  // the entry returns only Result values
  std::map<std::string, uint64_t> histogram;

  bool failed() const { return !results.empty() && !results.back().ok; }
};

/// Reads and compiles `files`; unreadable files become E0900 diagnostics.
std::unique_ptr<Compilation> load(const std::vector<std::string>& files, bool prelude);

/// Converts command-line literals to the entry's input value.
runtime::Value entry_argument(const types::CallableDef& entry, const std::vector<std::string>& args,
                              const types::UdtTable& udts);

/// Runs `config.shots` fresh executions; shot k uses seed `seed ^ k`. Stops
/// after the first failing shot. Throws UsageError for a bad entry point.
RunReport execute(const Compilation& compilation, const RunConfig& config, bool with_trace = false);

std::string report_json(const RunReport& report);

/// Generated specializations of user callables, as source text.
std::string emitted_specializations(const Compilation& compilation);

int cmd_check(const std::vector<std::string>& files, bool json, bool prelude, std::ostream& out, std::ostream& err);
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_trace(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line: `qdsl (check|run|trace) ...`.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qdsl::cli
