#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdsl/runtime/value.hpp"
#include "qdsl/sim/simulator.hpp"
#include "qdsl/types/program.hpp"

namespace qdsl::runtime {

struct RunOptions {
  bool strict_release = true;
  bool elide_diagnostics = false;  // skip calls to functions returning ()
  bool dump_state = false;
  std::size_t max_qubits = 24;
  uint64_t max_iterations = 1000000;
  uint64_t max_depth = 10000;
  uint64_t seed = 0;
};

struct RunHooks {
  std::function<void(const std::string&)> message;  // Message(...) output
  std::function<void(const std::string&)> trace;    // gate, measurement and ledger events
  std::function<void(const std::string&)> notice;   // warnings raised while running
  std::function<void(const std::string&)> dump;     // state dumps
};

/// Program-halting failure: `fail`, a failed assertion, or a runtime error.
class Failure : public std::runtime_error {
 public:
  Failure(std::string message, std::vector<std::string> stack = {})
      : std::runtime_error(message), stack_(std::move(stack)) {}
  const std::vector<std::string>& stack() const { return stack_; }
  void set_stack(std::vector<std::string> s) { stack_ = std::move(s); }

 private:
  std::vector<std::string> stack_;
};

/// Free list and in-use set of qubit ids.
class QubitLedger {
 public:
  explicit QubitLedger(std::size_t capacity);

  /// Takes the `n` lowest free ids.
  std::vector<uint32_t> acquire(std::size_t n);
  void release(uint32_t id);

  bool in_use(uint32_t id) const { return used_.count(id) != 0; }
  const std::set<uint32_t>& used() const { return used_; }
  std::size_t free_count() const { return free_.size(); }
  std::size_t capacity() const { return capacity_; }
  uint64_t fresh_allocations() const { return fresh_; }
  uint64_t borrowed() const { return borrowed_; }
  void note_borrowed(std::size_t n) { borrowed_ += n; }

 private:
  std::size_t capacity_;
  std::set<uint32_t> free_;
  std::set<uint32_t> used_;
  uint64_t fresh_ = 0;
  uint64_t borrowed_ = 0;
};

/// Tree-walking evaluator over a checked program model.
class Interpreter {
 public:
  explicit Interpreter(const types::ProgramModel& model, RunOptions options = {}, RunHooks hooks = {});
  ~Interpreter();
  Interpreter(const Interpreter&) = delete;
  Interpreter& operator=(const Interpreter&) = delete;

  /// Calls a callable by fully qualified name.
  Value call(const std::string& name, const Value& arg);
  /// Invokes a callable value.
  Value invoke(const Value& callable, const Value& arg);
  /// Callable value for a definition; throws Failure if unknown.
  Value callable(const std::string& name) const;

  /// Allocates heap qubits outside any block, for driving operations from
  /// host code. Release them with release().
  std::vector<Value> allocate(std::size_t n);
  void release(const std::vector<Value>& qubits);

  sim::Simulator& simulator();
  const QubitLedger& ledger() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Looks up an entry point by qualified name, or by unqualified name when it
/// names exactly one non-prelude callable.
const types::CallableDef* find_entry(const types::ProgramModel& model, const std::string& name, std::string* error);

/// Runs `fn` on a thread with a large stack and rethrows its exception.
void run_with_large_stack(const std::function<void()>& fn, std::size_t bytes = std::size_t{1} << 29);

}  // namespace qdsl::runtime
