#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qdsl/sim/simulator.hpp"
#include "qdsl/types/program.hpp"

namespace qdsl::runtime {

struct Value;
struct Closure;

struct RangeValue {
  int64_t start = 0;
  int64_t step = 1;
  int64_t end = -1;

  /// Number of elements; the sequence stops before passing `end`.
  uint64_t size() const;
  int64_t at(uint64_t i) const { return start + static_cast<int64_t>(i) * step; }
};

struct QubitRef {
  uint32_t id = 0;
};

struct TupleValue {
  std::vector<Value> items;  // empty for (); never exactly one
};

struct ArrayValue {
  std::shared_ptr<const std::vector<Value>> items;
};

struct UdtValue {
  std::string name;
  std::shared_ptr<const Value> inner;
};

struct CallableValue {
  std::shared_ptr<const Closure> closure;
};

struct Value {
  std::variant<TupleValue, int64_t, double, bool, std::string, RangeValue, sim::Pauli, sim::Result, QubitRef, ArrayValue,
               CallableValue, UdtValue>
      v;

  Value() = default;
  template <class T>
  Value(T x) : v(std::move(x)) {}

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(v);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(v);
  }
};

Value unit();
Value make_tuple(std::vector<Value> items);  // unwraps a single item
Value make_array(std::vector<Value> items);
const std::vector<Value>& array_items(const Value& v);

/// Peels user-defined type wrappers; UDT values stand in for their base.
const Value& strip(const Value& v);

/// Partially applied arguments: the supplied leaves plus holes.
struct ArgTemplate {
  enum Kind { Hole, Fixed, Tuple } kind = Fixed;
  Value value;
  std::vector<ArgTemplate> items;

  bool has_hole() const;
};

/// Runtime callable: a definition, a type constructor or a partial
/// application, with the functors applied on top of it in normal form.
struct Closure {
  enum Kind { Definition, UdtConstructor, Partial } kind = Definition;
  const types::CallableDef* def = nullptr;
  std::string udt;
  std::shared_ptr<const Closure> base;
  std::shared_ptr<const ArgTemplate> args;
  bool adjoint = false;  // parity of Adjoint applications
  int controlled = 0;    // number of Controlled applications
};

Value make_callable(const types::CallableDef* def);

/// Functor application: Adjoint flips the parity, Controlled adds one control
/// register argument.
Value apply_functor(ast::Functor f, const Value& callable);

/// Partial application; no quantum effects occur here.
Value apply_partial(const Value& callable, ArgTemplate args);

/// Merges the value for the open positions into the template.
Value fill(const ArgTemplate& t, const Value& missing);

bool values_equal(const Value& a, const Value& b);

/// Literal-like rendering: strings quoted when `quote` is set.
std::string format_value(const Value& v, bool quote = true);

/// Default value for arrays created with `new T[n]`.
Value default_value(const types::TypeRef& t, const types::UdtTable& udts);

/// Every qubit reachable from `v`, including captures of partial applications.
void collect_qubits(const Value& v, std::vector<uint32_t>& out);

/// Parses a command-line literal into a value of type `t`.
Value parse_literal(const std::string& text, const types::TypeRef& t, const types::UdtTable& udts);

class ValueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qdsl::runtime
