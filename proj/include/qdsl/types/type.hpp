#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qdsl::types {

enum class Kind : uint8_t {
  Int,
  Double,
  Bool,
  String,
  Range,
  Pauli,
  Result,
  Qubit,
  Tuple,
  Array,
  Operation,
  Function,
  Udt,
  Param,
};

enum Variant : uint8_t {
  kNoVariants = 0,
  kAdjointable = 1,
  kControllable = 2,
};

struct Type;
using TypeRef = std::shared_ptr<const Type>;

/// Immutable type term. Unit is the empty tuple. Callables keep their input
/// in items[0] and output in items[1].
struct Type {
  Kind kind = Kind::Tuple;
  std::vector<TypeRef> items;
  std::string name;  // Udt and Param
  uint8_t variants = kNoVariants;

  bool is_unit() const { return kind == Kind::Tuple && items.empty(); }
  bool is_callable() const { return kind == Kind::Operation || kind == Kind::Function; }
  const TypeRef& input() const { return items[0]; }
  const TypeRef& output() const { return items[1]; }
  const TypeRef& element() const { return items[0]; }
};

TypeRef primitive(Kind kind);
TypeRef int_type();
TypeRef double_type();
TypeRef bool_type();
TypeRef string_type();
TypeRef range_type();
TypeRef pauli_type();
TypeRef result_type();
TypeRef qubit_type();
TypeRef unit_type();
/// Builds a tuple; a single item is returned unwrapped.
TypeRef tuple_type(std::vector<TypeRef> items);
/// Builds a tuple node exactly as given, for exercising normalize.
TypeRef raw_tuple_type(std::vector<TypeRef> items);
TypeRef array_type(TypeRef element);
TypeRef operation_type(TypeRef input, TypeRef output, uint8_t variants = kNoVariants);
TypeRef function_type(TypeRef input, TypeRef output);
TypeRef udt_type(std::string name);
TypeRef param_type(std::string name);
/// Placeholder for an ill-typed subterm; compatible with everything so one
/// mistake is reported once.
TypeRef error_type();
bool is_error(const TypeRef& t);
bool contains_error(const TypeRef& t);

/// Recursively unwraps single-element tuples.
TypeRef normalize(const TypeRef& t);
bool is_normalized(const TypeRef& t);

bool equal(const TypeRef& a, const TypeRef& b);
std::string to_string(const TypeRef& t);
std::string variants_suffix(uint8_t variants);

/// Base types of user-defined types, looked up by fully qualified name.
class UdtTable {
 public:
  void add(const std::string& name, TypeRef base) { bases_[name] = std::move(base); }
  const TypeRef* base_of(const std::string& name) const;
  const std::map<std::string, TypeRef>& all() const { return bases_; }

 private:
  std::map<std::string, TypeRef> bases_;
};

using Bindings = std::map<std::string, TypeRef>;
using VarPredicate = std::function<bool(const std::string&)>;

bool subtype(const TypeRef& a, const TypeRef& b, const UdtTable& udts);

/// Finds bindings that make `sub` usable where `sup` is expected. Params for
/// which `is_var` holds are unknowns; other Params only match themselves.
bool unify_sub(const TypeRef& sub, const TypeRef& sup, Bindings& bindings, const UdtTable& udts,
               const VarPredicate& is_var);

/// unify(a, b): `a` is the declared (parametric) side, `b` the supplied side.
/// Every Param is an unknown. Returns the extended bindings, or nullopt.
std::optional<Bindings> unify(const TypeRef& a, const TypeRef& b, Bindings bindings, const UdtTable& udts);

TypeRef substitute(const TypeRef& t, const Bindings& bindings);
bool occurs(const std::string& name, const TypeRef& t);
void collect_params(const TypeRef& t, std::vector<std::string>& out);

}  // namespace qdsl::types
