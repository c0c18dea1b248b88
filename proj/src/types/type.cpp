#include "qdsl/types/type.hpp"

#include <sstream>

namespace qdsl::types {

namespace {

TypeRef make(Kind kind, std::vector<TypeRef> items = {}, std::string name = {}, uint8_t variants = kNoVariants) {
  auto t = std::make_shared<Type>();
  t->kind = kind;
  t->items = std::move(items);
  t->name = std::move(name);
  t->variants = variants;
  return t;
}

}  // namespace

TypeRef primitive(Kind kind) {
  static const TypeRef cache[] = {
      make(Kind::Int),   make(Kind::Double), make(Kind::Bool),   make(Kind::String),
      make(Kind::Range), make(Kind::Pauli),  make(Kind::Result), make(Kind::Qubit),
  };
  return cache[static_cast<int>(kind)];
}

TypeRef int_type() { return primitive(Kind::Int); }
TypeRef double_type() { return primitive(Kind::Double); }
TypeRef bool_type() { return primitive(Kind::Bool); }
TypeRef string_type() { return primitive(Kind::String); }
TypeRef range_type() { return primitive(Kind::Range); }
TypeRef pauli_type() { return primitive(Kind::Pauli); }
TypeRef result_type() { return primitive(Kind::Result); }
TypeRef qubit_type() { return primitive(Kind::Qubit); }

TypeRef unit_type() {
  static const TypeRef unit = make(Kind::Tuple);
  return unit;
}

TypeRef tuple_type(std::vector<TypeRef> items) {
  if (items.size() == 1) return std::move(items[0]);
  if (items.empty()) return unit_type();
  return make(Kind::Tuple, std::move(items));
}

TypeRef raw_tuple_type(std::vector<TypeRef> items) { return make(Kind::Tuple, std::move(items)); }

TypeRef array_type(TypeRef element) { return make(Kind::Array, {std::move(element)}); }

TypeRef operation_type(TypeRef input, TypeRef output, uint8_t variants) {
  return make(Kind::Operation, {std::move(input), std::move(output)}, {}, variants);
}

TypeRef function_type(TypeRef input, TypeRef output) {
  return make(Kind::Function, {std::move(input), std::move(output)});
}

TypeRef udt_type(std::string name) { return make(Kind::Udt, {}, std::move(name)); }
TypeRef param_type(std::string name) { return make(Kind::Param, {}, std::move(name)); }

TypeRef error_type() {
  static const TypeRef err = make(Kind::Param, {}, "?");
  return err;
}

bool is_error(const TypeRef& t) { return t->kind == Kind::Param && t->name == "?"; }

bool contains_error(const TypeRef& t) {
  if (is_error(t)) return true;
  for (const auto& i : t->items) {
    if (contains_error(i)) return true;
  }
  return false;
}

TypeRef normalize(const TypeRef& t) {
  if (t->items.empty()) return t;
  std::vector<TypeRef> items;
  items.reserve(t->items.size());
  bool changed = false;
  for (const auto& i : t->items) {
    items.push_back(normalize(i));
    changed |= items.back() != i;
  }
  if (t->kind == Kind::Tuple && items.size() == 1) return items[0];
  if (!changed) return t;
  return make(t->kind, std::move(items), t->name, t->variants);
}

bool is_normalized(const TypeRef& t) {
  if (t->kind == Kind::Tuple && t->items.size() == 1) return false;
  for (const auto& i : t->items) {
    if (!is_normalized(i)) return false;
  }
  return true;
}

bool equal(const TypeRef& a, const TypeRef& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->name != b->name || a->variants != b->variants || a->items.size() != b->items.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a->items.size(); ++i) {
    if (!equal(a->items[i], b->items[i])) return false;
  }
  return true;
}

std::string variants_suffix(uint8_t variants) {
  if (variants == kNoVariants) return "";
  std::string s = " : ";
  if (variants & kAdjointable) s += "Adjoint";
  if ((variants & kAdjointable) && (variants & kControllable)) s += ", ";
  if (variants & kControllable) s += "Controlled";
  return s;
}

std::string to_string(const TypeRef& t) {
  switch (t->kind) {
    case Kind::Int: return "Int";
    case Kind::Double: return "Double";
    case Kind::Bool: return "Bool";
    case Kind::String: return "String";
    case Kind::Range: return "Range";
    case Kind::Pauli: return "Pauli";
    case Kind::Result: return "Result";
    case Kind::Qubit: return "Qubit";
    case Kind::Udt:
    case Kind::Param: return t->name;
    case Kind::Array: return to_string(t->element()) + "[]";
    case Kind::Tuple: {
      std::string s = "(";
      for (std::size_t i = 0; i < t->items.size(); ++i) {
        if (i) s += ", ";
        s += to_string(t->items[i]);
      }
      return s + ")";
    }
    case Kind::Operation:
    case Kind::Function: {
      std::string in = to_string(t->input());
      std::string arrow = t->kind == Kind::Operation ? " => " : " -> ";
      return "(" + in + arrow + to_string(t->output()) + variants_suffix(t->variants) + ")";
    }
  }
  return "?";
}

const TypeRef* UdtTable::base_of(const std::string& name) const {
  auto it = bases_.find(name);
  return it == bases_.end() ? nullptr : &it->second;
}

bool occurs(const std::string& name, const TypeRef& t) {
  if (t->kind == Kind::Param) return t->name == name;
  for (const auto& i : t->items) {
    if (occurs(name, i)) return true;
  }
  return false;
}

void collect_params(const TypeRef& t, std::vector<std::string>& out) {
  if (t->kind == Kind::Param) {
    for (const auto& n : out) {
      if (n == t->name) return;
    }
    out.push_back(t->name);
    return;
  }
  for (const auto& i : t->items) collect_params(i, out);
}

TypeRef substitute(const TypeRef& t, const Bindings& bindings) {
  if (bindings.empty()) return t;
  if (t->kind == Kind::Param) {
    auto it = bindings.find(t->name);
    if (it == bindings.end()) return t;
    if (it->second->kind == Kind::Param && it->second->name == t->name) return t;
    return substitute(it->second, bindings);
  }
  if (t->items.empty()) return t;
  std::vector<TypeRef> items;
  items.reserve(t->items.size());
  bool changed = false;
  for (const auto& i : t->items) {
    items.push_back(substitute(i, bindings));
    changed |= items.back() != i;
  }
  if (!changed) return t;
  if (t->kind == Kind::Tuple) return tuple_type(std::move(items));
  return make(t->kind, std::move(items), t->name, t->variants);
}

namespace {

class Unifier {
 public:
  Unifier(Bindings& b, const UdtTable& udts, const VarPredicate& is_var) : b_(b), udts_(udts), is_var_(is_var) {}

  bool sub(const TypeRef& a_in, const TypeRef& b_in) {
    TypeRef a = a_in;
    TypeRef b = b_in;
    if (is_error(a) || is_error(b)) return true;
    if (var(a) && var(b) && a->name == b->name) return true;

    if (var(b)) {
      auto it = b_.find(b->name);
      if (it == b_.end()) return bind(b->name, a);
      TypeRef bound = it->second;
      Bindings saved = b_;
      if (sub(a, bound)) return true;
      b_ = saved;
      // widen the binding when the new type is a supertype of the old one
      TypeRef ground = substitute(a, b_);
      if (sub(bound, ground)) {
        b_[b->name] = ground;
        return true;
      }
      b_ = saved;
      // or to a common base when both sides are user-defined types
      TypeRef up = bound;
      while (up->kind == Kind::Udt) {
        const TypeRef* base = udts_.base_of(up->name);
        if (base == nullptr) break;
        up = *base;
        if (sub(ground, up)) {
          b_[b->name] = up;
          return true;
        }
        b_ = saved;
      }
      return false;
    }
    if (var(a)) {
      auto it = b_.find(a->name);
      if (it == b_.end()) return bind(a->name, b);
      return sub(it->second, b);
    }

    if (a->kind == Kind::Udt) {
      if (b->kind == Kind::Udt && a->name == b->name) return true;
      const TypeRef* base = udts_.base_of(a->name);
      if (base == nullptr) return false;
      return sub(*base, b);
    }
    if (a->kind != b->kind) return false;
    switch (a->kind) {
      case Kind::Param: return a->name == b->name;
      case Kind::Tuple:
      case Kind::Array: {
        if (a->items.size() != b->items.size()) return false;
        for (std::size_t i = 0; i < a->items.size(); ++i) {
          if (!sub(a->items[i], b->items[i])) return false;
        }
        return true;
      }
      case Kind::Operation:
        if ((a->variants & b->variants) != b->variants) return false;
        [[fallthrough]];
      case Kind::Function:
        return sub(b->input(), a->input()) && sub(a->output(), b->output());
      default: return true;
    }
  }

 private:
  bool var(const TypeRef& t) const { return t->kind == Kind::Param && is_var_(t->name); }

  bool bind(const std::string& name, const TypeRef& t) {
    TypeRef resolved = substitute(t, b_);
    if (resolved->kind == Kind::Param && resolved->name == name) return true;
    if (occurs(name, resolved)) return false;
    b_[name] = resolved;
    return true;
  }

  Bindings& b_;
  const UdtTable& udts_;
  const VarPredicate& is_var_;
};

}  // namespace

bool unify_sub(const TypeRef& sub, const TypeRef& sup, Bindings& bindings, const UdtTable& udts,
               const VarPredicate& is_var) {
  Bindings work = bindings;
  Unifier u(work, udts, is_var);
  if (!u.sub(normalize(sub), normalize(sup))) return false;
  bindings = std::move(work);
  return true;
}

bool subtype(const TypeRef& a, const TypeRef& b, const UdtTable& udts) {
  Bindings none;
  static const VarPredicate rigid = [](const std::string&) { return false; };
  return unify_sub(a, b, none, udts, rigid);
}

std::optional<Bindings> unify(const TypeRef& a, const TypeRef& b, Bindings bindings, const UdtTable& udts) {
  static const VarPredicate all = [](const std::string&) { return true; };
  if (!unify_sub(b, a, bindings, udts, all)) return std::nullopt;
  return bindings;
}

}  // namespace qdsl::types
