#include "qdsl/runtime/value.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace qdsl::runtime {

uint64_t RangeValue::size() const {
  if (step == 0) return 0;
  if (step > 0) {
    if (start > end) return 0;
    return (static_cast<uint64_t>(end) - static_cast<uint64_t>(start)) / static_cast<uint64_t>(step) + 1;
  }
  if (start < end) return 0;
  return (static_cast<uint64_t>(start) - static_cast<uint64_t>(end)) / (0 - static_cast<uint64_t>(step)) + 1;
}

Value unit() { return TupleValue{}; }

Value make_tuple(std::vector<Value> items) {
  if (items.size() == 1) return std::move(items[0]);
  return TupleValue{std::move(items)};
}

Value make_array(std::vector<Value> items) {
  return ArrayValue{std::make_shared<const std::vector<Value>>(std::move(items))};
}

const std::vector<Value>& array_items(const Value& v) {
  const Value& s = strip(v);
  if (!s.is<ArrayValue>()) throw ValueError("expected an array, found " + format_value(v));
  return *s.as<ArrayValue>().items;
}

const Value& strip(const Value& v) {
  const Value* p = &v;
  while (const auto* u = std::get_if<UdtValue>(&p->v)) p = u->inner.get();
  return *p;
}

bool ArgTemplate::has_hole() const {
  if (kind == Hole) return true;
  for (const auto& i : items) {
    if (i.has_hole()) return true;
  }
  return false;
}

Value make_callable(const types::CallableDef* def) {
  auto c = std::make_shared<Closure>();
  c->kind = Closure::Definition;
  c->def = def;
  return CallableValue{std::move(c)};
}

Value apply_functor(ast::Functor f, const Value& callable) {
  const Value& s = strip(callable);
  if (!s.is<CallableValue>()) throw ValueError("functor applied to a non-callable value");
  auto c = std::make_shared<Closure>(*s.as<CallableValue>().closure);
  if (f == ast::Functor::Adjoint) {
    c->adjoint = !c->adjoint;
  } else {
    c->controlled += 1;
  }
  return CallableValue{std::move(c)};
}

Value apply_partial(const Value& callable, ArgTemplate args) {
  const Value& s = strip(callable);
  if (!s.is<CallableValue>()) throw ValueError("partial application of a non-callable value");
  auto c = std::make_shared<Closure>();
  c->kind = Closure::Partial;
  c->base = s.as<CallableValue>().closure;
  c->args = std::make_shared<const ArgTemplate>(std::move(args));
  return CallableValue{std::move(c)};
}

Value fill(const ArgTemplate& t, const Value& missing) {
  switch (t.kind) {
    case ArgTemplate::Hole: return missing;
    case ArgTemplate::Fixed: return t.value;
    case ArgTemplate::Tuple: break;
  }
  std::size_t holes = 0;
  for (const auto& i : t.items) holes += i.has_hole() ? 1 : 0;
  std::vector<Value> parts;
  if (holes == 1) {
    parts.push_back(missing);
  } else if (holes > 1) {
    const Value& m = strip(missing);
    if (!m.is<TupleValue>() || m.as<TupleValue>().items.size() != holes) {
      throw ValueError("partial application expects " + std::to_string(holes) + " arguments, got " +
                       format_value(missing));
    }
    parts = m.as<TupleValue>().items;
  }
  std::vector<Value> items;
  std::size_t next = 0;
  for (const auto& i : t.items) items.push_back(i.has_hole() ? fill(i, parts[next++]) : i.value);
  return make_tuple(std::move(items));
}

bool values_equal(const Value& a_in, const Value& b_in) {
  const Value& a = strip(a_in);
  const Value& b = strip(b_in);
  if (a.is<int64_t>() && b.is<double>()) return static_cast<double>(a.as<int64_t>()) == b.as<double>();
  if (a.is<double>() && b.is<int64_t>()) return a.as<double>() == static_cast<double>(b.as<int64_t>());
  if (a.v.index() != b.v.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.v);
        if constexpr (std::is_same_v<T, TupleValue>) {
          if (x.items.size() != y.items.size()) return false;
          for (std::size_t i = 0; i < x.items.size(); ++i) {
            if (!values_equal(x.items[i], y.items[i])) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, ArrayValue>) {
          if (x.items->size() != y.items->size()) return false;
          for (std::size_t i = 0; i < x.items->size(); ++i) {
            if (!values_equal((*x.items)[i], (*y.items)[i])) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, RangeValue>) {
          return x.start == y.start && x.step == y.step && x.end == y.end;
        } else if constexpr (std::is_same_v<T, QubitRef>) {
          return x.id == y.id;
        } else if constexpr (std::is_same_v<T, CallableValue>) {
          return x.closure == y.closure;
        } else if constexpr (std::is_same_v<T, UdtValue>) {
          return false;
        } else {
          return x == y;
        }
      },
      a.v);
}

namespace {

std::string format_double(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

}  // namespace

std::string format_value(const Value& v, bool quote) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TupleValue>) {
          std::string s = "(";
          for (std::size_t i = 0; i < x.items.size(); ++i) {
            if (i) s += ", ";
            s += format_value(x.items[i], true);
          }
          return s + ")";
        } else if constexpr (std::is_same_v<T, int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return quote ? quote_string(x) : x;
        } else if constexpr (std::is_same_v<T, RangeValue>) {
          if (x.step == 1) return std::to_string(x.start) + ".." + std::to_string(x.end);
          return std::to_string(x.start) + ".." + std::to_string(x.step) + ".." + std::to_string(x.end);
        } else if constexpr (std::is_same_v<T, sim::Pauli>) {
          static const char* names[] = {"PauliI", "PauliX", "PauliY", "PauliZ"};
          return names[static_cast<int>(x)];
        } else if constexpr (std::is_same_v<T, sim::Result>) {
          return x == sim::Result::Zero ? "Zero" : "One";
        } else if constexpr (std::is_same_v<T, QubitRef>) {
          return "q" + std::to_string(x.id);
        } else if constexpr (std::is_same_v<T, ArrayValue>) {
          std::string s = "[";
          for (std::size_t i = 0; i < x.items->size(); ++i) {
            if (i) s += "; ";
            s += format_value((*x.items)[i], true);
          }
          return s + "]";
        } else if constexpr (std::is_same_v<T, CallableValue>) {
          const Closure* c = x.closure.get();
          while (c->kind == Closure::Partial) c = c->base.get();
          std::string name = c->kind == Closure::Definition ? c->def->name : c->udt;
          return "<callable " + name + ">";
        } else {
          return x.name + "(" + format_value(*x.inner, true) + ")";
        }
      },
      v.v);
}

Value default_value(const types::TypeRef& t, const types::UdtTable& udts) {
  using types::Kind;
  switch (t->kind) {
    case Kind::Int: return int64_t{0};
    case Kind::Double: return 0.0;
    case Kind::Bool: return false;
    case Kind::String: return std::string();
    case Kind::Range: return RangeValue{1, 1, 0};
    case Kind::Pauli: return sim::Pauli::I;
    case Kind::Result: return sim::Result::Zero;
    case Kind::Array: return make_array({});
    case Kind::Tuple: {
      std::vector<Value> items;
      for (const auto& i : t->items) items.push_back(default_value(i, udts));
      return make_tuple(std::move(items));
    }
    case Kind::Udt: {
      const types::TypeRef* base = udts.base_of(t->name);
      if (base == nullptr) break;
      return UdtValue{t->name, std::make_shared<const Value>(default_value(*base, udts))};
    }
    default: break;
  }
  throw ValueError("type " + types::to_string(t) + " has no default value");
}

void collect_qubits(const Value& v, std::vector<uint32_t>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, QubitRef>) {
          out.push_back(x.id);
        } else if constexpr (std::is_same_v<T, TupleValue>) {
          for (const auto& i : x.items) collect_qubits(i, out);
        } else if constexpr (std::is_same_v<T, ArrayValue>) {
          for (const auto& i : *x.items) collect_qubits(i, out);
        } else if constexpr (std::is_same_v<T, UdtValue>) {
          collect_qubits(*x.inner, out);
        } else if constexpr (std::is_same_v<T, CallableValue>) {
          for (const Closure* c = x.closure.get(); c != nullptr && c->kind == Closure::Partial; c = c->base.get()) {
            std::vector<const ArgTemplate*> work{c->args.get()};
            while (!work.empty()) {
              const ArgTemplate* t = work.back();
              work.pop_back();
              if (t->kind == ArgTemplate::Fixed) collect_qubits(t->value, out);
              for (const auto& i : t->items) work.push_back(&i);
            }
          }
        }
      },
      v.v);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Value parse_literal(const std::string& text, const types::TypeRef& t, const types::UdtTable& udts) {
  using types::Kind;
  auto bad = [&]() -> ValueError {
    return ValueError("cannot read '" + text + "' as a value of type " + types::to_string(t));
  };
  switch (t->kind) {
    case Kind::Int: {
      int64_t v = 0;
      auto r = std::from_chars(text.data(), text.data() + text.size(), v);
      if (r.ec != std::errc() || r.ptr != text.data() + text.size()) throw bad();
      return v;
    }
    case Kind::Double: {
      double v = 0;
      auto r = std::from_chars(text.data(), text.data() + text.size(), v);
      if (r.ec != std::errc() || r.ptr != text.data() + text.size()) throw bad();
      return v;
    }
    case Kind::Bool:
      if (text == "true") return true;
      if (text == "false") return false;
      throw bad();
    case Kind::String:
      if (text.size() >= 2 && text.front() == '"' && text.back() == '"') return text.substr(1, text.size() - 2);
      return text;
    case Kind::Result:
      if (text == "Zero") return sim::Result::Zero;
      if (text == "One") return sim::Result::One;
      throw bad();
    case Kind::Pauli: {
      static const char* names[] = {"PauliI", "PauliX", "PauliY", "PauliZ"};
      for (int i = 0; i < 4; ++i) {
        if (text == names[i]) return static_cast<sim::Pauli>(i);
      }
      throw bad();
    }
    case Kind::Array: {
      std::string_view body = trim(text);
      if (body.size() < 2 || body.front() != '[' || body.back() != ']') throw bad();
      body = trim(body.substr(1, body.size() - 2));
      std::vector<Value> items;
      if (body.empty()) return make_array(std::move(items));
      int depth = 0;
      std::size_t start = 0;
      for (std::size_t i = 0; i <= body.size(); ++i) {
        if (i < body.size() && (body[i] == '[' || body[i] == '(')) ++depth;
        if (i < body.size() && (body[i] == ']' || body[i] == ')')) --depth;
        if (i == body.size() || (depth == 0 && body[i] == ';')) {
          items.push_back(parse_literal(std::string(trim(body.substr(start, i - start))), t->element(), udts));
          start = i + 1;
        }
      }
      return make_array(std::move(items));
    }
    case Kind::Udt: {
      const types::TypeRef* base = udts.base_of(t->name);
      if (base == nullptr) throw bad();
      return UdtValue{t->name, std::make_shared<const Value>(parse_literal(text, *base, udts))};
    }
    default: throw bad();
  }
}

}  // namespace qdsl::runtime
