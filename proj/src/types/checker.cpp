#include "qdsl/types/checker.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace qdsl::types {

std::string qualify(const std::string& ns, const std::string& name) { return ns.empty() ? name : ns + "." + name; }

namespace {

using ast::Expr;
using ast::Stmt;

const char* const kPrimitiveNamespace = "Microsoft.Quantum.Primitive";
const char* const kCanonNamespace = "Microsoft.Quantum.Canon";

bool is_infer_var(const std::string& n) { return !n.empty() && n[0] == '\''; }

const VarPredicate& infer_vars() {
  static const VarPredicate p = is_infer_var;
  return p;
}

bool has_infer_var(const TypeRef& t) {
  if (t->kind == Kind::Param) return is_infer_var(t->name);
  return std::any_of(t->items.begin(), t->items.end(), has_infer_var);
}

struct Scope {
  std::string ns;
  const std::vector<std::string>* opens = nullptr;
};

struct Hit {
  enum Status { Missing, Found, Ambiguous } status = Missing;
  ast::Resolution kind = ast::Resolution::None;
  std::string name;
  std::string other;  // second candidate when ambiguous
};

Hit lookup(const ProgramModel& m, const Scope& scope, const std::string& name) {
  auto probe = [&](const std::string& q, Hit& h) {
    if (m.callables.count(q)) {
      h = Hit{Hit::Found, ast::Resolution::Callable, q, {}};
      return true;
    }
    if (m.udts.count(q)) {
      h = Hit{Hit::Found, ast::Resolution::Udt, q, {}};
      return true;
    }
    return false;
  };
  Hit h;
  if (name.find('.') != std::string::npos) {
    probe(name, h);
    return h;
  }
  if (probe(qualify(scope.ns, name), h)) return h;
  Hit found;
  if (scope.opens != nullptr) {
    for (const auto& o : *scope.opens) {
      Hit c;
      if (!probe(qualify(o, name), c)) continue;
      if (found.status == Hit::Found && found.name != c.name) {
        found.status = Hit::Ambiguous;
        found.other = c.name;
        return found;
      }
      found = c;
    }
  }
  if (found.status == Hit::Found) return found;
  probe(name, h);
  return h;
}

TypeRef upcast(TypeRef t, const UdtTable& udts) {
  while (t->kind == Kind::Udt) {
    const TypeRef* base = udts.base_of(t->name);
    if (base == nullptr) break;
    t = *base;
  }
  return t;
}

bool has_default(const TypeRef& t, const UdtTable& udts) {
  switch (t->kind) {
    case Kind::Qubit:
    case Kind::Operation:
    case Kind::Function: return false;
    case Kind::Tuple:
      return std::all_of(t->items.begin(), t->items.end(), [&](const TypeRef& i) { return has_default(i, udts); });
    case Kind::Udt: {
      const TypeRef* base = udts.base_of(t->name);
      return base == nullptr || has_default(*base, udts);
    }
    default: return true;
  }
}

/// Resolves written types against the symbol table.
class TypeResolver {
 public:
  TypeResolver(const ProgramModel& m, const Scope& scope, const std::vector<std::string>& tparams, DiagnosticSink& sink)
      : m_(m), scope_(scope), tparams_(tparams), sink_(sink) {}

  TypeRef resolve(const ast::TypeNode& n) {
    return std::visit([&](const auto& v) { return node(v, n.span); }, n.node);
  }

 private:
  TypeRef node(const ast::NamedType& t, Span span) {
    static const std::pair<const char*, Kind> prims[] = {
        {"Int", Kind::Int},     {"Double", Kind::Double}, {"Bool", Kind::Bool},     {"String", Kind::String},
        {"Range", Kind::Range}, {"Pauli", Kind::Pauli},   {"Result", Kind::Result}, {"Qubit", Kind::Qubit},
    };
    for (const auto& [name, kind] : prims) {
      if (t.name == name) return primitive(kind);
    }
    Hit h = lookup(m_, scope_, t.name);
    if (h.status == Hit::Ambiguous) {
      sink_.error(Code::AmbiguousName, span, "type '" + t.name + "' is ambiguous between '" + h.name + "' and '" +
                                                 h.other + "'");
      return error_type();
    }
    if (h.status == Hit::Found && h.kind == ast::Resolution::Udt) return udt_type(h.name);
    sink_.error(Code::UnknownType, span, "unknown type '" + t.name + "'");
    return error_type();
  }
  TypeRef node(const ast::ParamType& t, Span span) {
    if (std::find(tparams_.begin(), tparams_.end(), t.name) != tparams_.end()) return param_type(t.name);
    sink_.error(Code::UnknownType, span, "unknown type parameter '" + t.name + "'");
    return error_type();
  }
  TypeRef node(const ast::TupleType& t, Span) {
    std::vector<TypeRef> items;
    for (const auto& i : t.items) items.push_back(resolve(i));
    return tuple_type(std::move(items));
  }
  TypeRef node(const ast::ArrayType& t, Span) { return array_type(resolve(*t.element)); }
  TypeRef node(const ast::CallableType& t, Span) {
    TypeRef in = resolve(*t.input);
    TypeRef out = resolve(*t.output);
    if (!t.is_operation) return function_type(in, out);
    uint8_t v = kNoVariants;
    for (auto f : t.variants) v |= f == ast::Functor::Adjoint ? kAdjointable : kControllable;
    return operation_type(in, out, v);
  }

  const ProgramModel& m_;
  const Scope& scope_;
  const std::vector<std::string>& tparams_;
  DiagnosticSink& sink_;
};

bool has_hole(const Expr& e) {
  if (ast::get_if<ast::Placeholder>(e)) return true;
  if (const auto* t = ast::get_if<ast::TupleExpr>(e)) {
    return std::any_of(t->items.begin(), t->items.end(), has_hole);
  }
  return false;
}

bool definitely_exits(const ast::Block& b);

bool definitely_exits(const Stmt& s) {
  if (std::holds_alternative<ast::ReturnStmt>(s.node) || std::holds_alternative<ast::FailStmt>(s.node)) return true;
  if (const auto* i = std::get_if<ast::IfStmt>(&s.node)) {
    if (!i->else_body || !definitely_exits(*i->else_body)) return false;
    return std::all_of(i->clauses.begin(), i->clauses.end(),
                       [](const ast::IfStmt::Clause& c) { return definitely_exits(c.body); });
  }
  if (const auto* r = std::get_if<ast::RepeatStmt>(&s.node)) return definitely_exits(r->body);
  if (const auto* q = std::get_if<ast::QubitAllocStmt>(&s.node)) return definitely_exits(q->body);
  return false;
}

bool definitely_exits(const ast::Block& b) {
  return std::any_of(b.stmts.begin(), b.stmts.end(), [](const Stmt& s) { return definitely_exits(s); });
}

const char* binary_symbol(ast::BinaryOp op) {
  using B = ast::BinaryOp;
  switch (op) {
    case B::Or: return "||";
    case B::And: return "&&";
    case B::BitOr: return "|||";
    case B::BitXor: return "^^^";
    case B::BitAnd: return "&&&";
    case B::Eq: return "==";
    case B::Ne: return "!=";
    case B::Lt: return "<";
    case B::Le: return "<=";
    case B::Gt: return ">";
    case B::Ge: return ">=";
    case B::Shl: return "<<<";
    case B::Shr: return ">>>";
    case B::Add: return "+";
    case B::Sub: return "-";
    case B::Mul: return "*";
    case B::Div: return "/";
    case B::Mod: return "%";
    case B::Pow: return "^";
  }
  return "?";
}

/// Checks one specialization block of a callable.
class BodyChecker {
 public:
  BodyChecker(ProgramModel& m, CallableDef& def, DiagnosticSink& sink)
      : m_(m), def_(def), sink_(sink), scope_{def.ns, &def.opens}, start_errors_(sink.error_count()) {}

  bool run(ast::Block& block, const std::string& controls) {
    scopes_.emplace_back();
    bind_params(def_.decl->params);
    if (!controls.empty()) declare(controls, array_type(qubit_type()), false, block.span);
    for (auto& s : block.stmts) stmt(s);
    scopes_.pop_back();
    finalize();
    return sink_.error_count() == start_errors_;
  }

 private:
  struct Local {
    TypeRef type;
    bool is_mutable = false;
  };

  // -- helpers ---------------------------------------------------------------

  void error(Code c, Span s, std::string msg) { sink_.error(c, s, std::move(msg)); }

  TypeRef fresh() { return param_type("'" + std::to_string(next_var_++)); }
  TypeRef resolve(const TypeRef& t) { return normalize(substitute(t, bind_)); }
  TypeRef ground(const TypeRef& t) { return upcast(resolve(t), m_.udt_table); }
  std::string show(const TypeRef& t) { return to_string(resolve(t)); }
  bool assign(const TypeRef& sub, const TypeRef& sup) {
    return unify_sub(resolve(sub), resolve(sup), bind_, m_.udt_table, infer_vars());
  }
  bool is_var(const TypeRef& t) { return t->kind == Kind::Param && is_infer_var(t->name); }
  bool bad(const TypeRef& t) { return is_error(t); }

  const Local* find_local(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  void declare(const std::string& name, TypeRef t, bool is_mutable, Span span) {
    auto& top = scopes_.back();
    if (top.count(name)) {
      error(Code::DuplicateDefinition, span, "'" + name + "' is already defined in this scope");
      return;
    }
    top[name] = Local{std::move(t), is_mutable};
  }

  void bind_params(const ast::ParamNode& p) {
    if (p.is_tuple) {
      for (const auto& i : p.items) bind_params(i);
      return;
    }
    TypeResolver tr(m_, scope_, def_.type_params, quiet_sink_);
    declare(p.name, p.type ? tr.resolve(*p.type) : error_type(), false, p.span);
  }

  TypeRef resolve_type(const ast::TypeNode& n) {
    TypeResolver tr(m_, scope_, def_.type_params, sink_);
    return tr.resolve(n);
  }

  // -- statements ------------------------------------------------------------

  void block(ast::Block& b) {
    scopes_.emplace_back();
    for (auto& s : b.stmts) stmt(s);
    scopes_.pop_back();
  }

  void stmt(Stmt& s) {
    std::visit([&](auto& v) { this->stmt_node(v, s.span); }, s.node);
  }

  void stmt_node(ast::ExprStmt& s, Span span) {
    TypeRef t = resolve(expr(s.expr));
    if (!t->is_unit() && !bad(t) && !is_var(t)) {
      sink_.warning(Code::UnusedValue, span, "value of type " + to_string(t) + " is discarded");
    }
  }

  void bind_pattern(const ast::Pattern& p, const TypeRef& t, bool is_mutable) {
    if (const auto* n = std::get_if<ast::Pattern::Name>(&p.node)) {
      declare(n->name, t, is_mutable, p.span);
      return;
    }
    if (std::holds_alternative<ast::Pattern::Discard>(p.node)) return;
    const auto& items = std::get<ast::Pattern::Tuple>(p.node).items;
    TypeRef g = ground(t);
    if (bad(g)) {
      for (const auto& i : items) bind_pattern(i, error_type(), is_mutable);
      return;
    }
    if (g->kind != Kind::Tuple || g->items.size() != items.size()) {
      error(Code::TypeMismatch, p.span,
            "cannot bind a pattern of " + std::to_string(items.size()) + " items to a value of type " + show(t));
      for (const auto& i : items) bind_pattern(i, error_type(), is_mutable);
      return;
    }
    for (std::size_t k = 0; k < items.size(); ++k) bind_pattern(items[k], g->items[k], is_mutable);
  }

  void stmt_node(ast::LetStmt& s, Span) { bind_pattern(s.pattern, expr(s.value), false); }
  void stmt_node(ast::MutableStmt& s, Span) { bind_pattern(s.pattern, expr(s.value), true); }

  void stmt_node(ast::SetStmt& s, Span) {
    TypeRef vt = expr(s.value);
    const Local* l = find_local(s.name);
    if (l == nullptr) {
      error(Code::UnknownName, s.name_span, "unknown variable '" + s.name + "'");
      return;
    }
    if (!l->is_mutable) {
      error(Code::SetImmutable, s.name_span, "cannot set '" + s.name + "': it is not declared mutable");
      return;
    }
    TypeRef declared = resolve(l->type);
    TypeRef value = resolve(vt);
    if (bad(declared) || bad(value)) return;
    bool ok = has_infer_var(declared) || has_infer_var(value) ? assign(value, declared) : equal(value, declared);
    if (!ok) {
      error(Code::SetTypeChanged, s.value.span,
            "cannot change the type of '" + s.name + "' from " + to_string(declared) + " to " + to_string(value));
    }
  }

  void condition(Expr& e) {
    TypeRef t = expr(e);
    if (!assign(t, bool_type())) error(Code::TypeMismatch, e.span, "condition must be Bool, found " + show(t));
  }

  void stmt_node(ast::IfStmt& s, Span) {
    for (auto& c : s.clauses) {
      condition(c.condition);
      block(c.body);
    }
    if (s.else_body) block(*s.else_body);
  }

  void stmt_node(ast::ForStmt& s, Span) {
    TypeRef rt = expr(s.range);
    TypeRef g = ground(rt);
    TypeRef var = error_type();
    if (g->kind == Kind::Range) {
      var = int_type();
    } else if (g->kind == Kind::Array) {
      var = g->element();
    } else if (!bad(g)) {
      error(Code::TypeMismatch, s.range.span, "for loop needs a Range or an array, found " + show(rt));
    }
    scopes_.emplace_back();
    declare(s.variable, var, false, s.variable_span);
    for (auto& st : s.body.stmts) stmt(st);
    scopes_.pop_back();
  }

  void stmt_node(ast::RepeatStmt& s, Span) {
    scopes_.emplace_back();
    for (auto& st : s.body.stmts) stmt(st);
    condition(s.until);
    if (s.fixup) block(*s.fixup);
    scopes_.pop_back();
  }

  void stmt_node(ast::ReturnStmt& s, Span span) {
    if (alloc_depth_ > 0) {
      error(Code::ReturnInAllocation, span, "return is not allowed inside a using or borrowing block");
    }
    TypeRef t = expr(s.value);
    if (!assign(t, def_.output)) {
      error(Code::TypeMismatch, s.value.span,
            "returned value has type " + show(t) + " but '" + def_.short_name + "' returns " + show(def_.output));
    }
  }

  void stmt_node(ast::FailStmt& s, Span) {
    TypeRef t = expr(s.message);
    if (!assign(t, string_type())) error(Code::TypeMismatch, s.message.span, "fail needs a String, found " + show(t));
  }

  void stmt_node(ast::QubitAllocStmt& s, Span span) {
    if (!def_.is_operation) {
      error(Code::AllocationInFunction, span,
            std::string("functions cannot allocate qubits with ") +
                (s.kind == ast::AllocKind::Using ? "using" : "borrowing"));
    }
    if (s.count) {
      TypeRef t = expr(*s.count);
      if (!assign(t, int_type())) error(Code::TypeMismatch, s.count->span, "qubit count must be Int, found " + show(t));
    }
    scopes_.emplace_back();
    declare(s.name, s.single ? qubit_type() : array_type(qubit_type()), false, s.name_span);
    ++alloc_depth_;
    for (auto& st : s.body.stmts) stmt(st);
    --alloc_depth_;
    scopes_.pop_back();
  }

  // -- expressions -----------------------------------------------------------

  TypeRef expr(Expr& e) {
    TypeRef t = std::visit([&](auto& v) { return this->node(v, e); }, e.node);
    e.type = t;
    annotated_.push_back(&e);
    return t;
  }

  TypeRef node(ast::UnitLit&, Expr&) { return unit_type(); }
  TypeRef node(ast::IntLit&, Expr&) { return int_type(); }
  TypeRef node(ast::DoubleLit&, Expr&) { return double_type(); }
  TypeRef node(ast::BoolLit&, Expr&) { return bool_type(); }
  TypeRef node(ast::StringLit&, Expr&) { return string_type(); }
  TypeRef node(ast::ResultLit&, Expr&) { return result_type(); }
  TypeRef node(ast::PauliLit&, Expr&) { return pauli_type(); }

  TypeRef node(ast::InterpString& s, Expr&) {
    for (auto& p : s.parts) {
      for (auto& x : p.expr) expr(x);
    }
    return string_type();
  }

  TypeRef instantiate(const CallableDef& d) {
    if (d.type_params.empty()) return d.type;
    Bindings s;
    for (const auto& p : d.type_params) s[p] = fresh();
    return substitute(d.type, s);
  }

  TypeRef node(ast::Ident& id, Expr& e) {
    if (const Local* l = find_local(id.name)) {
      e.resolution = ast::Resolution::Local;
      return l->type;
    }
    Hit h = lookup(m_, scope_, id.name);
    if (h.status == Hit::Ambiguous) {
      error(Code::AmbiguousName, e.span, "'" + id.name + "' is ambiguous between '" + h.name + "' and '" + h.other + "'");
      return error_type();
    }
    if (h.status == Hit::Missing) {
      error(Code::UnknownName, e.span, "unknown name '" + id.name + "'");
      return error_type();
    }
    e.resolution = h.kind;
    e.resolved_name = h.name;
    if (h.kind == ast::Resolution::Udt) return function_type(m_.udts.at(h.name).base, udt_type(h.name));
    return instantiate(*m_.callables.at(h.name));
  }

  TypeRef node(ast::Placeholder&, Expr& e) {
    error(Code::MisplacedPlaceholder, e.span, "'_' is only allowed as an argument of a call");
    return error_type();
  }

  TypeRef node(ast::TupleExpr& t, Expr&) {
    std::vector<TypeRef> items;
    for (auto& i : t.items) items.push_back(expr(i));
    return tuple_type(std::move(items));
  }

  TypeRef node(ast::ArrayExpr& a, Expr& e) {
    if (a.items.empty()) return array_type(fresh());
    TypeRef elem = expr(a.items[0]);
    for (std::size_t k = 1; k < a.items.size(); ++k) {
      TypeRef t = expr(a.items[k]);
      if (assign(t, elem)) continue;
      if (assign(elem, t)) {
        elem = t;
        continue;
      }
      error(Code::TypeMismatch, a.items[k].span,
            "array item of type " + show(t) + " does not match earlier items of type " + show(elem));
      (void)e;
      return error_type();
    }
    return array_type(elem);
  }

  TypeRef node(ast::NewArray& n, Expr& e) {
    TypeRef elem = resolve_type(n.element);
    e.element_type = elem;
    TypeRef st = expr(*n.size);
    if (!assign(st, int_type())) error(Code::TypeMismatch, n.size->span, "array size must be Int, found " + show(st));
    if (!bad(elem) && !has_default(elem, m_.udt_table)) {
      error(Code::NoDefaultValue, n.element.span, "type " + to_string(elem) + " has no default value");
    }
    return array_type(elem);
  }

  void int_operand(Expr& x, const char* what) {
    TypeRef t = expr(x);
    if (!assign(t, int_type())) error(Code::TypeMismatch, x.span, std::string(what) + " must be Int, found " + show(t));
  }

  TypeRef node(ast::RangeExpr& r, Expr&) {
    int_operand(*r.start, "range start");
    if (r.step) int_operand(**r.step, "range step");
    int_operand(*r.end, "range end");
    return range_type();
  }

  bool numeric(const TypeRef& g) { return g->kind == Kind::Int || g->kind == Kind::Double; }

  TypeRef node(ast::Unary& u, Expr& e) {
    TypeRef t = expr(*u.operand);
    TypeRef g = ground(t);
    if (bad(g)) return error_type();
    switch (u.op) {
      case ast::UnaryOp::Negate:
        if (numeric(g)) return g;
        break;
      case ast::UnaryOp::Not:
        if (assign(g, bool_type())) return bool_type();
        break;
      case ast::UnaryOp::BitNot:
        if (assign(g, int_type())) return int_type();
        break;
    }
    error(Code::TypeMismatch, e.span, "operator cannot be applied to " + show(t));
    return error_type();
  }

  TypeRef node(ast::Binary& b, Expr& e) {
    using B = ast::BinaryOp;
    TypeRef lt = expr(*b.lhs);
    TypeRef rt = expr(*b.rhs);
    TypeRef l = ground(lt);
    TypeRef r = ground(rt);
    if (bad(l) || bad(r)) return error_type();
    // an unknown operand takes the other side's type
    if (is_var(l) && !is_var(r)) {
      assign(l, r);
      l = ground(l);
    } else if (is_var(r) && !is_var(l)) {
      assign(r, l);
      r = ground(r);
    }
    auto fail = [&]() {
      error(Code::TypeMismatch, e.span,
            std::string("operator '") + binary_symbol(b.op) + "' cannot be applied to " + show(lt) + " and " + show(rt));
      return error_type();
    };
    auto arith = [&]() -> TypeRef {
      if (!numeric(l) || !numeric(r)) return fail();
      return l->kind == Kind::Double || r->kind == Kind::Double ? double_type() : int_type();
    };
    switch (b.op) {
      case B::Or:
      case B::And:
        if (l->kind == Kind::Bool && r->kind == Kind::Bool) return bool_type();
        return fail();
      case B::BitOr:
      case B::BitXor:
      case B::BitAnd:
      case B::Shl:
      case B::Shr:
      case B::Mod:
        if (l->kind == Kind::Int && r->kind == Kind::Int) return int_type();
        return fail();
      case B::Eq:
      case B::Ne: {
        if (numeric(l) && numeric(r)) return bool_type();
        static const Kind comparable[] = {Kind::Bool,  Kind::String, Kind::Result,
                                          Kind::Pauli, Kind::Qubit,  Kind::Range};
        bool ok = std::find(std::begin(comparable), std::end(comparable), l->kind) != std::end(comparable);
        if (ok && l->kind == r->kind) return bool_type();
        return fail();
      }
      case B::Lt:
      case B::Le:
      case B::Gt:
      case B::Ge:
        if (numeric(l) && numeric(r)) return bool_type();
        return fail();
      case B::Add:
        if (l->kind == Kind::Array && r->kind == Kind::Array) {
          if (assign(r, l)) return l;
          if (assign(l, r)) return r;
          return fail();
        }
        return arith();
      case B::Sub:
      case B::Mul:
      case B::Div:
      case B::Pow: return arith();
    }
    return fail();
  }

  /// Matches a call argument that contains placeholders against the
  /// parameter type; returns the type of the positions left open.
  std::optional<TypeRef> shape(Expr& arg, const TypeRef& param_in, bool& ok) {
    TypeRef param = resolve(param_in);
    if (ast::get_if<ast::Placeholder>(arg)) {
      arg.type = param;
      annotated_.push_back(&arg);
      return param;
    }
    auto* tup = ast::get_if<ast::TupleExpr>(arg);
    if (tup == nullptr || !has_hole(arg)) {
      TypeRef t = expr(arg);
      if (!assign(t, param)) {
        error(Code::TypeMismatch, arg.span, "argument of type " + show(t) + " does not match parameter type " +
                                                to_string(param));
        ok = false;
      }
      return std::nullopt;
    }
    arg.type = param;
    annotated_.push_back(&arg);
    if (bad(param)) {
      for (auto& i : tup->items) {
        bool dummy = true;
        shape(i, error_type(), dummy);
      }
      return error_type();
    }
    if (param->kind != Kind::Tuple || param->items.size() != tup->items.size()) {
      std::string want = param->kind == Kind::Tuple ? std::to_string(param->items.size()) + " items" : to_string(param);
      error(Code::PartialShape, arg.span,
            "partial application has " + std::to_string(tup->items.size()) + " items where the parameter is " + want);
      ok = false;
      return std::nullopt;
    }
    std::vector<TypeRef> missing;
    for (std::size_t k = 0; k < tup->items.size(); ++k) {
      if (auto m = shape(tup->items[k], param->items[k], ok)) missing.push_back(*m);
    }
    return tuple_type(std::move(missing));
  }

  TypeRef node(ast::Call& c, Expr& e) {
    TypeRef ct = resolve(expr(*c.callee));
    bool udt_ctor = c.callee->resolution == ast::Resolution::Udt;
    if (bad(ct)) {
      if (has_hole(*c.args)) {
        bool ok = true;
        shape(*c.args, error_type(), ok);
      } else {
        expr(*c.args);
      }
      return error_type();
    }
    if (!ct->is_callable()) {
      error(Code::NotCallable, c.callee->span, "value of type " + to_string(ct) + " cannot be called");
      if (!has_hole(*c.args)) expr(*c.args);
      return error_type();
    }
    if (has_hole(*c.args)) {
      if (udt_ctor) {
        error(Code::PartialShape, c.args->span, "a type constructor cannot be partially applied");
        return error_type();
      }
      bool ok = true;
      auto missing = shape(*c.args, ct->input(), ok);
      if (!ok || !missing) return error_type();
      e.call_kind = ast::CallKind::Partial;
      TypeRef in = normalize(*missing);
      if (ct->kind == Kind::Operation) return operation_type(in, ct->output(), ct->variants);
      return function_type(in, ct->output());
    }
    TypeRef at = expr(*c.args);
    if (!assign(at, ct->input())) {
      error(Code::TypeMismatch, c.args->span,
            "argument of type " + show(at) + " does not match parameter type " + show(ct->input()));
    }
    if (udt_ctor) {
      e.call_kind = ast::CallKind::UdtConstructor;
    } else if (ct->kind == Kind::Operation) {
      e.call_kind = ast::CallKind::Operation;
      if (!def_.is_operation) {
        std::string callee = c.callee->resolved_name.empty() ? "an operation" : "operation '" + c.callee->resolved_name + "'";
        error(Code::FunctionCallsOperation, e.span, "function '" + def_.short_name + "' cannot call " + callee);
      }
    } else {
      e.call_kind = ast::CallKind::Function;
    }
    return ct->output();
  }

  TypeRef node(ast::FunctorApp& f, Expr& e) {
    TypeRef t = resolve(expr(*f.operand));
    if (bad(t)) return error_type();
    const char* name = f.functor == ast::Functor::Adjoint ? "Adjoint" : "Controlled";
    if (t->kind != Kind::Operation) {
      error(Code::MissingVariant, e.span, std::string(name) + " needs an operation, found " + to_string(t));
      return error_type();
    }
    uint8_t need = f.functor == ast::Functor::Adjoint ? kAdjointable : kControllable;
    if (!(t->variants & need)) {
      std::string what = f.operand->resolved_name.empty() ? "operation" : "'" + f.operand->resolved_name + "'";
      error(Code::MissingVariant, e.span,
            what + " of type " + to_string(t) + " has no " +
                (need == kAdjointable ? "adjoint" : "controlled") + " variant");
      return error_type();
    }
    if (f.functor == ast::Functor::Adjoint) return t;
    return operation_type(tuple_type({array_type(qubit_type()), t->input()}), t->output(), t->variants);
  }

  TypeRef array_of(Expr& base, TypeRef& shown) {
    shown = expr(base);
    TypeRef g = ground(shown);
    if (bad(g)) return g;
    if (g->kind != Kind::Array) {
      error(Code::TypeMismatch, base.span, "value of type " + show(shown) + " is not an array");
      return error_type();
    }
    return g;
  }

  TypeRef node(ast::Index& ix, Expr&) {
    TypeRef shown;
    TypeRef arr = array_of(*ix.base, shown);
    TypeRef it = ground(expr(*ix.index));
    if (bad(arr) || bad(it)) return error_type();
    if (it->kind == Kind::Range) return arr;
    if (!assign(it, int_type())) {
      error(Code::TypeMismatch, ix.index->span, "index must be Int or Range, found " + to_string(it));
      return error_type();
    }
    return arr->element();
  }

  TypeRef node(ast::CopyUpdate& u, Expr&) {
    TypeRef shown;
    TypeRef arr = array_of(*u.base, shown);
    int_operand(*u.index, "index");
    TypeRef vt = expr(*u.value);
    if (bad(arr)) return error_type();
    if (!assign(vt, arr->element())) {
      error(Code::TypeMismatch, u.value->span,
            "value of type " + show(vt) + " cannot be stored in an array of " + show(arr->element()));
    }
    return arr;
  }

  void finalize() {
    bool clean = sink_.error_count() == start_errors_;
    bool reported = false;
    for (Expr* e : annotated_) {
      e->type = resolve(e->type);
      if (e->element_type) e->element_type = resolve(e->element_type);
      if (clean && !reported && has_infer_var(e->type)) {
        error(Code::UnresolvedTypeParameter, e->span,
              "cannot infer a concrete type for this expression (" + to_string(e->type) + ")");
        reported = true;
      }
    }
  }

  ProgramModel& m_;
  CallableDef& def_;
  DiagnosticSink& sink_;
  Scope scope_;
  std::size_t start_errors_;
  std::vector<Diagnostic> quiet_;
  DiagnosticSink quiet_sink_{nullptr, &quiet_};
  std::vector<std::map<std::string, Local>> scopes_;
  Bindings bind_;
  int next_var_ = 0;
  int alloc_depth_ = 0;
  std::vector<Expr*> annotated_;
};

}  // namespace

// ---------------------------------------------------------------------------

void Checker::collect(ast::Program& program, const SourceFile& source, bool prelude) {
  DiagnosticSink sink(&source, &diags_);
  for (auto& ns : program.namespaces) {
    model_.namespaces.insert(ns.name);
    std::vector<std::string> opens;
    if (ns.name.empty()) opens = {kPrimitiveNamespace, kCanonNamespace};
    for (auto& item : ns.items) {
      if (auto* o = std::get_if<ast::OpenDecl>(&item)) opens.push_back(o->name);
    }
    auto taken = [&](const std::string& q, Span span) {
      auto c = model_.callables.find(q);
      auto u = model_.udts.find(q);
      bool from_prelude = (c != model_.callables.end() && c->second->from_prelude) ||
                          (u != model_.udts.end() && u->second.from_prelude);
      if (c == model_.callables.end() && u == model_.udts.end()) return false;
      if (from_prelude && !prelude) {
        // user definitions replace prelude ones of the same name
        if (c != model_.callables.end()) model_.callables.erase(c);
        if (u != model_.udts.end()) model_.udts.erase(u);
        return false;
      }
      sink.error(Code::DuplicateDefinition, span, "'" + q + "' is already defined");
      return true;
    };
    for (auto& item : ns.items) {
      if (auto* c = std::get_if<ast::CallableDecl>(&item)) {
        std::string q = qualify(ns.name, c->name);
        if (taken(q, c->name_span)) continue;
        auto def = std::make_unique<CallableDef>();
        def->name = q;
        def->short_name = c->name;
        def->ns = ns.name;
        def->is_operation = c->is_operation;
        def->from_prelude = prelude;
        def->decl = c;
        def->source = &source;
        def->opens = opens;
        def->type_params = c->type_params;
        model_.callables[q] = std::move(def);
      } else if (auto* n = std::get_if<ast::NewtypeDecl>(&item)) {
        std::string q = qualify(ns.name, n->name);
        if (taken(q, n->name_span)) continue;
        UdtDef u;
        u.name = q;
        u.ns = ns.name;
        u.from_prelude = prelude;
        u.decl = n;
        u.source = &source;
        u.opens = opens;
        model_.udts[q] = std::move(u);
      } else if (auto* o = std::get_if<ast::OpenDecl>(&item)) {
        pending_opens_.push_back({o->name, o->span, &source});
      }
    }
  }
}

void Checker::resolve_signatures() {
  for (const auto& o : pending_opens_) {
    if (model_.namespaces.count(o.name)) continue;
    DiagnosticSink sink(o.source, &diags_);
    sink.error(Code::UnknownName, o.span, "unknown namespace '" + o.name + "'");
  }
  pending_opens_.clear();

  static const std::vector<std::string> no_params;
  for (auto& [name, u] : model_.udts) {
    DiagnosticSink sink(u.source, &diags_);
    Scope scope{u.ns, &u.opens};
    TypeResolver tr(model_, scope, no_params, sink);
    u.base = tr.resolve(u.decl->base);
    model_.udt_table.add(name, u.base);
  }
  // a newtype may not reach itself through its base
  for (auto& [name, u] : model_.udts) {
    std::set<std::string> seen;
    std::vector<TypeRef> work{u.base};
    bool cyclic = false;
    while (!work.empty() && !cyclic) {
      TypeRef t = work.back();
      work.pop_back();
      if (t->kind == Kind::Udt) {
        if (t->name == name) cyclic = true;
        if (!seen.insert(t->name).second) continue;
        if (const TypeRef* b = model_.udt_table.base_of(t->name)) work.push_back(*b);
      }
      for (const auto& i : t->items) work.push_back(i);
    }
    if (cyclic) {
      DiagnosticSink sink(u.source, &diags_);
      sink.error(Code::RecursiveNewtype, u.decl->name_span, "newtype '" + u.decl->name + "' is defined in terms of itself");
      u.base = error_type();
      model_.udt_table.add(name, u.base);
    }
  }

  for (auto& [name, dp] : model_.callables) {
    CallableDef& def = *dp;
    const ast::CallableDecl& decl = *def.decl;
    DiagnosticSink sink(def.source, &diags_);
    Scope scope{def.ns, &def.opens};
    std::set<std::string> seen_tp;
    for (const auto& tp : decl.type_params) {
      if (!seen_tp.insert(tp).second) {
        sink.error(Code::DuplicateDefinition, decl.name_span, "type parameter '" + tp + "' is declared twice");
      }
    }
    TypeResolver tr(model_, scope, def.type_params, sink);
    std::set<std::string> seen_params;
    std::function<TypeRef(const ast::ParamNode&)> param_type_of = [&](const ast::ParamNode& p) -> TypeRef {
      if (p.is_tuple) {
        std::vector<TypeRef> items;
        for (const auto& i : p.items) items.push_back(param_type_of(i));
        return tuple_type(std::move(items));
      }
      if (!seen_params.insert(p.name).second) {
        sink.error(Code::DuplicateDefinition, p.span, "parameter '" + p.name + "' is declared twice");
      }
      return p.type ? tr.resolve(*p.type) : error_type();
    };
    def.input = param_type_of(decl.params);
    def.output = tr.resolve(decl.return_type);

    for (const auto& s : decl.specs) {
      Specialization& sp = def.spec(s.kind);
      sp.present = true;
      sp.gen = s.gen;
      sp.block = s.body ? &*s.body : nullptr;
      sp.controls = s.controls.value_or("");
      sp.span = s.span;
    }
    using K = ast::SpecKind;
    using G = ast::SpecGen;
    auto bad_spec = [&](Span span, const std::string& msg) { sink.error(Code::InvalidSpecialization, span, msg); };
    const Specialization& body = def.spec(K::Body);
    if (!def.is_operation) {
      for (K k : {K::Adjoint, K::Controlled, K::ControlledAdjoint}) {
        if (def.spec(k).present) bad_spec(def.spec(k).span, "functions cannot declare adjoint or controlled specializations");
      }
    }
    if (body.gen == G::Auto || body.gen == G::Self) bad_spec(body.span, "the body specialization must be provided or intrinsic");
    if (def.spec(K::Controlled).gen == G::Self && def.spec(K::Controlled).present) {
      bad_spec(def.spec(K::Controlled).span, "'self' is only allowed for adjoint specializations");
    }
    for (K k : {K::Adjoint, K::Controlled, K::ControlledAdjoint}) {
      const Specialization& sp = def.spec(k);
      if (!sp.present) continue;
      if (sp.gen == G::Intrinsic && body.gen != G::Intrinsic) {
        bad_spec(sp.span, "an intrinsic specialization requires an intrinsic body");
      }
      if (sp.gen == G::Auto && body.gen == G::Intrinsic && k != K::ControlledAdjoint) {
        bad_spec(sp.span, "cannot generate a specialization from an intrinsic body");
      }
    }
    if (def.is_operation) {
      bool adj = def.spec(K::Adjoint).present;
      bool ctl = def.spec(K::Controlled).present;
      bool both = def.spec(K::ControlledAdjoint).present;
      if (adj && ctl && !both) {
        bad_spec(decl.name_span, "'" + def.short_name +
                                     "' has adjoint and controlled specializations but no controlled adjoint");
      } else if (both && !(adj && ctl)) {
        bad_spec(def.spec(K::ControlledAdjoint).span,
                 "a controlled adjoint specialization needs both adjoint and controlled specializations");
      }
      if ((adj || ctl) && !def.output->is_unit() && !is_error(def.output)) {
        bad_spec(decl.name_span, "operations with adjoint or controlled specializations must return ()");
      }
      if (adj) def.variants |= kAdjointable;
      if (ctl) def.variants |= kControllable;
    }
    def.type = def.is_operation ? operation_type(def.input, def.output, def.variants)
                                : function_type(def.input, def.output);
  }
}

void Checker::check_bodies() {
  for (auto& [name, dp] : model_.callables) {
    CallableDef& def = *dp;
    DiagnosticSink sink(def.source, &diags_);
    bool ok = true;
    for (auto k : {ast::SpecKind::Body, ast::SpecKind::Adjoint, ast::SpecKind::Controlled,
                   ast::SpecKind::ControlledAdjoint}) {
      Specialization& sp = def.spec(k);
      if (!sp.present || sp.gen != ast::SpecGen::Provided || sp.block == nullptr) continue;
      BodyChecker bc(model_, def, sink);
      ok &= bc.run(*const_cast<ast::Block*>(sp.block), sp.controls);
      if (k == ast::SpecKind::Body && !def.output->is_unit() && !is_error(def.output) && !definitely_exits(*sp.block)) {
        sink.error(Code::MissingReturn, def.decl->name_span,
                   "'" + def.short_name + "' must return a value of type " + to_string(def.output) + " on every path");
        ok = false;
      }
    }
    if (!ok) failed_.insert(&def);
  }
}

bool Checker::check_generated(CallableDef& def, ast::Block& block, const std::string& controls) {
  // warnings were already reported against the original body
  std::vector<Diagnostic> local;
  DiagnosticSink sink(def.source, &local);
  BodyChecker bc(model_, def, sink);
  bool ok = bc.run(block, controls);
  for (auto& d : local) {
    if (d.severity == Severity::Error) diags_.push_back(std::move(d));
  }
  return ok;
}

bool Checker::body_ok(const CallableDef& def) const { return failed_.count(&def) == 0; }

}  // namespace qdsl::types
