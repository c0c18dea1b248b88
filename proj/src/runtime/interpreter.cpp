#include "qdsl/runtime/interpreter.hpp"

#include <pthread.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>

#include "qdsl/syntax/walk.hpp"

namespace qdsl::runtime {

QubitLedger::QubitLedger(std::size_t capacity) : capacity_(capacity) {
  for (std::size_t i = 0; i < capacity; ++i) free_.insert(static_cast<uint32_t>(i));
}

std::vector<uint32_t> QubitLedger::acquire(std::size_t n) {
  if (n > free_.size()) {
    throw Failure("cannot allocate " + std::to_string(n) + " qubits: only " + std::to_string(free_.size()) + " of " +
                  std::to_string(capacity_) + " are free");
  }
  std::vector<uint32_t> ids;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back(*free_.begin());
    free_.erase(free_.begin());
    used_.insert(ids.back());
  }
  fresh_ += n;
  return ids;
}

void QubitLedger::release(uint32_t id) {
  if (!used_.erase(id)) throw Failure("qubit q" + std::to_string(id) + " released twice");
  free_.insert(id);
}

const types::CallableDef* find_entry(const types::ProgramModel& model, const std::string& name, std::string* error) {
  if (const auto* d = model.find_callable(name)) return d;
  const types::CallableDef* found = nullptr;
  for (const auto& [q, d] : model.callables) {
    if (d->from_prelude || d->short_name != name) continue;
    if (found != nullptr) {
      if (error) *error = "entry point '" + name + "' is ambiguous between '" + found->name + "' and '" + q + "'";
      return nullptr;
    }
    found = d.get();
  }
  if (found == nullptr && error) *error = "no operation or function named '" + name + "'";
  return found;
}

void run_with_large_stack(const std::function<void()>& fn, std::size_t bytes) {
  struct Job {
    const std::function<void()>* fn;
    std::exception_ptr error;
  } job{&fn, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, bytes);
  pthread_t thread;
  auto entry = [](void* p) -> void* {
    auto* j = static_cast<Job*>(p);
    try {
      (*j->fn)();
    } catch (...) {
      j->error = std::current_exception();
    }
    return nullptr;
  };
  if (pthread_create(&thread, &attr, entry, &job) != 0) {
    pthread_attr_destroy(&attr);
    fn();  // no thread available; run inline
    return;
  }
  pthread_join(thread, nullptr);
  pthread_attr_destroy(&attr);
  if (job.error) std::rethrow_exception(job.error);
}

namespace {

using namespace ast;
using sim::Pauli;
using sim::Result;

struct Binding {
  std::string name;
  Value value;
  bool is_mutable = false;
};

class Env {
 public:
  void push() { marks_.push_back(vars_.size()); }
  void pop() {
    vars_.resize(marks_.back());
    marks_.pop_back();
  }
  void declare(const std::string& name, Value v, bool is_mutable) { vars_.push_back({name, std::move(v), is_mutable}); }
  Binding* find(const std::string& name) {
    for (auto it = vars_.rbegin(); it != vars_.rend(); ++it) {
      if (it->name == name) return &*it;
    }
    return nullptr;
  }

 private:
  std::vector<Binding> vars_;
  std::vector<std::size_t> marks_;
};

struct Functors {
  bool adjoint = false;
  bool controlled = false;
  std::vector<uint32_t> controls;
};

enum class Flow { Next, Return };

struct StackEntry {
  const types::CallableDef* def;
  const SourceFile* site_source;
  Span site;
};

int64_t wrap_add(int64_t a, int64_t b) { return static_cast<int64_t>(static_cast<uint64_t>(a) + static_cast<uint64_t>(b)); }
int64_t wrap_sub(int64_t a, int64_t b) { return static_cast<int64_t>(static_cast<uint64_t>(a) - static_cast<uint64_t>(b)); }
int64_t wrap_mul(int64_t a, int64_t b) { return static_cast<int64_t>(static_cast<uint64_t>(a) * static_cast<uint64_t>(b)); }

}  // namespace

struct Interpreter::Impl {
  const types::ProgramModel& model;
  RunOptions opts;
  RunHooks hooks;
  sim::Simulator sim;
  QubitLedger ledger;
  std::vector<StackEntry> stack;
  const SourceFile* source = nullptr;  // of the callable being executed
  Env* env = nullptr;
  Value ret;
  std::map<const types::CallableDef*, Value> closures;
  std::map<const QubitAllocStmt*, std::vector<std::string>> borrow_refs;

  Impl(const types::ProgramModel& m, RunOptions o, RunHooks h)
      : model(m), opts(o), hooks(std::move(h)), sim(o.max_qubits, o.seed), ledger(o.max_qubits) {}

  // -- diagnostics -----------------------------------------------------------

  std::string where(const SourceFile* src, Span span) const {
    if (src == nullptr) return "<unknown>";
    LineCol lc = src->locate(span.begin);
    return src->name() + ":" + std::to_string(lc.line) + ":" + std::to_string(lc.column);
  }
  std::string here(Span span) const { return where(source, span); }

  std::vector<std::string> stack_trace() const {
    std::vector<std::string> out;
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      std::string s = "at " + it->def->name;
      if (it->site_source) s += " (called from " + where(it->site_source, it->site) + ")";
      out.push_back(s);
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& msg) { throw Failure(msg, stack_trace()); }

  void trace(const std::string& s) {
    if (hooks.trace) hooks.trace(s);
  }
  void notice(const std::string& s) {
    if (hooks.notice) hooks.notice(s);
  }

  static std::string qubit_list(const std::vector<uint32_t>& ids) {
    std::string s = "[";
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) s += ", ";
      s += "q" + std::to_string(ids[i]);
    }
    return s + "]";
  }

  // -- value helpers ---------------------------------------------------------

  int64_t to_int(const Value& v) {
    const Value& s = strip(v);
    if (!s.is<int64_t>()) fail("expected an Int, found " + format_value(v));
    return s.as<int64_t>();
  }
  double to_double(const Value& v) {
    const Value& s = strip(v);
    if (s.is<int64_t>()) return static_cast<double>(s.as<int64_t>());
    if (!s.is<double>()) fail("expected a Double, found " + format_value(v));
    return s.as<double>();
  }
  bool to_bool(const Value& v) {
    const Value& s = strip(v);
    if (!s.is<bool>()) fail("expected a Bool, found " + format_value(v));
    return s.as<bool>();
  }
  uint32_t to_qubit(const Value& v) {
    const Value& s = strip(v);
    if (!s.is<QubitRef>()) fail("expected a Qubit, found " + format_value(v));
    return s.as<QubitRef>().id;
  }
  std::vector<uint32_t> to_qubits(const Value& v) {
    std::vector<uint32_t> ids;
    for (const auto& q : array_items(v)) ids.push_back(to_qubit(q));
    return ids;
  }
  std::vector<Pauli> to_paulis(const Value& v) {
    std::vector<Pauli> out;
    for (const auto& p : array_items(v)) {
      const Value& s = strip(p);
      if (!s.is<Pauli>()) fail("expected a Pauli, found " + format_value(p));
      out.push_back(s.as<Pauli>());
    }
    return out;
  }
  const std::vector<Value>& tuple_items(const Value& v, std::size_t n) {
    const Value& s = strip(v);
    if (!s.is<TupleValue>() || s.as<TupleValue>().items.size() != n) {
      fail("expected a tuple of " + std::to_string(n) + " items, found " + format_value(v));
    }
    return s.as<TupleValue>().items;
  }

  Value closure_for(const types::CallableDef* d) {
    auto it = closures.find(d);
    if (it != closures.end()) return it->second;
    Value v = make_callable(d);
    closures[d] = v;
    return v;
  }

  // -- invocation ------------------------------------------------------------

  Value invoke(const Value& callable, const Value& arg, Span site) {
    const Value& s = strip(callable);
    if (!s.is<CallableValue>()) fail("value " + format_value(callable) + " is not callable");
    Functors f;
    return invoke_closure(*s.as<CallableValue>().closure, arg, f, site);
  }

  Value invoke_closure(const Closure& c, Value arg, Functors f, Span site) {
    for (int i = 0; i < c.controlled; ++i) {
      const auto& parts = tuple_items(arg, 2);
      auto ids = to_qubits(parts[0]);
      f.controls.insert(f.controls.end(), ids.begin(), ids.end());
      f.controlled = true;
      Value rest = parts[1];
      arg = std::move(rest);
    }
    f.adjoint ^= c.adjoint;
    switch (c.kind) {
      case Closure::UdtConstructor: return UdtValue{c.udt, std::make_shared<const Value>(std::move(arg))};
      case Closure::Partial: {
        Value merged;
        try {
          merged = fill(*c.args, arg);
        } catch (const ValueError& e) {
          fail(e.what());
        }
        return invoke_closure(*c.base, std::move(merged), std::move(f), site);
      }
      case Closure::Definition: break;
    }
    return dispatch(*c.def, arg, f, site);
  }

  void bind_params(const ParamNode& p, const Value& v, Env& env) {
    if (!p.is_tuple) {
      env.declare(p.name, v, false);
      return;
    }
    if (p.items.size() == 1) {
      bind_params(p.items[0], v, env);
      return;
    }
    if (p.items.empty()) return;
    const auto& items = tuple_items(v, p.items.size());
    for (std::size_t i = 0; i < items.size(); ++i) bind_params(p.items[i], items[i], env);
  }

  Value dispatch(const types::CallableDef& d, const Value& arg, const Functors& f, Span site) {
    if (stack.size() >= opts.max_depth) {
      fail("call depth limit of " + std::to_string(opts.max_depth) + " exceeded calling '" + d.name + "'");
    }
    struct Guard {
      Impl& self;
      const SourceFile* saved;
      ~Guard() {
        self.stack.pop_back();
        self.source = saved;
      }
    };
    stack.push_back({&d, source, site});
    Guard guard{*this, source};
    if (d.is_intrinsic()) return intrinsic(d, arg, f);

    using K = SpecKind;
    K kind = f.adjoint ? (f.controlled ? K::ControlledAdjoint : K::Adjoint) : (f.controlled ? K::Controlled : K::Body);
    const types::Specialization* sp = &d.spec(kind);
    if (sp->present && sp->gen == SpecGen::Self) {
      kind = kind == K::Adjoint ? K::Body : K::Controlled;
      sp = &d.spec(kind);
    }
    if (!sp->present || sp->block == nullptr) {
      fail("'" + d.name + "' has no " + std::string(spec_kind_name(kind)) + " specialization");
    }
    source = d.source;
    Env frame;
    frame.push();
    bind_params(d.decl->params, arg, frame);
    if (kind == K::Controlled || kind == K::ControlledAdjoint) {
      std::vector<Value> ctl;
      for (uint32_t id : f.controls) ctl.push_back(QubitRef{id});
      frame.declare(sp->controls, make_array(std::move(ctl)), false);
    }
    Env* saved_env = env;
    env = &frame;
    struct EnvGuard {
      Impl& self;
      Env* saved;
      ~EnvGuard() { self.env = saved; }
    } env_guard{*this, saved_env};
    ret = unit();
    Flow flow = exec_stmts(sp->block->stmts);
    if (flow == Flow::Return) return std::move(ret);
    return unit();
  }

  // -- intrinsics ------------------------------------------------------------

  void gate(const std::string& name, sim::Mat2 m, bool self_adjoint, const Functors& f, uint32_t target,
            const std::string& params = {}) {
    if (f.adjoint && !self_adjoint) m = sim::gates::adjoint(m);
    std::string line = (f.adjoint && !self_adjoint ? "Adjoint " : "") + name + params + " q" + std::to_string(target);
    if (f.controlled) line += " ctl " + qubit_list(f.controls);
    trace(line);
    sim.apply(m, target, f.controls);
  }

  Value intrinsic(const types::CallableDef& d, const Value& arg, const Functors& f) {
    const std::string& n = d.name;
    static const std::string prim = "Microsoft.Quantum.Primitive.";
    static const std::string core = "Microsoft.Quantum.Core.";
    try {
      if (n.compare(0, prim.size(), prim) == 0) {
        std::string s = n.substr(prim.size());
        if (s == "H") return gate("H", sim::gates::h(), true, f, to_qubit(arg)), unit();
        if (s == "X") return gate("X", sim::gates::x(), true, f, to_qubit(arg)), unit();
        if (s == "Y") return gate("Y", sim::gates::y(), true, f, to_qubit(arg)), unit();
        if (s == "Z") return gate("Z", sim::gates::z(), true, f, to_qubit(arg)), unit();
        if (s == "I") return gate("I", sim::gates::i(), true, f, to_qubit(arg)), unit();
        if (s == "T") return gate("T", sim::gates::t(), false, f, to_qubit(arg)), unit();
        if (s == "R1Frac") {
          const auto& a = tuple_items(arg, 3);
          int64_t num = to_int(a[0]);
          int64_t pow = to_int(a[1]);
          std::string params = "(" + std::to_string(num) + ", " + std::to_string(pow) + ")";
          gate("R1Frac", sim::gates::r1frac(num, pow), false, f, to_qubit(a[2]), params);
          return unit();
        }
        if (s == "Measure") {
          const auto& a = tuple_items(arg, 2);
          auto paulis = to_paulis(a[0]);
          auto ids = to_qubits(a[1]);
          Result r = sim.measure(paulis, ids);
          trace("Measure " + format_value(a[0]) + " " + qubit_list(ids) + " -> " + format_value(r));
          return r;
        }
        if (s == "Length") return static_cast<int64_t>(array_items(arg).size());
        if (s == "Message") {
          if (hooks.message) hooks.message(format_value(arg, false));
          return unit();
        }
        if (s == "Assert" || s == "AssertProb") {
          bool prob = s == "AssertProb";
          const auto& a = tuple_items(arg, prob ? 5 : 3);
          auto paulis = to_paulis(a[0]);
          auto ids = to_qubits(a[1]);
          const Value& rv = strip(a[2]);
          if (!rv.is<Result>()) fail("expected a Result, found " + format_value(a[2]));
          Result expected = rv.as<Result>();
          double p0 = sim.probability_zero(paulis, ids);
          double p = expected == Result::Zero ? p0 : 1.0 - p0;
          double want = prob ? to_double(a[3]) : 1.0;
          double tol = prob ? to_double(a[4]) : 1e-9;
          if (std::abs(p - want) > tol) {
            if (p < 1e-12) p = 0;
            if (p > 1 - 1e-12) p = 1;
            std::ostringstream os;
            os.precision(6);
            os << s << " failed: measuring " << format_value(a[0]) << " on " << qubit_list(ids) << " gives "
               << format_value(expected) << " with probability " << p << ", expected " << want;
            fail(os.str());
          }
          return unit();
        }
      } else if (n.compare(0, core.size(), core) == 0) {
        std::string s = n.substr(core.size());
        if (s == "RangeReverse") {
          const Value& v = strip(arg);
          if (!v.is<RangeValue>()) fail("expected a Range, found " + format_value(arg));
          const RangeValue& r = v.as<RangeValue>();
          uint64_t size = r.size();
          if (size == 0) return r;
          return RangeValue{r.at(size - 1), wrap_sub(0, r.step), r.start};
        }
        if (s == "ArrayReverse") {
          std::vector<Value> items = array_items(arg);
          std::reverse(items.begin(), items.end());
          return make_array(std::move(items));
        }
      }
    } catch (const sim::SimError& e) {
      fail(e.what());
    } catch (const ValueError& e) {
      fail(e.what());
    }
    fail("no implementation is available for intrinsic '" + n + "'");
  }

  // -- statements ------------------------------------------------------------

  Flow exec_block(const Block& b) {
    env->push();
    Flow flow = exec_stmts(b.stmts);
    env->pop();
    return flow;
  }

  Flow exec_stmts(const std::vector<Stmt>& stmts) {
    for (const auto& s : stmts) {
      if (exec(s) == Flow::Return) return Flow::Return;
    }
    return Flow::Next;
  }

  void bind_pattern(const Pattern& p, const Value& v, bool is_mutable) {
    if (const auto* n = std::get_if<Pattern::Name>(&p.node)) {
      env->declare(n->name, v, is_mutable);
      return;
    }
    if (std::holds_alternative<Pattern::Discard>(p.node)) return;
    const auto& items = std::get<Pattern::Tuple>(p.node).items;
    const auto& vals = tuple_items(v, items.size());
    for (std::size_t i = 0; i < items.size(); ++i) bind_pattern(items[i], vals[i], is_mutable);
  }

  Flow exec(const Stmt& s) {
    if (const auto* e = std::get_if<ExprStmt>(&s.node)) {
      eval(e->expr);
      return Flow::Next;
    }
    if (const auto* l = std::get_if<LetStmt>(&s.node)) {
      bind_pattern(l->pattern, eval(l->value), false);
      return Flow::Next;
    }
    if (const auto* m = std::get_if<MutableStmt>(&s.node)) {
      bind_pattern(m->pattern, eval(m->value), true);
      return Flow::Next;
    }
    if (const auto* st = std::get_if<SetStmt>(&s.node)) {
      Value v = eval(st->value);
      Binding* b = env->find(st->name);
      if (b == nullptr || !b->is_mutable) fail("cannot set '" + st->name + "'");
      b->value = std::move(v);
      return Flow::Next;
    }
    if (const auto* i = std::get_if<IfStmt>(&s.node)) {
      for (const auto& c : i->clauses) {
        if (to_bool(eval(c.condition))) return exec_block(c.body);
      }
      if (i->else_body) return exec_block(*i->else_body);
      return Flow::Next;
    }
    if (const auto* f = std::get_if<ForStmt>(&s.node)) return exec_for(*f);
    if (const auto* r = std::get_if<RepeatStmt>(&s.node)) return exec_repeat(*r, s.span);
    if (const auto* r = std::get_if<ReturnStmt>(&s.node)) {
      ret = eval(r->value);
      return Flow::Return;
    }
    if (const auto* f = std::get_if<FailStmt>(&s.node)) {
      Value msg = eval(f->message);
      fail(format_value(msg, false));
    }
    const auto& q = std::get<QubitAllocStmt>(s.node);
    return q.kind == AllocKind::Using ? exec_using(q, s.span) : exec_borrowing(q, s.span);
  }

  Flow exec_for(const ForStmt& f) {
    Value range = eval(f.range);
    const Value& r = strip(range);
    auto body = [&](Value v) {
      env->push();
      env->declare(f.variable, std::move(v), false);
      Flow flow = exec_stmts(f.body.stmts);
      env->pop();
      return flow;
    };
    if (r.is<RangeValue>()) {
      RangeValue rv = r.as<RangeValue>();
      uint64_t n = rv.size();
      for (uint64_t i = 0; i < n; ++i) {
        if (body(rv.at(i)) == Flow::Return) return Flow::Return;
      }
      return Flow::Next;
    }
    // iterating a snapshot: the array value is immutable
    auto items = array_items(r);
    for (const auto& v : items) {
      if (body(v) == Flow::Return) return Flow::Return;
    }
    return Flow::Next;
  }

  Flow exec_repeat(const RepeatStmt& r, Span span) {
    uint64_t iterations = 0;
    while (true) {
      if (++iterations > opts.max_iterations) {
        fail("repeat loop at " + here(span) + " exceeded " + std::to_string(opts.max_iterations) + " iterations");
      }
      env->push();
      if (exec_stmts(r.body.stmts) == Flow::Return) {
        env->pop();
        return Flow::Return;
      }
      if (to_bool(eval(r.until))) {
        env->pop();
        return Flow::Next;
      }
      if (r.fixup && exec_block(*r.fixup) == Flow::Return) {
        env->pop();
        return Flow::Return;
      }
      env->pop();
    }
  }

  std::vector<uint32_t> take_heap(std::size_t n) {
    auto ids = ledger.acquire(n);
    for (uint32_t id : ids) sim.allocate(id);
    if (!ids.empty()) trace("alloc " + qubit_list(ids));
    return ids;
  }

  void give_back(const std::vector<uint32_t>& ids, const std::string& block) {
    for (auto it = ids.rbegin(); it != ids.rend(); ++it) {
      uint32_t id = *it;
      double p1 = sim.prob_one(id);
      if (p1 > 1e-9) {
        std::ostringstream os;
        os.precision(6);
        os << "qubit q" << id << " released by the " << block << " is not in |0> (P(One) = " << p1 << ")";
        if (opts.strict_release) fail(os.str());
        notice(os.str() + "; resetting it");
        if (sim.measure({Pauli::Z}, {id}) == Result::One) sim.apply(sim::gates::x(), id);
      }
      sim.release(id);
      ledger.release(id);
    }
    if (!ids.empty()) {
      std::vector<uint32_t> rev(ids.rbegin(), ids.rend());
      trace("release " + qubit_list(rev));
    }
  }

  Value register_value(const std::vector<uint32_t>& ids, bool single) {
    if (single) return QubitRef{ids.at(0)};
    std::vector<Value> items;
    for (uint32_t id : ids) items.push_back(QubitRef{id});
    return make_array(std::move(items));
  }

  int64_t alloc_count(const QubitAllocStmt& q) {
    if (q.single) return 1;
    int64_t n = to_int(eval(*q.count));
    if (n < 0) fail("cannot allocate a negative number of qubits (" + std::to_string(n) + ")");
    return n;
  }

  void dump_state(const std::string& what, Span span) {
    if (!opts.dump_state || !hooks.dump) return;
    hooks.dump("state at end of " + what + " (" + here(span) + "):\n" + sim.dump());
  }

  Flow exec_using(const QubitAllocStmt& q, Span span) {
    std::size_t n = static_cast<std::size_t>(alloc_count(q));
    std::vector<uint32_t> ids;
    try {
      ids = take_heap(n);
    } catch (const Failure& e) {
      fail(std::string(e.what()) + " at " + here(span));
    }
    env->push();
    env->declare(q.name, register_value(ids, q.single), false);
    Flow flow = exec_stmts(q.body.stmts);
    env->pop();
    dump_state("using block", span);
    give_back(ids, "using block at " + here(span));
    return flow;
  }

  const std::vector<std::string>& referenced_names(const QubitAllocStmt& q) {
    auto it = borrow_refs.find(&q);
    if (it != borrow_refs.end()) return it->second;
    std::set<std::string> names;
    for (const auto& s : q.body.stmts) {
      walk_stmt(
          s,
          [&](const Expr& e) {
            if (const auto* id = get_if<Ident>(e); id && e.resolution == Resolution::Local) names.insert(id->name);
          },
          [](const Stmt&) {});
    }
    return borrow_refs[&q] = std::vector<std::string>(names.begin(), names.end());
  }

  static double max_diff(const std::vector<sim::Amp>& a, const std::vector<sim::Amp>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
  }

  Flow exec_borrowing(const QubitAllocStmt& q, Span span) {
    std::size_t n = static_cast<std::size_t>(alloc_count(q));
    std::vector<uint32_t> reach;
    for (const auto& name : referenced_names(q)) {
      if (Binding* b = env->find(name)) collect_qubits(b->value, reach);
    }
    std::set<uint32_t> blocked(reach.begin(), reach.end());
    std::vector<uint32_t> untouched;  // in use, not reachable from the block
    for (uint32_t id : ledger.used()) {
      if (!blocked.count(id)) untouched.push_back(id);
    }
    std::vector<uint32_t> lent(untouched.begin(), untouched.begin() + std::min(n, untouched.size()));
    ledger.note_borrowed(lent.size());
    if (!lent.empty()) trace("borrow " + qubit_list(lent));

    std::vector<uint32_t> watch;
    std::vector<sim::Amp> before;
    if (opts.strict_release && !lent.empty()) {
      if (sim.num_qubits() > 12) {
        notice("borrowed-qubit restoration check skipped at " + here(span) + ": more than 12 qubits in use");
      } else {
        watch = untouched.size() <= 8 ? untouched : lent;
        if (watch.size() > 8) {
          notice("borrowed-qubit restoration check skipped at " + here(span) + ": too many borrowed qubits");
          watch.clear();
        }
        if (!watch.empty()) before = sim.reduced_density(watch);
      }
    }
    std::vector<uint32_t> heap;
    try {
      heap = take_heap(n - lent.size());
    } catch (const Failure& e) {
      fail(std::string(e.what()) + " at " + here(span));
    }
    std::vector<uint32_t> ids = lent;
    ids.insert(ids.end(), heap.begin(), heap.end());
    env->push();
    env->declare(q.name, register_value(ids, q.single), false);
    Flow flow = exec_stmts(q.body.stmts);
    env->pop();
    dump_state("borrowing block", span);
    give_back(heap, "borrowing block at " + here(span));
    if (!watch.empty()) {
      double d = max_diff(before, sim.reduced_density(watch));
      if (d > 1e-9) {
        fail("borrowed qubits " + qubit_list(lent) + " were not returned to their original state by the borrowing block at " +
             here(span));
      }
    }
    if (!lent.empty()) trace("return " + qubit_list(lent));
    return flow;
  }

  // -- expressions -----------------------------------------------------------

  ArgTemplate make_template(const Expr& e) {
    ArgTemplate t;
    if (get_if<Placeholder>(e)) {
      t.kind = ArgTemplate::Hole;
      return t;
    }
    if (const auto* tup = get_if<TupleExpr>(e)) {
      bool hole = false;
      for (const auto& i : tup->items) {
        t.items.push_back(make_template(i));
        hole |= t.items.back().has_hole();
      }
      if (hole) {
        t.kind = ArgTemplate::Tuple;
        return t;
      }
      t.items.clear();
    }
    t.kind = ArgTemplate::Fixed;
    t.value = eval(e);
    return t;
  }

  Value eval(const Expr& e) {
    return std::visit([&](const auto& n) { return this->node(n, e); }, e.node);
  }

  Value node(const UnitLit&, const Expr&) { return unit(); }
  Value node(const IntLit& n, const Expr&) { return n.value; }
  Value node(const DoubleLit& n, const Expr&) { return n.value; }
  Value node(const BoolLit& n, const Expr&) { return n.value; }
  Value node(const StringLit& n, const Expr&) { return n.value; }
  Value node(const ResultLit& n, const Expr&) {
    return n.value == ResultKind::Zero ? Result::Zero : Result::One;
  }
  Value node(const PauliLit& n, const Expr&) { return static_cast<Pauli>(static_cast<int>(n.value)); }

  Value node(const InterpString& s, const Expr&) {
    std::string out;
    for (const auto& p : s.parts) {
      if (p.text) {
        out += *p.text;
      } else {
        out += format_value(eval(p.expr[0]), false);
      }
    }
    return out;
  }

  Value node(const Ident& id, const Expr& e) {
    switch (e.resolution) {
      case Resolution::Local: {
        Binding* b = env->find(id.name);
        if (b == nullptr) fail("unbound variable '" + id.name + "'");
        return b->value;
      }
      case Resolution::Callable: {
        const auto* d = model.find_callable(e.resolved_name);
        if (d == nullptr) fail("unknown callable '" + e.resolved_name + "'");
        return closure_for(d);
      }
      case Resolution::Udt: {
        auto c = std::make_shared<Closure>();
        c->kind = Closure::UdtConstructor;
        c->udt = e.resolved_name;
        return CallableValue{std::move(c)};
      }
      case Resolution::None: break;
    }
    fail("unresolved name '" + id.name + "'");
  }

  Value node(const Placeholder&, const Expr& e) { fail("misplaced '_' at " + here(e.span)); }

  Value node(const TupleExpr& t, const Expr&) {
    std::vector<Value> items;
    items.reserve(t.items.size());
    for (const auto& i : t.items) items.push_back(eval(i));
    return make_tuple(std::move(items));
  }

  Value node(const ArrayExpr& a, const Expr&) {
    std::vector<Value> items;
    items.reserve(a.items.size());
    for (const auto& i : a.items) items.push_back(eval(i));
    return make_array(std::move(items));
  }

  Value node(const NewArray& n, const Expr& e) {
    int64_t size = to_int(eval(*n.size));
    if (size < 0) fail("array size cannot be negative (" + std::to_string(size) + ")");
    if (size == 0) return make_array({});
    Value d;
    try {
      d = default_value(e.element_type, model.udt_table);
    } catch (const ValueError& err) {
      fail(std::string(err.what()) + " at " + here(e.span));
    }
    return make_array(std::vector<Value>(static_cast<std::size_t>(size), d));
  }

  Value node(const RangeExpr& r, const Expr& e) {
    RangeValue v;
    v.start = to_int(eval(*r.start));
    v.step = r.step ? to_int(eval(**r.step)) : 1;
    v.end = to_int(eval(*r.end));
    if (v.step == 0) fail("range step cannot be zero at " + here(e.span));
    return v;
  }

  Value node(const Unary& u, const Expr&) {
    Value v = eval(*u.operand);
    const Value& s = strip(v);
    switch (u.op) {
      case UnaryOp::Negate:
        if (s.is<double>()) return -s.as<double>();
        return wrap_sub(0, to_int(s));
      case UnaryOp::Not: return !to_bool(s);
      case UnaryOp::BitNot: return ~to_int(s);
    }
    return unit();
  }

  Value int_pow(int64_t base, int64_t exp, Span span) {
    if (exp < 0) fail("negative Int exponent at " + here(span));
    int64_t r = 1;
    while (exp > 0) {
      if (exp & 1) r = wrap_mul(r, base);
      base = wrap_mul(base, base);
      exp >>= 1;
    }
    return r;
  }

  Value node(const Binary& b, const Expr& e) {
    using B = BinaryOp;
    if (b.op == B::And) return to_bool(eval(*b.lhs)) && to_bool(eval(*b.rhs));
    if (b.op == B::Or) return to_bool(eval(*b.lhs)) || to_bool(eval(*b.rhs));
    Value lv = eval(*b.lhs);
    Value rv = eval(*b.rhs);
    const Value& l = strip(lv);
    const Value& r = strip(rv);
    switch (b.op) {
      case B::Eq: return values_equal(l, r);
      case B::Ne: return !values_equal(l, r);
      default: break;
    }
    if (b.op == B::Add && l.is<ArrayValue>()) {
      std::vector<Value> items = *l.as<ArrayValue>().items;
      const auto& more = array_items(r);
      items.insert(items.end(), more.begin(), more.end());
      return make_array(std::move(items));
    }
    bool ints = l.is<int64_t>() && r.is<int64_t>();
    if (ints) {
      int64_t x = l.as<int64_t>();
      int64_t y = r.as<int64_t>();
      switch (b.op) {
        case B::Add: return wrap_add(x, y);
        case B::Sub: return wrap_sub(x, y);
        case B::Mul: return wrap_mul(x, y);
        case B::Div:
        case B::Mod:
          if (y == 0) fail("division by zero at " + here(e.span));
          if (x == INT64_MIN && y == -1) return b.op == B::Div ? x : int64_t{0};
          return b.op == B::Div ? x / y : x % y;
        case B::Pow: return int_pow(x, y, e.span);
        case B::Lt: return x < y;
        case B::Le: return x <= y;
        case B::Gt: return x > y;
        case B::Ge: return x >= y;
        case B::BitOr: return x | y;
        case B::BitXor: return x ^ y;
        case B::BitAnd: return x & y;
        case B::Shl:
        case B::Shr:
          if (y < 0) fail("negative shift count at " + here(e.span));
          if (b.op == B::Shl) return y >= 64 ? int64_t{0} : static_cast<int64_t>(static_cast<uint64_t>(x) << y);
          return y >= 64 ? (x < 0 ? int64_t{-1} : int64_t{0}) : x >> y;
        default: break;
      }
    }
    double x = to_double(l);
    double y = to_double(r);
    switch (b.op) {
      case B::Add: return x + y;
      case B::Sub: return x - y;
      case B::Mul: return x * y;
      case B::Div: return x / y;
      case B::Pow: return std::pow(x, y);
      case B::Lt: return x < y;
      case B::Le: return x <= y;
      case B::Gt: return x > y;
      case B::Ge: return x >= y;
      default: break;
    }
    fail("operator cannot be applied at " + here(e.span));
  }

  Value node(const Call& c, const Expr& e) {
    switch (e.call_kind) {
      case CallKind::Partial: {
        Value callee = eval(*c.callee);
        ArgTemplate t = make_template(*c.args);
        return apply_partial(callee, std::move(t));
      }
      case CallKind::UdtConstructor:
        return UdtValue{c.callee->resolved_name, std::make_shared<const Value>(eval(*c.args))};
      case CallKind::Function:
        if (opts.elide_diagnostics && e.type && e.type->is_unit()) return unit();
        break;
      default: break;
    }
    Value callee = eval(*c.callee);
    Value arg = eval(*c.args);
    return invoke(callee, arg, e.span);
  }

  Value node(const FunctorApp& f, const Expr&) {
    Value v = eval(*f.operand);
    try {
      return apply_functor(f.functor, v);
    } catch (const ValueError& err) {
      fail(err.what());
    }
  }

  std::size_t checked_index(int64_t i, std::size_t size, Span span) {
    if (i < 0 || static_cast<uint64_t>(i) >= size) {
      fail("index " + std::to_string(i) + " is out of range for an array of length " + std::to_string(size) + " at " +
           here(span));
    }
    return static_cast<std::size_t>(i);
  }

  Value node(const Index& ix, const Expr& e) {
    Value base = eval(*ix.base);
    Value idx = eval(*ix.index);
    const auto& items = array_items(base);
    const Value& i = strip(idx);
    if (i.is<RangeValue>()) {
      const RangeValue& r = i.as<RangeValue>();
      std::vector<Value> out;
      uint64_t n = r.size();
      for (uint64_t k = 0; k < n; ++k) out.push_back(items[checked_index(r.at(k), items.size(), e.span)]);
      return make_array(std::move(out));
    }
    return items[checked_index(to_int(i), items.size(), e.span)];
  }

  Value node(const CopyUpdate& u, const Expr& e) {
    Value base = eval(*u.base);
    int64_t i = to_int(eval(*u.index));
    Value v = eval(*u.value);
    std::vector<Value> items = array_items(base);
    items[checked_index(i, items.size(), e.span)] = std::move(v);
    return make_array(std::move(items));
  }
};

Interpreter::Interpreter(const types::ProgramModel& model, RunOptions options, RunHooks hooks)
    : impl_(std::make_unique<Impl>(model, options, std::move(hooks))) {}

Interpreter::~Interpreter() = default;

Value Interpreter::callable(const std::string& name) const {
  const auto* d = impl_->model.find_callable(name);
  if (d == nullptr) throw Failure("no callable named '" + name + "'");
  return impl_->closure_for(d);
}

Value Interpreter::invoke(const Value& callable, const Value& arg) {
  Value result;
  Env top;
  top.push();
  Env* saved = impl_->env;
  impl_->env = &top;
  try {
    run_with_large_stack([&] { result = impl_->invoke(callable, arg, Span{}); });
  } catch (...) {
    impl_->env = saved;
    throw;
  }
  impl_->env = saved;
  return result;
}

Value Interpreter::call(const std::string& name, const Value& arg) { return invoke(callable(name), arg); }

std::vector<Value> Interpreter::allocate(std::size_t n) {
  std::vector<Value> out;
  for (uint32_t id : impl_->take_heap(n)) out.push_back(QubitRef{id});
  return out;
}

void Interpreter::release(const std::vector<Value>& qubits) {
  std::vector<uint32_t> ids;
  for (const auto& q : qubits) ids.push_back(impl_->to_qubit(q));
  for (auto it = ids.rbegin(); it != ids.rend(); ++it) {
    impl_->sim.release(*it);
    impl_->ledger.release(*it);
  }
}

sim::Simulator& Interpreter::simulator() { return impl_->sim; }
const QubitLedger& Interpreter::ledger() const { return impl_->ledger; }

}  // namespace qdsl::runtime
