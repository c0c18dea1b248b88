#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdsl/driver/compile.hpp"
#include "qdsl/runtime/interpreter.hpp"

namespace qdsl::testing {

using Amp = std::complex<double>;
using State = std::vector<Amp>;
/// Column-major: columns[b] is the image of basis state b.
using Matrix = std::vector<State>;
using ArgBuilder = std::function<runtime::Value(const std::vector<runtime::Value>& qubits)>;

inline State random_state(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  State s(std::size_t{1} << n);
  double norm = 0;
  for (auto& a : s) {
    a = Amp(g(rng), g(rng));
    norm += std::norm(a);
  }
  for (auto& a : s) a /= std::sqrt(norm);
  return s;
}

inline State basis_state(std::size_t n, std::size_t b) {
  State s(std::size_t{1} << n);
  s[b] = 1;
  return s;
}

inline double max_diff(const State& a, const State& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

/// Largest entry difference after removing the global phase of `b` relative to `a`.
inline double max_diff_up_to_phase(const Matrix& a, const Matrix& b) {
  Amp phase = 0;
  for (std::size_t c = 0; c < a.size() && std::abs(phase) < 1e-6; ++c) {
    for (std::size_t r = 0; r < a[c].size(); ++r) {
      if (std::abs(b[c][r]) > 1e-6) {
        phase = a[c][r] / b[c][r];
        break;
      }
    }
  }
  if (std::abs(phase) < 1e-12) return 1e9;
  phase /= std::abs(phase);
  double d = 0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    for (std::size_t r = 0; r < a[c].size(); ++r) d = std::max(d, std::abs(a[c][r] - phase * b[c][r]));
  }
  return d;
}

inline double max_diff(const Matrix& a, const Matrix& b) {
  double d = 0;
  for (std::size_t c = 0; c < a.size(); ++c) d = std::max(d, max_diff(a[c], b[c]));
  return d;
}

inline runtime::Value qubit_array(const std::vector<runtime::Value>& qs) { return runtime::make_array(qs); }

inline runtime::Value big_endian(const std::vector<runtime::Value>& qs) {
  return runtime::UdtValue{"Microsoft.Quantum.Canon.BigEndian", std::make_shared<const runtime::Value>(qubit_array(qs))};
}

/// Compiles a program and drives its operations on a fresh register.
class Harness {
 public:
  explicit Harness(const std::string& text, runtime::RunOptions options = {}) {
    compilation_ = compile({SourceInput{"harness.qds", text}});
    if (!compilation_->ok()) {
      std::string msg = "compilation failed:\n";
      for (const auto& d : compilation_->diagnostics) msg += format_diagnostic(d) + "\n";
      throw std::runtime_error(msg);
    }
    interp_ = std::make_unique<runtime::Interpreter>(*compilation_->model, options);
  }

  runtime::Interpreter& interpreter() { return *interp_; }
  const Compilation& compilation() const { return *compilation_; }

  runtime::Value callable(const std::string& name) { return interp_->callable(name); }

  /// Runs `op` on `n` qubits prepared in `input` and returns the final state.
  State apply(const runtime::Value& op, std::size_t n, const ArgBuilder& arg, const State& input) {
    auto qs = interp_->allocate(n);
    interp_->simulator().set_amplitudes(input);
    interp_->invoke(op, arg(qs));
    State out = interp_->simulator().amplitudes();
    interp_->simulator().set_amplitudes(basis_state(n, 0));
    interp_->release(qs);
    return out;
  }

  /// Runs `first` then `second` on the same register.
  State apply2(const runtime::Value& first, const runtime::Value& second, std::size_t n, const ArgBuilder& arg,
               const State& input) {
    auto qs = interp_->allocate(n);
    interp_->simulator().set_amplitudes(input);
    interp_->invoke(first, arg(qs));
    interp_->invoke(second, arg(qs));
    State out = interp_->simulator().amplitudes();
    interp_->simulator().set_amplitudes(basis_state(n, 0));
    interp_->release(qs);
    return out;
  }

  Matrix unitary(const runtime::Value& op, std::size_t n, const ArgBuilder& arg) {
    Matrix m;
    for (std::size_t b = 0; b < (std::size_t{1} << n); ++b) m.push_back(apply(op, n, arg, basis_state(n, b)));
    return m;
  }

 private:
  std::unique_ptr<Compilation> compilation_;
  std::unique_ptr<runtime::Interpreter> interp_;
};

struct RunOutput {
  runtime::Value value;
  std::vector<std::string> messages;
  std::vector<std::string> trace;
  std::vector<std::string> notices;
  std::size_t leaked = 0;  // qubits still in use afterwards
  std::size_t free_after = 0;
};

/// Compiles `text` and calls `entry`; Failure propagates to the caller.
inline RunOutput run_program(const std::string& text, const std::string& entry, runtime::RunOptions options = {},
                             const runtime::Value& arg = runtime::unit()) {
  auto c = compile({SourceInput{"program.qds", text}});
  if (!c->ok()) {
    std::string msg = "compilation failed:\n";
    for (const auto& d : c->diagnostics) msg += format_diagnostic(d) + "\n";
    throw std::runtime_error(msg);
  }
  RunOutput out;
  runtime::RunHooks hooks;
  hooks.message = [&](const std::string& m) { out.messages.push_back(m); };
  hooks.trace = [&](const std::string& t) { out.trace.push_back(t); };
  hooks.notice = [&](const std::string& n) { out.notices.push_back(n); };
  runtime::Interpreter it(*c->model, options, hooks);
  out.value = it.call(entry, arg);
  out.leaked = it.ledger().used().size();
  out.free_after = it.ledger().free_count();
  return out;
}

/// Arguments for `Controlled op`: the first `controls` qubits form the control
/// register; the rest go to `inner`.
inline ArgBuilder controlled_args(std::size_t controls, ArgBuilder inner) {
  return [controls, inner](const std::vector<runtime::Value>& qs) {
    std::vector<runtime::Value> ctl(qs.begin(), qs.begin() + static_cast<std::ptrdiff_t>(controls));
    std::vector<runtime::Value> rest(qs.begin() + static_cast<std::ptrdiff_t>(controls), qs.end());
    return runtime::Value(runtime::TupleValue{{runtime::make_array(std::move(ctl)), inner(rest)}});
  };
}

/// Expected matrix of a singly-controlled `u` whose control is bit 0 and whose
/// targets are the higher bits: identity where the control is 0.
inline Matrix controlled_expectation(const Matrix& u) {
  std::size_t dim = u.size();
  Matrix m(2 * dim, State(2 * dim));
  for (std::size_t c = 0; c < dim; ++c) {
    m[2 * c][2 * c] = 1;
    for (std::size_t r = 0; r < dim; ++r) m[2 * c + 1][2 * r + 1] = u[c][r];
  }
  return m;
}

}  // namespace qdsl::testing
