#pragma once

#include <map>
#include <string>

#include "quantum_util.hpp"

namespace qdsl::testing {

struct Subject {
  std::size_t qubits;
  ArgBuilder arg;
};

/// How to call each adjointable prelude operation on a test register.
inline std::map<std::string, Subject> prelude_subjects() {
  using runtime::Value;
  auto one = [](const std::vector<Value>& qs) { return qs[0]; };
  auto tuple = [](std::vector<Value> items) { return Value(runtime::TupleValue{std::move(items)}); };
  std::map<std::string, Subject> m;
  for (const char* g : {"H", "X", "Y", "Z", "I", "T"}) m[std::string("Microsoft.Quantum.Primitive.") + g] = {1, one};
  m["Microsoft.Quantum.Primitive.R1Frac"] = {1, [=](const auto& qs) { return tuple({int64_t{3}, int64_t{2}, qs[0]}); }};
  m["Microsoft.Quantum.Primitive.CNOT"] = {2, [=](const auto& qs) { return tuple({qs[0], qs[1]}); }};
  m["Microsoft.Quantum.Primitive.CCNOT"] = {3, [=](const auto& qs) { return tuple({qs[0], qs[1], qs[2]}); }};
  m["Microsoft.Quantum.Canon.SWAP"] = {2, [=](const auto& qs) { return tuple({qs[0], qs[1]}); }};
  m["Microsoft.Quantum.Canon.SwapReverseRegister"] = {5, qubit_array};
  m["Microsoft.Quantum.Canon.QFT"] = {5, big_endian};
  m["Microsoft.Quantum.Canon.ApproximateQFT"] = {5, [=](const auto& qs) { return tuple({int64_t{2}, big_endian(qs)}); }};
  return m;
}

}  // namespace qdsl::testing
