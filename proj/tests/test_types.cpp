#include <random>

#include "doctest.h"
#include "qdsl/types/type.hpp"

using namespace qdsl::types;

namespace {

UdtTable lattice() {
  UdtTable u;
  u.add("BigEndian", array_type(qubit_type()));
  u.add("LittleEndian", array_type(qubit_type()));
  u.add("Meters", double_type());
  u.add("Height", udt_type("Meters"));
  return u;
}

TypeRef Tp(const char* n) { return param_type(n); }

struct Gen {
  std::mt19937_64 rng;
  bool with_params = false;

  explicit Gen(uint64_t seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  TypeRef leaf() {
    static const char* udts[] = {"BigEndian", "LittleEndian", "Meters", "Height"};
    int k = pick(with_params ? 12 : 10);
    if (k < 8) return primitive(static_cast<Kind>(k));
    if (k < 10) return udt_type(udts[pick(4)]);
    return param_type(pick(2) ? "`T" : "`U");
  }

  // Unnormalized terms: may contain singleton tuples anywhere.
  TypeRef term(int depth) {
    if (depth == 0) return leaf();
    switch (pick(6)) {
      case 0: {
        std::vector<TypeRef> items;
        int n = pick(4);
        for (int i = 0; i < n; ++i) items.push_back(term(depth - 1));
        return raw_tuple_type(items);
      }
      case 1: return array_type(term(depth - 1));
      case 2: return operation_type(term(depth - 1), term(depth - 1), static_cast<uint8_t>(pick(4)));
      case 3: return function_type(term(depth - 1), term(depth - 1));
      case 4: return raw_tuple_type({term(depth - 1)});
      default: return leaf();
    }
  }
};

void subterms(const TypeRef& t, const UdtTable& udts, std::vector<TypeRef>& out) {
  for (const auto& o : out) {
    if (equal(o, t)) return;
  }
  out.push_back(t);
  if (t->kind == Kind::Udt) {
    if (const TypeRef* base = udts.base_of(t->name)) subterms(*base, udts, out);
  }
  for (const auto& i : t->items) subterms(i, udts, out);
}

// Brute force: try every assignment of the parameters in `a` to subterms of
// the ground type `b` (and the bases of UDTs it mentions).
bool oracle_solvable(const TypeRef& a, const TypeRef& b, const UdtTable& udts) {
  std::vector<std::string> params;
  collect_params(a, params);
  std::vector<TypeRef> cands;
  subterms(b, udts, cands);
  std::vector<std::size_t> idx(params.size(), 0);
  while (true) {
    Bindings s;
    for (std::size_t i = 0; i < params.size(); ++i) s[params[i]] = cands[idx[i]];
    if (subtype(b, substitute(a, s), udts)) return true;
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == cands.size()) idx[k++] = 0;
    if (k == idx.size()) return false;
  }
}

}  // namespace

TEST_CASE("normalize unwraps singleton tuples") {
  CHECK(equal(normalize(raw_tuple_type({int_type()})), int_type()));
  CHECK(equal(normalize(raw_tuple_type({raw_tuple_type({raw_tuple_type({int_type()})})})), int_type()));
  auto pair = raw_tuple_type({int_type(), double_type()});
  CHECK(equal(normalize(pair), pair));
  CHECK(to_string(normalize(raw_tuple_type({raw_tuple_type({qubit_type()}), int_type()}))) == "(Qubit, Int)");
  CHECK(tuple_type({}) == unit_type());
  CHECK(equal(tuple_type({bool_type()}), bool_type()));
}

TEST_CASE("normalize is idempotent and leaves no singleton tuples") {
  Gen g(7);
  for (int trial = 0; trial < 2000; ++trial) {
    TypeRef t = g.term(3);
    TypeRef n = normalize(t);
    CHECK(is_normalized(n));
    CHECK(equal(normalize(n), n));
  }
}

TEST_CASE("type printing") {
  CHECK(to_string(unit_type()) == "()");
  CHECK(to_string(array_type(array_type(int_type()))) == "Int[][]");
  CHECK(to_string(operation_type(qubit_type(), unit_type(), kAdjointable | kControllable)) ==
        "(Qubit => () : Adjoint, Controlled)");
  CHECK(to_string(function_type(tuple_type({Tp("`T"), int_type()}), bool_type())) == "((`T, Int) -> Bool)");
}

TEST_CASE("UDT subtyping") {
  auto u = lattice();
  auto q = array_type(qubit_type());
  CHECK(subtype(udt_type("BigEndian"), q, u));
  CHECK_FALSE(subtype(q, udt_type("BigEndian"), u));
  CHECK_FALSE(subtype(udt_type("BigEndian"), udt_type("LittleEndian"), u));
  CHECK(subtype(udt_type("Height"), double_type(), u));
  CHECK_FALSE(subtype(double_type(), udt_type("Height"), u));
  CHECK(subtype(array_type(udt_type("BigEndian")), array_type(q), u));
  CHECK(subtype(tuple_type({udt_type("Height"), int_type()}), tuple_type({udt_type("Meters"), int_type()}), u));
}

TEST_CASE("callable subtyping: variants and variance") {
  auto u = lattice();
  auto q = array_type(qubit_type());
  auto be = udt_type("BigEndian");
  auto both = operation_type(q, unit_type(), kAdjointable | kControllable);
  auto adj = operation_type(q, unit_type(), kAdjointable);
  auto plain = operation_type(q, unit_type());
  CHECK(subtype(both, adj, u));
  CHECK(subtype(adj, plain, u));
  CHECK_FALSE(subtype(plain, adj, u));
  // accepts Qubit[] so it can stand in for something accepting BigEndian
  CHECK(subtype(plain, operation_type(be, unit_type()), u));
  CHECK_FALSE(subtype(operation_type(be, unit_type()), plain, u));
  CHECK(subtype(function_type(int_type(), be), function_type(int_type(), q), u));
  CHECK_FALSE(subtype(function_type(int_type(), int_type()), operation_type(int_type(), int_type()), u));
}

TEST_CASE("subtype is reflexive and transitive over generated terms") {
  auto u = lattice();
  Gen g(11);
  std::vector<TypeRef> pool;
  for (int i = 0; i < 150; ++i) pool.push_back(normalize(g.term(2)));
  // seed chains that definitely relate
  pool.push_back(udt_type("Height"));
  pool.push_back(udt_type("Meters"));
  pool.push_back(double_type());
  for (const auto& a : pool) CHECK(subtype(a, a, u));
  for (const auto& a : pool) {
    for (const auto& b : pool) {
      if (!subtype(a, b, u)) continue;
      if (subtype(b, a, u)) CHECK(equal(a, b));  // antisymmetry
      for (const auto& c : pool) {
        if (subtype(b, c, u)) CHECK(subtype(a, c, u));
      }
    }
  }
}

TEST_CASE("unify examples") {
  auto u = lattice();
  auto r = unify(array_type(Tp("`T")), array_type(int_type()), {}, u);
  REQUIRE(r);
  CHECK(to_string(r->at("`T")) == "Int");

  auto map_in = tuple_type({function_type(Tp("`T"), Tp("`U")), array_type(Tp("`T"))});
  auto actual = tuple_type({function_type(int_type(), bool_type()), array_type(int_type())});
  r = unify(map_in, actual, {}, u);
  REQUIRE(r);
  CHECK(to_string(r->at("`T")) == "Int");
  CHECK(to_string(r->at("`U")) == "Bool");

  r = unify(Tp("`T"), Tp("`T"), {}, u);
  REQUIRE(r);
  CHECK(r->empty());
  r = unify(tuple_type({Tp("`T"), Tp("`T")}), tuple_type({int_type(), int_type()}), {}, u);
  REQUIRE(r);
  CHECK(r->size() == 1);
  CHECK_FALSE(unify(tuple_type({Tp("`T"), Tp("`T")}), tuple_type({int_type(), bool_type()}), {}, u));
}

TEST_CASE("unify failures: occurs check and constructor mismatch") {
  auto u = lattice();
  CHECK_FALSE(unify(Tp("`T"), array_type(Tp("`T")), {}, u));
  CHECK_FALSE(unify(array_type(Tp("`T")), int_type(), {}, u));
  CHECK_FALSE(unify(tuple_type({Tp("`T"), int_type()}), tuple_type({int_type(), int_type(), int_type()}), {}, u));
}

TEST_CASE("unify widens through UDT bases") {
  auto u = lattice();
  auto q = array_type(qubit_type());
  auto r = unify(tuple_type({Tp("`T"), Tp("`T")}), tuple_type({udt_type("BigEndian"), q}), {}, u);
  REQUIRE(r);
  CHECK(equal(r->at("`T"), q));
  r = unify(tuple_type({Tp("`T"), Tp("`T")}), tuple_type({udt_type("BigEndian"), udt_type("LittleEndian")}), {}, u);
  REQUIRE(r);
  CHECK(equal(r->at("`T"), q));
}

TEST_CASE("unify agrees with a brute-force oracle and is sound") {
  auto u = lattice();
  Gen g(2024);
  int solved = 0;
  for (int trial = 0; trial < 1500; ++trial) {
    g.with_params = true;
    TypeRef a = normalize(g.term(3));
    TypeRef b;
    if (g.pick(2) == 0) {
      // instantiate a's parameters to force plenty of solvable cases
      g.with_params = false;
      Bindings s{{"`T", normalize(g.term(1))}, {"`U", normalize(g.term(1))}};
      b = substitute(a, s);
    } else {
      g.with_params = false;
      b = normalize(g.term(3));
    }
    auto result = unify(a, b, {}, u);
    bool expected = oracle_solvable(a, b, u);
    if (result) {
      ++solved;
      INFO(to_string(a), " <- ", to_string(b));
      CHECK(subtype(b, substitute(a, *result), u));
    }
    INFO(to_string(a), " <- ", to_string(b));
    CHECK(expected == static_cast<bool>(result));
  }
  CHECK(solved > 300);
}
