#pragma once

#include <array>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "qdsl/support/source.hpp"
#include "qdsl/syntax/ast.hpp"
#include "qdsl/types/type.hpp"

namespace qdsl::types {

/// One entry of a callable's specialization table.
struct Specialization {
  bool present = false;
  ast::SpecGen gen = ast::SpecGen::Provided;
  const ast::Block* block = nullptr;  // statements to run, when not intrinsic or self
  std::unique_ptr<ast::Block> generated;
  std::string controls;  // local name bound to the control register
  Span span;
};

struct CallableDef {
  std::string name;  // fully qualified
  std::string short_name;
  std::string ns;
  bool is_operation = true;
  bool from_prelude = false;
  ast::CallableDecl* decl = nullptr;
  const SourceFile* source = nullptr;
  std::vector<std::string> opens;

  std::vector<std::string> type_params;
  TypeRef input;
  TypeRef output;
  uint8_t variants = kNoVariants;
  TypeRef type;  // the callable's own type, with its type parameters free

  std::array<Specialization, 4> specs;  // indexed by ast::SpecKind

  Specialization& spec(ast::SpecKind k) { return specs[static_cast<std::size_t>(k)]; }
  const Specialization& spec(ast::SpecKind k) const { return specs[static_cast<std::size_t>(k)]; }
  bool is_intrinsic() const { return spec(ast::SpecKind::Body).gen == ast::SpecGen::Intrinsic; }
};

struct UdtDef {
  std::string name;  // fully qualified
  std::string ns;
  TypeRef base;
  bool from_prelude = false;
  ast::NewtypeDecl* decl = nullptr;
  const SourceFile* source = nullptr;
  std::vector<std::string> opens;
};

/// Global symbol tables shared by the checker, transform and runtime.
struct ProgramModel {
  std::map<std::string, std::unique_ptr<CallableDef>> callables;
  std::map<std::string, UdtDef> udts;
  UdtTable udt_table;
  std::set<std::string> namespaces;

  const CallableDef* find_callable(const std::string& qualified) const {
    auto it = callables.find(qualified);
    return it == callables.end() ? nullptr : it->second.get();
  }
};

std::string qualify(const std::string& ns, const std::string& name);

}  // namespace qdsl::types
