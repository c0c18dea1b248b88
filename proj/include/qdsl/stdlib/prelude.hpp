#pragma once

#include <string>
#include <vector>

namespace qdsl::stdlib {

struct PreludeFile {
  std::string name;
  std::string text;
};

/// Language-core declarations that generated code relies on. Always loaded.
const PreludeFile& core_file();

/// The standard prelude: Microsoft.Quantum.Primitive and Microsoft.Quantum.Canon.
const std::vector<PreludeFile>& prelude_files();

}  // namespace qdsl::stdlib
