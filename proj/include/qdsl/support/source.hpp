#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qdsl {

/// Half-open byte range [begin, end) into a source buffer.
struct Span {
  uint32_t begin = 0;
  uint32_t end = 0;

  bool contains(const Span& other) const { return begin <= other.begin && other.end <= end; }
  static Span cover(const Span& a, const Span& b) {
    return Span{a.begin < b.begin ? a.begin : b.begin, a.end > b.end ? a.end : b.end};
  }
  friend bool operator==(const Span&, const Span&) = default;
};

struct LineCol {
  uint32_t line = 1;  // 1-based
  uint32_t column = 1;  // 1-based, in bytes
};

class SourceFile {
 public:
  SourceFile(std::string name, std::string text);

  const std::string& name() const { return name_; }
  const std::string& text() const { return text_; }
  LineCol locate(uint32_t offset) const;
  std::string_view slice(Span span) const;

 private:
  std::string name_;
  std::string text_;
  std::vector<uint32_t> line_starts_;
};

}  // namespace qdsl
