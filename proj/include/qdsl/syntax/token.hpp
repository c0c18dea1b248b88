#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qdsl/support/diagnostics.hpp"
#include "qdsl/support/source.hpp"

namespace qdsl::syntax {

enum class TokenKind {
  Keyword,
  Identifier,
  IntLiteral,
  DoubleLiteral,
  StringLiteral,
  InterpolatedString,
  Symbol,
  TypeParameter,
  Eof,
};

std::string_view token_kind_name(TokenKind kind);

/// A lexeme is the raw source slice; string tokens keep their quotes so that
/// interpolation segments can be re-lexed at their true offsets.
struct Token {
  TokenKind kind = TokenKind::Eof;
  std::string lexeme;
  Span span;
  bool recovered = false;  // stands in for a malformed lexeme already reported

  bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
  bool is_symbol(std::string_view text) const { return is(TokenKind::Symbol, text); }
  bool is_keyword(std::string_view text) const { return is(TokenKind::Keyword, text); }
};

bool is_keyword(std::string_view word);

/// Lexes `source` (or the byte range of it starting at `base_offset`).
/// Whitespace and `//` comments are dropped; no Eof token is appended.
std::vector<Token> tokenize(std::string_view source, DiagnosticSink& sink, uint32_t base_offset = 0);

}  // namespace qdsl::syntax
