#include <array>
#include <cctype>

#include "qdsl/syntax/token.hpp"

namespace qdsl::syntax {

namespace {

constexpr std::array kKeywords = {
    "namespace", "open",   "operation", "function", "newtype", "body",     "adjoint",   "controlled", "auto",
    "self",      "intrinsic", "let",    "mutable",  "set",     "if",       "elif",      "else",       "for",
    "in",        "repeat", "until",     "fixup",    "return",  "fail",     "using",     "borrowing",  "true",
    "false",     "Zero",   "One",       "PauliI",   "PauliX",  "PauliY",   "PauliZ",    "Adjoint",    "Controlled",
    "new",
};

// Longest first so that prefix matching picks the maximal munch.
constexpr std::array kSymbols = {
    "&&&", "|||", "^^^", "~~~", "<<<", ">>>", "..", "=>", "->", "<-", "==", "!=", "<=", ">=", "&&", "||",
    "+",   "-",   "*",   "/",   "%",   "^",   "!",  "<",  ">",  "=",  "(",  ")",  "[",  "]",  "{",
    "}",   ",",   ";",   ":",   ".",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
 public:
  Lexer(std::string_view src, DiagnosticSink& sink, uint32_t base) : src_(src), sink_(sink), base_(base) {}

  std::vector<Token> run() {
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      lex_one();
    }
    return std::move(tokens_);
  }

 private:
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos_;
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  void push(TokenKind kind, std::size_t start) {
    Token t;
    t.kind = kind;
    t.lexeme = std::string(src_.substr(start, pos_ - start));
    t.span = Span{static_cast<uint32_t>(base_ + start), static_cast<uint32_t>(base_ + pos_)};
    tokens_.push_back(std::move(t));
  }

  Span here(std::size_t start) const {
    return Span{static_cast<uint32_t>(base_ + start), static_cast<uint32_t>(base_ + pos_)};
  }

  void lex_one() {
    const std::size_t start = pos_;
    const char c = src_[pos_];

    if (c == '_' && !ident_char(peek(1))) {
      ++pos_;
      push(TokenKind::Symbol, start);
      return;
    }
    if (ident_start(c)) {
      while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
      auto word = src_.substr(start, pos_ - start);
      push(is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier, start);
      return;
    }
    if (c == '`') {
      ++pos_;
      if (!ident_start(peek())) {
        sink_.error(Code::IllegalCharacter, here(start), "type parameter name expected after '`'");
        return;
      }
      while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
      push(TokenKind::TypeParameter, start);
      return;
    }
    if (digit(c)) {
      lex_number(start);
      return;
    }
    if (c == '"') {
      lex_string(start, false);
      return;
    }
    if (c == '$' && peek(1) == '"') {
      ++pos_;
      lex_string(start, true);
      return;
    }
    for (std::string_view sym : kSymbols) {
      if (src_.substr(pos_, sym.size()) == sym) {
        pos_ += sym.size();
        push(TokenKind::Symbol, start);
        return;
      }
    }
    // Consume a whole UTF-8 sequence so the diagnostic points at one character.
    ++pos_;
    while (pos_ < src_.size() && (static_cast<unsigned char>(src_[pos_]) & 0xC0) == 0x80) ++pos_;
    sink_.error(Code::IllegalCharacter, here(start), "illegal character '" + std::string(src_.substr(start, pos_ - start)) + "'");
  }

  void lex_number(std::size_t start) {
    bool is_double = false;
    if (src_[pos_] == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      pos_ += 2;
      while (pos_ < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      push(TokenKind::IntLiteral, start);
      return;
    }
    while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
    if (peek() == '.' && digit(peek(1))) {
      is_double = true;
      ++pos_;
      while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = pos_;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (digit(peek())) {
        is_double = true;
        while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
      } else {
        pos_ = save;
      }
    }
    push(is_double ? TokenKind::DoubleLiteral : TokenKind::IntLiteral, start);
  }

  void lex_string(std::size_t start, bool interpolated) {
    ++pos_;  // opening quote
    int depth = 0;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\\') {
        pos_ += 2;
        continue;
      }
      if (interpolated && c == '{') ++depth;
      if (interpolated && c == '}' && depth > 0) --depth;
      if (c == '"' && depth > 0) {
        // string literal nested inside an interpolation hole
        ++pos_;
        while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') {
          pos_ += src_[pos_] == '\\' ? 2 : 1;
        }
        if (pos_ < src_.size() && src_[pos_] == '"') ++pos_;
        continue;
      }
      if (c == '"') {
        ++pos_;
        push(interpolated ? TokenKind::InterpolatedString : TokenKind::StringLiteral, start);
        return;
      }
      if (c == '\n') break;
      ++pos_;
    }
    if (pos_ > src_.size()) pos_ = src_.size();
    sink_.error(Code::UnterminatedString, here(start), "unterminated string literal");
    push(TokenKind::StringLiteral, start);
    tokens_.back().recovered = true;
  }

  std::string_view src_;
  DiagnosticSink& sink_;
  uint32_t base_;
  std::size_t pos_ = 0;
  std::vector<Token> tokens_;
};

}  // namespace

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::IntLiteral: return "integer-literal";
    case TokenKind::DoubleLiteral: return "double-literal";
    case TokenKind::StringLiteral: return "string-literal";
    case TokenKind::InterpolatedString: return "interpolated-string";
    case TokenKind::Symbol: return "symbol";
    case TokenKind::TypeParameter: return "type-parameter-name";
    case TokenKind::Eof: return "end of input";
  }
  return "?";
}

bool is_keyword(std::string_view word) {
  for (std::string_view k : kKeywords) {
    if (k == word) return true;
  }
  return false;
}

std::vector<Token> tokenize(std::string_view source, DiagnosticSink& sink, uint32_t base_offset) {
  return Lexer(source, sink, base_offset).run();
}

}  // namespace qdsl::syntax
