#include "qdsl/syntax/parser.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <initializer_list>
#include <stdexcept>

namespace qdsl::syntax {

using namespace qdsl::ast;

namespace {

struct ParseError : std::runtime_error {
  ParseError(Code c, Span s, std::string msg) : std::runtime_error(std::move(msg)), code(c), span(s) {}
  Code code;
  Span span;
};

std::string describe(const Token& t) {
  if (t.kind == TokenKind::Eof) return "end of input";
  return "'" + t.lexeme + "'";
}

std::string decode_escapes(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (c != '\\' || i + 1 >= raw.size()) {
      out.push_back(c);
      continue;
    }
    char n = raw[++i];
    switch (n) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'r': out.push_back('\r'); break;
      default: out.push_back(n); break;
    }
  }
  return out;
}

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, DiagnosticSink& sink) : tokens_(tokens), sink_(sink) {
    eof_.kind = TokenKind::Eof;
    uint32_t end = tokens_.empty() ? 0 : tokens_.back().span.end;
    eof_.span = Span{end, end};
  }

  Program program() {
    Program prog;
    NamespaceDecl root;
    bool have_root = false;
    while (!at_end()) {
      const Token& t = cur();
      try {
        if (t.is_keyword("namespace")) {
          prog.namespaces.push_back(namespace_decl());
        } else if (starts_item()) {
          if (!have_root) {
            root.span = t.span;
            have_root = true;
          }
          root.items.push_back(item());
          root.span = Span::cover(root.span, prev_span());
        } else if (t.is_symbol("}")) {
          throw error_expected("declaration", t);
        } else {
          Span start = t.span;
          try {
            statement();
          } catch (const ParseError&) {
            synchronize_statement();
          }
          sink_.error(Code::StrayStatement, Span::cover(start, prev_span()),
                      "statements must appear inside an operation or function body");
        }
      } catch (const ParseError& e) {
        report(e);
        synchronize_item();
      }
    }
    if (have_root) prog.namespaces.insert(prog.namespaces.begin(), std::move(root));
    if (!tokens_.empty()) prog.span = Span{tokens_.front().span.begin, tokens_.back().span.end};
    return prog;
  }

  std::vector<Stmt> statements() {
    std::vector<Stmt> out;
    while (!at_end()) {
      try {
        out.push_back(statement());
      } catch (const ParseError& e) {
        report(e);
        synchronize_statement();
      }
    }
    return out;
  }

  std::optional<Expr> lone_expression() {
    try {
      Expr e = expression();
      if (!at_end()) throw error_expected("end of input", cur());
      return e;
    } catch (const ParseError& e) {
      report(e);
      return std::nullopt;
    }
  }

 private:
  // -- token cursor --------------------------------------------------------
  const Token& cur() const { return pos_ < tokens_.size() ? tokens_[pos_] : eof_; }
  const Token& peek(std::size_t n = 1) const { return pos_ + n < tokens_.size() ? tokens_[pos_ + n] : eof_; }
  bool at_end() const { return pos_ >= tokens_.size(); }
  Span prev_span() const { return pos_ == 0 ? cur().span : tokens_[pos_ - 1].span; }
  const Token& advance() {
    const Token& t = cur();
    if (t.recovered) suppress_ = true;
    if (t.is_symbol(";") || t.is_symbol("{") || t.is_symbol("}")) suppress_ = false;
    if (!at_end()) ++pos_;
    return t;
  }
  bool accept_symbol(std::string_view s) {
    if (cur().is_symbol(s)) {
      advance();
      return true;
    }
    return false;
  }
  bool accept_keyword(std::string_view s) {
    if (cur().is_keyword(s)) {
      advance();
      return true;
    }
    return false;
  }
  const Token& expect_symbol(std::string_view s) {
    if (!cur().is_symbol(s)) throw error_expected("'" + std::string(s) + "'", cur());
    return advance();
  }
  const Token& expect_keyword(std::string_view s) {
    if (!cur().is_keyword(s)) throw error_expected("'" + std::string(s) + "'", cur());
    return advance();
  }
  const Token& expect_identifier(std::string_view what = "identifier") {
    if (cur().kind != TokenKind::Identifier) throw error_expected(std::string(what), cur());
    return advance();
  }

  ParseError error_expected(std::string expected, const Token& found) const {
    return ParseError(Code::UnexpectedToken, found.span, "expected " + expected + ", found " + describe(found));
  }
  // Errors right after a lexical error are usually its echo.
  void report(const ParseError& e) {
    if (!suppress_) sink_.error(e.code, e.span, e.what());
  }

  void synchronize_statement() {
    int depth = 0;
    while (!at_end()) {
      const Token& t = cur();
      if (t.is_symbol("{")) ++depth;
      if (t.is_symbol("}")) {
        if (depth == 0) break;
        --depth;
        if (depth == 0) {
          advance();
          break;
        }
      }
      if (t.is_symbol(";") && depth == 0) {
        advance();
        break;
      }
      advance();
    }
    suppress_ = false;
  }

  void synchronize_item() {
    int depth = 0;
    while (!at_end()) {
      const Token& t = cur();
      if (depth == 0 && (starts_item() || t.is_keyword("namespace"))) break;
      if (t.is_symbol("{")) ++depth;
      if (t.is_symbol("}")) {
        if (depth == 0) break;
        --depth;
      }
      advance();
    }
    suppress_ = false;
  }

  bool starts_item() const {
    const Token& t = cur();
    return t.is_keyword("open") || t.is_keyword("operation") || t.is_keyword("function") || t.is_keyword("newtype");
  }

  std::string dotted_name() {
    std::string name = expect_identifier().lexeme;
    while (cur().is_symbol(".") && peek().kind == TokenKind::Identifier) {
      advance();
      name += ".";
      name += advance().lexeme;
    }
    return name;
  }

  // -- declarations --------------------------------------------------------
  NamespaceDecl namespace_decl() {
    NamespaceDecl ns;
    Span start = expect_keyword("namespace").span;
    ns.name = dotted_name();
    expect_symbol("{");
    while (!at_end() && !cur().is_symbol("}")) {
      try {
        if (!starts_item()) throw error_expected("'open', 'operation', 'function' or 'newtype'", cur());
        ns.items.push_back(item());
      } catch (const ParseError& e) {
        report(e);
        synchronize_item();
        if (!at_end() && !starts_item() && !cur().is_symbol("}")) advance();
      }
    }
    expect_symbol("}");
    ns.span = Span::cover(start, prev_span());
    return ns;
  }

  Item item() {
    const Token& t = cur();
    if (t.is_keyword("open")) {
      OpenDecl o;
      Span start = advance().span;
      o.name = dotted_name();
      expect_symbol(";");
      o.span = Span::cover(start, prev_span());
      return o;
    }
    if (t.is_keyword("newtype")) {
      NewtypeDecl n;
      Span start = advance().span;
      const Token& name = expect_identifier("type name");
      n.name = name.lexeme;
      n.name_span = name.span;
      expect_symbol("=");
      n.base = type();
      expect_symbol(";");
      n.span = Span::cover(start, prev_span());
      return n;
    }
    return callable_decl();
  }

  CallableDecl callable_decl() {
    CallableDecl c;
    const Token& kw = advance();
    c.is_operation = kw.is_keyword("operation");
    const Token& name = expect_identifier("callable name");
    c.name = name.lexeme;
    c.name_span = name.span;
    if (accept_symbol("<")) {
      do {
        if (cur().kind != TokenKind::TypeParameter) throw error_expected("type parameter", cur());
        c.type_params.push_back(advance().lexeme);
      } while (accept_symbol(","));
      expect_symbol(">");
    }
    c.params = param_tuple();
    expect_symbol(":");
    c.return_type = type();
    expect_symbol("{");
    if (starts_spec()) {
      while (!at_end() && !cur().is_symbol("}")) {
        try {
          SpecDecl s = spec_decl();
          for (const auto& prior : c.specs) {
            if (prior.kind == s.kind) {
              sink_.error(Code::DuplicateSpecialization, s.span,
                          "duplicate " + std::string(spec_kind_name(s.kind)) + " specialization");
            }
          }
          c.specs.push_back(std::move(s));
        } catch (const ParseError& e) {
          report(e);
          synchronize_statement();
        }
      }
    } else {
      SpecDecl body;
      body.kind = SpecKind::Body;
      body.gen = SpecGen::Provided;
      Block b;
      b.span = cur().span;
      b.stmts = block_statements();
      b.span = Span::cover(b.span, cur().span);
      body.span = b.span;
      body.body = std::move(b);
      c.specs.push_back(std::move(body));
      c.implicit_body = true;
    }
    Span close = expect_symbol("}").span;
    c.span = Span::cover(kw.span, close);
    bool has_body = false;
    for (const auto& s : c.specs) has_body |= s.kind == SpecKind::Body;
    if (!has_body) sink_.error(Code::MissingBody, c.name_span, "'" + c.name + "' has no body specialization");
    return c;
  }

  bool starts_spec() const {
    return cur().is_keyword("body") || cur().is_keyword("adjoint") || cur().is_keyword("controlled");
  }

  SpecDecl spec_decl() {
    SpecDecl s;
    const Token& first = cur();
    if (!starts_spec()) throw error_expected("'body', 'adjoint' or 'controlled'", first);
    advance();
    if (first.is_keyword("body")) {
      s.kind = SpecKind::Body;
    } else if (first.is_keyword("adjoint")) {
      s.kind = accept_keyword("controlled") ? SpecKind::ControlledAdjoint : SpecKind::Adjoint;
    } else {
      s.kind = accept_keyword("adjoint") ? SpecKind::ControlledAdjoint : SpecKind::Controlled;
    }
    const bool controlled = s.kind == SpecKind::Controlled || s.kind == SpecKind::ControlledAdjoint;
    if (accept_keyword("auto")) {
      s.gen = SpecGen::Auto;
      accept_symbol(";");
    } else if (accept_keyword("self")) {
      s.gen = SpecGen::Self;
      accept_symbol(";");
    } else if (accept_keyword("intrinsic")) {
      s.gen = SpecGen::Intrinsic;
      accept_symbol(";");
    } else if (cur().is_symbol("{") || (controlled && cur().is_symbol("("))) {
      s.gen = SpecGen::Provided;
      if (controlled) {
        expect_symbol("(");
        s.controls = expect_identifier("control register name").lexeme;
        expect_symbol(")");
      }
      s.body = block();
    } else {
      throw ParseError(Code::MissingBody, cur().span,
                       "missing specialization body: expected 'auto', 'self', 'intrinsic' or a block, found " +
                           describe(cur()));
    }
    s.span = Span::cover(first.span, prev_span());
    return s;
  }

  ParamNode param_tuple() {
    ParamNode p;
    p.is_tuple = true;
    Span start = expect_symbol("(").span;
    if (!cur().is_symbol(")")) {
      do {
        p.items.push_back(param());
      } while (accept_symbol(","));
    }
    expect_symbol(")");
    p.span = Span::cover(start, prev_span());
    return p;
  }

  ParamNode param() {
    if (cur().is_symbol("(")) return param_tuple();
    ParamNode p;
    const Token& name = expect_identifier("parameter name");
    p.name = name.lexeme;
    expect_symbol(":");
    p.type = type();
    p.span = Span::cover(name.span, prev_span());
    return p;
  }

  // -- types ---------------------------------------------------------------
  TypeNode type() {
    TypeNode t = type_base();
    while (cur().is_symbol("[") && peek().is_symbol("]")) {
      advance();
      Span close = advance().span;
      Span span = Span::cover(t.span, close);
      t = TypeNode{ArrayType{Box<TypeNode>(std::move(t))}, span};
    }
    return t;
  }

  TypeNode type_base() {
    const Token& t = cur();
    if (t.kind == TokenKind::TypeParameter) {
      advance();
      return TypeNode{ParamType{t.lexeme}, t.span};
    }
    if (t.kind == TokenKind::Identifier) {
      Span start = t.span;
      std::string name = dotted_name();
      return TypeNode{NamedType{std::move(name)}, Span::cover(start, prev_span())};
    }
    if (!t.is_symbol("(")) throw error_expected("type", t);
    Span start = advance().span;
    if (accept_symbol(")")) return TypeNode{TupleType{}, Span::cover(start, prev_span())};
    std::vector<TypeNode> items;
    items.push_back(type());
    while (accept_symbol(",")) items.push_back(type());
    if (cur().is_symbol("=>") || cur().is_symbol("->")) {
      CallableType ct{Box<TypeNode>(TypeNode{}), Box<TypeNode>(TypeNode{}), advance().is_symbol("=>"), {}};
      if (items.size() == 1) {
        *ct.input = std::move(items[0]);
      } else {
        Span s = Span::cover(items.front().span, items.back().span);
        *ct.input = TypeNode{TupleType{std::move(items)}, s};
      }
      *ct.output = type();
      if (accept_symbol(":")) {
        do {
          if (accept_keyword("Adjoint")) {
            ct.variants.push_back(Functor::Adjoint);
          } else if (accept_keyword("Controlled")) {
            ct.variants.push_back(Functor::Controlled);
          } else {
            throw error_expected("'Adjoint' or 'Controlled'", cur());
          }
        } while (accept_symbol(","));
      }
      expect_symbol(")");
      return TypeNode{std::move(ct), Span::cover(start, prev_span())};
    }
    expect_symbol(")");
    if (items.size() == 1) return std::move(items[0]);
    return TypeNode{TupleType{std::move(items)}, Span::cover(start, prev_span())};
  }

  // -- statements ----------------------------------------------------------
  std::vector<Stmt> block_statements() {
    std::vector<Stmt> out;
    while (!at_end() && !cur().is_symbol("}")) {
      try {
        out.push_back(statement());
      } catch (const ParseError& e) {
        report(e);
        synchronize_statement();
      }
    }
    return out;
  }

  Block block() {
    Block b;
    Span start = expect_symbol("{").span;
    b.stmts = block_statements();
    Span close = expect_symbol("}").span;
    b.span = Span::cover(start, close);
    return b;
  }

  Pattern pattern() {
    const Token& t = cur();
    if (t.is_symbol("_")) {
      advance();
      return Pattern{Pattern::Discard{}, t.span};
    }
    if (t.kind == TokenKind::Identifier) {
      advance();
      return Pattern{Pattern::Name{t.lexeme}, t.span};
    }
    if (!t.is_symbol("(")) throw error_expected("binding pattern", t);
    Span start = advance().span;
    Pattern::Tuple tup;
    if (!cur().is_symbol(")")) {
      do {
        tup.items.push_back(pattern());
      } while (accept_symbol(","));
    }
    expect_symbol(")");
    Span span = Span::cover(start, prev_span());
    if (tup.items.size() == 1) {
      Pattern inner = std::move(tup.items[0]);
      return inner;
    }
    return Pattern{std::move(tup), span};
  }

  Stmt statement() {
    const Token& t = cur();
    Span start = t.span;
    auto finish = [&](auto node) { return Stmt{std::move(node), Span::cover(start, prev_span())}; };

    if (t.is_keyword("let") || t.is_keyword("mutable")) {
      bool is_let = t.is_keyword("let");
      advance();
      Pattern p = pattern();
      expect_symbol("=");
      Expr value = expression();
      expect_symbol(";");
      if (is_let) return finish(LetStmt{std::move(p), std::move(value)});
      return finish(MutableStmt{std::move(p), std::move(value)});
    }
    if (t.is_keyword("set")) {
      advance();
      const Token& name = expect_identifier("variable name");
      SetStmt s{name.lexeme, name.span, Expr{}};
      expect_symbol("=");
      s.value = expression();
      expect_symbol(";");
      return finish(std::move(s));
    }
    if (t.is_keyword("if")) {
      advance();
      IfStmt s;
      Expr cond = expression();
      s.clauses.push_back({std::move(cond), block()});
      while (accept_keyword("elif")) {
        Expr c = expression();
        s.clauses.push_back({std::move(c), block()});
      }
      if (accept_keyword("else")) s.else_body = block();
      return finish(std::move(s));
    }
    if (t.is_keyword("for")) {
      advance();
      bool parens = cur().is_symbol("(") && peek().kind == TokenKind::Identifier && peek(2).is_keyword("in");
      if (parens) advance();
      const Token& var = expect_identifier("loop variable");
      expect_keyword("in");
      Expr range = expression();
      if (parens) expect_symbol(")");
      ForStmt s{var.lexeme, var.span, std::move(range), Block{}};
      s.body = block();
      return finish(std::move(s));
    }
    if (t.is_keyword("repeat")) {
      advance();
      Block body = block();
      expect_keyword("until");
      Expr cond = expression();
      RepeatStmt s{std::move(body), std::move(cond), std::nullopt};
      if (accept_keyword("fixup")) {
        s.fixup = block();
      } else {
        expect_symbol(";");
      }
      return finish(std::move(s));
    }
    if (t.is_keyword("return")) {
      advance();
      Expr value = make(UnitLit{}, cur().span);
      if (!cur().is_symbol(";")) value = expression();
      expect_symbol(";");
      return finish(ReturnStmt{std::move(value)});
    }
    if (t.is_keyword("fail")) {
      advance();
      Expr msg = expression();
      expect_symbol(";");
      return finish(FailStmt{std::move(msg)});
    }
    if (t.is_keyword("using") || t.is_keyword("borrowing")) {
      QubitAllocStmt s;
      s.kind = t.is_keyword("using") ? AllocKind::Using : AllocKind::Borrowing;
      advance();
      expect_symbol("(");
      const Token& name = expect_identifier("qubit binding name");
      s.name = name.lexeme;
      s.name_span = name.span;
      expect_symbol("=");
      const Token& q = cur();
      if (!q.is(TokenKind::Identifier, "Qubit")) throw error_expected("'Qubit[n]' or 'Qubit()'", q);
      advance();
      if (accept_symbol("(")) {
        expect_symbol(")");
        s.single = true;
      } else {
        expect_symbol("[");
        s.count = expression();
        expect_symbol("]");
      }
      expect_symbol(")");
      s.body = block();
      return finish(std::move(s));
    }
    if (t.kind == TokenKind::Keyword && (t.lexeme == "namespace" || t.lexeme == "operation" || t.lexeme == "function" ||
                                         t.lexeme == "open" || t.lexeme == "newtype")) {
      throw error_expected("statement", t);
    }
    Expr e = expression();
    expect_symbol(";");
    return finish(ExprStmt{std::move(e)});
  }

  // -- expressions ---------------------------------------------------------
  static Expr make(Expr::Node node, Span span) {
    Expr e;
    e.node = std::move(node);
    e.span = span;
    return e;
  }

  Expr expression() {
    Expr e = range_expr();
    while (cur().is(TokenKind::Identifier, "w") && peek().is_symbol("/") && peek().span.begin == cur().span.end) {
      advance();
      advance();
      bool saved = no_arrow_;
      no_arrow_ = true;
      Expr index = range_expr();
      no_arrow_ = saved;
      expect_symbol("<-");
      Expr value = range_expr();
      Span span = Span::cover(e.span, value.span);
      e = make(CopyUpdate{Box<Expr>(std::move(e)), Box<Expr>(std::move(index)), Box<Expr>(std::move(value))}, span);
    }
    return e;
  }

  Expr range_expr() {
    Expr start = binary(0);
    if (!cur().is_symbol("..")) return start;
    advance();
    Expr second = binary(0);
    if (accept_symbol("..")) {
      Expr third = binary(0);
      Span span = Span::cover(start.span, third.span);
      return make(RangeExpr{Box<Expr>(std::move(start)), Box<Expr>(std::move(second)), Box<Expr>(std::move(third))},
                  span);
    }
    Span span = Span::cover(start.span, second.span);
    return make(RangeExpr{Box<Expr>(std::move(start)), std::nullopt, Box<Expr>(std::move(second))}, span);
  }

  struct OpEntry {
    std::string_view symbol;
    BinaryOp op;
  };

  static const std::vector<std::vector<OpEntry>>& levels() {
    static const std::vector<std::vector<OpEntry>> table = {
        {{"||", BinaryOp::Or}},
        {{"&&", BinaryOp::And}},
        {{"|||", BinaryOp::BitOr}},
        {{"^^^", BinaryOp::BitXor}},
        {{"&&&", BinaryOp::BitAnd}},
        {{"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne}},
        {{"<", BinaryOp::Lt}, {"<=", BinaryOp::Le}, {">", BinaryOp::Gt}, {">=", BinaryOp::Ge}},
        {{"<<<", BinaryOp::Shl}, {">>>", BinaryOp::Shr}},
        {{"+", BinaryOp::Add}, {"-", BinaryOp::Sub}},
        {{"*", BinaryOp::Mul}, {"/", BinaryOp::Div}, {"%", BinaryOp::Mod}},
    };
    return table;
  }

  Expr binary(std::size_t level) {
    if (level >= levels().size()) return unary();
    Expr lhs = binary(level + 1);
    while (true) {
      const Token& t = cur();
      if (t.kind != TokenKind::Symbol) break;
      // `a<-b` outside a copy-and-update is a comparison with a negated operand.
      if (t.lexeme == "<-" && !no_arrow_ && levels()[level].front().op == BinaryOp::Lt) {
        Span minus = t.span;
        advance();
        Expr operand = binary(level + 1);
        Span nspan = Span::cover(minus, operand.span);
        Expr neg = make(Unary{UnaryOp::Negate, Box<Expr>(std::move(operand))}, nspan);
        Span span = Span::cover(lhs.span, neg.span);
        lhs = make(Binary{BinaryOp::Lt, Box<Expr>(std::move(lhs)), Box<Expr>(std::move(neg))}, span);
        continue;
      }
      const OpEntry* match = nullptr;
      for (const auto& entry : levels()[level]) {
        if (t.lexeme == entry.symbol) match = &entry;
      }
      if (match == nullptr) break;
      advance();
      Expr rhs = binary(level + 1);
      Span span = Span::cover(lhs.span, rhs.span);
      lhs = make(Binary{match->op, Box<Expr>(std::move(lhs)), Box<Expr>(std::move(rhs))}, span);
    }
    return lhs;
  }

  Expr unary() {
    const Token& t = cur();
    std::optional<UnaryOp> op;
    if (t.is_symbol("-")) op = UnaryOp::Negate;
    if (t.is_symbol("!")) op = UnaryOp::Not;
    if (t.is_symbol("~~~")) op = UnaryOp::BitNot;
    if (op) {
      advance();
      Expr operand = unary();
      Span span = Span::cover(t.span, operand.span);
      return make(Unary{*op, Box<Expr>(std::move(operand))}, span);
    }
    Expr base = postfix();
    if (cur().is_symbol("^")) {
      advance();
      Expr exponent = unary();
      Span span = Span::cover(base.span, exponent.span);
      return make(Binary{BinaryOp::Pow, Box<Expr>(std::move(base)), Box<Expr>(std::move(exponent))}, span);
    }
    return base;
  }

  Expr functor_operand() {
    const Token& t = cur();
    if (t.is_keyword("Adjoint") || t.is_keyword("Controlled")) {
      advance();
      Functor f = t.is_keyword("Adjoint") ? Functor::Adjoint : Functor::Controlled;
      Expr operand = functor_operand();
      Span span = Span::cover(t.span, operand.span);
      return make(FunctorApp{f, Box<Expr>(std::move(operand))}, span);
    }
    return primary();
  }

  Expr postfix() {
    Expr e = functor_operand();
    while (true) {
      if (cur().is_symbol("(")) {
        Expr args = call_args();
        Span span = Span::cover(e.span, args.span);
        e = make(Call{Box<Expr>(std::move(e)), Box<Expr>(std::move(args))}, span);
      } else if (cur().is_symbol("[") && !peek().is_symbol("]")) {
        advance();
        Expr index = expression();
        Span close = expect_symbol("]").span;
        Span span = Span::cover(e.span, close);
        e = make(Index{Box<Expr>(std::move(e)), Box<Expr>(std::move(index))}, span);
      } else {
        break;
      }
    }
    return e;
  }

  // Argument list: () is unit, (a) is a, (a, b) is a tuple.
  Expr call_args() {
    Span start = expect_symbol("(").span;
    std::vector<Expr> items;
    if (!cur().is_symbol(")")) {
      do {
        items.push_back(expression());
      } while (accept_symbol(","));
    }
    Span close = expect_symbol(")").span;
    Span span = Span::cover(start, close);
    if (items.empty()) return make(UnitLit{}, span);
    if (items.size() == 1) return std::move(items[0]);
    return make(TupleExpr{std::move(items)}, span);
  }

  Expr primary() {
    const Token& t = cur();
    switch (t.kind) {
      case TokenKind::IntLiteral: {
        advance();
        return make(IntLit{parse_int(t)}, t.span);
      }
      case TokenKind::DoubleLiteral: {
        advance();
        errno = 0;
        double v = std::strtod(t.lexeme.c_str(), nullptr);
        if (errno == ERANGE) sink_.error(Code::InvalidNumber, t.span, "double literal out of range");
        return make(DoubleLit{v}, t.span);
      }
      case TokenKind::StringLiteral: {
        advance();
        std::string_view raw(t.lexeme);
        raw.remove_prefix(1);
        if (!t.recovered) raw.remove_suffix(1);
        return make(StringLit{decode_escapes(raw)}, t.span);
      }
      case TokenKind::InterpolatedString: {
        advance();
        return interpolated(t);
      }
      case TokenKind::Identifier: {
        std::string name = dotted_name();
        return make(Ident{std::move(name)}, Span::cover(t.span, prev_span()));
      }
      case TokenKind::Keyword: {
        if (t.lexeme == "true" || t.lexeme == "false") {
          advance();
          return make(BoolLit{t.lexeme == "true"}, t.span);
        }
        if (t.lexeme == "Zero" || t.lexeme == "One") {
          advance();
          return make(ResultLit{t.lexeme == "One" ? ResultKind::One : ResultKind::Zero}, t.span);
        }
        if (t.lexeme.rfind("Pauli", 0) == 0) {
          advance();
          static constexpr PauliKind kinds[] = {PauliKind::I, PauliKind::X, PauliKind::Y, PauliKind::Z};
          return make(PauliLit{kinds[std::string_view("IXYZ").find(t.lexeme.back())]}, t.span);
        }
        if (t.lexeme == "new") {
          advance();
          TypeNode elem = type();
          expect_symbol("[");
          Expr size = expression();
          Span close = expect_symbol("]").span;
          return make(NewArray{std::move(elem), Box<Expr>(std::move(size))}, Span::cover(t.span, close));
        }
        break;
      }
      case TokenKind::Symbol: {
        if (t.lexeme == "_") {
          advance();
          return make(Placeholder{}, t.span);
        }
        if (t.lexeme == "(") {
          Expr e = call_args();
          return e;
        }
        if (t.lexeme == "[") {
          advance();
          std::vector<Expr> items;
          if (!cur().is_symbol("]")) {
            do {
              items.push_back(expression());
            } while (accept_symbol(";"));
          }
          Span close = expect_symbol("]").span;
          return make(ArrayExpr{std::move(items)}, Span::cover(t.span, close));
        }
        break;
      }
      default:
        break;
    }
    throw error_expected("expression", t);
  }

  int64_t parse_int(const Token& t) {
    uint64_t value = 0;
    std::string_view text(t.lexeme);
    int base = 10;
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
      base = 16;
      text.remove_prefix(2);
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
    if (ec != std::errc() || ptr != text.data() + text.size() ||
        (base == 10 && value > static_cast<uint64_t>(INT64_MAX))) {
      sink_.error(Code::InvalidNumber, t.span, "integer literal '" + t.lexeme + "' does not fit in 64 bits");
      return 0;
    }
    return static_cast<int64_t>(value);
  }

  Expr interpolated(const Token& t) {
    InterpString s;
    std::string_view raw(t.lexeme);
    // raw is $"...": content starts at offset 2
    std::size_t i = 2;
    const std::size_t end = raw.size() - 1;
    std::string text;
    auto flush = [&] {
      if (!text.empty()) {
        s.parts.push_back({decode_escapes(text), {}});
        text.clear();
      }
    };
    while (i < end) {
      char c = raw[i];
      if (c == '\\' && i + 1 < end) {
        text.push_back(c);
        text.push_back(raw[i + 1]);
        i += 2;
        continue;
      }
      if (c == '}') {
        sink_.error(Code::InvalidInterpolation, Span{static_cast<uint32_t>(t.span.begin + i),
                                                      static_cast<uint32_t>(t.span.begin + i + 1)},
                    "unmatched '}' in interpolated string");
        ++i;
        continue;
      }
      if (c != '{') {
        text.push_back(c);
        ++i;
        continue;
      }
      flush();
      std::size_t open = i;
      int depth = 1;
      std::size_t j = i + 1;
      while (j < end && depth > 0) {
        if (raw[j] == '"') {
          ++j;
          while (j < end && raw[j] != '"') j += raw[j] == '\\' ? 2 : 1;
        } else if (raw[j] == '{') {
          ++depth;
        } else if (raw[j] == '}') {
          --depth;
          if (depth == 0) break;
        }
        ++j;
      }
      uint32_t base = t.span.begin + static_cast<uint32_t>(open + 1);
      if (depth != 0) {
        sink_.error(Code::InvalidInterpolation, Span{base - 1, t.span.end}, "unterminated interpolation hole");
        break;
      }
      auto inner = raw.substr(open + 1, j - open - 1);
      auto toks = tokenize(inner, sink_, base);
      if (toks.empty()) {
        sink_.error(Code::InvalidInterpolation, Span{base - 1, base + 1}, "empty interpolation hole");
      } else {
        Parser sub(toks, sink_);
        if (auto e = sub.lone_expression()) {
          InterpString::Part part;
          part.expr.push_back(std::move(*e));
          s.parts.push_back(std::move(part));
        }
      }
      i = j + 1;
    }
    flush();
    return make(std::move(s), t.span);
  }

  const std::vector<Token>& tokens_;
  DiagnosticSink& sink_;
  std::size_t pos_ = 0;
  bool suppress_ = false;
  Token eof_;
  bool no_arrow_ = false;
};

}  // namespace

Program parse(const std::vector<Token>& tokens, DiagnosticSink& sink) { return Parser(tokens, sink).program(); }

std::vector<Stmt> parse_statements(const std::vector<Token>& tokens, DiagnosticSink& sink) {
  return Parser(tokens, sink).statements();
}

std::optional<Expr> parse_expression(const std::vector<Token>& tokens, DiagnosticSink& sink) {
  return Parser(tokens, sink).lone_expression();
}

Program parse_source(const SourceFile& file, std::vector<Diagnostic>& diags) {
  DiagnosticSink sink(&file, &diags);
  auto tokens = tokenize(file.text(), sink);
  return parse(tokens, sink);
}

}  // namespace qdsl::syntax
