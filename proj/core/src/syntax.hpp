#pragma once

// Tokenizer and expression parser shared by the problem parser and the
// atom-declaration reader. Not installed.

#include "cvxc/errors.hpp"
#include "cvxc/expr.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cvxc::syntax {

enum class Tok { Ident, Number, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifiers and symbols are normalized (ℝ -> R, ≤ -> <=)
  double number = 0;
  SourceSpan span;
};

std::vector<Token> tokenize(std::string_view text);

/// Describes a token for error messages.
std::string describe(const Token& t);

/// Name resolution for identifiers in expressions.
using Resolver = std::function<std::optional<NodeKind>(std::string_view)>;

class Parser {
 public:
  Parser(std::vector<Token> toks, Resolver resolve)
      : toks_(std::move(toks)), resolve_(std::move(resolve)) {}

  const Token& peek(std::size_t k = 0) const;
  const Token& next();
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_symbol(std::string_view s, std::size_t k = 0) const;
  bool is_ident(std::string_view s, std::size_t k = 0) const;
  /// Identifier immediately followed by ':' (start of a named item).
  bool at_label() const;
  void expect_symbol(std::string_view s);
  void expect_ident(std::string_view s);
  std::string expect_name();
  int expect_positive_int();
  [[noreturn]] void fail(std::vector<std::string> expected) const;

  /// Full expression, relational operators included.
  Expr expression();

  void set_resolver(Resolver r) { resolve_ = std::move(r); }

 private:
  Expr binary(int min_prec);
  Expr unary();
  Expr application_or_atom();
  Expr argument(const std::string& fn, int index, int arity, const SourceSpan& fn_span);
  bool can_start_argument() const;
  Expr primary();
  Expr matrix_literal();

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Resolver resolve_;
};

}  // namespace cvxc::syntax
