#include "syntax.hpp"

#include "cvxc/functions.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <set>

namespace cvxc::syntax {

namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return is_alpha(c) || is_digit(c); }

struct Alias {
  std::string_view utf8;
  Tok kind;
  std::string_view text;
};

constexpr std::array<Alias, 5> kAliases{{
    {"\xE2\x89\xA4", Tok::Symbol, "<="},  // ≤
    {"\xE2\x89\xA5", Tok::Symbol, ">="},  // ≥
    {"\xE2\x88\x92", Tok::Symbol, "-"},   // − (minus sign)
    {"\xE2\x88\x91", Tok::Ident, "sum"},  // ∑
    {"\xE2\x84\x9D", Tok::Ident, "R"},    // ℝ
}};

constexpr std::array<std::string_view, 5> kLongSymbols{"!![", "![", ":=", "<=", ">="};
constexpr std::string_view kShortSymbols = "()[],;:+-*/^=<>&?";

// Words that end an expression instead of being read as an argument.
const std::set<std::string, std::less<>>& keywords() {
  static const std::set<std::string, std::less<>> k{
      "parameters",      "assuming",          "optimization",
      "minimize",        "maximize",          "subject",
      "declare-atom",    "conditions",        "backgroundConditions",
      "implementationVars", "implementationObjective", "implementationConstraints",
      "solution",        "end"};
  return k;
}

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t nbytes) {
    for (std::size_t k = 0; k < nbytes; ++k) {
      const auto c = static_cast<unsigned char>(src[i + k]);
      if (c == '\n') {
        ++line;
        col = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++col;
      }
    }
    i += nbytes;
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "--") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.span = {line, col, 1};
    bool matched = false;
    for (const auto& a : kAliases) {
      if (src.substr(i, a.utf8.size()) == a.utf8) {
        t.kind = a.kind;
        t.text = a.text;
        advance(a.utf8.size());
        matched = true;
        break;
      }
    }
    if (matched) {
      out.push_back(std::move(t));
      continue;
    }
    if (is_alpha(c)) {
      std::size_t j = i + 1;
      while (j < src.size()) {
        const char d = src[j];
        if (is_alnum(d) || d == '\'') {
          ++j;
        } else if (d == '.' && j + 1 < src.size() && is_alnum(src[j + 1])) {
          ++j;
        } else if (d == '-' && src.substr(i, j - i) == "declare" && src.substr(j, 5) == "-atom") {
          j += 5;
        } else {
          break;
        }
      }
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      t.span.length = static_cast<int>(j - i);
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (is_digit(c)) {
      std::size_t j = i;
      while (j < src.size() && is_digit(src[j])) ++j;
      if (j + 1 < src.size() && src[j] == '.' && is_digit(src[j + 1])) {
        ++j;
        while (j < src.size() && is_digit(src[j])) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && is_digit(src[k])) {
          while (k < src.size() && is_digit(src[k])) ++k;
          j = k;
        }
      }
      t.kind = Tok::Number;
      t.text = std::string(src.substr(i, j - i));
      auto [p, ec] = std::from_chars(src.data() + i, src.data() + j, t.number);
      if (ec != std::errc{} || !std::isfinite(t.number))
        throw SyntaxError(t.span, {"finite number"}, "'" + t.text + "'");
      t.span.length = static_cast<int>(j - i);
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    for (auto s : kLongSymbols) {
      if (src.substr(i, s.size()) == s) {
        t.kind = Tok::Symbol;
        t.text = s;
        t.span.length = static_cast<int>(s.size());
        advance(s.size());
        matched = true;
        break;
      }
    }
    if (!matched && kShortSymbols.find(c) != std::string_view::npos) {
      t.kind = Tok::Symbol;
      t.text = std::string(1, c);
      advance(1);
      matched = true;
    }
    if (!matched) {
      std::size_t len = 1;
      const auto u = static_cast<unsigned char>(c);
      if (u >= 0xC0) len = u >= 0xF0 ? 4 : u >= 0xE0 ? 3 : 2;
      throw SyntaxError(t.span, {"token"}, "character '" + std::string(src.substr(i, len)) + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.span = {line, col, 0};
  out.push_back(end);
  return out;
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End:
      return "end of input";
    case Tok::Number:
      return "number " + t.text;
    case Tok::Ident:
      return "'" + t.text + "'";
    case Tok::Symbol:
      return "'" + t.text + "'";
  }
  return "?";
}

const Token& Parser::peek(std::size_t k) const {
  return toks_[std::min(pos_ + k, toks_.size() - 1)];
}

const Token& Parser::next() {
  const Token& t = toks_[pos_];
  if (pos_ + 1 < toks_.size()) ++pos_;
  return t;
}

bool Parser::is_symbol(std::string_view s, std::size_t k) const {
  return peek(k).kind == Tok::Symbol && peek(k).text == s;
}

bool Parser::is_ident(std::string_view s, std::size_t k) const {
  return peek(k).kind == Tok::Ident && peek(k).text == s;
}

bool Parser::at_label() const { return peek().kind == Tok::Ident && is_symbol(":", 1); }

void Parser::fail(std::vector<std::string> expected) const {
  throw SyntaxError(peek().span, std::move(expected), describe(peek()));
}

void Parser::expect_symbol(std::string_view s) {
  if (!is_symbol(s)) fail({"'" + std::string(s) + "'"});
  next();
}

void Parser::expect_ident(std::string_view s) {
  if (!is_ident(s)) fail({"'" + std::string(s) + "'"});
  next();
}

std::string Parser::expect_name() {
  if (peek().kind != Tok::Ident || keywords().contains(peek().text)) fail({"identifier"});
  return next().text;
}

int Parser::expect_positive_int() {
  const Token& t = peek();
  if (t.kind != Tok::Number || t.number < 1 || t.number != std::floor(t.number) || t.number > 1e6)
    fail({"positive integer"});
  next();
  return static_cast<int>(t.number);
}

Expr Parser::expression() { return binary(0); }

namespace {

int precedence(const Token& t) {
  if (t.kind != Tok::Symbol) return -1;
  const std::string& s = t.text;
  if (s == "=" || s == "<=" || s == "<" || s == ">=" || s == ">") return 10;
  if (s == "+" || s == "-") return 65;
  if (s == "*" || s == "/") return 70;
  if (s == "^") return 80;
  return -1;
}

}  // namespace

Expr Parser::binary(int min_prec) {
  Expr lhs = unary();
  bool relational = false;
  for (;;) {
    const Token& op = peek();
    const int prec = precedence(op);
    if (prec < 0 || prec < min_prec) break;
    if (prec == 10 && relational) fail({"end of constraint"});
    const std::string s = next().text;
    if (s == "^") {
      Expr rhs = binary(80);
      lhs = call("pow", {lhs, rhs});
      continue;
    }
    Expr rhs = binary(prec + 1);
    if (s == "+") lhs = lhs + rhs;
    else if (s == "-") lhs = lhs - rhs;
    else if (s == "*") lhs = lhs * rhs;
    else if (s == "/") lhs = lhs / rhs;
    else if (s == "=") lhs = call("eq", {lhs, rhs});
    else if (s == "<=") lhs = call("le", {lhs, rhs});
    else if (s == "<") lhs = call("lt", {lhs, rhs});
    else if (s == ">=") lhs = call("le", {rhs, lhs});
    else lhs = call("lt", {rhs, lhs});
    relational = relational || prec == 10;
  }
  return lhs;
}

Expr Parser::unary() {
  if (is_symbol("-")) {
    next();
    if (peek().kind == Tok::Number && !is_symbol("^", 1)) return Expr::constant(-next().number);
    return -binary(75);
  }
  return application_or_atom();
}

bool Parser::can_start_argument() const {
  const Token& t = peek();
  if (t.kind == Tok::Number) return true;
  if (t.kind == Tok::Symbol) return t.text == "(" || t.text == "![" || t.text == "!![";
  if (t.kind == Tok::Ident) return !keywords().contains(t.text) && !at_label() && !is_symbol(":=", 1);
  return false;
}

Expr Parser::argument(const std::string& fn, int index, int arity, const SourceSpan& fn_span) {
  if (!can_start_argument()) throw ArityMismatch(fn_span, fn, arity, index);
  return application_or_atom();
}

Expr Parser::application_or_atom() {
  const Token& t = peek();
  if (t.kind != Tok::Ident) return primary();
  if (keywords().contains(t.text)) fail({"expression"});
  if (auto kind = resolve_(t.text)) {
    next();
    return *kind == NodeKind::Param ? Expr::param(t.text) : Expr::var(t.text);
  }
  const FunctionInfo* f = find_function(t.text);
  if (!f || f->arity < 0) throw UnknownIdentifier(t.span, t.text);
  const Token head = next();
  std::vector<Expr> args;
  for (int i = 0; i < f->arity; ++i) args.push_back(argument(head.text, i, f->arity, head.span));
  return Expr::apply(head.text, std::move(args));
}

Expr Parser::primary() {
  const Token& t = peek();
  if (t.kind == Tok::Number) return Expr::constant(next().number);
  if (t.kind == Tok::Ident) return application_or_atom();
  if (is_symbol("(")) {
    next();
    Expr e = expression();
    expect_symbol(")");
    return e;
  }
  if (is_symbol("![")) {
    next();
    std::vector<Expr> items;
    items.push_back(expression());
    while (is_symbol(",")) {
      next();
      items.push_back(expression());
    }
    expect_symbol("]");
    return Expr::apply("vec", std::move(items));
  }
  if (is_symbol("!![")) return matrix_literal();
  fail({"expression"});
}

Expr Parser::matrix_literal() {
  const SourceSpan start = next().span;
  std::vector<std::vector<double>> rows(1);
  for (;;) {
    double sign = 1;
    if (is_symbol("-")) {
      next();
      sign = -1;
    }
    if (peek().kind != Tok::Number) fail({"number"});
    rows.back().push_back(sign * next().number);
    if (is_symbol(",")) {
      next();
    } else if (is_symbol(";")) {
      next();
      rows.emplace_back();
    } else if (is_symbol("]")) {
      next();
      break;
    } else {
      fail({"','", "';'", "']'"});
    }
  }
  const std::size_t cols = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != cols) throw SyntaxError(start, {"rows of equal length"}, "ragged matrix literal");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return Expr::constant(Value::matrix(std::move(m)));
}

}  // namespace cvxc::syntax
