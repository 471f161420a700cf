#include "cvxc/parser.hpp"

#include "cvxc/errors.hpp"
#include "syntax.hpp"

#include <sstream>

namespace cvxc {

using syntax::Parser;
using syntax::Tok;

namespace {

syntax::Resolver resolver_for(const std::vector<VarDecl>& vars, const std::vector<VarDecl>& params) {
  return [&vars, &params](std::string_view name) -> std::optional<NodeKind> {
    for (const auto& v : vars)
      if (v.name == name) return NodeKind::Var;
    for (const auto& v : params)
      if (v.name == name) return NodeKind::Param;
    return std::nullopt;
  };
}

VarShape parse_type(Parser& ps) {
  if (ps.is_ident("R") || ps.is_ident("real")) {
    ps.next();
    return VarShape::scalar();
  }
  if (ps.is_ident("matrix")) {
    ps.next();
    return VarShape::sym_matrix(ps.expect_positive_int());
  }
  if (ps.is_ident("vector")) {
    ps.next();
    return VarShape::vector(ps.expect_positive_int());
  }
  ps.fail({"'R'", "'matrix'", "'vector'"});
}

/// One or more `(names : type)` groups.
void parse_decls(Parser& ps, std::vector<VarDecl>& out) {
  if (!ps.is_symbol("(")) ps.fail({"'('"});
  while (ps.is_symbol("(")) {
    ps.next();
    std::vector<std::string> names;
    names.push_back(ps.expect_name());
    while (!ps.is_symbol(":")) names.push_back(ps.expect_name());
    ps.next();
    const VarShape shape = parse_type(ps);
    ps.expect_symbol(")");
    for (auto& n : names) out.push_back({std::move(n), shape});
  }
}

void parse_named(Parser& ps, std::vector<Constraint>& out) {
  if (!ps.at_label()) ps.fail({"constraint name"});
  while (ps.at_label()) {
    std::string name = ps.next().text;
    ps.next();  // ':'
    out.push_back({std::move(name), ps.expression()});
  }
}

// --- printing ---------------------------------------------------------------

struct Doc {
  std::string text;
  int prec = 100;
};

constexpr int kAtom = 100;
constexpr int kApp = 90;

std::string paren(const std::string& s) { return "(" + s + ")"; }

bool leading_minus(const Doc& d) { return !d.text.empty() && d.text.front() == '-'; }

std::string matrix_text(const Eigen::MatrixXd& m) {
  std::string out = "!![";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) out += "; ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) out += (j ? ", " : "") + format_double(m(i, j));
  }
  return out + "]";
}

Doc render(const Expr& e);

std::string as_argument(const Expr& e) {
  Doc d = render(e);
  return d.prec == kAtom && !leading_minus(d) ? d.text : paren(d.text);
}

bool is_leaf(const Expr& e) { return !e.is_apply() && !(e.is_const() && !e.value().is_scalar()); }

Doc binary(const Expr& e, const std::string& op, int prec, bool compact) {
  Doc l = render(e.arg(0));
  Doc r = render(e.arg(1));
  std::string lt = l.prec < prec ? paren(l.text) : l.text;
  std::string rt = r.prec <= prec || (prec > 10 && leading_minus(r)) ? paren(r.text) : r.text;
  return {compact ? lt + op + rt : lt + " " + op + " " + rt, prec};
}

Doc render(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Var:
    case NodeKind::Param:
      return {e.name(), kAtom};
    case NodeKind::Const: {
      const Value& v = e.value();
      if (v.is_scalar()) {
        const double d = v.as_scalar();
        return {format_double(d), d < 0 ? 75 : kAtom};
      }
      if (v.is_vector()) {
        std::string out = "![";
        for (int k = 0; k < v.size(); ++k) out += (k ? ", " : "") + format_double(v.entry(k));
        return {out + "]", kAtom};
      }
      if (v.is_matrix()) return {matrix_text(v.as_matrix()), kAtom};
      return {v.truth() ? "true" : "false", kAtom};
    }
    case NodeKind::Apply:
      break;
  }
  const std::string& fn = e.name();
  const auto n = e.args().size();
  if (n == 2) {
    if (fn == "add") return binary(e, "+", 65, false);
    if (fn == "sub") return binary(e, "-", 65, false);
    if (fn == "mul" || fn == "div") {
      const bool compact = is_leaf(e.arg(0)) && is_leaf(e.arg(1));
      return binary(e, fn == "mul" ? "*" : "/", 70, compact);
    }
    if (fn == "eq") return binary(e, "=", 10, false);
    if (fn == "le") return binary(e, "≤", 10, false);
    if (fn == "lt") return binary(e, "<", 10, false);
    if (fn == "pow") {
      Doc l = render(e.arg(0));
      Doc r = render(e.arg(1));
      std::string lt = l.prec <= 80 ? paren(l.text) : l.text;
      std::string rt = r.prec < 80 || leading_minus(r) ? paren(r.text) : r.text;
      return {lt + "^" + rt, 80};
    }
  }
  if (fn == "neg" && n == 1) {
    Doc c = render(e.arg(0));
    const bool wrap = c.prec < 75 || e.arg(0).is_const() || leading_minus(c);
    return {"-" + (wrap ? paren(c.text) : c.text), 75};
  }
  if (fn == "vec") {
    std::string out = "![";
    for (std::size_t i = 0; i < n; ++i) out += (i ? ", " : "") + render(e.arg(i)).text;
    return {out + "]", kAtom};
  }
  std::string out = fn;
  for (const auto& a : e.args()) out += " " + as_argument(a);
  return {out, kApp};
}

std::string type_text(const VarShape& s) {
  switch (s.kind) {
    case VarShape::Kind::Scalar:
      return "ℝ";
    case VarShape::Kind::Vector:
      return "vector " + std::to_string(s.n);
    case VarShape::Kind::SymMatrix:
      return "matrix " + std::to_string(s.n);
  }
  return "ℝ";
}

std::string decls_text(const std::vector<VarDecl>& decls) {
  std::string out;
  for (std::size_t i = 0; i < decls.size();) {
    std::size_t j = i;
    std::string group = "(";
    while (j < decls.size() && decls[j].shape == decls[i].shape) {
      group += (j == i ? "" : " ") + decls[j].name;
      ++j;
    }
    out += (out.empty() ? "" : " ") + group + " : " + type_text(decls[i].shape) + ")";
    i = j;
  }
  return out;
}

}  // namespace

Problem parse_problem(std::string_view text) {
  Problem p;
  Parser ps(syntax::tokenize(text), resolver_for(p.vars, p.params));
  if (ps.is_ident("parameters")) {
    ps.next();
    parse_decls(ps, p.params);
  }
  if (ps.is_ident("assuming")) {
    ps.next();
    parse_named(ps, p.assumptions);
  }
  ps.expect_ident("optimization");
  parse_decls(ps, p.vars);
  if (ps.is_ident("minimize")) {
    p.sense = Sense::Minimize;
  } else if (ps.is_ident("maximize")) {
    p.sense = Sense::Maximize;
  } else {
    ps.fail({"'minimize'", "'maximize'"});
  }
  ps.next();
  p.objective = ps.expression();
  if (ps.is_ident("subject")) {
    ps.next();
    ps.expect_ident("to");
    parse_named(ps, p.constraints);
  }
  if (!ps.at_end()) ps.fail({"constraint name", "end of input"});
  validate(p);
  return p;
}

Expr parse_expr(std::string_view text, const std::vector<VarDecl>& vars, const std::vector<VarDecl>& params) {
  Parser ps(syntax::tokenize(text), resolver_for(vars, params));
  Expr e = ps.expression();
  if (!ps.at_end()) ps.fail({"end of input"});
  return e;
}

std::string print_expr(const Expr& e) { return render(e).text; }

std::string print_problem(const Problem& p) {
  std::ostringstream os;
  if (!p.params.empty()) os << "parameters " << decls_text(p.params) << "\n";
  if (!p.assumptions.empty()) {
    os << "assuming\n";
    for (const auto& c : p.assumptions) os << "  " << c.name << " : " << print_expr(c.body) << "\n";
  }
  os << "optimization " << decls_text(p.vars) << "\n";
  os << "  " << (p.sense == Sense::Minimize ? "minimize " : "maximize ") << print_expr(p.objective) << "\n";
  if (!p.constraints.empty()) {
    os << "  subject to\n";
    for (const auto& c : p.constraints) os << "    " << c.name << " : " << print_expr(c.body) << "\n";
  }
  return os.str();
}

}  // namespace cvxc
