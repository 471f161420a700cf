#include "cvxc/atoms.hpp"

#include "cvxc/affine.hpp"
#include "cvxc/errors.hpp"
#include "cvxc/eval.hpp"
#include "cvxc/functions.hpp"
#include "cvxc/parser.hpp"
#include "syntax.hpp"

#include <set>

namespace cvxc {

std::string_view to_string(Curvature c) {
  switch (c) {
    case Curvature::Convex:
      return "convex";
    case Curvature::Concave:
      return "concave";
    case Curvature::Affine:
      return "affine";
  }
  return "?";
}

std::string_view to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::Increasing:
      return "increasing";
    case Monotonicity::Decreasing:
      return "decreasing";
    case Monotonicity::Neither:
      return "neither";
    case Monotonicity::Auxiliary:
      return "auxiliary";
  }
  return "?";
}

Shape ShapeSpec::resolve(const std::map<std::string, int, std::less<>>& dims) const {
  int n = dim;
  if (kind != ShapeKind::Scalar && n <= 0) {
    auto it = dims.find(dim_var);
    if (it == dims.end()) throw ShapeError("unbound dimension '" + dim_var + "'");
    n = it->second;
  }
  switch (kind) {
    case ShapeKind::Vector:
      return Shape::vector(n);
    case ShapeKind::Matrix:
      return Shape::matrix(n, n);
    default:
      return Shape::scalar();
  }
}

bool ShapeSpec::match(const Shape& actual, std::map<std::string, int, std::less<>>& dims) const {
  if (actual.kind != kind) return false;
  if (kind == ShapeKind::Scalar) return true;
  if (kind == ShapeKind::Matrix && actual.rows != actual.cols) return false;
  const int n = actual.rows;
  if (dim > 0) return n == dim;
  auto [it, inserted] = dims.emplace(dim_var, n);
  return inserted || it->second == n;
}

VarShape ShapeSpec::var_shape(const std::map<std::string, int, std::less<>>& dims) const {
  const Shape s = resolve(dims);
  switch (kind) {
    case ShapeKind::Vector:
      return VarShape::vector(s.rows);
    case ShapeKind::Matrix:
      return VarShape::sym_matrix(s.rows);
    default:
      return VarShape::scalar();
  }
}

bool AtomDecl::is_predicate() const {
  const FunctionInfo* f = find_function(head());
  return f && f->predicate;
}

std::optional<std::map<std::string, int, std::less<>>> match_shapes(const AtomDecl& d,
                                                                     const std::vector<Shape>& actual) {
  if (actual.size() != d.args.size()) return std::nullopt;
  std::map<std::string, int, std::less<>> dims;
  for (std::size_t i = 0; i < actual.size(); ++i)
    if (!d.args[i].shape.match(actual[i], dims)) return std::nullopt;
  return dims;
}

// --- validation ----------------------------------------------------------

namespace {

std::set<std::string, std::less<>> formal_names(const AtomDecl& d) {
  std::set<std::string, std::less<>> out;
  for (const auto& a : d.args) out.insert(a.name);
  return out;
}

void require_subset(const AtomDecl& d, const Expr& e, const std::set<std::string, std::less<>>& allowed,
                    const std::string& where) {
  for (const auto& v : free_vars(e))
    if (!allowed.contains(v)) throw MalformedGraphImplementation(d.name, where + " mentions '" + v + "'");
}

/// Test instantiation of every dimension variable.
std::map<std::string, int, std::less<>> probe_dims(const AtomDecl& d) {
  std::map<std::string, int, std::less<>> dims;
  auto add = [&](const ShapeSpec& s) {
    if (s.kind != ShapeKind::Scalar && s.dim <= 0) dims.emplace(s.dim_var, 2);
  };
  for (const auto& a : d.args) add(a.shape);
  for (const auto& v : d.impl_vars) add(v.shape);
  return dims;
}

void validate_atom(const AtomDecl& d) {
  const FunctionInfo* head = d.expr.is_apply() ? find_function(d.expr.name()) : nullptr;
  if (!head) throw MalformedGraphImplementation(d.name, "expression must apply a known function");
  if (head->arity >= 0 && static_cast<std::size_t>(head->arity) != d.args.size())
    throw MalformedGraphImplementation(d.name, "arity of '" + d.head() + "' does not match the arguments");
  if (d.expr.args().size() != d.args.size())
    throw MalformedGraphImplementation(d.name, "expression must apply the head to the formal arguments");
  for (std::size_t i = 0; i < d.args.size(); ++i)
    if (!(d.expr.arg(i).is_var() && d.expr.arg(i).name() == d.args[i].name))
      throw MalformedGraphImplementation(d.name, "expression must apply the head to the formal arguments in order");

  std::set<std::string, std::less<>> names = formal_names(d);
  if (names.size() != d.args.size()) throw MalformedGraphImplementation(d.name, "duplicate formal argument");
  std::set<std::string, std::less<>> with_impl = names;
  for (const auto& v : d.impl_vars)
    if (!with_impl.insert(v.name).second)
      throw MalformedGraphImplementation(d.name, "implementation variable '" + v.name + "' is not fresh");

  for (const auto& c : d.impl_constraints) {
    if (!c.body.is_apply() || !cone_kind(c.body.name()))
      throw MalformedGraphImplementation(
          d.name, "implementation constraint '" + c.name + "' is not a cone constraint (root '" +
                      (c.body.is_apply() ? c.body.name() : print_expr(c.body)) + "')");
    require_subset(d, c.body, with_impl, "implementation constraint '" + c.name + "'");
  }
  if (d.solution.size() != d.impl_vars.size())
    throw MalformedGraphImplementation(d.name, "one solution expression is required per implementation variable");
  for (const auto& s : d.solution) require_subset(d, s, names, "solution");
  require_subset(d, d.impl_objective, with_impl, "implementation objective");
  for (const auto& c : d.vconds) require_subset(d, c.body, names, "condition '" + c.name + "'");
  std::set<std::string, std::less<>> aux;
  for (const auto& a : d.args)
    if (a.mono == Monotonicity::Auxiliary) aux.insert(a.name);
  for (const auto& c : d.bconds) require_subset(d, c.body, aux, "background condition '" + c.name + "'");

  // Shapes and conic form at a sample dimension.
  const auto dims = probe_dims(d);
  ShapeEnv env;
  AffineContext ctx;
  try {
    for (const auto& a : d.args) {
      env[a.name] = a.shape.resolve(dims);
      if (a.mono != Monotonicity::Auxiliary) ctx.vars[a.name] = a.shape.var_shape(dims);
    }
    for (const auto& v : d.impl_vars) {
      env[v.name] = v.shape.resolve(dims);
      ctx.vars[v.name] = v.shape.var_shape(dims);
    }
    ctx.shapes = env;
    const Shape es = infer_shape(d.expr, env);
    const Shape os = infer_shape(d.impl_objective, env);
    if (es != os) throw ShapeError("objective shape " + to_string(os) + " differs from " + to_string(es));
    for (const auto& c : d.impl_constraints)
      if (infer_shape(c.body, env).kind != ShapeKind::Boolean) throw ShapeError(c.name + " is not a predicate");
    for (const auto* list : {&d.vconds, &d.bconds})
      for (const auto& c : *list)
        if (infer_shape(c.body, env).kind != ShapeKind::Boolean) throw ShapeError(c.name + " is not a predicate");
    for (std::size_t i = 0; i < d.solution.size(); ++i)
      if (infer_shape(d.solution[i], env) != d.impl_vars[i].shape.resolve(dims))
        throw ShapeError("solution for '" + d.impl_vars[i].name + "' has the wrong shape");
  } catch (const Error& e) {
    throw MalformedGraphImplementation(d.name, e.what());
  }

  auto affine_args = [&](const Expr& pred, const std::string& what) {
    for (const auto& a : pred.args())
      if (!affine_form(a, ctx)) throw MalformedGraphImplementation(d.name, what + " has a non-affine argument");
  };
  for (const auto& c : d.impl_constraints) affine_args(c.body, "implementation constraint '" + c.name + "'");
  if (d.is_predicate()) {
    if (!d.impl_objective.is_apply() || !cone_kind(d.impl_objective.name()))
      throw MalformedGraphImplementation(d.name, "objective of a predicate atom must be a cone constraint");
    affine_args(d.impl_objective, "objective");
  } else if (!affine_form(d.impl_objective, ctx)) {
    throw MalformedGraphImplementation(d.name, "implementation objective is not affine");
  }
}

}  // namespace

void AtomRegistry::register_atom(AtomDecl d) {
  if (find(d.name)) throw DuplicateAtom(d.name);
  validate_atom(d);
  atoms_.push_back(std::make_shared<const AtomDecl>(std::move(d)));
}

std::shared_ptr<const AtomDecl> AtomRegistry::find(std::string_view name) const {
  for (const auto& a : atoms_)
    if (a->name == name) return a;
  return nullptr;
}

std::vector<std::shared_ptr<const AtomDecl>> AtomRegistry::candidates(std::string_view fn) const {
  std::vector<std::shared_ptr<const AtomDecl>> out;
  for (const auto& a : atoms_)
    if (a->head() == fn) out.push_back(a);
  return out;
}

// --- declaration reader ----------------------------------------------------

namespace {

using syntax::Parser;
using syntax::Tok;

ShapeSpec parse_shape_spec(Parser& ps) {
  if (ps.is_ident("R") || ps.is_ident("real")) {
    ps.next();
    return {};
  }
  ShapeSpec s;
  if (ps.is_ident("vector")) {
    s.kind = ShapeKind::Vector;
  } else if (ps.is_ident("matrix")) {
    s.kind = ShapeKind::Matrix;
  } else {
    ps.fail({"'R'", "'vector'", "'matrix'"});
  }
  ps.next();
  if (ps.peek().kind == Tok::Number)
    s.dim = ps.expect_positive_int();
  else
    s.dim_var = ps.expect_name();
  return s;
}

Curvature parse_curvature(Parser& ps) {
  ps.expect_symbol("[");
  Curvature c = Curvature::Affine;
  if (ps.is_ident("convex")) {
    c = Curvature::Convex;
  } else if (ps.is_ident("concave")) {
    c = Curvature::Concave;
  } else if (!ps.is_ident("affine")) {
    ps.fail({"'convex'", "'concave'", "'affine'"});
  }
  ps.next();
  ps.expect_symbol("]");
  return c;
}

std::vector<NamedExpr> parse_named_group(Parser& ps) {
  std::vector<NamedExpr> out;
  if (!ps.is_symbol("(")) ps.fail({"'('"});
  while (ps.is_symbol("(")) {
    ps.next();
    std::string name = ps.expect_name();
    ps.expect_symbol(":");
    out.push_back({std::move(name), ps.expression()});
    ps.expect_symbol(")");
  }
  return out;
}

AtomDecl parse_one(Parser& ps, std::set<std::string, std::less<>>& scope) {
  AtomDecl d;
  ps.expect_ident("declare-atom");
  d.name = ps.expect_name();
  d.curvature = parse_curvature(ps);
  scope.clear();
  while (ps.is_symbol("(")) {
    ps.next();
    std::vector<std::string> names;
    names.push_back(ps.expect_name());
    while (!ps.is_symbol(":")) names.push_back(ps.expect_name());
    ps.next();
    const ShapeSpec shape = parse_shape_spec(ps);
    ps.expect_symbol(")");
    Monotonicity mono = Monotonicity::Neither;
    if (ps.is_symbol("+")) mono = Monotonicity::Increasing;
    else if (ps.is_symbol("-")) mono = Monotonicity::Decreasing;
    else if (ps.is_symbol("?")) mono = Monotonicity::Auxiliary;
    if (ps.is_symbol("+") || ps.is_symbol("-") || ps.is_symbol("?") || ps.is_symbol("&")) ps.next();
    for (auto& n : names) {
      scope.insert(n);
      d.args.push_back({std::move(n), shape, mono});
    }
  }
  ps.expect_symbol(":");
  d.expr = ps.expression();
  bool have_objective = false;
  while (!ps.is_ident("end")) {
    if (ps.is_ident("conditions")) {
      ps.next();
      auto c = parse_named_group(ps);
      d.vconds.insert(d.vconds.end(), c.begin(), c.end());
    } else if (ps.is_ident("backgroundConditions")) {
      ps.next();
      auto c = parse_named_group(ps);
      d.bconds.insert(d.bconds.end(), c.begin(), c.end());
    } else if (ps.is_ident("implementationVars")) {
      ps.next();
      if (!ps.is_symbol("(")) ps.fail({"'('"});
      while (ps.is_symbol("(")) {
        ps.next();
        std::vector<std::string> names;
        names.push_back(ps.expect_name());
        while (!ps.is_symbol(":")) names.push_back(ps.expect_name());
        ps.next();
        const ShapeSpec shape = parse_shape_spec(ps);
        ps.expect_symbol(")");
        for (auto& n : names) {
          scope.insert(n);
          d.impl_vars.push_back({std::move(n), shape});
        }
      }
    } else if (ps.is_ident("implementationObjective")) {
      ps.next();
      d.impl_objective = ps.expression();
      have_objective = true;
    } else if (ps.is_ident("implementationConstraints")) {
      ps.next();
      auto c = parse_named_group(ps);
      d.impl_constraints.insert(d.impl_constraints.end(), c.begin(), c.end());
    } else if (ps.is_ident("solution")) {
      ps.next();
      std::map<std::string, Expr, std::less<>> sol;
      if (!ps.is_symbol("(")) ps.fail({"'('"});
      while (ps.is_symbol("(")) {
        ps.next();
        const auto at = ps.peek().span;
        std::string name = ps.expect_name();
        ps.expect_symbol(":=");
        Expr e = ps.expression();
        ps.expect_symbol(")");
        if (!sol.emplace(name, e).second) throw SyntaxError(at, {"distinct solution names"}, "'" + name + "'");
      }
      for (const auto& v : d.impl_vars) {
        auto it = sol.find(v.name);
        if (it == sol.end()) throw MalformedGraphImplementation(d.name, "no solution for '" + v.name + "'");
        d.solution.push_back(it->second);
        sol.erase(it);
      }
      if (!sol.empty())
        throw MalformedGraphImplementation(d.name, "solution for unknown variable '" + sol.begin()->first + "'");
    } else {
      ps.fail({"'conditions'", "'backgroundConditions'", "'implementationVars'", "'implementationObjective'",
               "'implementationConstraints'", "'solution'", "'end'"});
    }
  }
  ps.next();
  // Affine atoms without a graph are their own objective.
  if (!have_objective) d.impl_objective = d.expr;
  return d;
}

}  // namespace

std::vector<AtomDecl> parse_atom_decls(std::string_view text) {
  std::set<std::string, std::less<>> scope;
  Parser ps(syntax::tokenize(text), [&scope](std::string_view n) -> std::optional<NodeKind> {
    if (scope.contains(n)) return NodeKind::Var;
    return std::nullopt;
  });
  std::vector<AtomDecl> out;
  while (!ps.at_end()) out.push_back(parse_one(ps, scope));
  return out;
}

// --- built-in atoms --------------------------------------------------------

std::string_view builtin_atom_source() {
  static constexpr std::string_view src = R"(
-- Affine atoms. Used when an affine operation has a non-affine argument;
-- affine subexpressions themselves become leaves.
declare-atom add [affine] (a b : R)+ : a + b
end

declare-atom sub [affine] (a : R)+ (b : R)- : a - b
end

declare-atom neg [affine] (a : R)- : -a
end

declare-atom smul_pos [affine] (c : R)? (x : R)+ : c * x
  backgroundConditions (h : 0 ≤ c)
end

declare-atom smul_neg [affine] (c : R)? (x : R)- : c * x
  backgroundConditions (h : c ≤ 0)
end

declare-atom mulr_pos [affine] (x : R)+ (c : R)? : x * c
  backgroundConditions (h : 0 ≤ c)
end

declare-atom mulr_neg [affine] (x : R)- (c : R)? : x * c
  backgroundConditions (h : c ≤ 0)
end

declare-atom div_pos [affine] (x : R)+ (c : R)? : x / c
  backgroundConditions (h : 0 < c)
end

declare-atom div_neg [affine] (x : R)- (c : R)? : x / c
  backgroundConditions (h : c < 0)
end

declare-atom sum [affine] (x : vector n)+ : sum x
end

declare-atom trace [affine] (A : matrix n)+ : trace A
end

declare-atom diag [affine] (A : matrix n)+ : diag A
end

-- Convex atoms.
declare-atom square [convex] (x : R) (p : R)? : x ^ p
  backgroundConditions (h : p = 2)
  implementationVars (t : R)
  implementationObjective t
  implementationConstraints (c : rotatedSoCone t 0.5 ![x])
  solution (t := x ^ 2)
end

declare-atom exp [convex] (x : R)+ : exp x
  implementationVars (t : R)
  implementationObjective t
  implementationConstraints (c : expCone x 1 t)
  solution (t := exp x)
end

declare-atom abs [convex] (x : R) : abs x
  implementationVars (t : R)
  implementationObjective t
  implementationConstraints (c1 : posOrthCone (t - x)) (c2 : posOrthCone (t + x))
  solution (t := abs x)
end

-- Concave atoms.
declare-atom sqrt [concave] (x : R)+ : sqrt x
  conditions (h : 0 ≤ x)
  implementationVars (t : R)
  implementationObjective t
  implementationConstraints (c : rotatedSoCone 0.5 x ![t])
  solution (t := sqrt x)
end

declare-atom log [concave] (x : R)+ : log x
  conditions (h : 0 < x)
  implementationVars (t : R)
  implementationObjective t
  implementationConstraints (c : expCone t 1 x)
  solution (t := log x)
end

declare-atom logdet [concave] (A : matrix n) : logdet A
  conditions (h : posDef A)
  implementationVars (t : vector n) (Y : matrix n)
  implementationObjective sum t
  implementationConstraints
    (c_exp : expCone t 1 (diag Y))
    (c_psd : psdCone (block (diagMat (diag Y)) (triu Y) (transpose (triu Y)) A))
  solution (t := log (diag (cholScaled A))) (Y := cholScaled A)
end

-- Relations and cone memberships (convex sets, role concave).
declare-atom le [concave] (a : R)- (b : R)+ : a ≤ b
  implementationObjective posOrthCone (b - a)
end

declare-atom eq [concave] (a b : R) : a = b
  implementationObjective zeroCone (b - a)
end

declare-atom zeroCone [concave] (x : R) : zeroCone x
end

declare-atom zeroCone_vec [concave] (x : vector n) : zeroCone x
end

declare-atom posOrthCone [concave] (x : R)+ : posOrthCone x
end

declare-atom posOrthCone_vec [concave] (x : vector n)+ : posOrthCone x
end

declare-atom soCone [concave] (t : R)+ (x : vector n) : soCone t x
end

declare-atom rotatedSoCone [concave] (v w : R)+ (x : vector n) : rotatedSoCone v w x
end

declare-atom expCone [concave] (a : R)- (b : R) (c : R)+ : expCone a b c
end

declare-atom psdCone [concave] (A : matrix n) : psdCone A
end
)";
  return src;
}

AtomRegistry builtin_registry() {
  AtomRegistry reg;
  for (auto& d : parse_atom_decls(builtin_atom_source())) reg.register_atom(std::move(d));
  return reg;
}

const AtomRegistry& default_registry() {
  static const AtomRegistry reg = builtin_registry();
  return reg;
}

}  // namespace cvxc
