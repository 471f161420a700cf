#pragma once

#include "cvxc/expr.hpp"
#include "cvxc/problem.hpp"
#include "cvxc/value.hpp"

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cvxc {

/// One scalar coordinate of a variable. Vector entries use `i`; symmetric
/// matrix entries are stored once with i <= j.
struct Coord {
  std::string var;
  int i = 0;
  int j = 0;
  friend auto operator<=>(const Coord&, const Coord&) = default;
  friend bool operator==(const Coord&, const Coord&) = default;
};

std::string to_string(const Coord& c);

/// Scalar affine expression: sum of coefficient * coordinate plus constant.
/// Coefficients and the constant are closed-over-parameters expressions,
/// folded to `Const` nodes whenever they are numeric.
struct LinearForm {
  std::map<Coord, Expr> terms;
  Expr constant;

  bool is_constant() const { return terms.empty(); }
  /// True when every coefficient and the constant are `Const` scalars.
  bool is_numeric() const;
};

/// Entry-wise affine form of a (possibly vector- or matrix-valued)
/// expression; entries are row-major.
struct AffineForm {
  Shape shape;
  std::vector<LinearForm> entries;

  bool is_constant() const;
  bool is_numeric() const;
};

/// Which names are the variables of the analysis. Everything else in scope
/// (parameters, other variables) is treated as a symbolic constant.
struct AffineContext {
  ShapeEnv shapes;
  std::map<std::string, VarShape, std::less<>> vars;

  static AffineContext of(const Problem& p);
  static AffineContext of(const std::vector<VarDecl>& vars, const std::vector<VarDecl>& params = {});
};

/// Affine normal form of `e` in the context variables, or nullopt when `e`
/// is not affine under the structural rules (add, sub, neg, multiplication
/// and division by constants, sum, trace, diag, diagMat, triu, transpose,
/// entry, block, vector literals).
std::optional<AffineForm> affine_form(const Expr& e, const AffineContext& ctx);

/// Value of coordinate `c` in `a`.
double coord_value(const Coord& c, const Assignment& a);

/// Evaluates the form at `a` (which must also bind any parameters used in
/// coefficients).
Value eval_affine(const AffineForm& f, const Assignment& a);

/// Numeric value of a folded coefficient; nullopt for symbolic ones.
std::optional<double> numeric(const Expr& coefficient);

/// Scalar form rebuilt as an expression (terms in coordinate order).
Expr to_expr(const LinearForm& f, const AffineContext& ctx);

/// Scalar coordinates of the declarations in declaration order: vectors by
/// index, symmetric matrices row by row over the upper triangle.
std::vector<Coord> coordinates(const std::vector<VarDecl>& vars);

/// Coordinate values of `a` in the order of `coords`.
Eigen::VectorXd to_coordinates(const std::vector<Coord>& coords, const Assignment& a);

/// Inverse of `to_coordinates(coordinates(vars), ·)`.
Assignment from_coordinates(const std::vector<VarDecl>& vars, const Eigen::VectorXd& x);

// Coefficient arithmetic with constant folding.
Expr cadd(const Expr& a, const Expr& b);
Expr cmul(const Expr& a, const Expr& b);
Expr cneg(const Expr& a);

}  // namespace cvxc
