#pragma once

#include "cvxc/expr.hpp"
#include "cvxc/functions.hpp"
#include "cvxc/problem.hpp"
#include "cvxc/value.hpp"

namespace cvxc {

/// Evaluates `e` with variables and parameters looked up in `a`.
///
/// Throws UnknownName for a leaf missing from `a`, ShapeError for ill-shaped
/// applications, and DomainError for arguments outside a function's domain.
/// A DomainError carries the dotted path of the failing node, rooted at
/// `root` (e.g. "root.1.1"), and the printed subexpression.
Value eval(const Expr& e, const Assignment& a, const EvalOptions& opts = {},
           const std::string& root = "root");

/// Convenience for scalar-valued expressions.
double eval_scalar(const Expr& e, const Assignment& a, const EvalOptions& opts = {});

/// Truth value of a predicate-rooted expression.
bool holds(const Expr& e, const Assignment& a, const EvalOptions& opts = {});

/// Static shape of `e`. Throws UnknownName or ShapeError.
Shape infer_shape(const Expr& e, const ShapeEnv& env);

/// Objective value of `p` at `a` (in the problem's own sense).
double objective_value(const Problem& p, const Assignment& a, const EvalOptions& opts = {});

/// True when every constraint of `p` holds at `a`. Domain errors count as
/// violations.
bool is_feasible(const Problem& p, const Assignment& a, const EvalOptions& opts = {});

/// Largest violation of any constraint of `p` at `a`, measured in the
/// constraint's own units (0 when feasible). Cone constraints measure the
/// distance-like quantity used by their membership test.
double max_violation(const Problem& p, const Assignment& a);

/// Violation of a single predicate-rooted expression.
double violation(const Expr& constraint, const Assignment& a);

}  // namespace cvxc
