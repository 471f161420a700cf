#pragma once

#include "cvxc/expr.hpp"
#include "cvxc/problem.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace cvxc {

/// Parses a problem in the `.cvx` surface syntax:
///
///     parameters (a : R)
///     assuming
///       h : 0 < a
///     optimization (x y : ℝ) (S : matrix 2)
///       maximize sqrt (x - y)
///       subject to
///         c1 : y = a*x - 3
///
/// The `parameters`, `assuming` and `subject to` blocks are optional.
/// Comments run from `--` to the end of the line. Throws SyntaxError,
/// UnknownIdentifier, ArityMismatch (all ParseError) or ValidationError.
Problem parse_problem(std::string_view text);

/// Parses a single expression with identifiers resolved against the given
/// declarations.
Expr parse_expr(std::string_view text, const std::vector<VarDecl>& vars,
                const std::vector<VarDecl>& params = {});

/// Canonical text of a problem; `parse_problem(print_problem(p)) == p`.
std::string print_problem(const Problem& p);

/// Surface syntax of an expression with minimal parentheses.
std::string print_expr(const Expr& e);

}  // namespace cvxc
