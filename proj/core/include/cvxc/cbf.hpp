#pragma once

#include "cvxc/affine.hpp"
#include "cvxc/canon.hpp"
#include "cvxc/problem.hpp"

#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace cvxc {

/// One block of rows in the CON section, e.g. ("QR", 3).
struct CbfCone {
  std::string kind;  // "L=", "L+", "Q", "QR", "EXP"
  int rows = 0;
  std::string constraint;  // reduced constraint it came from
};

/// Conic problem in the conic benchmark format (version 3 subset).
///
/// Scalar variables are the coordinates of the reduced problem's variables
/// in declaration order (original variables first, then fresh ones);
/// symmetric matrix variables contribute their upper triangles. The
/// objective is always minimized; a maximization is emitted negated.
struct CbfDocument {
  int version = 3;
  std::vector<VarDecl> vars;
  std::vector<Coord> variables;  // CBF variable index -> coordinate
  std::vector<CbfCone> cones;
  std::vector<int> psd_dims;                // PSDCON blocks
  std::vector<std::string> psd_constraints;  // constraint of each PSDCON block
  std::vector<int> psd_var_dims;            // PSDVAR blocks (none are emitted)
  std::vector<std::pair<int, double>> obj_a;
  double obj_b = 0;
  std::vector<std::tuple<int, int, double>> a;  // row, variable, coefficient
  std::vector<std::pair<int, double>> b;        // row, constant
  std::vector<std::tuple<int, int, int, int, double>> h;  // block, variable, row, col, coefficient
  std::vector<std::tuple<int, int, int, double>> d;       // block, row, col, constant
  double objective_sign = 1;  // original objective = objective_sign * CBF objective

  int row_count() const;
};

/// Builds the document. Throws NonConicProblem unless the objective is
/// affine and every constraint is a cone membership of affine arguments.
CbfDocument build_cbf(const Problem& q);

/// Byte-deterministic text of the document.
std::string write_cbf(const CbfDocument& doc);
std::string write_cbf(const ReducedProblem& q);

struct SolutionFile {
  std::string status;
  Assignment values;  // empty when the file carries no VAR lines
};

/// Reads an adapter solution file:
///
///     STATUS <token>
///     VAR <index> <value>                  -- one per CBF variable
///     PSDVAR <block> <i> <j> <value>
///
/// Throws MalformedSolution or MissingVariable.
SolutionFile parse_solution(std::string_view text, const CbfDocument& doc);

/// Inverse of parse_solution for a full assignment of the reduced variables.
std::string write_solution(std::string_view status, const Assignment& a, const CbfDocument& doc);

}  // namespace cvxc
