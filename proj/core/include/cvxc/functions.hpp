#pragma once

#include "cvxc/value.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cvxc {

struct EvalOptions {
  /// Absolute tolerance for relational and cone-membership predicates.
  double feas_tol = 1e-6;
};

/// Standard cones of conic form.
enum class ConeKind { Zero, PosOrth, SecondOrder, RotatedSecondOrder, Exp, PSD };

/// Surface name of a cone predicate, e.g. "rotatedSoCone".
std::string_view cone_function(ConeKind k);
std::optional<ConeKind> cone_kind(std::string_view fn);

/// Numeric interpretation of a function symbol. Evaluators throw DomainError
/// (without a path) for arguments outside the domain and ShapeError for
/// incompatible shapes.
struct FunctionInfo {
  std::string name;
  int arity = 0;  // -1 for variadic
  bool predicate = false;
  std::function<Value(std::span<const Value>, const EvalOptions&)> eval;
  std::function<Shape(std::span<const Shape>)> shape;
};

const FunctionInfo* find_function(std::string_view name);
const std::vector<FunctionInfo>& function_table();

// Cone membership tests shared by eval and the verification harness.
bool in_second_order_cone(double t, std::span<const double> x, double tol);
bool in_rotated_cone(double v, double w, std::span<const double> x, double tol);
bool in_exp_cone(double a, double b, double c, double tol);
bool is_psd(const Eigen::MatrixXd& m, double tol);
bool is_positive_definite(const Eigen::MatrixXd& m);

}  // namespace cvxc
