#pragma once

#include "cvxc/expr.hpp"
#include "cvxc/value.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cvxc {

/// Declared shape of a variable or parameter.
struct VarShape {
  enum class Kind { Scalar, Vector, SymMatrix };
  Kind kind = Kind::Scalar;
  int n = 1;

  static VarShape scalar() { return {}; }
  static VarShape vector(int n) { return {Kind::Vector, n}; }
  static VarShape sym_matrix(int n) { return {Kind::SymMatrix, n}; }

  Shape value_shape() const;
  /// Number of free scalar coordinates: 1, n, or n(n+1)/2.
  int coord_count() const;

  friend bool operator==(const VarShape&, const VarShape&) = default;
};

struct VarDecl {
  std::string name;
  VarShape shape;
  friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

struct Constraint {
  std::string name;
  Expr body;
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

enum class Sense { Minimize, Maximize };

struct Problem {
  std::vector<VarDecl> vars;
  std::vector<VarDecl> params;
  /// Background conditions; mention parameters only.
  std::vector<Constraint> assumptions;
  Sense sense = Sense::Minimize;
  Expr objective;
  std::vector<Constraint> constraints;

  const VarDecl* find_var(std::string_view name) const;
  const VarDecl* find_param(std::string_view name) const;

  friend bool operator==(const Problem&, const Problem&) = default;
};

using ShapeEnv = std::map<std::string, Shape, std::less<>>;

/// Value shapes of every declared variable and parameter.
ShapeEnv shape_env(const Problem& p);
ShapeEnv shape_env(const std::vector<VarDecl>& vars, const std::vector<VarDecl>& params = {});

/// Checks name uniqueness, declared identifiers, parameter-only assumptions,
/// known functions with matching arity, and shape consistency. Throws
/// ValidationError.
void validate(const Problem& p);

/// Maximization becomes minimization of the negated objective. No
/// simplification is performed (maximize -x becomes minimize neg(neg(x))).
Problem normalize_sense(const Problem& p);

/// Substitutes numeric values for every parameter and checks the
/// assumptions at those values. The result declares no parameters and no
/// assumptions. Throws UnboundParameter or ValidationError.
Problem bind_parameters(const Problem& p, const std::map<std::string, Value, std::less<>>& values);

/// Values for declared names. Symmetric-matrix variables hold full matrices
/// that must be exactly symmetric.
class Assignment {
 public:
  using Map = std::map<std::string, Value, std::less<>>;

  Assignment() = default;
  explicit Assignment(Map values) : values_(std::move(values)) {}

  void set(std::string name, Value v) { values_.insert_or_assign(std::move(name), std::move(v)); }
  const Value* find(std::string_view name) const;
  /// Throws UnknownName.
  const Value& at(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const Map& values() const { return values_; }

  /// Restriction to the given declarations (all must be present).
  Assignment restrict_to(const std::vector<VarDecl>& decls) const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  Map values_;
};

/// Throws ValidationError unless `a` provides a finite value of the declared
/// shape for every declaration (extra names are allowed).
void check_covers(const Assignment& a, const std::vector<VarDecl>& decls);

std::string format_assignment(const Assignment& a);

}  // namespace cvxc
