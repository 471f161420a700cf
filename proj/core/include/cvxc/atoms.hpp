#pragma once

#include "cvxc/expr.hpp"
#include "cvxc/problem.hpp"
#include "cvxc/value.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cvxc {

enum class Curvature { Convex, Concave, Affine };
enum class Monotonicity { Increasing, Decreasing, Neither, Auxiliary };

std::string_view to_string(Curvature c);
std::string_view to_string(Monotonicity m);

/// Shape of an atom argument or implementation variable. Vector and matrix
/// dimensions are either fixed or a dimension variable bound at match time.
struct ShapeSpec {
  ShapeKind kind = ShapeKind::Scalar;
  int dim = 0;          // fixed dimension when > 0
  std::string dim_var;  // otherwise, e.g. "n"

  /// Concrete shape under a dimension binding; throws ShapeError if unbound.
  Shape resolve(const std::map<std::string, int, std::less<>>& dims) const;
  /// Matches `actual`, extending `dims`; false on mismatch.
  bool match(const Shape& actual, std::map<std::string, int, std::less<>>& dims) const;
  /// Declaration shape of an implementation variable (matrices are symmetric).
  VarShape var_shape(const std::map<std::string, int, std::less<>>& dims) const;

  friend bool operator==(const ShapeSpec&, const ShapeSpec&) = default;
};

struct AtomArg {
  std::string name;
  ShapeSpec shape;
  Monotonicity mono = Monotonicity::Neither;
};

struct ImplVar {
  std::string name;
  ShapeSpec shape;
};

struct NamedExpr {
  std::string name;
  Expr body;
};

/// One DCP atom with its conic graph implementation.
///
/// `expr` is the head function applied to the formal arguments in order;
/// the head decides which surface applications the atom matches. Formals
/// and implementation variables appear as `Var` leaves in every field.
struct AtomDecl {
  std::string name;
  Curvature curvature = Curvature::Affine;
  std::vector<AtomArg> args;
  Expr expr;
  std::vector<NamedExpr> vconds;
  std::vector<NamedExpr> bconds;
  std::vector<ImplVar> impl_vars;
  Expr impl_objective;
  std::vector<NamedExpr> impl_constraints;
  std::vector<Expr> solution;  // one per implementation variable

  const std::string& head() const { return expr.name(); }
  bool is_predicate() const;
};

/// Ordered collection of atoms; earlier atoms take priority when several
/// match the same application.
class AtomRegistry {
 public:
  /// Validates and appends. Throws DuplicateAtom or
  /// MalformedGraphImplementation.
  void register_atom(AtomDecl d);

  const std::vector<std::shared_ptr<const AtomDecl>>& atoms() const { return atoms_; }
  std::shared_ptr<const AtomDecl> find(std::string_view name) const;
  /// Atoms whose head is `fn`, in priority order.
  std::vector<std::shared_ptr<const AtomDecl>> candidates(std::string_view fn) const;

 private:
  std::vector<std::shared_ptr<const AtomDecl>> atoms_;
};

/// Reads atom declarations in the textual format
///
///     declare-atom sqrt [concave] (x : R)+ : sqrt x
///       conditions (h : 0 ≤ x)
///       implementationVars (t : R)
///       implementationObjective t
///       implementationConstraints (c : rotatedSoCone 0.5 x ![t])
///       solution (t := sqrt x)
///     end
///
/// Argument monotonicity is written after each argument group: `+`
/// increasing, `-` decreasing, `?` auxiliary, nothing (or `&`) for neither.
/// A `backgroundConditions` section lists conditions on auxiliary arguments.
std::vector<AtomDecl> parse_atom_decls(std::string_view text);

/// Source of the built-in atom declarations.
std::string_view builtin_atom_source();

/// Registry of every built-in atom, in a fixed order.
AtomRegistry builtin_registry();

/// Shared immutable instance of `builtin_registry()`.
const AtomRegistry& default_registry();

/// Binds the atom's dimension variables against actual argument shapes.
std::optional<std::map<std::string, int, std::less<>>> match_shapes(const AtomDecl& d,
                                                                     const std::vector<Shape>& actual);

}  // namespace cvxc
