#pragma once

#include "cvxc/atoms.hpp"
#include "cvxc/expr.hpp"
#include "cvxc/problem.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace cvxc {

/// Curvature demanded of a tree node by its parent.
enum class Role { Convex, Concave, Affine };

Role negate(Role r);
std::string_view to_string(Role r);

/// A condition of an atom and the problem constraint (or assumption, or
/// direct evaluation) that discharges it.
struct Discharge {
  std::string condition;  // printed instance, e.g. "0 ≤ x - y"
  std::string by;         // constraint name, or "" when it holds by evaluation
  bool background = false;
};

/// Node of an atom tree. Leaves carry a maximal affine subexpression; inner
/// nodes carry the matched atom.
struct TreeNode {
  std::string id;  // "obj", "obj.1", "c2.1.1", ...
  Role role = Role::Affine;
  Expr oexpr;
  std::shared_ptr<const AtomDecl> atom;  // null for leaves
  std::vector<TreeNode> children;
  std::map<std::string, int, std::less<>> dims;
  std::vector<std::string> fresh;  // reduced-problem names of the atom's implementation variables
  Expr rexpr;
  std::vector<Discharge> discharges;

  bool is_leaf() const { return atom == nullptr; }
};

struct AtomTree {
  std::string component;  // "obj" or a constraint name
  TreeNode root;
};

/// Everything `build_tree` needs besides the expression.
struct TreeContext {
  const AtomRegistry* registry = nullptr;
  std::vector<VarDecl> vars;
  std::vector<VarDecl> params;
  std::vector<Constraint> available;    // constraints usable for variable conditions
  std::vector<Constraint> assumptions;  // for background conditions
};

/// Builds the atom tree of `e` in `required` role. Throws NotDcp or
/// UndischargedCondition. Fresh variables are not allocated here.
AtomTree build_tree(const Expr& e, Role required, const std::string& component, const TreeContext& ctx);

/// Checks the role propagation rules over a built tree; returns a message
/// for the first violation, or an empty string.
std::string check_roles(const AtomTree& t, const TreeContext& ctx);

/// Conic reduced problem. `problem` is stated in the original sense
/// (a maximization prints as `maximize t.0`).
struct ReducedProblem {
  Problem problem;
  std::vector<VarDecl> original_vars;
  std::vector<VarDecl> fresh_vars;
  /// Reduced constraint name -> where it came from ("constraint c1" or a
  /// tree node id such as "obj.1").
  std::vector<std::pair<std::string, std::string>> provenance;
  /// Original constraints consumed as atom conditions, with the consumer.
  std::vector<std::pair<std::string, std::string>> eliminated;
  std::vector<AtomTree> trees;
};

/// Forward map as one expression over the original variables per fresh
/// variable; the backward map is the projection onto the original variables.
struct Reduction {
  std::vector<VarDecl> source_vars;
  std::vector<VarDecl> target_vars;
  std::vector<std::pair<std::string, Expr>> interp;
};

struct Canonicalized {
  Problem source;  // the parameter-bound input problem
  ReducedProblem reduced;
  Reduction reduction;
};

/// Binds `params`, builds atom trees, and assembles the conic reduced problem
/// and its forward/backward maps. Throws UnboundParameter, NotDcp,
/// UndischargedCondition, StrictConstraintSurvives or NonConicProblem.
Canonicalized canonicalize(const Problem& p, const AtomRegistry& registry = default_registry(),
                           const std::map<std::string, Value, std::less<>>& params = {});

Assignment forward_apply(const Reduction& r, const Assignment& a);
Assignment backward_apply(const Reduction& r, const Assignment& a);

/// Human-readable tree with roles, one node per line.
std::string explain_tree(const AtomTree& t);

}  // namespace cvxc
