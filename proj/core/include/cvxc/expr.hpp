#pragma once

#include "cvxc/value.hpp"

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cvxc {

enum class NodeKind { Const, Var, Param, Apply };

/// Immutable expression tree. Copies share structure; nodes are never
/// mutated after construction, so an Expr may be shared freely across threads.
///
/// `Apply` nodes name a function from the function table (see functions.hpp);
/// vector literals `![a, b]` are `Apply("vec", {a, b})`.
class Expr {
 public:
  /// The constant 0.
  Expr();

  static Expr constant(double d);
  static Expr constant(Value v);
  static Expr var(std::string name);
  static Expr param(std::string name);
  static Expr apply(std::string fn, std::vector<Expr> args);

  NodeKind kind() const;
  bool is_const() const { return kind() == NodeKind::Const; }
  bool is_var() const { return kind() == NodeKind::Var; }
  bool is_param() const { return kind() == NodeKind::Param; }
  bool is_apply() const { return kind() == NodeKind::Apply; }
  /// Apply node with the given head.
  bool is_apply(std::string_view fn) const;

  const Value& value() const;
  /// Variable/parameter name or function name.
  const std::string& name() const;
  std::span<const Expr> args() const;
  const Expr& arg(std::size_t i) const { return args()[i]; }

  /// Structural equality (exact constants, same names, same shape of tree).
  friend bool operator==(const Expr& a, const Expr& b);

  /// Identity of the underlying node, used to memoize per-node data.
  const void* id() const { return node_.get(); }

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

using Substitution = std::map<std::string, Expr, std::less<>>;

/// Replaces `Var` leaves by name. Names missing from `s` are kept.
Expr substitute(const Expr& e, const Substitution& s);
/// Replaces `Param` leaves by name.
Expr substitute_params(const Expr& e, const Substitution& s);

void collect_vars(const Expr& e, std::set<std::string, std::less<>>& out);
void collect_params(const Expr& e, std::set<std::string, std::less<>>& out);
std::set<std::string, std::less<>> free_vars(const Expr& e);

/// True when the tree contains no Var and no Param leaves.
bool is_closed(const Expr& e);
/// True when some Var leaf is named in `names`.
bool mentions_any(const Expr& e, const std::set<std::string, std::less<>>& names);

/// Pre-order traversal; `visit` receives the node and its dotted path ("" for root).
void walk(const Expr& e, const std::function<void(const Expr&, const std::string&)>& visit);

// Builders used throughout the library and in tests.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr call(std::string fn, std::vector<Expr> args);

namespace lit {
inline Expr operator""_c(long double d) { return Expr::constant(static_cast<double>(d)); }
inline Expr operator""_c(unsigned long long d) { return Expr::constant(static_cast<double>(d)); }
}  // namespace lit

}  // namespace cvxc
