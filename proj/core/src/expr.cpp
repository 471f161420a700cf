#include "cvxc/expr.hpp"

namespace cvxc {

struct Expr::Node {
  NodeKind kind = NodeKind::Const;
  Value value;
  std::string name;
  std::vector<Expr> args;
};

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double d) { return constant(Value(d)); }

Expr Expr::constant(Value v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Const;
  n->value = std::move(v);
  return Expr(std::move(n));
}

Expr Expr::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Var;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::param(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Param;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::apply(std::string fn, std::vector<Expr> args) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Apply;
  n->name = std::move(fn);
  n->args = std::move(args);
  return Expr(std::move(n));
}

NodeKind Expr::kind() const { return node_->kind; }
bool Expr::is_apply(std::string_view fn) const { return is_apply() && node_->name == fn; }
const Value& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
std::span<const Expr> Expr::args() const { return node_->args; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::Const:
      return a.value() == b.value();
    case NodeKind::Var:
    case NodeKind::Param:
      return a.name() == b.name();
    case NodeKind::Apply: {
      if (a.name() != b.name() || a.args().size() != b.args().size()) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (!(a.arg(i) == b.arg(i))) return false;
      return true;
    }
  }
  return false;
}

namespace {

Expr substitute_kind(const Expr& e, const Substitution& s, NodeKind leaf) {
  if (e.kind() == leaf) {
    auto it = s.find(e.name());
    return it == s.end() ? e : it->second;
  }
  if (!e.is_apply()) return e;
  std::vector<Expr> args;
  args.reserve(e.args().size());
  bool changed = false;
  for (const auto& a : e.args()) {
    args.push_back(substitute_kind(a, s, leaf));
    changed = changed || args.back().id() != a.id();
  }
  return changed ? Expr::apply(e.name(), std::move(args)) : e;
}

void collect_kind(const Expr& e, NodeKind leaf, std::set<std::string, std::less<>>& out) {
  if (e.kind() == leaf) out.insert(e.name());
  if (e.is_apply())
    for (const auto& a : e.args()) collect_kind(a, leaf, out);
}

void walk_rec(const Expr& e, const std::string& path,
              const std::function<void(const Expr&, const std::string&)>& visit) {
  visit(e, path);
  if (!e.is_apply()) return;
  for (std::size_t i = 0; i < e.args().size(); ++i)
    walk_rec(e.arg(i), path.empty() ? std::to_string(i + 1) : path + "." + std::to_string(i + 1),
             visit);
}

}  // namespace

Expr substitute(const Expr& e, const Substitution& s) {
  return s.empty() ? e : substitute_kind(e, s, NodeKind::Var);
}

Expr substitute_params(const Expr& e, const Substitution& s) {
  return s.empty() ? e : substitute_kind(e, s, NodeKind::Param);
}

void collect_vars(const Expr& e, std::set<std::string, std::less<>>& out) {
  collect_kind(e, NodeKind::Var, out);
}

void collect_params(const Expr& e, std::set<std::string, std::less<>>& out) {
  collect_kind(e, NodeKind::Param, out);
}

std::set<std::string, std::less<>> free_vars(const Expr& e) {
  std::set<std::string, std::less<>> out;
  collect_vars(e, out);
  return out;
}

bool is_closed(const Expr& e) {
  if (e.is_var() || e.is_param()) return false;
  if (!e.is_apply()) return true;
  for (const auto& a : e.args())
    if (!is_closed(a)) return false;
  return true;
}

bool mentions_any(const Expr& e, const std::set<std::string, std::less<>>& names) {
  if (e.is_var()) return names.contains(e.name());
  if (!e.is_apply()) return false;
  for (const auto& a : e.args())
    if (mentions_any(a, names)) return true;
  return false;
}

void walk(const Expr& e, const std::function<void(const Expr&, const std::string&)>& visit) {
  walk_rec(e, "", visit);
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::apply("add", {a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::apply("sub", {a, b}); }
Expr operator-(const Expr& a) { return Expr::apply("neg", {a}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::apply("mul", {a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::apply("div", {a, b}); }
Expr call(std::string fn, std::vector<Expr> args) { return Expr::apply(std::move(fn), std::move(args)); }

}  // namespace cvxc
