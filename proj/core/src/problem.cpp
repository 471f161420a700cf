#include "cvxc/problem.hpp"

#include "cvxc/errors.hpp"
#include "cvxc/eval.hpp"

#include <set>
#include <sstream>

namespace cvxc {

Shape VarShape::value_shape() const {
  switch (kind) {
    case Kind::Scalar:
      return Shape::scalar();
    case Kind::Vector:
      return Shape::vector(n);
    case Kind::SymMatrix:
      return Shape::matrix(n, n);
  }
  return Shape::scalar();
}

int VarShape::coord_count() const {
  switch (kind) {
    case Kind::Scalar:
      return 1;
    case Kind::Vector:
      return n;
    case Kind::SymMatrix:
      return n * (n + 1) / 2;
  }
  return 1;
}

const VarDecl* Problem::find_var(std::string_view name) const {
  for (const auto& v : vars)
    if (v.name == name) return &v;
  return nullptr;
}

const VarDecl* Problem::find_param(std::string_view name) const {
  for (const auto& v : params)
    if (v.name == name) return &v;
  return nullptr;
}

ShapeEnv shape_env(const std::vector<VarDecl>& vars, const std::vector<VarDecl>& params) {
  ShapeEnv env;
  for (const auto& v : vars) env[v.name] = v.shape.value_shape();
  for (const auto& v : params) env[v.name] = v.shape.value_shape();
  return env;
}

ShapeEnv shape_env(const Problem& p) { return shape_env(p.vars, p.params); }

namespace {

void check_leaves(const Expr& e, const Problem& p, const std::string& where, bool allow_vars) {
  walk(e, [&](const Expr& n, const std::string&) {
    if (n.is_var()) {
      if (!allow_vars) throw ValidationError(where + " mentions optimization variable '" + n.name() + "'");
      if (!p.find_var(n.name())) throw ValidationError(where + ": undeclared variable '" + n.name() + "'");
    } else if (n.is_param()) {
      if (!p.find_param(n.name())) throw ValidationError(where + ": undeclared parameter '" + n.name() + "'");
    }
  });
}

Shape checked_shape(const Expr& e, const ShapeEnv& env, const std::string& where) {
  try {
    return infer_shape(e, env);
  } catch (const UnknownName& err) {
    throw ValidationError(where + ": unknown function or name '" + err.name() + "'");
  } catch (const ShapeError& err) {
    throw ValidationError(where + ": " + err.what());
  }
}

}  // namespace

void validate(const Problem& p) {
  std::set<std::string, std::less<>> names;
  for (const auto* list : {&p.vars, &p.params}) {
    for (const auto& d : *list) {
      if (!names.insert(d.name).second) throw ValidationError("duplicate declaration '" + d.name + "'");
      if (d.shape.n < 1) throw ValidationError("'" + d.name + "' must have dimension at least 1");
    }
  }
  std::set<std::string, std::less<>> cnames;
  for (const auto* list : {&p.assumptions, &p.constraints})
    for (const auto& c : *list)
      if (!cnames.insert(c.name).second) throw ValidationError("duplicate constraint name '" + c.name + "'");

  const ShapeEnv env = shape_env(p);
  check_leaves(p.objective, p, "objective", true);
  if (checked_shape(p.objective, env, "objective") != Shape::scalar())
    throw ValidationError("objective must be scalar-valued");
  for (const auto& c : p.assumptions) {
    check_leaves(c.body, p, "assumption " + c.name, false);
    if (checked_shape(c.body, env, c.name).kind != ShapeKind::Boolean)
      throw ValidationError("assumption " + c.name + " is not a predicate");
  }
  for (const auto& c : p.constraints) {
    check_leaves(c.body, p, "constraint " + c.name, true);
    if (checked_shape(c.body, env, c.name).kind != ShapeKind::Boolean)
      throw ValidationError("constraint " + c.name + " is not a predicate");
  }
}

Problem normalize_sense(const Problem& p) {
  if (p.sense == Sense::Minimize) return p;
  Problem out = p;
  out.sense = Sense::Minimize;
  out.objective = -p.objective;
  return out;
}

Problem bind_parameters(const Problem& p, const std::map<std::string, Value, std::less<>>& values) {
  for (const auto& [name, v] : values)
    if (!p.find_param(name)) throw ValidationError("no parameter named '" + name + "'");
  Substitution sub;
  Assignment env;
  for (const auto& d : p.params) {
    auto it = values.find(d.name);
    if (it == values.end()) throw UnboundParameter(d.name);
    if (it->second.shape() != d.shape.value_shape())
      throw ValidationError("parameter '" + d.name + "' expects " + to_string(d.shape.value_shape()) +
                            ", got " + to_string(it->second.shape()));
    if (!it->second.all_finite()) throw ValidationError("parameter '" + d.name + "' is not finite");
    sub[d.name] = Expr::constant(it->second);
    env.set(d.name, it->second);
  }
  for (const auto& c : p.assumptions) {
    bool ok = false;
    try {
      ok = holds(c.body, env);
    } catch (const DomainError&) {
      ok = false;
    }
    if (!ok) throw ValidationError("assumption " + c.name + " does not hold for the given parameters");
  }
  Problem out;
  out.vars = p.vars;
  out.sense = p.sense;
  out.objective = substitute_params(p.objective, sub);
  for (const auto& c : p.constraints) out.constraints.push_back({c.name, substitute_params(c.body, sub)});
  return out;
}

const Value* Assignment::find(std::string_view name) const {
  auto it = values_.find(name);
  return it == values_.end() ? nullptr : &it->second;
}

const Value& Assignment::at(std::string_view name) const {
  if (const Value* v = find(name)) return *v;
  throw UnknownName(std::string(name));
}

Assignment Assignment::restrict_to(const std::vector<VarDecl>& decls) const {
  Assignment out;
  for (const auto& d : decls) out.set(d.name, at(d.name));
  return out;
}

void check_covers(const Assignment& a, const std::vector<VarDecl>& decls) {
  for (const auto& d : decls) {
    const Value* v = a.find(d.name);
    if (!v) throw ValidationError("no value for '" + d.name + "'");
    if (v->shape() != d.shape.value_shape())
      throw ValidationError("'" + d.name + "' expects " + to_string(d.shape.value_shape()) + ", got " +
                            to_string(v->shape()));
    if (!v->all_finite()) throw ValidationError("'" + d.name + "' is not finite");
    if (d.shape.kind == VarShape::Kind::SymMatrix && v->as_matrix() != v->as_matrix().transpose())
      throw ValidationError("'" + d.name + "' is not symmetric");
  }
}

std::string format_assignment(const Assignment& a) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [name, v] : a.values()) {
    os << (first ? "" : ", ") << name << ": " << format_value(v);
    first = false;
  }
  os << '}';
  return os.str();
}

}  // namespace cvxc
