#include "cvxc/eval.hpp"

#include "cvxc/errors.hpp"
#include "cvxc/parser.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <vector>

namespace cvxc {

namespace {

Value eval_rec(const Expr& e, const Assignment& a, const EvalOptions& opts, const std::string& path) {
  switch (e.kind()) {
    case NodeKind::Const:
      return e.value();
    case NodeKind::Var:
    case NodeKind::Param:
      return a.at(e.name());
    case NodeKind::Apply:
      break;
  }
  const FunctionInfo* f = find_function(e.name());
  if (!f) throw UnknownName(e.name());
  if (f->arity >= 0 && static_cast<std::size_t>(f->arity) != e.args().size())
    throw ShapeError("'" + e.name() + "' applied to " + std::to_string(e.args().size()) +
                     " argument(s), expects " + std::to_string(f->arity));
  std::vector<Value> args;
  args.reserve(e.args().size());
  for (std::size_t i = 0; i < e.args().size(); ++i)
    args.push_back(eval_rec(e.arg(i), a, opts, path + "." + std::to_string(i + 1)));
  Value out;
  try {
    out = f->eval(args, opts);
  } catch (const DomainError& err) {
    if (!err.path().empty()) throw;
    throw DomainError(err.reason(), path, print_expr(e));
  }
  if (!out.all_finite())
    throw DomainError("non-finite result of '" + e.name() + "'", path, print_expr(e));
  return out;
}

Shape shape_rec(const Expr& e, const ShapeEnv& env) {
  switch (e.kind()) {
    case NodeKind::Const:
      return e.value().shape();
    case NodeKind::Var:
    case NodeKind::Param: {
      auto it = env.find(e.name());
      if (it == env.end()) throw UnknownName(e.name());
      return it->second;
    }
    case NodeKind::Apply:
      break;
  }
  const FunctionInfo* f = find_function(e.name());
  if (!f) throw UnknownName(e.name());
  if (f->arity >= 0 && static_cast<std::size_t>(f->arity) != e.args().size())
    throw ShapeError("'" + e.name() + "' applied to " + std::to_string(e.args().size()) +
                     " argument(s), expects " + std::to_string(f->arity));
  std::vector<Shape> shapes;
  shapes.reserve(e.args().size());
  for (const auto& arg : e.args()) shapes.push_back(shape_rec(arg, env));
  return f->shape(shapes);
}

double norm2(const Value& v) {
  double ss = 0;
  for (int k = 0; k < v.size(); ++k) ss += v.entry(k) * v.entry(k);
  return ss;
}

/// Entry k of a possibly-broadcast argument.
double at(const Value& v, int k) { return v.is_scalar() ? v.as_scalar() : v.entry(k); }

int broadcast_size(const std::vector<Value>& vs) {
  int n = 1;
  for (const auto& v : vs)
    if (!v.is_scalar()) n = std::max(n, v.size());
  return n;
}

}  // namespace

Value eval(const Expr& e, const Assignment& a, const EvalOptions& opts, const std::string& root) {
  return eval_rec(e, a, opts, root);
}

double eval_scalar(const Expr& e, const Assignment& a, const EvalOptions& opts) {
  return eval(e, a, opts).as_scalar();
}

bool holds(const Expr& e, const Assignment& a, const EvalOptions& opts) {
  return eval(e, a, opts).truth();
}

Shape infer_shape(const Expr& e, const ShapeEnv& env) { return shape_rec(e, env); }

double objective_value(const Problem& p, const Assignment& a, const EvalOptions& opts) {
  return eval(p.objective, a, opts, "obj").as_scalar();
}

bool is_feasible(const Problem& p, const Assignment& a, const EvalOptions& opts) {
  for (const auto& c : p.constraints) {
    try {
      if (!eval(c.body, a, opts, c.name).truth()) return false;
    } catch (const DomainError&) {
      return false;
    }
  }
  return true;
}

double violation(const Expr& c, const Assignment& a) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  try {
    if (!c.is_apply()) return eval(c, a).truth() ? 0.0 : inf;
    std::vector<Value> args;
    for (const auto& arg : c.args()) args.push_back(eval(arg, a));
    const std::string& fn = c.name();
    const int n = broadcast_size(args);
    double worst = 0;
    if (fn == "eq") {
      for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(at(args[0], k) - at(args[1], k)));
    } else if (fn == "le" || fn == "lt") {
      for (int k = 0; k < n; ++k) worst = std::max(worst, at(args[0], k) - at(args[1], k));
    } else if (fn == "zeroCone") {
      for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(at(args[0], k)));
    } else if (fn == "posOrthCone") {
      for (int k = 0; k < n; ++k) worst = std::max(worst, -at(args[0], k));
    } else if (fn == "soCone") {
      worst = std::sqrt(norm2(args[1])) - args[0].as_scalar();
    } else if (fn == "rotatedSoCone") {
      const double v = args[0].as_scalar(), w = args[1].as_scalar();
      worst = std::max({-v, -w, norm2(args[2]) - 2 * v * w});
    } else if (fn == "expCone") {
      for (int k = 0; k < n; ++k) {
        const double x = at(args[0], k), y = at(args[1], k), z = at(args[2], k);
        double v = 0;
        if (y > 0)
          v = y * std::exp(x / y) - z;
        else
          v = std::max({std::abs(y), x, -z});
        worst = std::max(worst, v);
      }
    } else if (fn == "psdCone" || fn == "posDef") {
      const Eigen::MatrixXd m = args[0].is_scalar() ? Eigen::MatrixXd::Constant(1, 1, args[0].as_scalar())
                                                    : args[0].as_matrix();
      const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
      const double lmin = es.eigenvalues().minCoeff();
      worst = std::max(asym, -lmin);
      if (fn == "posDef" && lmin <= 0) worst = std::max(worst, std::numeric_limits<double>::min());
    } else {
      return eval(c, a).truth() ? 0.0 : inf;
    }
    return std::max(worst, 0.0);
  } catch (const DomainError&) {
    return inf;
  }
}

double max_violation(const Problem& p, const Assignment& a) {
  double worst = 0;
  for (const auto& c : p.constraints) worst = std::max(worst, violation(c.body, a));
  return worst;
}

}  // namespace cvxc
