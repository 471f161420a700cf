#include "cvxc/affine.hpp"

#include "cvxc/errors.hpp"
#include "cvxc/eval.hpp"

#include <cmath>
#include <set>

namespace cvxc {

std::string to_string(const Coord& c) {
  return c.var + "[" + std::to_string(c.i) + "," + std::to_string(c.j) + "]";
}

std::optional<double> numeric(const Expr& e) {
  if (e.is_const() && e.value().is_scalar()) return e.value().as_scalar();
  return std::nullopt;
}

Expr cadd(const Expr& a, const Expr& b) {
  const auto na = numeric(a), nb = numeric(b);
  if (na && nb) return Expr::constant(*na + *nb);
  if (na && *na == 0) return b;
  if (nb && *nb == 0) return a;
  return a + b;
}

Expr cmul(const Expr& a, const Expr& b) {
  const auto na = numeric(a), nb = numeric(b);
  if (na && nb) return Expr::constant(*na * *nb);
  if ((na && *na == 0) || (nb && *nb == 0)) return Expr::constant(0.0);
  if (na && *na == 1) return b;
  if (nb && *nb == 1) return a;
  return a * b;
}

Expr cneg(const Expr& a) {
  if (auto n = numeric(a)) return Expr::constant(-*n);
  if (a.is_apply("neg")) return a.arg(0);
  return -a;
}

bool LinearForm::is_numeric() const {
  if (!numeric(constant)) return false;
  for (const auto& [c, k] : terms)
    if (!numeric(k)) return false;
  return true;
}

bool AffineForm::is_constant() const {
  for (const auto& e : entries)
    if (!e.is_constant()) return false;
  return true;
}

bool AffineForm::is_numeric() const {
  for (const auto& e : entries)
    if (!e.is_numeric()) return false;
  return true;
}

AffineContext AffineContext::of(const std::vector<VarDecl>& vars, const std::vector<VarDecl>& params) {
  AffineContext ctx;
  ctx.shapes = shape_env(vars, params);
  for (const auto& v : vars) ctx.vars[v.name] = v.shape;
  return ctx;
}

AffineContext AffineContext::of(const Problem& p) { return of(p.vars, p.params); }

namespace {

using Form = AffineForm;

LinearForm lf_add(const LinearForm& a, const LinearForm& b) {
  LinearForm out = a;
  for (const auto& [c, k] : b.terms) {
    auto it = out.terms.find(c);
    if (it == out.terms.end()) {
      out.terms.emplace(c, k);
    } else {
      it->second = cadd(it->second, k);
      if (auto n = numeric(it->second); n && *n == 0) out.terms.erase(it);
    }
  }
  out.constant = cadd(a.constant, b.constant);
  return out;
}

LinearForm lf_scale(const LinearForm& a, const Expr& k) {
  LinearForm out;
  if (auto n = numeric(k); n && *n == 0) return out;
  for (const auto& [c, coef] : a.terms) {
    Expr v = cmul(k, coef);
    if (auto n = numeric(v); n && *n == 0) continue;
    out.terms.emplace(c, std::move(v));
  }
  out.constant = cmul(k, a.constant);
  return out;
}

LinearForm lf_const(Expr e) {
  LinearForm out;
  out.constant = std::move(e);
  return out;
}

Form scalar_form(LinearForm f) { return {Shape::scalar(), {std::move(f)}}; }

Form value_form(const Value& v) {
  Form out{v.shape(), {}};
  for (int k = 0; k < v.size(); ++k) out.entries.push_back(lf_const(Expr::constant(v.entry(k))));
  return out;
}

std::optional<Form> symbolic_form(const Expr& e, const AffineContext& ctx) {
  Shape s;
  try {
    s = infer_shape(e, ctx.shapes);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (!s.is_numeric()) return std::nullopt;
  Form out{s, {}};
  if (s.kind == ShapeKind::Scalar) {
    out.entries.push_back(lf_const(e));
    return out;
  }
  for (int i = 0; i < s.rows; ++i)
    for (int j = 0; j < s.cols; ++j)
      out.entries.push_back(lf_const(call("entry", {e, Expr::constant(i), Expr::constant(j)})));
  return out;
}

Form var_form(const std::string& name, const VarShape& vs) {
  Form out{vs.value_shape(), {}};
  auto unit = [&](int i, int j) {
    LinearForm f;
    f.terms.emplace(Coord{name, i, j}, Expr::constant(1.0));
    return f;
  };
  switch (vs.kind) {
    case VarShape::Kind::Scalar:
      out.entries.push_back(unit(0, 0));
      break;
    case VarShape::Kind::Vector:
      for (int i = 0; i < vs.n; ++i) out.entries.push_back(unit(i, 0));
      break;
    case VarShape::Kind::SymMatrix:
      for (int i = 0; i < vs.n; ++i)
        for (int j = 0; j < vs.n; ++j) out.entries.push_back(unit(std::min(i, j), std::max(i, j)));
      break;
  }
  return out;
}

/// Scalars broadcast against the other operand.
std::optional<Form> zip(const Form& a, const Form& b,
                        const std::function<LinearForm(const LinearForm&, const LinearForm&)>& f) {
  if (a.shape.kind == ShapeKind::Scalar && b.shape.kind != ShapeKind::Scalar) {
    Form out{b.shape, {}};
    for (const auto& e : b.entries) out.entries.push_back(f(a.entries[0], e));
    return out;
  }
  if (b.shape.kind == ShapeKind::Scalar && a.shape.kind != ShapeKind::Scalar) {
    Form out{a.shape, {}};
    for (const auto& e : a.entries) out.entries.push_back(f(e, b.entries[0]));
    return out;
  }
  if (a.shape != b.shape) return std::nullopt;
  Form out{a.shape, {}};
  for (std::size_t k = 0; k < a.entries.size(); ++k) out.entries.push_back(f(a.entries[k], b.entries[k]));
  return out;
}

Form map_form(const Form& a, const std::function<LinearForm(const LinearForm&)>& f) {
  Form out{a.shape, {}};
  for (const auto& e : a.entries) out.entries.push_back(f(e));
  return out;
}

/// Rows/cols of a matrix-like form (scalars act as 1x1).
std::pair<int, int> dims(const Form& f) {
  if (f.shape.kind == ShapeKind::Scalar) return {1, 1};
  return {f.shape.rows, f.shape.cols};
}

std::optional<int> const_index(const Form& f) {
  if (f.shape.kind != ShapeKind::Scalar || !f.entries[0].is_constant()) return std::nullopt;
  auto n = numeric(f.entries[0].constant);
  if (!n || *n < 0 || *n != std::floor(*n)) return std::nullopt;
  return static_cast<int>(*n);
}

std::optional<Form> product(const Form& a, const Form& b) {
  const bool ca = a.is_constant(), cb = b.is_constant();
  if (!ca && !cb) return std::nullopt;
  const bool sa = a.shape.kind == ShapeKind::Scalar, sb = b.shape.kind == ShapeKind::Scalar;
  if (sa && ca) return map_form(b, [&](const LinearForm& e) { return lf_scale(e, a.entries[0].constant); });
  if (sb && cb) return map_form(a, [&](const LinearForm& e) { return lf_scale(e, b.entries[0].constant); });
  if (sa || sb) {
    // variable scalar times constant array
    const Form& s = sa ? a : b;
    const Form& m = sa ? b : a;
    return map_form(m, [&](const LinearForm& e) { return lf_scale(s.entries[0], e.constant); });
  }
  if (a.shape.kind != ShapeKind::Matrix) return std::nullopt;
  const int n = a.shape.rows, m = a.shape.cols;
  if (b.shape.rows != m) return std::nullopt;
  const int p = b.shape.kind == ShapeKind::Vector ? 1 : b.shape.cols;
  Form out{b.shape.kind == ShapeKind::Vector ? Shape::vector(n) : Shape::matrix(n, p), {}};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) {
      LinearForm acc;
      for (int k = 0; k < m; ++k) {
        const LinearForm& x = a.entries[static_cast<std::size_t>(i * m + k)];
        const LinearForm& y = b.entries[static_cast<std::size_t>(k * p + j)];
        acc = lf_add(acc, ca ? lf_scale(y, x.constant) : lf_scale(x, y.constant));
      }
      out.entries.push_back(std::move(acc));
    }
  }
  return out;
}

std::optional<Form> form_rec(const Expr& e, const AffineContext& ctx, const std::set<std::string, std::less<>>& names);

std::optional<Form> apply_form(const Expr& e, const AffineContext& ctx,
                               const std::set<std::string, std::less<>>& names) {
  const std::string& fn = e.name();
  std::vector<Form> args;
  auto need = [&](std::size_t n) -> bool {
    if (e.args().size() != n) return false;
    for (const auto& a : e.args()) {
      auto f = form_rec(a, ctx, names);
      if (!f) return false;
      args.push_back(std::move(*f));
    }
    return true;
  };

  if (fn == "add" || fn == "sub") {
    if (!need(2)) return std::nullopt;
    const bool sub = fn == "sub";
    return zip(args[0], args[1], [&](const LinearForm& x, const LinearForm& y) {
      return lf_add(x, sub ? lf_scale(y, Expr::constant(-1.0)) : y);
    });
  }
  if (fn == "neg") {
    if (!need(1)) return std::nullopt;
    return map_form(args[0], [](const LinearForm& x) { return lf_scale(x, Expr::constant(-1.0)); });
  }
  if (fn == "mul") {
    if (!need(2)) return std::nullopt;
    return product(args[0], args[1]);
  }
  if (fn == "div") {
    if (!need(2)) return std::nullopt;
    const Form& d = args[1];
    if (d.shape.kind != ShapeKind::Scalar || !d.is_constant()) return std::nullopt;
    const Expr& c = d.entries[0].constant;
    Expr k;
    if (auto n = numeric(c)) {
      if (*n == 0) return std::nullopt;
      k = Expr::constant(1.0 / *n);
    } else {
      k = Expr::constant(1.0) / c;
    }
    return map_form(args[0], [&](const LinearForm& x) { return lf_scale(x, k); });
  }
  if (fn == "sum") {
    if (!need(1)) return std::nullopt;
    LinearForm acc;
    for (const auto& x : args[0].entries) acc = lf_add(acc, x);
    return scalar_form(std::move(acc));
  }
  if (fn == "trace" || fn == "diag") {
    if (!need(1)) return std::nullopt;
    auto [r, c] = dims(args[0]);
    if (r != c || args[0].shape.kind == ShapeKind::Vector) return std::nullopt;
    std::vector<LinearForm> d;
    for (int i = 0; i < r; ++i) d.push_back(args[0].entries[static_cast<std::size_t>(i * c + i)]);
    if (fn == "diag") return Form{Shape::vector(r), std::move(d)};
    LinearForm acc;
    for (const auto& x : d) acc = lf_add(acc, x);
    return scalar_form(std::move(acc));
  }
  if (fn == "diagMat") {
    if (!need(1)) return std::nullopt;
    if (args[0].shape.kind == ShapeKind::Matrix) return std::nullopt;
    const int n = static_cast<int>(args[0].entries.size());
    Form out{Shape::matrix(n, n), {}};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.entries.push_back(i == j ? args[0].entries[static_cast<std::size_t>(i)] : LinearForm{});
    return out;
  }
  if (fn == "triu") {
    if (!need(1)) return std::nullopt;
    auto [r, c] = dims(args[0]);
    if (r != c || args[0].shape.kind == ShapeKind::Vector) return std::nullopt;
    Form out{args[0].shape, args[0].entries};
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < i; ++j) out.entries[static_cast<std::size_t>(i * c + j)] = LinearForm{};
    return out;
  }
  if (fn == "transpose") {
    if (!need(1)) return std::nullopt;
    if (args[0].shape.kind == ShapeKind::Scalar) return args[0];
    auto [r, c] = dims(args[0]);
    Form out{Shape::matrix(c, r), {}};
    for (int i = 0; i < c; ++i)
      for (int j = 0; j < r; ++j) out.entries.push_back(args[0].entries[static_cast<std::size_t>(j * c + i)]);
    return out;
  }
  if (fn == "entry") {
    if (!need(3)) return std::nullopt;
    auto i = const_index(args[1]);
    auto j = const_index(args[2]);
    if (!i || !j) return std::nullopt;
    const Form& m = args[0];
    if (m.shape.kind == ShapeKind::Vector) {
      if (*j != 0 || *i >= m.shape.rows) return std::nullopt;
      return scalar_form(m.entries[static_cast<std::size_t>(*i)]);
    }
    if (m.shape.kind != ShapeKind::Matrix || *i >= m.shape.rows || *j >= m.shape.cols) return std::nullopt;
    return scalar_form(m.entries[static_cast<std::size_t>(*i * m.shape.cols + *j)]);
  }
  if (fn == "block") {
    if (!need(4)) return std::nullopt;
    for (const auto& a : args)
      if (a.shape.kind == ShapeKind::Vector) return std::nullopt;
    auto [r11, c11] = dims(args[0]);
    auto [r12, c12] = dims(args[1]);
    auto [r21, c21] = dims(args[2]);
    auto [r22, c22] = dims(args[3]);
    if (r11 != r12 || r21 != r22 || c11 != c21 || c12 != c22) return std::nullopt;
    const int rows = r11 + r21, cols = c11 + c12;
    Form out{Shape::matrix(rows, cols), {}};
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const int bi = i < r11 ? 0 : 1, bj = j < c11 ? 0 : 1;
        const Form& b = args[static_cast<std::size_t>(2 * bi + bj)];
        const int li = i - bi * r11, lj = j - bj * c11;
        const int bc = dims(b).second;
        out.entries.push_back(b.entries[static_cast<std::size_t>(li * bc + lj)]);
      }
    }
    return out;
  }
  if (fn == "vec") {
    Form out{Shape::vector(static_cast<int>(e.args().size())), {}};
    for (const auto& a : e.args()) {
      auto f = form_rec(a, ctx, names);
      if (!f || f->shape.kind != ShapeKind::Scalar) return std::nullopt;
      out.entries.push_back(std::move(f->entries[0]));
    }
    return out;
  }
  return std::nullopt;
}

std::optional<Form> form_rec(const Expr& e, const AffineContext& ctx, const std::set<std::string, std::less<>>& names) {
  if (e.is_const()) {
    if (!e.value().is_boolean()) return value_form(e.value());
    return std::nullopt;
  }
  if (e.is_var()) {
    auto it = ctx.vars.find(e.name());
    if (it != ctx.vars.end()) return var_form(e.name(), it->second);
    return symbolic_form(e, ctx);
  }
  if (e.is_param()) return symbolic_form(e, ctx);
  if (!mentions_any(e, names)) {
    if (is_closed(e)) {
      try {
        const Value v = eval(e, Assignment{});
        if (v.is_boolean()) return std::nullopt;
        return value_form(v);
      } catch (const DomainError&) {
        // stays symbolic; the domain violation surfaces when it is evaluated
      } catch (const Error&) {
        return std::nullopt;
      }
    }
    return symbolic_form(e, ctx);
  }
  return apply_form(e, ctx, names);
}

}  // namespace

std::optional<AffineForm> affine_form(const Expr& e, const AffineContext& ctx) {
  std::set<std::string, std::less<>> names;
  for (const auto& [n, s] : ctx.vars) names.insert(n);
  return form_rec(e, ctx, names);
}

double coord_value(const Coord& c, const Assignment& a) {
  const Value& v = a.at(c.var);
  if (v.is_scalar()) return v.as_scalar();
  if (v.is_vector()) return v.as_vector()(c.i);
  return v.as_matrix()(c.i, c.j);
}

std::vector<Coord> coordinates(const std::vector<VarDecl>& vars) {
  std::vector<Coord> out;
  for (const auto& v : vars) {
    switch (v.shape.kind) {
      case VarShape::Kind::Scalar:
        out.push_back({v.name, 0, 0});
        break;
      case VarShape::Kind::Vector:
        for (int i = 0; i < v.shape.n; ++i) out.push_back({v.name, i, 0});
        break;
      case VarShape::Kind::SymMatrix:
        for (int i = 0; i < v.shape.n; ++i)
          for (int j = i; j < v.shape.n; ++j) out.push_back({v.name, i, j});
        break;
    }
  }
  return out;
}

Eigen::VectorXd to_coordinates(const std::vector<Coord>& coords, const Assignment& a) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t k = 0; k < coords.size(); ++k) x(static_cast<Eigen::Index>(k)) = coord_value(coords[k], a);
  return x;
}

Assignment from_coordinates(const std::vector<VarDecl>& vars, const Eigen::VectorXd& x) {
  Assignment a;
  Eigen::Index k = 0;
  for (const auto& v : vars) {
    const int n = v.shape.n;
    switch (v.shape.kind) {
      case VarShape::Kind::Scalar:
        a.set(v.name, x(k++));
        break;
      case VarShape::Kind::Vector:
        a.set(v.name, Value::vector(x.segment(k, n)));
        k += n;
        break;
      case VarShape::Kind::SymMatrix: {
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) m(i, j) = m(j, i) = x(k++);
        a.set(v.name, Value::matrix(std::move(m)));
        break;
      }
    }
  }
  return a;
}

Value eval_affine(const AffineForm& f, const Assignment& a) {
  std::vector<double> vals;
  for (const auto& e : f.entries) {
    double acc = eval_scalar(e.constant, a);
    for (const auto& [c, k] : e.terms) acc += eval_scalar(k, a) * coord_value(c, a);
    vals.push_back(acc);
  }
  switch (f.shape.kind) {
    case ShapeKind::Vector:
      return Value::vector(Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
    case ShapeKind::Matrix: {
      Eigen::MatrixXd m(f.shape.rows, f.shape.cols);
      for (int i = 0; i < f.shape.rows; ++i)
        for (int j = 0; j < f.shape.cols; ++j) m(i, j) = vals[static_cast<std::size_t>(i * f.shape.cols + j)];
      return Value::matrix(std::move(m));
    }
    default:
      return Value(vals.at(0));
  }
}

Expr to_expr(const LinearForm& f, const AffineContext& ctx) {
  std::optional<Expr> acc;
  for (const auto& [c, k] : f.terms) {
    Expr ref = Expr::var(c.var);
    auto it = ctx.vars.find(c.var);
    if (it != ctx.vars.end() && it->second.kind != VarShape::Kind::Scalar)
      ref = call("entry", {ref, Expr::constant(c.i), Expr::constant(c.j)});
    auto n = numeric(k);
    const bool negative = n && *n < 0;
    Expr term = negative ? cmul(Expr::constant(-*n), ref) : cmul(k, ref);
    if (!acc)
      acc = negative ? -term : term;
    else
      acc = negative ? *acc - term : *acc + term;
  }
  if (!acc) return f.constant;
  auto n = numeric(f.constant);
  if (n && *n == 0) return *acc;
  if (n && *n < 0) return *acc - Expr::constant(-*n);
  return *acc + f.constant;
}

}  // namespace cvxc
