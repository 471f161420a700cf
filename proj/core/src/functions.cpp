#include "cvxc/functions.hpp"

#include "cvxc/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cvxc {

std::string_view cone_function(ConeKind k) {
  switch (k) {
    case ConeKind::Zero:
      return "zeroCone";
    case ConeKind::PosOrth:
      return "posOrthCone";
    case ConeKind::SecondOrder:
      return "soCone";
    case ConeKind::RotatedSecondOrder:
      return "rotatedSoCone";
    case ConeKind::Exp:
      return "expCone";
    case ConeKind::PSD:
      return "psdCone";
  }
  return "";
}

std::optional<ConeKind> cone_kind(std::string_view fn) {
  for (auto k : {ConeKind::Zero, ConeKind::PosOrth, ConeKind::SecondOrder,
                 ConeKind::RotatedSecondOrder, ConeKind::Exp, ConeKind::PSD})
    if (cone_function(k) == fn) return k;
  return std::nullopt;
}

bool in_second_order_cone(double t, std::span<const double> x, double tol) {
  double ss = 0;
  for (double v : x) ss += v * v;
  return t >= std::sqrt(ss) - tol;
}

bool in_rotated_cone(double v, double w, std::span<const double> x, double tol) {
  double ss = 0;
  for (double e : x) ss += e * e;
  return v >= -tol && w >= -tol && 2 * v * w >= ss - tol;
}

bool in_exp_cone(double a, double b, double c, double tol) {
  if (b > 0) {
    const double lhs = b * std::exp(a / b);
    if (std::isfinite(lhs) && lhs <= c + tol) return true;
  }
  // closure of the cone at b = 0: {(a, 0, c) : a <= 0, c >= 0}
  return std::abs(b) <= tol && a <= tol && c >= -tol;
}

bool is_psd(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

bool is_positive_definite(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.size() == 0) return false;
  if (!m.isApprox(m.transpose(), 1e-12)) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

namespace {

using Args = std::span<const Value>;
using Shapes = std::span<const Shape>;

// --- shape helpers --------------------------------------------------------

[[noreturn]] void shape_fail(const std::string& fn, const std::string& why) {
  throw ShapeError(fn + ": " + why);
}

Shape broadcast_shape(const std::string& fn, const Shape& a, const Shape& b) {
  if (!a.is_numeric() || !b.is_numeric()) shape_fail(fn, "numeric arguments required");
  if (a.kind == ShapeKind::Scalar) return b;
  if (b.kind == ShapeKind::Scalar) return a;
  if (a == b) return a;
  shape_fail(fn, "incompatible shapes " + to_string(a) + " and " + to_string(b));
}

Shape numeric_same(const std::string& fn, const Shape& a) {
  if (!a.is_numeric()) shape_fail(fn, "numeric argument required");
  return a;
}

Shape require_scalar(const std::string& fn, const Shape& a) {
  if (a.kind != ShapeKind::Scalar) shape_fail(fn, "scalar argument required, got " + to_string(a));
  return a;
}

Shape require_square(const std::string& fn, const Shape& a) {
  if (a.kind == ShapeKind::Scalar) return Shape::matrix(1, 1);
  if (a.kind != ShapeKind::Matrix || a.rows != a.cols)
    shape_fail(fn, "square matrix required, got " + to_string(a));
  return a;
}

// --- value helpers --------------------------------------------------------

Eigen::MatrixXd as_square(const std::string& fn, const Value& v) {
  if (v.is_scalar()) return Eigen::MatrixXd::Constant(1, 1, v.as_scalar());
  if (!v.is_matrix() || v.as_matrix().rows() != v.as_matrix().cols())
    throw ShapeError(fn + ": square matrix required, got " + to_string(v.shape()));
  return v.as_matrix();
}

template <typename F>
Value map_unary(const Value& v, F f) {
  if (v.is_scalar()) return Value(f(v.as_scalar()));
  if (v.is_vector()) return Value::vector(v.as_vector().unaryExpr(f));
  if (v.is_matrix()) return Value::matrix(v.as_matrix().unaryExpr(f));
  throw ShapeError("numeric argument required");
}

template <typename F>
Value map_binary(const std::string& fn, const Value& a, const Value& b, F f) {
  if (a.is_boolean() || b.is_boolean()) throw ShapeError(fn + ": numeric arguments required");
  if (a.is_scalar() && b.is_scalar()) return Value(f(a.as_scalar(), b.as_scalar()));
  if (a.is_scalar()) {
    const double s = a.as_scalar();
    return map_unary(b, [&](double y) { return f(s, y); });
  }
  if (b.is_scalar()) {
    const double s = b.as_scalar();
    return map_unary(a, [&](double x) { return f(x, s); });
  }
  if (a.shape() != b.shape())
    throw ShapeError(fn + ": incompatible shapes " + to_string(a.shape()) + " and " +
                     to_string(b.shape()));
  if (a.is_vector()) return Value::vector(a.as_vector().binaryExpr(b.as_vector(), f));
  return Value::matrix(a.as_matrix().binaryExpr(b.as_matrix(), f));
}

std::vector<double> flat(const Value& v) {
  std::vector<double> out(static_cast<std::size_t>(v.size()));
  for (int k = 0; k < v.size(); ++k) out[static_cast<std::size_t>(k)] = v.entry(k);
  return out;
}

/// Elementwise predicate over broadcast arguments.
template <typename F>
Value all_entries(const std::string& fn, Args a, F pred) {
  int n = 1;
  for (const auto& v : a) {
    if (v.is_boolean()) throw ShapeError(fn + ": numeric arguments required");
    if (!v.is_scalar()) {
      if (n != 1 && n != v.size()) throw ShapeError(fn + ": incompatible argument sizes");
      n = v.size();
    }
  }
  std::vector<double> buf(a.size());
  for (int k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < a.size(); ++i) buf[i] = a[i].is_scalar() ? a[i].as_scalar() : a[i].entry(k);
    if (!pred(std::span<const double>(buf))) return Value::boolean(false);
  }
  return Value::boolean(true);
}

Shape predicate_broadcast(const std::string& fn, Shapes s) {
  Shape acc = Shape::scalar();
  for (const auto& x : s) acc = broadcast_shape(fn, acc, x);
  return Shape::boolean();
}

int integer_index(const std::string& fn, const Value& v) {
  const double d = v.as_scalar();
  if (d != std::floor(d) || d < 0) throw DomainError(fn + ": index must be a non-negative integer");
  return static_cast<int>(d);
}

/// Upper-triangular Z = diag(R) R for A = R^T R; the symmetric completion is
/// returned. It is an optimal point of the log-det graph implementation.
Eigen::MatrixXd chol_scaled(const Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw DomainError("cholScaled: argument not positive definite");
  const Eigen::MatrixXd r = llt.matrixU();
  Eigen::MatrixXd z = r.diagonal().asDiagonal() * r;
  Eigen::MatrixXd sym = z;
  sym.triangularView<Eigen::StrictlyLower>() = z.transpose().triangularView<Eigen::StrictlyLower>();
  return sym;
}

std::vector<FunctionInfo> build_table() {
  std::vector<FunctionInfo> t;
  auto add = [&](std::string name, int arity, bool pred, auto eval, auto shape) {
    t.push_back({std::move(name), arity, pred, eval, shape});
  };

  // --- arithmetic ---------------------------------------------------------
  add("add", 2, false,
      [](Args a, const EvalOptions&) { return map_binary("add", a[0], a[1], [](double x, double y) { return x + y; }); },
      [](Shapes s) { return broadcast_shape("add", s[0], s[1]); });
  add("sub", 2, false,
      [](Args a, const EvalOptions&) { return map_binary("sub", a[0], a[1], [](double x, double y) { return x - y; }); },
      [](Shapes s) { return broadcast_shape("sub", s[0], s[1]); });
  add("neg", 1, false, [](Args a, const EvalOptions&) { return map_unary(a[0], [](double x) { return -x; }); },
      [](Shapes s) { return numeric_same("neg", s[0]); });
  add("mul", 2, false,
      [](Args a, const EvalOptions&) -> Value {
        if (a[0].is_scalar() || a[1].is_scalar())
          return map_binary("mul", a[0], a[1], [](double x, double y) { return x * y; });
        if (a[0].is_matrix() && a[1].is_matrix()) {
          if (a[0].as_matrix().cols() != a[1].as_matrix().rows())
            throw ShapeError("mul: inner dimensions disagree");
          return Value::matrix(a[0].as_matrix() * a[1].as_matrix());
        }
        if (a[0].is_matrix() && a[1].is_vector()) {
          if (a[0].as_matrix().cols() != a[1].as_vector().size())
            throw ShapeError("mul: inner dimensions disagree");
          return Value::vector(a[0].as_matrix() * a[1].as_vector());
        }
        throw ShapeError("mul: unsupported operand shapes");
      },
      [](Shapes s) -> Shape {
        if (s[0].kind == ShapeKind::Scalar || s[1].kind == ShapeKind::Scalar)
          return broadcast_shape("mul", s[0], s[1]);
        if (s[0].kind == ShapeKind::Matrix && s[1].kind == ShapeKind::Matrix && s[0].cols == s[1].rows)
          return Shape::matrix(s[0].rows, s[1].cols);
        if (s[0].kind == ShapeKind::Matrix && s[1].kind == ShapeKind::Vector && s[0].cols == s[1].rows)
          return Shape::vector(s[0].rows);
        shape_fail("mul", "unsupported operand shapes " + to_string(s[0]) + " and " + to_string(s[1]));
      });
  add("div", 2, false,
      [](Args a, const EvalOptions&) {
        const double d = a[1].as_scalar();
        if (d == 0) throw DomainError("division by zero");
        return map_unary(a[0], [d](double x) { return x / d; });
      },
      [](Shapes s) {
        require_scalar("div", s[1]);
        return numeric_same("div", s[0]);
      });
  add("pow", 2, false,
      [](Args a, const EvalOptions&) {
        const double p = a[1].as_scalar();
        return map_unary(a[0], [p](double x) {
          if (x < 0 && p != std::floor(p)) throw DomainError("pow: negative base with fractional exponent");
          if (x == 0 && p < 0) throw DomainError("pow: zero base with negative exponent");
          if (p == 2) return x * x;
          return std::pow(x, p);
        });
      },
      [](Shapes s) {
        require_scalar("pow", s[1]);
        return numeric_same("pow", s[0]);
      });

  // --- scalar nonlinear functions (elementwise on vectors/matrices) ------
  add("sqrt", 1, false,
      [](Args a, const EvalOptions&) {
        return map_unary(a[0], [](double x) {
          if (x < 0) throw DomainError("sqrt of negative value " + format_double(x));
          return std::sqrt(x);
        });
      },
      [](Shapes s) { return numeric_same("sqrt", s[0]); });
  add("log", 1, false,
      [](Args a, const EvalOptions&) {
        return map_unary(a[0], [](double x) {
          if (!(x > 0)) throw DomainError("log of non-positive value " + format_double(x));
          return std::log(x);
        });
      },
      [](Shapes s) { return numeric_same("log", s[0]); });
  add("exp", 1, false,
      [](Args a, const EvalOptions&) { return map_unary(a[0], [](double x) { return std::exp(x); }); },
      [](Shapes s) { return numeric_same("exp", s[0]); });
  add("abs", 1, false,
      [](Args a, const EvalOptions&) { return map_unary(a[0], [](double x) { return std::abs(x); }); },
      [](Shapes s) { return numeric_same("abs", s[0]); });

  // --- linear reshaping ---------------------------------------------------
  add("sum", 1, false,
      [](Args a, const EvalOptions&) {
        double acc = 0;
        for (int k = 0; k < a[0].size(); ++k) acc += a[0].entry(k);
        return Value(acc);
      },
      [](Shapes s) {
        numeric_same("sum", s[0]);
        return Shape::scalar();
      });
  add("trace", 1, false,
      [](Args a, const EvalOptions&) { return Value(as_square("trace", a[0]).trace()); },
      [](Shapes s) {
        require_square("trace", s[0]);
        return Shape::scalar();
      });
  add("diag", 1, false,
      [](Args a, const EvalOptions&) {
        return Value::vector(as_square("diag", a[0]).diagonal());
      },
      [](Shapes s) { return Shape::vector(require_square("diag", s[0]).rows); });
  add("diagMat", 1, false,
      [](Args a, const EvalOptions&) {
        const Eigen::VectorXd v = a[0].is_scalar() ? Eigen::VectorXd::Constant(1, a[0].as_scalar())
                                                   : a[0].as_vector();
        return Value::matrix(v.asDiagonal());
      },
      [](Shapes s) -> Shape {
        if (s[0].kind == ShapeKind::Scalar) return Shape::matrix(1, 1);
        if (s[0].kind != ShapeKind::Vector) shape_fail("diagMat", "vector argument required");
        return Shape::matrix(s[0].rows, s[0].rows);
      });
  add("triu", 1, false,
      [](Args a, const EvalOptions&) {
        Eigen::MatrixXd m = as_square("triu", a[0]);
        m.triangularView<Eigen::StrictlyLower>().setZero();
        return Value::matrix(std::move(m));
      },
      [](Shapes s) { return require_square("triu", s[0]); });
  add("transpose", 1, false,
      [](Args a, const EvalOptions&) -> Value {
        if (a[0].is_scalar()) return a[0];
        if (a[0].is_vector()) return Value::matrix(a[0].as_vector().transpose());
        return Value::matrix(a[0].as_matrix().transpose());
      },
      [](Shapes s) -> Shape {
        if (s[0].kind == ShapeKind::Scalar) return s[0];
        if (s[0].kind == ShapeKind::Vector) return Shape::matrix(1, s[0].rows);
        if (s[0].kind != ShapeKind::Matrix) shape_fail("transpose", "numeric argument required");
        return Shape::matrix(s[0].cols, s[0].rows);
      });
  add("entry", 3, false,
      [](Args a, const EvalOptions&) -> Value {
        const int i = integer_index("entry", a[1]);
        const int j = integer_index("entry", a[2]);
        if (a[0].is_vector()) {
          if (j != 0 || i >= a[0].as_vector().size()) throw DomainError("entry: index out of range");
          return Value(a[0].as_vector()(i));
        }
        const auto& m = a[0].as_matrix();
        if (i >= m.rows() || j >= m.cols()) throw DomainError("entry: index out of range");
        return Value(m(i, j));
      },
      [](Shapes s) {
        if (s[0].kind != ShapeKind::Matrix && s[0].kind != ShapeKind::Vector)
          shape_fail("entry", "matrix or vector argument required");
        require_scalar("entry", s[1]);
        require_scalar("entry", s[2]);
        return Shape::scalar();
      });
  add("block", 4, false,
      [](Args a, const EvalOptions&) {
        auto m = [](const Value& v) {
          return v.is_scalar() ? Eigen::MatrixXd::Constant(1, 1, v.as_scalar()) : v.as_matrix();
        };
        const Eigen::MatrixXd a11 = m(a[0]), a12 = m(a[1]), a21 = m(a[2]), a22 = m(a[3]);
        if (a11.rows() != a12.rows() || a21.rows() != a22.rows() || a11.cols() != a21.cols() ||
            a12.cols() != a22.cols())
          throw ShapeError("block: incompatible block sizes");
        Eigen::MatrixXd out(a11.rows() + a21.rows(), a11.cols() + a12.cols());
        out << a11, a12, a21, a22;
        return Value::matrix(std::move(out));
      },
      [](Shapes s) {
        auto dims = [](const Shape& x) -> std::pair<int, int> {
          if (x.kind == ShapeKind::Scalar) return {1, 1};
          if (x.kind != ShapeKind::Matrix) shape_fail("block", "matrix blocks required");
          return {x.rows, x.cols};
        };
        auto [r11, c11] = dims(s[0]);
        auto [r12, c12] = dims(s[1]);
        auto [r21, c21] = dims(s[2]);
        auto [r22, c22] = dims(s[3]);
        if (r11 != r12 || r21 != r22 || c11 != c21 || c12 != c22)
          shape_fail("block", "incompatible block sizes");
        return Shape::matrix(r11 + r21, c11 + c12);
      });
  add("vec", -1, false,
      [](Args a, const EvalOptions&) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
        for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].as_scalar();
        return Value::vector(std::move(v));
      },
      [](Shapes s) {
        for (const auto& x : s) require_scalar("vec", x);
        return Shape::vector(static_cast<int>(s.size()));
      });

  // --- matrix functions ---------------------------------------------------
  add("logdet", 1, false,
      [](Args a, const EvalOptions&) {
        const Eigen::MatrixXd m = as_square("logdet", a[0]);
        Eigen::LLT<Eigen::MatrixXd> llt(m);
        if (!m.isApprox(m.transpose(), 1e-12) || llt.info() != Eigen::Success)
          throw DomainError("logdet of a matrix that is not positive definite");
        const Eigen::MatrixXd l = llt.matrixL();
        return Value(2.0 * l.diagonal().array().log().sum());
      },
      [](Shapes s) {
        require_square("logdet", s[0]);
        return Shape::scalar();
      });
  add("det", 1, false,
      [](Args a, const EvalOptions&) { return Value(as_square("det", a[0]).determinant()); },
      [](Shapes s) {
        require_square("det", s[0]);
        return Shape::scalar();
      });
  add("inv", 1, false,
      [](Args a, const EvalOptions&) {
        const Eigen::MatrixXd m = as_square("inv", a[0]);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
        if (!lu.isInvertible()) throw DomainError("inv of a singular matrix");
        return Value::matrix(lu.inverse());
      },
      [](Shapes s) { return require_square("inv", s[0]); });
  add("cholScaled", 1, false,
      [](Args a, const EvalOptions&) { return Value::matrix(chol_scaled(as_square("cholScaled", a[0]))); },
      [](Shapes s) { return require_square("cholScaled", s[0]); });
  add("gaussianPdf", 2, false,
      [](Args a, const EvalOptions&) {
        const Eigen::MatrixXd r = as_square("gaussianPdf", a[0]);
        const Eigen::VectorXd y = a[1].is_scalar() ? Eigen::VectorXd::Constant(1, a[1].as_scalar())
                                                   : a[1].as_vector();
        if (y.size() != r.rows()) throw ShapeError("gaussianPdf: dimension mismatch");
        Eigen::LLT<Eigen::MatrixXd> llt(r);
        if (llt.info() != Eigen::Success)
          throw DomainError("gaussianPdf: covariance not positive definite");
        const Eigen::MatrixXd l = llt.matrixL();
        const double logdet = 2.0 * l.diagonal().array().log().sum();
        const double quad = y.dot(llt.solve(y));
        const double n = static_cast<double>(y.size());
        return Value(std::exp(-0.5 * n * std::log(2 * std::numbers::pi) - 0.5 * logdet - 0.5 * quad));
      },
      [](Shapes s) {
        require_square("gaussianPdf", s[0]);
        return Shape::scalar();
      });

  // --- predicates ---------------------------------------------------------
  add("posDef", 1, true,
      [](Args a, const EvalOptions&) {
        return Value::boolean(is_positive_definite(as_square("posDef", a[0])));
      },
      [](Shapes s) {
        require_square("posDef", s[0]);
        return Shape::boolean();
      });
  add("eq", 2, true,
      [](Args a, const EvalOptions& o) {
        return all_entries("eq", a, [&](std::span<const double> x) { return std::abs(x[0] - x[1]) <= o.feas_tol; });
      },
      [](Shapes s) { return predicate_broadcast("eq", s); });
  add("le", 2, true,
      [](Args a, const EvalOptions& o) {
        return all_entries("le", a, [&](std::span<const double> x) { return x[0] <= x[1] + o.feas_tol; });
      },
      [](Shapes s) { return predicate_broadcast("le", s); });
  add("lt", 2, true,
      [](Args a, const EvalOptions&) {
        return all_entries("lt", a, [](std::span<const double> x) { return x[0] < x[1]; });
      },
      [](Shapes s) { return predicate_broadcast("lt", s); });
  add("zeroCone", 1, true,
      [](Args a, const EvalOptions& o) {
        return all_entries("zeroCone", a, [&](std::span<const double> x) { return std::abs(x[0]) <= o.feas_tol; });
      },
      [](Shapes s) { return predicate_broadcast("zeroCone", s); });
  add("posOrthCone", 1, true,
      [](Args a, const EvalOptions& o) {
        return all_entries("posOrthCone", a, [&](std::span<const double> x) { return x[0] >= -o.feas_tol; });
      },
      [](Shapes s) { return predicate_broadcast("posOrthCone", s); });
  add("soCone", 2, true,
      [](Args a, const EvalOptions& o) {
        const auto x = flat(a[1]);
        return Value::boolean(in_second_order_cone(a[0].as_scalar(), x, o.feas_tol));
      },
      [](Shapes s) {
        require_scalar("soCone", s[0]);
        if (s[1].kind != ShapeKind::Vector) shape_fail("soCone", "vector second argument required");
        return Shape::boolean();
      });
  add("rotatedSoCone", 3, true,
      [](Args a, const EvalOptions& o) {
        const auto x = flat(a[2]);
        return Value::boolean(in_rotated_cone(a[0].as_scalar(), a[1].as_scalar(), x, o.feas_tol));
      },
      [](Shapes s) {
        require_scalar("rotatedSoCone", s[0]);
        require_scalar("rotatedSoCone", s[1]);
        if (s[2].kind != ShapeKind::Vector) shape_fail("rotatedSoCone", "vector third argument required");
        return Shape::boolean();
      });
  add("expCone", 3, true,
      [](Args a, const EvalOptions& o) {
        return all_entries("expCone", a, [&](std::span<const double> x) {
          return in_exp_cone(x[0], x[1], x[2], o.feas_tol);
        });
      },
      [](Shapes s) { return predicate_broadcast("expCone", s); });
  add("psdCone", 1, true,
      [](Args a, const EvalOptions& o) { return Value::boolean(is_psd(as_square("psdCone", a[0]), o.feas_tol)); },
      [](Shapes s) {
        require_square("psdCone", s[0]);
        return Shape::boolean();
      });
  return t;
}

}  // namespace

const std::vector<FunctionInfo>& function_table() {
  static const std::vector<FunctionInfo> table = build_table();
  return table;
}

const FunctionInfo* find_function(std::string_view name) {
  for (const auto& f : function_table())
    if (f.name == name) return &f;
  return nullptr;
}

}  // namespace cvxc
