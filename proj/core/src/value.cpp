#include "cvxc/value.hpp"

#include "cvxc/errors.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace cvxc {

std::string to_string(const Shape& s) {
  switch (s.kind) {
    case ShapeKind::Scalar:
      return "scalar";
    case ShapeKind::Vector:
      return "vector " + std::to_string(s.rows);
    case ShapeKind::Matrix:
      return "matrix " + std::to_string(s.rows) + "x" + std::to_string(s.cols);
    case ShapeKind::Boolean:
      return "bool";
  }
  return "?";
}

Value Value::vector(Eigen::VectorXd v) {
  Value out;
  out.data_ = std::move(v);
  return out;
}

Value Value::matrix(Eigen::MatrixXd m) {
  Value out;
  out.data_ = std::move(m);
  return out;
}

Value Value::boolean(bool b) {
  Value out;
  out.data_ = b;
  return out;
}

ShapeKind Value::kind() const {
  switch (data_.index()) {
    case 0:
      return ShapeKind::Scalar;
    case 1:
      return ShapeKind::Vector;
    case 2:
      return ShapeKind::Matrix;
    default:
      return ShapeKind::Boolean;
  }
}

Shape Value::shape() const {
  if (is_vector()) return Shape::vector(static_cast<int>(as_vector().size()));
  if (is_matrix()) {
    const auto& m = as_matrix();
    return Shape::matrix(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  }
  if (is_boolean()) return Shape::boolean();
  return Shape::scalar();
}

double Value::as_scalar() const {
  if (const auto* d = std::get_if<double>(&data_)) return *d;
  throw ShapeError("expected a scalar, got " + to_string(shape()));
}

const Eigen::VectorXd& Value::as_vector() const {
  if (const auto* v = std::get_if<Eigen::VectorXd>(&data_)) return *v;
  throw ShapeError("expected a vector, got " + to_string(shape()));
}

const Eigen::MatrixXd& Value::as_matrix() const {
  if (const auto* m = std::get_if<Eigen::MatrixXd>(&data_)) return *m;
  throw ShapeError("expected a matrix, got " + to_string(shape()));
}

bool Value::truth() const {
  if (const auto* b = std::get_if<bool>(&data_)) return *b;
  throw ShapeError("expected a truth value, got " + to_string(shape()));
}

int Value::size() const {
  if (is_vector()) return static_cast<int>(as_vector().size());
  if (is_matrix()) return static_cast<int>(as_matrix().size());
  return 1;
}

double Value::entry(int k) const {
  if (is_scalar()) return as_scalar();
  if (is_vector()) return as_vector()(k);
  if (is_matrix()) {
    const auto& m = as_matrix();
    return m(k / m.cols(), k % m.cols());
  }
  throw ShapeError("truth values have no numeric entries");
}

bool Value::all_finite() const {
  if (is_boolean()) return true;
  if (is_scalar()) return std::isfinite(as_scalar());
  if (is_vector()) return as_vector().allFinite();
  return as_matrix().allFinite();
}

bool operator==(const Value& a, const Value& b) {
  if (a.data_.index() != b.data_.index()) return false;
  if (a.is_scalar()) return a.as_scalar() == b.as_scalar();
  if (a.is_boolean()) return a.truth() == b.truth();
  if (a.is_vector()) {
    const auto& x = a.as_vector();
    const auto& y = b.as_vector();
    return x.size() == y.size() && x == y;
  }
  const auto& x = a.as_matrix();
  const auto& y = b.as_matrix();
  return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
}

std::string format_double(double d) {
  if (d == 0.0) return "0";  // also folds -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
  if (ec != std::errc{}) return std::to_string(d);
  return {buf, ptr};
}

std::string format_value(const Value& v) {
  std::ostringstream os;
  switch (v.kind()) {
    case ShapeKind::Scalar:
      os << format_double(v.as_scalar());
      break;
    case ShapeKind::Boolean:
      os << (v.truth() ? "true" : "false");
      break;
    case ShapeKind::Vector: {
      const auto& x = v.as_vector();
      os << '[';
      for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << format_double(x(i));
      os << ']';
      break;
    }
    case ShapeKind::Matrix: {
      const auto& m = v.as_matrix();
      os << '[';
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        os << (i ? ", [" : "[");
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << format_double(m(i, j));
        os << ']';
      }
      os << ']';
      break;
    }
  }
  return os.str();
}

}  // namespace cvxc
