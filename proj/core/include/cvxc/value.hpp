#pragma once

#include <Eigen/Dense>

#include <string>
#include <variant>

namespace cvxc {

enum class ShapeKind { Scalar, Vector, Matrix, Boolean };

/// Static shape of an expression value.
struct Shape {
  ShapeKind kind = ShapeKind::Scalar;
  int rows = 1;
  int cols = 1;

  static Shape scalar() { return {}; }
  static Shape vector(int n) { return {ShapeKind::Vector, n, 1}; }
  static Shape matrix(int r, int c) { return {ShapeKind::Matrix, r, c}; }
  static Shape boolean() { return {ShapeKind::Boolean, 1, 1}; }

  bool is_numeric() const { return kind != ShapeKind::Boolean; }
  /// Number of scalar entries (row-major for matrices).
  int size() const { return rows * cols; }

  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

/// A runtime value: scalar, vector, dense matrix, or truth value.
class Value {
 public:
  Value() : data_(0.0) {}
  Value(double d) : data_(d) {}  // NOLINT(google-explicit-constructor)

  static Value scalar(double d) { return Value(d); }
  static Value vector(Eigen::VectorXd v);
  static Value matrix(Eigen::MatrixXd m);
  static Value boolean(bool b);

  ShapeKind kind() const;
  Shape shape() const;

  bool is_scalar() const { return std::holds_alternative<double>(data_); }
  bool is_vector() const { return std::holds_alternative<Eigen::VectorXd>(data_); }
  bool is_matrix() const { return std::holds_alternative<Eigen::MatrixXd>(data_); }
  bool is_boolean() const { return std::holds_alternative<bool>(data_); }

  double as_scalar() const;
  const Eigen::VectorXd& as_vector() const;
  const Eigen::MatrixXd& as_matrix() const;
  bool truth() const;

  /// Number of numeric entries (1 for scalars and booleans).
  int size() const;
  /// Flat row-major access to numeric entries.
  double entry(int k) const;
  bool all_finite() const;

  /// Exact (bitwise-value) equality; shapes must agree.
  friend bool operator==(const Value& a, const Value& b);

 private:
  std::variant<double, Eigen::VectorXd, Eigen::MatrixXd, bool> data_;
};

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double d);

/// Human-readable rendering, e.g. `1.5`, `[1, 2]`, `[[1, 0], [0, 1]]`, `true`.
std::string format_value(const Value& v);

}  // namespace cvxc
