#include "cvxc/sampling.hpp"

#include "cvxc/errors.hpp"

namespace cvxc {

const Box& SampleConfig::box_for(std::string_view name) const {
  auto it = boxes.find(name);
  return it == boxes.end() ? box : it->second;
}

void SampleConfig::check() const {
  if (samples < 1) throw Error("sample count must be at least 1");
  if (!(box.lo < box.hi)) throw Error("sampling box needs lo < hi");
  for (const auto& [name, b] : boxes)
    if (!(b.lo < b.hi)) throw Error("sampling box for " + name + " needs lo < hi");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng stream_rng(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Eigen::MatrixXd sample_positive_definite(int n, Rng& rng) {
  Eigen::MatrixXd l(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) l(i, j) = uniform(rng, -2, 2);
  Eigen::MatrixXd m = l * l.transpose() + 1e-3 * Eigen::MatrixXd::Identity(n, n);
  return (m + m.transpose()) / 2;  // exact symmetry
}

Value sample_value(const Shape& s, const Box& b, Rng& rng) {
  switch (s.kind) {
    case ShapeKind::Scalar:
      return uniform(rng, b.lo, b.hi);
    case ShapeKind::Vector: {
      Eigen::VectorXd v(s.rows);
      for (int i = 0; i < s.rows; ++i) v(i) = uniform(rng, b.lo, b.hi);
      return Value::vector(std::move(v));
    }
    case ShapeKind::Matrix: {
      if (s.rows == s.cols && uniform(rng, 0, 1) < 0.5) return Value::matrix(sample_positive_definite(s.rows, rng));
      Eigen::MatrixXd m(s.rows, s.cols);
      for (int i = 0; i < s.rows; ++i)
        for (int j = 0; j < s.cols; ++j) {
          if (s.rows == s.cols && j < i)
            m(i, j) = m(j, i);
          else
            m(i, j) = uniform(rng, b.lo, b.hi);
        }
      return Value::matrix(std::move(m));
    }
    case ShapeKind::Boolean:
      return Value::boolean(uniform(rng, 0, 1) < 0.5);
  }
  return 0.0;
}

}  // namespace cvxc
