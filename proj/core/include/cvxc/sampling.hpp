#pragma once

#include "cvxc/value.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>

namespace cvxc {

struct Box {
  double lo = -10;
  double hi = 10;
};

/// Random sampling parameters shared by the obligation checker and the
/// equivalence checker.
struct SampleConfig {
  Box box;                                      // default for every scalar coordinate
  std::map<std::string, Box, std::less<>> boxes;  // per-variable overrides
  int samples = 1000;
  std::uint64_t seed = 0;
  std::int64_t max_attempts = 100000;
  int dim = 2;  // value of atom dimension variables when checking obligations

  const Box& box_for(std::string_view name) const;
  /// Throws Error unless every box has lo < hi and samples >= 1.
  void check() const;
};

using Rng = std::mt19937_64;

/// Independent generator for sample `index`; results do not depend on the
/// order in which samples are drawn.
Rng stream_rng(std::uint64_t seed, std::uint64_t index);

double uniform(Rng& rng, double lo, double hi);

/// Uniform entries in the box. Square matrices are symmetric; half of them
/// are drawn as L*L^T + 1e-3*I with L entries in [-2, 2] instead.
Value sample_value(const Shape& s, const Box& b, Rng& rng);

/// L*L^T + 1e-3*I with L entries uniform in [-2, 2].
Eigen::MatrixXd sample_positive_definite(int n, Rng& rng);

}  // namespace cvxc
