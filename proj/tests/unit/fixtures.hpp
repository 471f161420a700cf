#pragma once

#include <fstream>
#include <sstream>
#include <string>

#ifndef CVXC_FIXTURE_DIR
#error "CVXC_FIXTURE_DIR must be defined"
#endif

inline std::string fixture_path(const std::string& name) { return std::string(CVXC_FIXTURE_DIR) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline const char* kSo1 = R"(optimization (x y : ℝ)
  maximize sqrt (x - y)
  subject to
    c1 : y = 2*x - 3
    c2 : x^2 ≤ 2
    c3 : 0 ≤ x - y
)";
