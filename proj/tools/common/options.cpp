#include "options.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace cvxc::tools {

namespace {

std::pair<std::string, std::string> split_assignment(const std::string& text, const char* what) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError(std::string("expected name=value for ") + what + ": '" + text + "'");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

double to_number(const std::string& s, const std::string& context) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) throw UsageError("not a finite number in " + context + ": '" + s + "'");
  return v;
}

}  // namespace

std::pair<std::string, Value> parse_param(const std::string& text) {
  auto [name, rhs] = split_assignment(text, "--param");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(rhs);
  } catch (const nlohmann::json::exception&) {
    throw UsageError("cannot read value of parameter '" + name + "': '" + rhs + "'");
  }
  if (j.is_number()) return {name, Value(j.get<double>())};
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw UsageError("parameter '" + name + "' must be a number or a matrix");
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(n, static_cast<Eigen::Index>(j[0].size()));
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m.cols())
      throw UsageError("parameter '" + name + "': ragged matrix");
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (!row[static_cast<std::size_t>(c)].is_number()) throw UsageError("parameter '" + name + "': non-numeric entry");
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return {name, Value::matrix(std::move(m))};
}

ParamMap parse_params(const std::vector<std::string>& texts) {
  ParamMap out;
  for (const auto& t : texts) {
    auto [name, v] = parse_param(t);
    if (!out.emplace(name, std::move(v)).second) throw UsageError("parameter '" + name + "' given twice");
  }
  return out;
}

std::pair<std::string, Box> parse_box(const std::string& text) {
  auto [name, rhs] = split_assignment(text, "--box");
  const auto colon = rhs.find(':');
  if (colon == std::string::npos) throw UsageError("expected name=lo:hi for --box: '" + text + "'");
  Box b{to_number(rhs.substr(0, colon), "--box"), to_number(rhs.substr(colon + 1), "--box")};
  if (!(b.lo < b.hi)) throw UsageError("empty box for '" + name + "'");
  return {name, b};
}

void apply_boxes(const std::vector<std::string>& texts, Box& fallback, std::map<std::string, Box, std::less<>>& boxes) {
  for (const auto& t : texts) {
    auto [name, b] = parse_box(t);
    if (name == "*") fallback = b;
    else boxes[name] = b;
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw UsageError("cannot write '" + path + "'");
}

}  // namespace cvxc::tools
