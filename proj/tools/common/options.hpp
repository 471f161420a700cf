#pragma once

#include "cvxc/sampling.hpp"
#include "cvxc/value.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cvxc::tools {

/// Bad command-line input (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ParamMap = std::map<std::string, Value, std::less<>>;

/// `name=value`, where value is a number or a JSON array of arrays (matrix).
std::pair<std::string, Value> parse_param(const std::string& text);
ParamMap parse_params(const std::vector<std::string>& texts);

/// `name=lo:hi`; the name `*` sets the default box.
std::pair<std::string, Box> parse_box(const std::string& text);
void apply_boxes(const std::vector<std::string>& texts, Box& fallback, std::map<std::string, Box, std::less<>>& boxes);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace cvxc::tools
