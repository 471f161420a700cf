#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvxc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class UnknownName : public Error {
 public:
  explicit UnknownName(std::string name)
      : Error("unknown name '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// A numeric function was applied outside its domain (log of a non-positive
/// value, sqrt of a negative value, ...). `path()` locates the offending node
/// as dotted child indices from the root of the evaluated expression.
class DomainError : public Error {
 public:
  DomainError(std::string message, std::string path = {}, std::string subexpr = {})
      : Error(compose(message, path, subexpr)),
        reason_(std::move(message)),
        path_(std::move(path)),
        subexpr_(std::move(subexpr)) {}

  const std::string& reason() const { return reason_; }
  const std::string& path() const { return path_; }
  const std::string& subexpression() const { return subexpr_; }

 private:
  static std::string compose(const std::string& m, const std::string& p, const std::string& s) {
    std::string out = m;
    if (!p.empty()) out += " at " + p;
    if (!s.empty()) out += " (" + s + ")";
    return out;
  }
  std::string reason_;
  std::string path_;
  std::string subexpr_;
};

/// Location in DSL source text. Lines and columns are 1-based.
struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 0;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& kind, const std::string& message, SourceSpan span)
      : Error(kind + " at " + std::to_string(span.line) + ":" + std::to_string(span.column) +
              ": " + message),
        span_(span) {}
  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

class SyntaxError : public ParseError {
 public:
  SyntaxError(SourceSpan span, std::vector<std::string> expected, const std::string& found)
      : ParseError("SyntaxError", describe(expected, found), span), expected_(std::move(expected)) {}
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  static std::string describe(const std::vector<std::string>& expected, const std::string& found) {
    std::string out = "expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) out += i + 1 == expected.size() ? " or " : ", ";
      out += expected[i];
    }
    return out + ", found " + found;
  }
  std::vector<std::string> expected_;
};

class UnknownIdentifier : public ParseError {
 public:
  UnknownIdentifier(SourceSpan span, const std::string& name)
      : ParseError("UnknownIdentifier", "'" + name + "'", span), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class ArityMismatch : public ParseError {
 public:
  ArityMismatch(SourceSpan span, const std::string& fn, int expected, int found)
      : ParseError("ArityMismatch", "'" + fn + "' takes " + std::to_string(expected) +
                                        " argument(s), found " + std::to_string(found),
                   span) {}
};

/// Semantic problems detected after parsing (duplicate names, assumptions
/// mentioning optimization variables, shape mismatches).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DuplicateAtom : public Error {
 public:
  explicit DuplicateAtom(const std::string& name) : Error("DuplicateAtom: '" + name + "'") {}
};

class MalformedGraphImplementation : public Error {
 public:
  MalformedGraphImplementation(const std::string& atom, const std::string& why)
      : Error("MalformedGraphImplementation in '" + atom + "': " + why) {}
};

class NotDcp : public Error {
 public:
  NotDcp(std::string component, std::string path, std::string reason, std::string detail)
      : Error("NotDCP [" + reason + "] at " + path + ": " + detail),
        component_(std::move(component)),
        path_(std::move(path)),
        reason_(std::move(reason)) {}
  const std::string& component() const { return component_; }
  const std::string& path() const { return path_; }
  /// One of "curvature-mismatch", "non-affine-leaf", "unmatched-atom".
  const std::string& reason() const { return reason_; }

 private:
  std::string component_;
  std::string path_;
  std::string reason_;
};

class UndischargedCondition : public Error {
 public:
  UndischargedCondition(std::string path, std::string condition)
      : Error("UndischargedCondition at " + path + ": " + condition),
        path_(std::move(path)),
        condition_(std::move(condition)) {}
  const std::string& path() const { return path_; }
  const std::string& condition() const { return condition_; }

 private:
  std::string path_;
  std::string condition_;
};

class StrictConstraintSurvives : public Error {
 public:
  explicit StrictConstraintSurvives(const std::string& name)
      : Error("StrictConstraintSurvives: '" + name +
              "' is a strict inequality that no atom consumes as a condition") {}
};

class UnboundParameter : public Error {
 public:
  explicit UnboundParameter(const std::string& name)
      : Error("parameter '" + name + "' must be bound to a numeric value") {}
};

class SamplerExhausted : public Error {
 public:
  SamplerExhausted(std::size_t found, std::size_t wanted)
      : Error("SamplerExhausted: found " + std::to_string(found) + " of " +
              std::to_string(wanted) + " samples"),
        found_(found),
        wanted_(wanted) {}
  std::size_t found() const { return found_; }
  std::size_t wanted() const { return wanted_; }

 private:
  std::size_t found_;
  std::size_t wanted_;
};

class Infeasible : public Error {
 public:
  Infeasible() : Error("Infeasible: no grid point satisfies the constraints") {}
};

class NonConicProblem : public Error {
 public:
  using Error::Error;
};

class MapMismatch : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class SolverNotFound : public SolverError {
 public:
  explicit SolverNotFound(const std::string& command)
      : SolverError("SolverNotFound: could not execute '" + command + "'") {}
};

class SolverTimeout : public SolverError {
 public:
  SolverTimeout(const std::string& command, double seconds)
      : SolverError("SolverTimeout: '" + command + "' exceeded " + std::to_string(seconds) + " s") {}
};

class SolverNonzeroExit : public SolverError {
 public:
  SolverNonzeroExit(int code, std::string stderr_excerpt)
      : SolverError("SolverNonzeroExit(" + std::to_string(code) + "): " + stderr_excerpt),
        code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

class MalformedSolution : public Error {
 public:
  MalformedSolution(int line, const std::string& why)
      : Error("MalformedSolution at line " + std::to_string(line) + ": " + why), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class MissingVariable : public Error {
 public:
  explicit MissingVariable(const std::string& name)
      : Error("MissingVariable: no value for '" + name + "'") {}
};

/// Wraps an error raised inside the solve pipeline with the stage name.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace cvxc
