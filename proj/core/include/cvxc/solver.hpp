#pragma once

#include "cvxc/canon.hpp"
#include "cvxc/cbf.hpp"
#include "cvxc/problem.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cvxc {

struct SolverConfig {
  /// Command template; `{input}` and `{output}` are replaced by the CBF and
  /// solution file paths. Words split on whitespace, with '...' and "..."
  /// quoting. Defaults to $CVXC_SOLVER_CMD when empty.
  std::string command;
  double timeout_seconds = 60;
  /// Scratch directory parent; defaults to $CVXC_TMPDIR, then the system
  /// temporary directory.
  std::string tmpdir;
  bool keep_files = false;
};

/// Splits a command template into words and substitutes the file paths.
std::vector<std::string> expand_command(const std::string& command, const std::string& input,
                                        const std::string& output);

/// Runs the solver on `input` and returns the contents of the solution file
/// it writes to `output`. Throws SolverNotFound, SolverTimeout,
/// SolverNonzeroExit, or SolverError when no solution file appears.
std::string invoke_solver(const SolverConfig& cfg, const std::string& input, const std::string& output);

/// Statuses after which no point is read back.
bool status_has_solution(const std::string& status);

struct SolveResult {
  std::string status;
  Canonicalized canon;
  CbfDocument cbf;
  std::optional<Assignment> reduced;   // point of the reduced problem
  std::optional<Assignment> original;  // backward image
  double value = 0;                    // original objective at `original`
  double reduced_value = 0;            // reduced objective at `reduced`
  double original_residual = 0;        // largest constraint violation
  double reduced_residual = 0;
};

/// canonicalize -> write CBF -> run solver -> parse -> map back. Errors are
/// rethrown as PipelineError tagged with the failing stage: "canonicalize",
/// "write-cbf", "invoke-solver", "parse-solution" or "map-back".
SolveResult solve(const Problem& p, const SolverConfig& cfg,
                  const std::map<std::string, Value, std::less<>>& params = {},
                  const AtomRegistry& registry = default_registry());

}  // namespace cvxc
