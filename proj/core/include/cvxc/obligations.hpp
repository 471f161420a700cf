#pragma once

#include "cvxc/atoms.hpp"
#include "cvxc/problem.hpp"
#include "cvxc/sampling.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace cvxc {

/// The four properties an atom's graph implementation must have.
enum class Obligation { SolutionCorrectness, SolutionFeasibility, Optimality, ConditionElimination };

inline constexpr std::array<Obligation, 4> kObligations = {Obligation::SolutionCorrectness,
                                                           Obligation::SolutionFeasibility, Obligation::Optimality,
                                                           Obligation::ConditionElimination};

std::string_view to_string(Obligation o);

/// Point at which an obligation failed. `impl` holds the implementation
/// variables (the atom's solution for the first two obligations). For
/// affine atoms, `direction` says which side of the optimality check failed.
struct ObligationWitness {
  Assignment args;
  Assignment impl;
  Assignment args_prime;
  std::optional<Curvature> direction;
  double violation = 0;
};

struct ObligationResult {
  Obligation kind = Obligation::SolutionCorrectness;
  bool pass = true;
  int samples = 0;  // points at which the property was evaluated
  double worst = 0;
  std::optional<ObligationWitness> witness;  // set iff !pass

  bool vacuous() const { return samples == 0; }
};

struct ObligationReport {
  std::string atom;
  std::array<ObligationResult, 4> results;

  bool pass() const;
  const ObligationResult& operator[](Obligation o) const { return results[static_cast<std::size_t>(o)]; }
};

struct ObligationTolerances {
  double tol = 1e-7;       // relative, for value comparisons
  double feas_tol = 1e-6;  // for implementation constraints at the solution
};

/// Samples argument tuples and checks each obligation numerically.
///
/// Correctness and feasibility use argument tuples satisfying the atom's
/// conditions. Optimality and condition elimination use pairs of arguments
/// and implementation variables satisfying the implementation constraints
/// exactly, with the arguments moved in the direction allowed by their
/// monotonicity. Throws SamplerExhausted only when no condition-satisfying
/// arguments are found; mathematical failures are reported.
ObligationReport check_atom_obligations(const AtomDecl& d, const SampleConfig& cfg,
                                        const ObligationTolerances& tol = {});

/// Recomputes the violation recorded in a witness.
double replay_witness(const AtomDecl& d, Obligation o, const ObligationWitness& w,
                      const ObligationTolerances& tol = {});

/// One line per obligation: `sqrt solution-correctness pass samples=1000 worst=0`.
std::string format_obligation_report(const ObligationReport& r);

}  // namespace cvxc
