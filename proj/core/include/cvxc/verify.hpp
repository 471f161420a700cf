#pragma once

#include "cvxc/canon.hpp"
#include "cvxc/problem.hpp"
#include "cvxc/sampling.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cvxc {

struct SampleSet {
  std::vector<Assignment> points;
  std::size_t wanted = 0;
  std::int64_t attempts = 0;

  bool exhausted() const { return points.size() < wanted; }
  /// Throws SamplerExhausted when fewer than `wanted` points were found.
  const SampleSet& require() const;
};

/// Candidate point generator used alongside uniform sampling.
using Proposal = std::function<std::optional<Assignment>(Rng&)>;

/// Draws up to `cfg.samples` feasible points of `p` (parameters bound).
///
/// Candidates are uniform in the per-variable boxes (or come from
/// `proposal` on every other attempt) and are projected onto the affine
/// equality constraints. A candidate is kept when the projected equalities
/// hold to 1e-9 and every other constraint holds exactly. Deterministic
/// given the seed.
SampleSet sample_feasible(const Problem& p, const SampleConfig& cfg, const Proposal& proposal = {});

enum class Verdict { Pass, Fail, Inconclusive };
std::string_view to_string(Verdict v);

struct EquivWitness {
  Assignment point;  // sample in the domain of the checked map
  Assignment image;  // its image, or the second point of an order comparison
  double violation = 0;
  std::string detail;
};

struct ClauseResult {
  std::string name;
  Verdict verdict = Verdict::Pass;
  int checked = 0;
  double worst = 0;
  std::optional<EquivWitness> witness;  // set iff verdict == Fail
};

struct EquivReport {
  std::vector<ClauseResult> clauses;
  std::size_t p_samples = 0;
  std::size_t q_samples = 0;
  std::size_t wanted = 0;
  bool monotone = false;  // objective clauses compare orderings only

  Verdict verdict() const;
  const ClauseResult* clause(std::string_view name) const;
};

struct EquivOptions {
  double tol = 1e-8;       // objective comparisons, relative to max(1, |value|)
  double feas_tol = 1e-6;  // constraint membership of mapped points
  /// Compare objective orderings over sample pairs instead of values; for
  /// reductions that also apply a strictly increasing objective transform.
  bool monotone = false;
};

using PointMap = std::function<Assignment(const Assignment&)>;

/// Checks the strong-equivalence clauses over sampled feasible points:
/// forward-feasibility, forward-objective (g(phi(x)) <= f(x)),
/// backward-feasibility and backward-objective (f(psi(y)) <= g(y)).
/// Objectives are compared in minimization sense. Feasible points of `q`
/// are also proposed from perturbed images of `p`'s samples.
EquivReport check_strong_equivalence(const Problem& p, const Problem& q, const PointMap& phi, const PointMap& psi,
                                     const SampleConfig& cfg, const EquivOptions& opt = {});

/// As above for a compiler reduction, adding objective-equality
/// (|g(phi(x)) - f(x)| <= tol), roundtrip-identity (psi(phi(x)) == x
/// exactly) and node-relation (each tree node's reduced expression bounds
/// its original expression in the direction of its role).
EquivReport check_reduction(const Canonicalized& c, const SampleConfig& cfg, const EquivOptions& opt = {});

/// User-supplied maps. Text format, one definition per line:
///
///     phi u := x + y      -- a variable of Q in terms of P's variables
///     psi x := u - v      -- a variable of P in terms of Q's variables
///     mode monotone       -- optional
///
/// Throws MapMismatch unless phi defines exactly Q's variables and psi
/// exactly P's, with matching shapes.
struct UserMaps {
  std::vector<std::pair<std::string, Expr>> phi;
  std::vector<std::pair<std::string, Expr>> psi;
  bool monotone = false;
};

UserMaps parse_user_maps(std::string_view text, const Problem& p, const Problem& q);

/// Parses both problems and the maps, then runs check_strong_equivalence.
EquivReport check_user_reduction(std::string_view p_text, std::string_view q_text, std::string_view maps_text,
                                 const SampleConfig& cfg, const EquivOptions& opt = {});

struct BruteForceResult {
  double value = 0;  // objective in the problem's own sense
  Assignment argmin;
  std::int64_t evaluated = 0;
  std::int64_t feasible = 0;
  std::vector<double> steps;  // grid step of each gridded coordinate
};

/// Exhaustive grid search. Affine equality constraints are solved for their
/// pivot coordinates; the remaining coordinates take `grid_per_dim` evenly
/// spaced values in their boxes. Points outside the boxes or violating a
/// constraint by more than `feas_tol` are skipped; ties go to the lowest
/// grid index. Throws Infeasible, or Error when the grid exceeds 1e8 points.
BruteForceResult brute_force_optimum(const Problem& p, int grid_per_dim, const Box& box = {},
                                     const std::map<std::string, Box, std::less<>>& boxes = {},
                                     double feas_tol = 1e-6);

/// Text report, one line per clause.
std::string format_equiv_report(const EquivReport& r);

}  // namespace cvxc
