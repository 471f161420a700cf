#include "cvxc/obligations.hpp"

#include "cvxc/errors.hpp"
#include "cvxc/eval.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace cvxc {

std::string_view to_string(Obligation o) {
  switch (o) {
    case Obligation::SolutionCorrectness:
      return "solution-correctness";
    case Obligation::SolutionFeasibility:
      return "solution-feasibility";
    case Obligation::Optimality:
      return "optimality";
    case Obligation::ConditionElimination:
      return "condition-elimination";
  }
  return "?";
}

bool ObligationReport::pass() const {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const EvalOptions kExact{0.0};

using Dims = std::map<std::string, int, std::less<>>;

bool holds_exact(const Expr& e, const Assignment& a) {
  try {
    return holds(e, a, kExact);
  } catch (const Error&) {
    return false;
  }
}

std::optional<Value> try_eval(const Expr& e, const Assignment& a) {
  try {
    return eval(e, a, kExact);
  } catch (const Error&) {
    return std::nullopt;
  }
}

/// Largest relative difference between two values of the same shape.
double rel_gap(const Value& got, const Value& want) {
  if (got.is_boolean() || want.is_boolean())
    return got.is_boolean() && want.is_boolean() && got.truth() == want.truth() ? 0 : 1;
  if (!(got.shape() == want.shape())) return kInf;
  double worst = 0;
  for (int k = 0; k < got.size(); ++k) {
    const double w = want.entry(k);
    worst = std::max(worst, std::abs(got.entry(k) - w) / std::max(1.0, std::abs(w)));
  }
  return worst;
}

/// How far `obj` falls on the wrong side of `bound`: convex atoms need
/// obj >= bound, concave ones obj <= bound. Truth values are compared as an
/// implication.
double one_sided_gap(const Value& obj, const Value& bound, Curvature dir) {
  if (obj.is_boolean() || bound.is_boolean()) {
    if (!obj.is_boolean() || !bound.is_boolean()) return kInf;
    const bool ok = dir == Curvature::Concave ? (!obj.truth() || bound.truth()) : (!bound.truth() || obj.truth());
    return ok ? 0 : 1;
  }
  if (!(obj.shape() == bound.shape())) return kInf;
  double worst = 0;
  for (int k = 0; k < obj.size(); ++k) {
    const double o = obj.entry(k), b = bound.entry(k);
    const double gap = dir == Curvature::Convex ? b - o : o - b;
    worst = std::max(worst, gap / std::max(1.0, std::abs(b)));
  }
  return std::isnan(worst) ? kInf : worst;
}

Value perturb(const Value& v, const std::function<double()>& step) {
  switch (v.kind()) {
    case ShapeKind::Scalar:
      return v.as_scalar() + step();
    case ShapeKind::Vector: {
      Eigen::VectorXd x = v.as_vector();
      for (auto& e : x) e += step();
      return Value::vector(std::move(x));
    }
    case ShapeKind::Matrix: {
      Eigen::MatrixXd m = v.as_matrix();
      const bool sym = m.rows() == m.cols();
      for (int i = 0; i < m.rows(); ++i)
        for (int j = sym ? i : 0; j < m.cols(); ++j) {
          m(i, j) += step();
          if (sym) m(j, i) = m(i, j);
        }
      return Value::matrix(std::move(m));
    }
    case ShapeKind::Boolean:
      break;
  }
  return v;
}

Value scale_value(const Value& v, double s) {
  switch (v.kind()) {
    case ShapeKind::Scalar:
      return s * v.as_scalar();
    case ShapeKind::Vector:
      return Value::vector(s * v.as_vector());
    case ShapeKind::Matrix:
      return Value::matrix(s * v.as_matrix());
    case ShapeKind::Boolean:
      break;
  }
  return v;
}

class Checker {
 public:
  Checker(const AtomDecl& d, const SampleConfig& cfg, const ObligationTolerances& tol)
      : d_(d), cfg_(cfg), tol_(tol) {
    for (const auto& a : d.args)
      if (!a.shape.dim_var.empty()) dims_[a.shape.dim_var] = cfg.dim;
    for (const auto& v : d.impl_vars)
      if (!v.shape.dim_var.empty()) dims_[v.shape.dim_var] = cfg.dim;
    for (const auto& a : d.args) arg_shapes_.push_back(to_shape(a.shape));
    for (const auto& v : d.impl_vars) impl_shapes_.push_back(to_shape(v.shape));
    // Auxiliary arguments fixed by an equation are pinned rather than
    // rejection-sampled.
    for (const auto& b : d.bconds) {
      if (!b.body.is_apply("eq")) continue;
      for (int side = 0; side < 2; ++side) {
        const Expr& lhs = b.body.arg(side);
        const Expr& rhs = b.body.arg(1 - side);
        if (lhs.is_var() && is_closed(rhs)) pinned_[lhs.name()] = eval(rhs, Assignment{});
      }
    }
  }

  ObligationReport run() {
    ObligationReport r;
    r.atom = d_.name;
    for (std::size_t k = 0; k < 4; ++k) r.results[k].kind = kObligations[k];
    solution_phase(r);
    pair_phase(r);
    return r;
  }

  static double correctness(const AtomDecl& d, const Assignment& args, const Assignment& full) {
    auto obj = try_eval(d.impl_objective, full);
    auto want = try_eval(d.expr, args);
    if (!obj || !want) return kInf;
    return rel_gap(*obj, *want);
  }

  static double feasibility(const AtomDecl& d, const Assignment& full) {
    double worst = 0;
    for (const auto& c : d.impl_constraints) worst = std::max(worst, violation(c.body, full));
    return worst;
  }

  static double optimality(const AtomDecl& d, const Assignment& full, const Assignment& moved, Curvature dir) {
    auto obj = try_eval(d.impl_objective, full);
    auto bound = try_eval(d.expr, moved);
    if (!obj || !bound) return kInf;
    return one_sided_gap(*obj, *bound, dir);
  }

  /// Returns (all conditions hold, largest measured violation).
  static std::pair<bool, double> conditions(const AtomDecl& d, const Assignment& moved) {
    bool ok = true;
    double worst = 0;
    for (const auto& v : d.vconds) {
      if (!holds_exact(v.body, moved)) ok = false;
      worst = std::max(worst, violation(v.body, moved));
    }
    return {ok, worst};
  }

 private:
  Shape to_shape(const ShapeSpec& s) const {
    Shape sh = s.resolve(dims_);
    return sh;
  }

  Assignment sample_args(Rng& rng) const {
    Assignment a;
    for (std::size_t i = 0; i < d_.args.size(); ++i) {
      const auto& arg = d_.args[i];
      if (auto it = pinned_.find(arg.name); it != pinned_.end())
        a.set(arg.name, it->second);
      else
        a.set(arg.name, sample_value(arg_shapes_[i], cfg_.box, rng));
    }
    if (d_.is_predicate() && !d_.args.empty()) {
      // Random points almost never lie on a lower-dimensional set such as
      // a = b, so a share of samples is placed there on purpose.
      const double r = uniform(rng, 0, 1);
      if (r < 0.25) {
        const Value first = a.at(d_.args[0].name);
        for (std::size_t i = 1; i < d_.args.size(); ++i)
          if (d_.args[i].mono != Monotonicity::Auxiliary && arg_shapes_[i] == arg_shapes_[0])
            a.set(d_.args[i].name, first);
      } else if (r < 0.5) {
        for (std::size_t i = 0; i < d_.args.size(); ++i)
          if (d_.args[i].mono != Monotonicity::Auxiliary)
            a.set(d_.args[i].name, zero_like(arg_shapes_[i]));
      }
    }
    return a;
  }

  static Value zero_like(const Shape& s) {
    switch (s.kind) {
      case ShapeKind::Vector:
        return Value::vector(Eigen::VectorXd::Zero(s.rows));
      case ShapeKind::Matrix:
        return Value::matrix(Eigen::MatrixXd::Zero(s.rows, s.cols));
      default:
        return 0.0;
    }
  }

  bool all_hold(const std::vector<NamedExpr>& conds, const Assignment& a) const {
    for (const auto& c : conds)
      if (!holds_exact(c.body, a)) return false;
    return true;
  }

  std::optional<Assignment> with_solution(const Assignment& args) const {
    Assignment full = args;
    for (std::size_t j = 0; j < d_.impl_vars.size(); ++j) {
      auto v = try_eval(d_.solution[j], args);
      if (!v) return std::nullopt;
      full.set(d_.impl_vars[j].name, *v);
    }
    return full;
  }

  static void record(ObligationResult& res, double viol, bool failed, const ObligationWitness& w) {
    ++res.samples;
    const double v = std::isnan(viol) ? kInf : viol;
    if (failed) {
      const double cur = res.pass ? 0 : res.witness->violation;
      const bool better = res.pass || (std::isfinite(v) ? (!std::isfinite(cur) || v > cur) : false);
      if (better) {
        res.witness = w;
        res.witness->violation = v;
      }
      res.pass = false;
    }
    res.worst = std::max(res.worst, v);
  }

  Assignment impl_part(const Assignment& full) const {
    Assignment impl;
    for (const auto& v : d_.impl_vars)
      if (auto* x = full.find(v.name)) impl.set(v.name, *x);
    return impl;
  }

  void solution_phase(ObligationReport& r) {
    auto& corr = r.results[0];
    auto& feas = r.results[1];
    std::int64_t found = 0;
    for (std::int64_t i = 0; i < cfg_.max_attempts && found < cfg_.samples; ++i) {
      Rng rng = stream_rng(cfg_.seed, static_cast<std::uint64_t>(i));
      Assignment args = sample_args(rng);
      if (!all_hold(d_.bconds, args) || !all_hold(d_.vconds, args)) continue;
      ++found;
      auto full = with_solution(args);
      ObligationWitness w{args, full ? impl_part(*full) : Assignment{}, {}, std::nullopt, 0};
      const double c = full ? correctness(d_, args, *full) : kInf;
      record(corr, c, !(c <= tol_.tol), w);
      const double f = full ? feasibility(d_, *full) : kInf;
      record(feas, f, !(f <= tol_.feas_tol), w);
    }
    if (found == 0) throw SamplerExhausted(0, static_cast<std::size_t>(cfg_.samples));
  }

  void pair_phase(ObligationReport& r) {
    static constexpr double kImplScales[] = {0, 1e-8, 1e-4, 1e-2, 1, 5};
    static constexpr double kArgScales[] = {1e-8, 1e-4, 1e-2, 1, 5};
    auto& opt = r.results[2];
    auto& elim = r.results[3];
    std::vector<Curvature> dirs;
    if (d_.curvature == Curvature::Affine)
      dirs = {Curvature::Convex, Curvature::Concave};
    else
      dirs = {d_.curvature};

    std::int64_t accepted = 0;
    for (std::int64_t i = 0; i < cfg_.max_attempts && accepted < cfg_.samples; ++i) {
      Rng rng = stream_rng(cfg_.seed, static_cast<std::uint64_t>(i) + (std::uint64_t{1} << 62));
      Assignment args = sample_args(rng);
      if (!all_hold(d_.bconds, args)) continue;

      // Proposals for the implementation variables: the solution with
      // noise, the solution at scaled arguments (often strictly feasible),
      // or uniform values. Only exactly feasible pairs are kept.
      Assignment full = args;
      const int mode = static_cast<int>(i % 3);
      if (mode == 0) {
        if (auto sol = with_solution(args)) {
          const double scale = kImplScales[std::uniform_int_distribution<int>(0, 5)(rng)];
          for (const auto& v : d_.impl_vars)
            full.set(v.name, perturb(sol->at(v.name), [&] { return scale * uniform(rng, -1, 1); }));
        }
      } else if (mode == 1) {
        const double s = uniform(rng, 0.5, 1.5);
        Assignment scaled = args;
        for (const auto& a : d_.args)
          if (a.mono != Monotonicity::Auxiliary) scaled.set(a.name, scale_value(args.at(a.name), s));
        if (auto sol = with_solution(scaled))
          for (const auto& v : d_.impl_vars) full.set(v.name, sol->at(v.name));
      } else {
        for (std::size_t j = 0; j < d_.impl_vars.size(); ++j)
          full.set(d_.impl_vars[j].name, sample_value(impl_shapes_[j], cfg_.box, rng));
      }
      bool complete = true;
      for (const auto& v : d_.impl_vars) complete = complete && full.contains(v.name);
      if (!complete || !all_hold(d_.impl_constraints, full)) continue;
      ++accepted;

      const double scale = kArgScales[std::uniform_int_distribution<int>(0, 4)(rng)];
      for (Curvature dir : dirs) {
        Assignment moved = args;
        for (const auto& a : d_.args) {
          int sign = 0;
          if (a.mono == Monotonicity::Increasing) sign = dir == Curvature::Convex ? -1 : 1;
          if (a.mono == Monotonicity::Decreasing) sign = dir == Curvature::Convex ? 1 : -1;
          if (sign == 0) continue;
          moved.set(a.name, perturb(args.at(a.name), [&] {
                      return uniform(rng, 0, 1) < 0.25 ? 0.0 : sign * scale * uniform(rng, 0, 1);
                    }));
        }
        ObligationWitness w{args, impl_part(full), moved, dir, 0};
        const double o = optimality(d_, full, moved, dir);
        record(opt, o, !(o <= tol_.tol), w);
        auto [ok, worst] = conditions(d_, moved);
        w.direction = std::nullopt;
        record(elim, worst, !ok, w);
      }
    }
  }

  const AtomDecl& d_;
  const SampleConfig& cfg_;
  ObligationTolerances tol_;
  Dims dims_;
  std::vector<Shape> arg_shapes_;
  std::vector<Shape> impl_shapes_;
  std::map<std::string, Value, std::less<>> pinned_;
};

Assignment merged(const Assignment& a, const Assignment& b) {
  Assignment out = a;
  for (const auto& [k, v] : b.values()) out.set(k, v);
  return out;
}

}  // namespace

ObligationReport check_atom_obligations(const AtomDecl& d, const SampleConfig& cfg, const ObligationTolerances& tol) {
  cfg.check();
  return Checker(d, cfg, tol).run();
}

double replay_witness(const AtomDecl& d, Obligation o, const ObligationWitness& w, const ObligationTolerances&) {
  const Assignment full = merged(w.args, w.impl);
  switch (o) {
    case Obligation::SolutionCorrectness:
      return Checker::correctness(d, w.args, full);
    case Obligation::SolutionFeasibility:
      return Checker::feasibility(d, full);
    case Obligation::Optimality:
      return Checker::optimality(d, full, w.args_prime, w.direction.value_or(d.curvature));
    case Obligation::ConditionElimination:
      return Checker::conditions(d, w.args_prime).second;
  }
  return 0;
}

std::string format_obligation_report(const ObligationReport& r) {
  std::ostringstream os;
  for (const auto& res : r.results) {
    os << r.atom << " " << to_string(res.kind) << " " << (res.pass ? "pass" : "FAIL") << " samples=" << res.samples
       << " worst=" << format_double(res.worst);
    if (res.vacuous()) os << " (vacuous)";
    if (res.witness) {
      os << " witness args=" << format_assignment(res.witness->args);
      if (!res.witness->impl.empty()) os << " impl=" << format_assignment(res.witness->impl);
      if (!res.witness->args_prime.empty()) os << " args'=" << format_assignment(res.witness->args_prime);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace cvxc
