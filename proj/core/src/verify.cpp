#include "cvxc/verify.hpp"

#include "cvxc/affine.hpp"
#include "cvxc/errors.hpp"
#include "cvxc/eval.hpp"
#include "cvxc/parser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <set>
#include <thread>

namespace cvxc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEqualityTol = 1e-9;

double sense_sign(const Problem& p) { return p.sense == Sense::Maximize ? -1.0 : 1.0; }

/// Objective in minimization sense.
double min_objective(const Problem& p, const Assignment& a) { return sense_sign(p) * objective_value(p, a); }

double scale_of(double v) { return std::max(1.0, std::abs(v)); }

void require_bound(const Problem& p) {
  if (!p.params.empty()) throw UnboundParameter(p.params.front().name);
}

/// Affine equality constraints of a problem as A x = b over its coordinates.
struct Equalities {
  std::vector<Coord> coords;
  std::vector<bool> used;  // per constraint
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
};

std::optional<Expr> equality_body(const Expr& e) {
  if (e.is_apply("eq") && e.args().size() == 2) return e.arg(1) - e.arg(0);
  if (e.is_apply("zeroCone") && e.args().size() == 1) return e.arg(0);
  return std::nullopt;
}

Equalities collect_equalities(const Problem& p) {
  Equalities eq;
  eq.coords = coordinates(p.vars);
  std::map<Coord, Eigen::Index> index;
  for (std::size_t k = 0; k < eq.coords.size(); ++k) index[eq.coords[k]] = static_cast<Eigen::Index>(k);
  const AffineContext ctx = AffineContext::of(p.vars);
  std::vector<std::pair<Eigen::VectorXd, double>> rows;
  for (const auto& c : p.constraints) {
    bool used = false;
    if (auto body = equality_body(c.body)) {
      auto f = affine_form(*body, ctx);
      if (f && f->is_numeric()) {
        used = true;
        for (const auto& entry : f->entries) {
          Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(eq.coords.size()));
          for (const auto& [coord, k] : entry.terms) row(index.at(coord)) += *numeric(k);
          rows.emplace_back(std::move(row), -*numeric(entry.constant));
        }
      }
    }
    eq.used.push_back(used);
  }
  eq.a.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(eq.coords.size()));
  eq.b.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    eq.a.row(static_cast<Eigen::Index>(r)) = rows[r].first.transpose();
    eq.b(static_cast<Eigen::Index>(r)) = rows[r].second;
  }
  return eq;
}

bool accepts(const Problem& p, const Equalities& eq, const Assignment& a) {
  const EvalOptions exact{0.0};
  for (std::size_t k = 0; k < p.constraints.size(); ++k) {
    const Expr& body = p.constraints[k].body;
    try {
      if (eq.used[k] ? violation(body, a) > kEqualityTol : !holds(body, a, exact)) return false;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

Value jitter(const Value& v, Rng& rng, double scale) {
  if (scale == 0 || v.is_boolean()) return v;
  switch (v.kind()) {
    case ShapeKind::Scalar:
      return v.as_scalar() + scale * uniform(rng, -1, 1);
    case ShapeKind::Vector: {
      Eigen::VectorXd x = v.as_vector();
      for (auto& e : x) e += scale * uniform(rng, -1, 1);
      return Value::vector(std::move(x));
    }
    case ShapeKind::Matrix: {
      Eigen::MatrixXd m = v.as_matrix();
      for (int i = 0; i < m.rows(); ++i)
        for (int j = i; j < m.cols(); ++j) m(i, j) = m(j, i) = m(i, j) + scale * uniform(rng, -1, 1);
      return Value::matrix(std::move(m));
    }
    default:
      return v;
  }
}

Assignment uniform_point(const std::vector<VarDecl>& vars, const SampleConfig& cfg, Rng& rng) {
  Assignment a;
  for (const auto& v : vars) a.set(v.name, sample_value(v.shape.value_shape(), cfg.box_for(v.name), rng));
  return a;
}

// --- clause bookkeeping ---------------------------------------------------

class Clause {
 public:
  explicit Clause(std::string name) { r_.name = std::move(name); }

  void pass(double viol) {
    ++r_.checked;
    r_.worst = std::max(r_.worst, viol);
  }

  void fail(double viol, const Assignment& point, const Assignment& image, std::string detail) {
    ++r_.checked;
    const double v = std::isnan(viol) ? kInf : viol;
    r_.worst = std::max(r_.worst, v);
    const double cur = r_.witness ? r_.witness->violation : -1;
    // Prefer the largest finite violation as the witness.
    const bool better = !r_.witness || (std::isfinite(v) && (!std::isfinite(cur) || v > cur));
    if (better) r_.witness = EquivWitness{point, image, v, std::move(detail)};
    r_.verdict = Verdict::Fail;
  }

  void check(double viol, double tol, const Assignment& point, const Assignment& image, const std::string& detail) {
    if (viol <= tol)
      pass(std::max(0.0, viol));
    else
      fail(viol, point, image, detail);
  }

  ClauseResult finish(bool exhausted) {
    if (r_.verdict != Verdict::Fail && (exhausted || r_.checked == 0)) r_.verdict = Verdict::Inconclusive;
    return std::move(r_);
  }

 private:
  ClauseResult r_;
};

struct Run {
  EquivReport report;
  SampleSet p_points;
  SampleSet q_points;
};

Run run_equivalence(const Problem& p, const Problem& q, const PointMap& phi, const PointMap& psi,
                    const SampleConfig& cfg, const EquivOptions& opt) {
  require_bound(p);
  require_bound(q);
  Run run;
  run.p_points = sample_feasible(p, cfg);

  static constexpr double kScales[] = {0, 1e-8, 1e-4, 1e-2, 1, 5};
  const auto& seeds = run.p_points.points;
  Proposal from_images = [&](Rng& rng) -> std::optional<Assignment> {
    if (seeds.empty()) return std::nullopt;
    const auto k = std::uniform_int_distribution<std::size_t>(0, seeds.size() - 1)(rng);
    const double scale = kScales[std::uniform_int_distribution<int>(0, 5)(rng)];
    try {
      Assignment y = phi(seeds[k]);
      Assignment out;
      for (const auto& v : q.vars) out.set(v.name, jitter(y.at(v.name), rng, scale));
      return out;
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  SampleConfig qcfg = cfg;
  qcfg.seed = cfg.seed ^ 0x9e3779b97f4a7c15ULL;
  run.q_points = sample_feasible(q, qcfg, from_images);

  Clause fwd_feas("forward-feasibility"), fwd_obj("forward-objective");
  Clause bwd_feas("backward-feasibility"), bwd_obj("backward-objective");

  // Forward direction.
  std::vector<std::optional<std::pair<double, double>>> fwd_values;  // (f(x), g(phi(x)))
  for (const auto& x : run.p_points.points) {
    Assignment y;
    try {
      y = phi(x);
    } catch (const Error& e) {
      fwd_feas.fail(kInf, x, {}, std::string("forward map undefined: ") + e.what());
      fwd_values.emplace_back();
      continue;
    }
    const double mv = max_violation(q, y);
    fwd_feas.check(mv, opt.feas_tol, x, y, "image violates a constraint of the target problem");
    try {
      const double f = min_objective(p, x);
      const double g = min_objective(q, y);
      fwd_values.emplace_back(std::make_pair(f, g));
      if (!opt.monotone) fwd_obj.check((g - f) / scale_of(f), opt.tol, x, y, "g(phi(x)) exceeds f(x)");
    } catch (const Error& e) {
      fwd_values.emplace_back();
      fwd_obj.fail(kInf, x, y, e.what());
    }
  }

  // Backward direction.
  std::vector<std::optional<std::pair<double, double>>> bwd_values;  // (g(y), f(psi(y)))
  for (const auto& y : run.q_points.points) {
    Assignment x;
    try {
      x = psi(y);
    } catch (const Error& e) {
      bwd_feas.fail(kInf, y, {}, std::string("backward map undefined: ") + e.what());
      bwd_values.emplace_back();
      continue;
    }
    const double mv = max_violation(p, x);
    bwd_feas.check(mv, opt.feas_tol, y, x, "image violates a constraint of the source problem");
    try {
      const double g = min_objective(q, y);
      const double f = min_objective(p, x);
      bwd_values.emplace_back(std::make_pair(g, f));
      if (!opt.monotone) bwd_obj.check((f - g) / scale_of(g), opt.tol, y, x, "f(psi(y)) exceeds g(y)");
    } catch (const Error& e) {
      bwd_values.emplace_back();
      bwd_obj.fail(kInf, y, x, e.what());
    }
  }

  if (opt.monotone) {
    // Order agreement over consecutive sample pairs.
    auto order = [&](Clause& clause, const std::vector<Assignment>& pts,
                     const std::vector<std::optional<std::pair<double, double>>>& vals) {
      for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        if (!vals[i] || !vals[i + 1]) continue;
        const auto [a0, b0] = *vals[i];
        const auto [a1, b1] = *vals[i + 1];
        const double da = (a1 - a0) / std::max(scale_of(a0), scale_of(a1));
        const double db = (b1 - b0) / std::max(scale_of(b0), scale_of(b1));
        const bool disagree = (da > opt.tol && db < -opt.tol) || (da < -opt.tol && db > opt.tol);
        if (disagree)
          clause.fail(std::min(std::abs(da), std::abs(db)), pts[i], pts[i + 1], "objective order not preserved");
        else
          clause.pass(0);
      }
    };
    order(fwd_obj, run.p_points.points, fwd_values);
    order(bwd_obj, run.q_points.points, bwd_values);
  }

  const bool p_short = run.p_points.exhausted();
  const bool q_short = run.q_points.exhausted();
  auto& r = run.report;
  r.clauses.push_back(fwd_feas.finish(p_short));
  r.clauses.push_back(fwd_obj.finish(p_short));
  r.clauses.push_back(bwd_feas.finish(q_short));
  r.clauses.push_back(bwd_obj.finish(q_short));
  r.p_samples = run.p_points.points.size();
  r.q_samples = run.q_points.points.size();
  r.wanted = static_cast<std::size_t>(cfg.samples);
  r.monotone = opt.monotone;
  return run;
}

/// Relation between a node's reduced and original values for its role.
double node_gap(const Value& r, const Value& o, Role role) {
  if (r.is_boolean() || o.is_boolean()) {
    if (!r.is_boolean() || !o.is_boolean()) return kInf;
    switch (role) {
      case Role::Concave:
        return !r.truth() || o.truth() ? 0 : 1;
      case Role::Convex:
        return !o.truth() || r.truth() ? 0 : 1;
      case Role::Affine:
        return r.truth() == o.truth() ? 0 : 1;
    }
  }
  if (!(r.shape() == o.shape())) return kInf;
  double worst = 0;
  for (int k = 0; k < r.size(); ++k) {
    const double rv = r.entry(k), ov = o.entry(k);
    double gap = 0;
    if (role == Role::Convex) gap = ov - rv;
    if (role == Role::Concave) gap = rv - ov;
    if (role == Role::Affine) gap = std::abs(rv - ov);
    worst = std::max(worst, gap / scale_of(ov));
  }
  return std::isnan(worst) ? kInf : worst;
}

void visit(const TreeNode& n, const std::function<void(const TreeNode&)>& f) {
  f(n);
  for (const auto& c : n.children) visit(c, f);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

const SampleSet& SampleSet::require() const {
  if (exhausted()) throw SamplerExhausted(points.size(), wanted);
  return *this;
}

SampleSet sample_feasible(const Problem& p, const SampleConfig& cfg, const Proposal& proposal) {
  cfg.check();
  require_bound(p);
  const Equalities eq = collect_equalities(p);
  std::optional<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>> cod;
  if (eq.a.rows() > 0) cod.emplace(eq.a);

  SampleSet out;
  out.wanted = static_cast<std::size_t>(cfg.samples);
  std::int64_t i = 0;
  for (; i < cfg.max_attempts && out.points.size() < out.wanted; ++i) {
    Rng rng = stream_rng(cfg.seed, static_cast<std::uint64_t>(i));
    std::optional<Assignment> cand;
    if (proposal && i % 2 == 1) cand = proposal(rng);
    if (!cand) cand = uniform_point(p.vars, cfg, rng);
    try {
      if (cod) {
        Eigen::VectorXd x = to_coordinates(eq.coords, *cand);
        x -= cod->solve(eq.a * x - eq.b);
        cand = from_coordinates(p.vars, x);
      } else {
        cand = cand->restrict_to(p.vars);
      }
    } catch (const Error&) {
      continue;
    }
    if (accepts(p, eq, *cand)) out.points.push_back(std::move(*cand));
  }
  out.attempts = i;
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

Verdict EquivReport::verdict() const {
  Verdict out = Verdict::Pass;
  for (const auto& c : clauses) {
    if (c.verdict == Verdict::Fail) return Verdict::Fail;
    if (c.verdict == Verdict::Inconclusive) out = Verdict::Inconclusive;
  }
  return out;
}

const ClauseResult* EquivReport::clause(std::string_view name) const {
  for (const auto& c : clauses)
    if (c.name == name) return &c;
  return nullptr;
}

EquivReport check_strong_equivalence(const Problem& p, const Problem& q, const PointMap& phi, const PointMap& psi,
                                     const SampleConfig& cfg, const EquivOptions& opt) {
  return run_equivalence(p, q, phi, psi, cfg, opt).report;
}

EquivReport check_reduction(const Canonicalized& c, const SampleConfig& cfg, const EquivOptions& opt) {
  const Problem& p = c.source;
  const Problem& q = c.reduced.problem;
  PointMap phi = [&](const Assignment& a) { return forward_apply(c.reduction, a); };
  PointMap psi = [&](const Assignment& a) { return backward_apply(c.reduction, a); };
  Run run = run_equivalence(p, q, phi, psi, cfg, opt);

  Clause equal("objective-equality"), roundtrip("roundtrip-identity"), nodes("node-relation");
  for (const auto& x : run.p_points.points) {
    try {
      const Assignment y = phi(x);
      const double f = min_objective(p, x);
      const double g = min_objective(q, y);
      equal.check(std::abs(g - f) / scale_of(f), opt.tol, x, y, "objective changed under the forward map");
      const Assignment back = psi(y);
      if (back == x.restrict_to(p.vars))
        roundtrip.pass(0);
      else
        roundtrip.fail(kInf, x, back, "psi(phi(x)) differs from x");
    } catch (const Error& e) {
      equal.fail(kInf, x, {}, e.what());
    }
  }
  const EvalOptions eopts{opt.feas_tol};
  for (const auto& y : run.q_points.points) {
    for (const auto& tree : c.reduced.trees) {
      visit(tree.root, [&](const TreeNode& n) {
        double gap = kInf;
        try {
          gap = node_gap(eval(n.rexpr, y, eopts), eval(n.oexpr, y, eopts), n.role);
        } catch (const Error&) {
        }
        nodes.check(gap, opt.tol, y, {}, "node " + n.id + " (" + std::string(to_string(n.role)) + ")");
      });
    }
  }
  const bool p_short = run.p_points.exhausted();
  run.report.clauses.push_back(equal.finish(p_short));
  run.report.clauses.push_back(roundtrip.finish(p_short));
  run.report.clauses.push_back(nodes.finish(run.q_points.exhausted()));
  return run.report;
}

UserMaps parse_user_maps(std::string_view text, const Problem& p, const Problem& q) {
  UserMaps maps;
  std::set<std::string, std::less<>> seen_phi, seen_psi;
  const ShapeEnv p_env = shape_env(p.vars), q_env = shape_env(q.vars);
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto c = line.find("--"); c != std::string::npos) line.erase(c);
    const std::string l = trim(line);
    if (l.empty()) continue;
    const auto sp = l.find_first_of(" \t");
    const std::string kw = l.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : trim(std::string_view(l).substr(sp));
    auto where = [&] { return "line " + std::to_string(lineno) + ": "; };
    if (kw == "mode") {
      if (rest != "monotone" && rest != "strong") throw MapMismatch(where() + "unknown mode '" + rest + "'");
      maps.monotone = rest == "monotone";
      continue;
    }
    if (kw != "phi" && kw != "psi") throw MapMismatch(where() + "expected 'phi', 'psi' or 'mode'");
    const auto def = rest.find(":=");
    if (def == std::string::npos) throw MapMismatch(where() + "expected 'name := expression'");
    const std::string name = trim(std::string_view(rest).substr(0, def));
    const bool forward = kw == "phi";
    const Problem& target = forward ? q : p;
    const Problem& source = forward ? p : q;
    const VarDecl* decl = target.find_var(name);
    if (!decl)
      throw MapMismatch(where() + "'" + name + "' is not a variable of the " + (forward ? "target" : "source") +
                        " problem");
    auto& seen = forward ? seen_phi : seen_psi;
    if (!seen.insert(name).second) throw MapMismatch(where() + "'" + name + "' defined twice");
    Expr e = parse_expr(std::string_view(rest).substr(def + 2), source.vars, {});
    const Shape got = infer_shape(e, forward ? p_env : q_env);
    if (!(got == decl->shape.value_shape()))
      throw MapMismatch(where() + "'" + name + "' has shape " + to_string(got) + ", expected " +
                        to_string(decl->shape.value_shape()));
    (forward ? maps.phi : maps.psi).emplace_back(name, std::move(e));
  }
  for (const auto& v : q.vars)
    if (!seen_phi.contains(v.name)) throw MapMismatch("phi does not define '" + v.name + "'");
  for (const auto& v : p.vars)
    if (!seen_psi.contains(v.name)) throw MapMismatch("psi does not define '" + v.name + "'");
  return maps;
}

EquivReport check_user_reduction(std::string_view p_text, std::string_view q_text, std::string_view maps_text,
                                 const SampleConfig& cfg, const EquivOptions& opt) {
  const Problem p = bind_parameters(parse_problem(p_text), {});
  const Problem q = bind_parameters(parse_problem(q_text), {});
  const UserMaps maps = parse_user_maps(maps_text, p, q);
  auto apply = [](const std::vector<std::pair<std::string, Expr>>& defs) {
    return [defs](const Assignment& a) {
      Assignment out;
      for (const auto& [name, e] : defs) out.set(name, eval(e, a, {}, name));
      return out;
    };
  };
  EquivOptions o = opt;
  o.monotone = opt.monotone || maps.monotone;
  return check_strong_equivalence(p, q, apply(maps.phi), apply(maps.psi), cfg, o);
}

BruteForceResult brute_force_optimum(const Problem& p, int grid_per_dim, const Box& box,
                                     const std::map<std::string, Box, std::less<>>& boxes, double feas_tol) {
  require_bound(p);
  if (grid_per_dim < 1) throw Error("grid size must be at least 1");
  const Equalities eq = collect_equalities(p);
  const auto n = static_cast<Eigen::Index>(eq.coords.size());

  // Reduced row echelon form of [A | b].
  Eigen::MatrixXd m(eq.a.rows(), n + 1);
  if (eq.a.rows() > 0) m << eq.a, eq.b;
  std::vector<Eigen::Index> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < n && row < m.rows(); ++col) {
    Eigen::Index best = row;
    for (Eigen::Index r = row + 1; r < m.rows(); ++r)
      if (std::abs(m(r, col)) > std::abs(m(best, col))) best = r;
    if (std::abs(m(best, col)) < 1e-12) continue;
    m.row(row).swap(m.row(best));
    m.row(row) /= m(row, col);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (r != row && m(r, col) != 0) m.row(r) -= m(r, col) * m.row(row);
    pivots.push_back(col);
    ++row;
  }
  for (Eigen::Index r = row; r < m.rows(); ++r)
    if (std::abs(m(r, n)) > 1e-9) throw Infeasible();

  std::vector<Eigen::Index> free;
  for (Eigen::Index c = 0; c < n; ++c)
    if (std::find(pivots.begin(), pivots.end(), c) == pivots.end()) free.push_back(c);

  auto box_of = [&](Eigen::Index c) -> const Box& {
    auto it = boxes.find(eq.coords[static_cast<std::size_t>(c)].var);
    return it == boxes.end() ? box : it->second;
  };
  std::vector<double> steps;
  double total = 1;
  for (auto c : free) {
    const Box& b = box_of(c);
    steps.push_back(grid_per_dim > 1 ? (b.hi - b.lo) / (grid_per_dim - 1) : 0);
    total *= grid_per_dim;
  }
  if (total > 1e8) throw Error("grid of " + format_double(total) + " points exceeds the 1e8 limit");
  const auto points = static_cast<std::int64_t>(total);

  auto point_at = [&](std::int64_t idx, Eigen::VectorXd& x) {
    for (std::size_t k = free.size(); k-- > 0;) {
      const auto digit = idx % grid_per_dim;
      idx /= grid_per_dim;
      const Box& b = box_of(free[k]);
      x(free[k]) = grid_per_dim > 1 ? b.lo + static_cast<double>(digit) * steps[k] : (b.lo + b.hi) / 2;
    }
    for (std::size_t r = 0; r < pivots.size(); ++r) {
      double v = m(static_cast<Eigen::Index>(r), n);
      for (auto c : free) v -= m(static_cast<Eigen::Index>(r), c) * x(c);
      x(pivots[r]) = v;
    }
  };

  struct Best {
    double value = kInf;
    std::int64_t index = -1;
    std::int64_t feasible = 0;
  };
  const unsigned threads = std::max(1u, std::min(16u, std::thread::hardware_concurrency()));
  std::vector<Best> best(threads);
  const EvalOptions opts{feas_tol};
  auto work = [&](unsigned t) {
    Eigen::VectorXd x(n);
    Best& b = best[t];
    for (std::int64_t idx = t; idx < points; idx += threads) {
      point_at(idx, x);
      bool inside = true;
      for (auto c : pivots) {
        const Box& bx = box_of(c);
        inside = inside && x(c) >= bx.lo && x(c) <= bx.hi;
      }
      if (!inside) continue;
      const Assignment a = from_coordinates(p.vars, x);
      try {
        bool ok = true;
        for (const auto& c : p.constraints) {
          if (!holds(c.body, a, opts)) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        const double v = min_objective(p, a);
        ++b.feasible;
        if (v < b.value || (v == b.value && idx < b.index)) b = {v, idx, b.feasible};
      } catch (const Error&) {
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work, t);
  work(0);
  for (auto& th : pool) th.join();

  Best overall;
  std::int64_t feasible = 0;
  for (const auto& b : best) {
    feasible += b.feasible;
    if (b.index >= 0 && (b.value < overall.value || (b.value == overall.value && b.index < overall.index)))
      overall = b;
  }
  if (overall.index < 0) throw Infeasible();
  Eigen::VectorXd x(n);
  point_at(overall.index, x);
  BruteForceResult res;
  res.argmin = from_coordinates(p.vars, x);
  res.value = sense_sign(p) * overall.value;
  res.evaluated = points;
  res.feasible = feasible;
  res.steps = std::move(steps);
  return res;
}

std::string format_equiv_report(const EquivReport& r) {
  std::ostringstream os;
  for (const auto& c : r.clauses) {
    os << c.name << " " << to_string(c.verdict) << " checked=" << c.checked << " worst=" << format_double(c.worst);
    if (c.witness) {
      os << " witness " << format_assignment(c.witness->point);
      if (!c.witness->image.empty()) os << " -> " << format_assignment(c.witness->image);
      os << " (" << c.witness->detail << ")";
    }
    os << "\n";
  }
  os << "verdict " << to_string(r.verdict()) << " mode=" << (r.monotone ? "monotone" : "strong")
     << " p_samples=" << r.p_samples << " q_samples=" << r.q_samples << " wanted=" << r.wanted << "\n";
  return os.str();
}

}  // namespace cvxc
