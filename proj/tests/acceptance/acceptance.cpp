// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. Tolerances are fixed below.

#include "cvxc/canon.hpp"
#include "cvxc/cbf.hpp"
#include "cvxc/errors.hpp"
#include "cvxc/eval.hpp"
#include "cvxc/obligations.hpp"
#include "cvxc/parser.hpp"
#include "cvxc/solver.hpp"
#include "cvxc/verify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace cvxc;

namespace {

// Worked example.
constexpr double kSo1Value = 2.101003;
constexpr double kSo1X = -1.414214;
constexpr double kSo1Y = -5.828427;
constexpr double kStubValueTol = 2e-3;
constexpr double kStubPointTol = 3e-3;
constexpr double kRealTol = 1e-4;
constexpr int kStubGrid = 2001;
constexpr double kCanonSeconds = 1;
constexpr double kStubSeconds = 30;
constexpr double kRealSeconds = 5;

// Atom obligations.
constexpr int kAtomSamples = 1000;
constexpr int kAtomSeeds = 5;
constexpr double kAtomTol = 1e-7;
constexpr double kLogdetTol = 1e-5;
constexpr double kAtomSeconds = 60;

// Strong equivalence over the corpus.
constexpr int kEquivSamples = 1000;
constexpr double kEquivTol = 1e-8;
constexpr double kEquivFeasTol = 1e-8;
constexpr double kMutationRatio = 0.9;
constexpr double kEquivSeconds = 120;

// Optimum coincidence.
constexpr int kPGrid = 401;
constexpr double kQGridPoints = 2e6;
constexpr double kOptimumSeconds = 120;

// Covariance.
constexpr double kCovarianceTol = 1e-3;
constexpr double kLogAgreementTol = 1e-6;

// User reduction.
constexpr int kUserSamples = 1000;
constexpr double kUserSeconds = 10;

constexpr int kRepeats = 3;

const fs::path kSource = CVXC_SOURCE_DIR;
const fs::path kFixtures = kSource / "tests" / "fixtures";
const fs::path kBin = CVXC_BIN_DIR;

using Params = std::map<std::string, Value, std::less<>>;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("missing " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct CorpusEntry {
  std::string file;
  Params params;
  std::map<std::string, Box, std::less<>> boxes;  // brute-force search boxes (2-variable problems)
};

std::vector<CorpusEntry> corpus() {
  std::vector<CorpusEntry> out = {
      {"so1.cvx", {}, {{"x", {-2, 2}}, {"y", {-6, 0}}}},
      {"exp_obj.cvx", {}, {}},
      {"abs_sum.cvx", {}, {{"x", {-4, 6}}, {"y", {-6, 4}}}},
      {"log_sum.cvx", {}, {{"x", {0, 4}}, {"y", {0, 4}}}},
      {"least_norm.cvx", {}, {{"x", {-3, 3}}, {"y", {-3, 3}}}},
      {"exp_epigraph.cvx", {}, {{"x", {-1, 2}}, {"y", {0, 5}}}},
      {"sqrt_bound.cvx", {}, {{"x", {-3, 3}}, {"y", {0, 4}}}},
      {"scaled_exp.cvx", {{"a", Value(2.0)}}, {{"x", {-3, 3}}, {"y", {-3, 3}}}},
      {"log_minus_exp.cvx", {}, {{"x", {-1, 3}}, {"y", {-2, 2}}}},
      {"abs_square.cvx", {}, {{"x", {-3, 3}}, {"y", {-3, 3}}}},
      {"conic_already.cvx", {}, {{"x", {0, 4}}, {"y", {0, 4}}}},
      {"second_order.cvx", {}, {}},
  };
  return out;
}

Canonicalized load(const CorpusEntry& e) {
  return canonicalize(parse_problem(slurp(kFixtures / "corpus" / e.file)), default_registry(), e.params);
}

bool python_adapter_available() {
  return std::system("python3 -c 'import cvxpy' >/dev/null 2>&1") == 0;
}

std::string python_adapter() {
  return "python3 " + (kSource / "tools" / "adapters" / "cvxpy_cbf_adapter.py").string() + " {input} {output}";
}

// ---- 1 ----

Outcome worked_example_canon() {
  const auto start = std::chrono::steady_clock::now();
  const Canonicalized c = canonicalize(parse_problem(slurp(kFixtures / "so1.cvx")));
  const double t = seconds_since(start);
  const Problem expected = parse_problem(slurp(kFixtures / "so1_reduced.cvx"));
  const Problem& q = c.reduced.problem;
  const bool c3 = c.reduced.eliminated.size() == 1 && c.reduced.eliminated[0].first == "c3";
  const bool ok = q == expected && q.vars.size() == 4 && q.constraints.size() == 4 && c3 && t < kCanonSeconds;
  return {ok, "vars=" + std::to_string(q.vars.size()) + " cones=" + std::to_string(q.constraints.size()) +
                  " matches-fixture=" + (q == expected ? "yes" : "no") + " c3-eliminated=" + (c3 ? "yes" : "no") +
                  " time=" + fmt(t) + "s"};
}

// ---- 2 ----

Outcome worked_example_solve() {
  const Problem p = parse_problem(slurp(kFixtures / "so1.cvx"));
  auto run = [&](const std::string& cmd, double tol_v, double tol_x, double limit, std::string label) {
    SolverConfig cfg;
    cfg.command = cmd;
    const auto start = std::chrono::steady_clock::now();
    const SolveResult r = solve(p, cfg);
    const double t = seconds_since(start);
    double dv = INFINITY, dx = INFINITY;
    if (r.original) {
      dv = std::abs(r.value - kSo1Value);
      dx = std::max(std::abs(r.original->at("x").as_scalar() - kSo1X), std::abs(r.original->at("y").as_scalar() - kSo1Y));
    }
    const bool ok = r.status == "PRIMAL_AND_DUAL_FEASIBLE" && dv <= tol_v && dx <= tol_x && t < limit;
    return Outcome{ok, label + ": value=" + (r.original ? format_double(r.value) : "-") + " |dv|=" + fmt(dv) +
                           " |dx|=" + fmt(dx) + " time=" + fmt(t) + "s"};
  };
  const std::string stub = (kBin / "cvxc-stub-solver").string() + " --problem " + (kFixtures / "so1.cvx").string() +
                           " --grid " + std::to_string(kStubGrid) + " --box x=-2:2 --box y=-6:0 {input} {output}";
  Outcome o = run(stub, kStubValueTol, kStubPointTol, kStubSeconds, "stub");
  if (python_adapter_available()) {
    const Outcome real = run(python_adapter(), kRealTol, kRealTol, kRealSeconds, "cvxpy");
    o.pass = o.pass && real.pass;
    o.detail += "; " + real.detail;
  } else {
    o.detail += "; real adapter unavailable";
  }
  return o;
}

// ---- 3 ----

Outcome atom_obligations() {
  const auto start = std::chrono::steady_clock::now();
  int checked = 0;
  std::vector<std::string> failures;
  for (const auto& d : default_registry().atoms()) {
    const bool logdet = d->name == "logdet";
    const std::vector<int> dims = logdet ? std::vector<int>{1, 2, 3} : std::vector<int>{2};
    for (int dim : dims) {
      for (int seed = 0; seed < kAtomSeeds; ++seed) {
        SampleConfig cfg;
        cfg.samples = kAtomSamples;
        cfg.seed = static_cast<std::uint64_t>(seed);
        cfg.dim = dim;
        ObligationTolerances tol;
        tol.tol = logdet ? kLogdetTol : kAtomTol;
        const ObligationReport r = check_atom_obligations(*d, cfg, tol);
        ++checked;
        if (!r.pass()) failures.push_back(d->name + "(n=" + std::to_string(dim) + ",seed=" + std::to_string(seed) + ")");
      }
    }
  }

  // The broken variant must fail optimality, and its witness must replay.
  const AtomDecl broken = parse_atom_decls(slurp(kFixtures / "broken_sqrt.atoms")).front();
  SampleConfig cfg;
  cfg.samples = kAtomSamples;
  const ObligationReport br = check_atom_obligations(broken, cfg);
  const ObligationResult& opt = br[Obligation::Optimality];
  bool replayed = false;
  if (!opt.pass && opt.witness) {
    const double v = replay_witness(broken, Obligation::Optimality, *opt.witness);
    replayed = v == opt.witness->violation && v > kAtomTol;
  }
  const double t = seconds_since(start);
  const bool ok = failures.empty() && !opt.pass && replayed && t < kAtomSeconds;
  std::string detail = "runs=" + std::to_string(checked) + " failures=" + std::to_string(failures.size());
  for (const auto& f : failures) detail += " " + f;
  detail += std::string(" broken-sqrt-optimality=") + (opt.pass ? "pass" : "fail") + " witness-replays=" +
            (replayed ? "yes" : "no") + " time=" + fmt(t) + "s";
  return {ok, detail};
}

// ---- 4 ----

bool is_graph_constraint(const ReducedProblem& r, const std::string& name) {
  for (const auto& [n, from] : r.provenance)
    if (n == name) return from.rfind("constraint ", 0) != 0;
  return false;
}

Outcome strong_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  SampleConfig cfg;
  cfg.samples = kEquivSamples;
  EquivOptions opt;
  opt.tol = kEquivTol;
  opt.feas_tol = kEquivFeasTol;

  int passed = 0, total = 0, mutated = 0, detected = 0;
  double worst_forward = 0, worst_backward = 0;
  std::vector<std::string> notes;
  for (const auto& e : corpus()) {
    ++total;
    const Canonicalized c = load(e);
    const EquivReport r = check_reduction(c, cfg, opt);
    const bool enough = r.p_samples == static_cast<std::size_t>(kEquivSamples) &&
                        r.q_samples == static_cast<std::size_t>(kEquivSamples);
    worst_forward = std::max(worst_forward, r.clause("forward-objective")->worst);
    worst_backward = std::max(worst_backward, r.clause("backward-objective")->worst);
    if (r.verdict() == Verdict::Pass && enough && r.clause("roundtrip-identity")->verdict == Verdict::Pass) ++passed;
    else notes.push_back(e.file + ":" + std::string(to_string(r.verdict())));

    std::vector<std::string> graph;
    for (const auto& k : c.reduced.problem.constraints)
      if (is_graph_constraint(c.reduced, k.name)) graph.push_back(k.name);
    if (graph.empty()) continue;
    ++mutated;
    bool all_caught = true;
    for (const auto& name : graph) {
      Canonicalized m = c;
      std::erase_if(m.reduced.problem.constraints, [&](const Constraint& k) { return k.name == name; });
      const EquivReport mr = check_reduction(m, cfg, opt);
      const bool caught = mr.clause("backward-feasibility")->verdict == Verdict::Fail ||
                          mr.clause("backward-objective")->verdict == Verdict::Fail;
      if (!caught) {
        all_caught = false;
        notes.push_back(e.file + ":" + name + " not caught");
      }
    }
    if (all_caught) ++detected;
  }
  const double t = seconds_since(start);
  const bool ok = total >= 10 && passed == total && detected >= kMutationRatio * mutated && t < kEquivSeconds;
  std::string detail = "problems=" + std::to_string(total) + " pass=" + std::to_string(passed) +
                       " worst-forward-gap=" + fmt(worst_forward) + " worst-backward-gap=" + fmt(worst_backward) +
                       " mutation-detected=" + std::to_string(detected) + "/" + std::to_string(mutated) +
                       " time=" + fmt(t) + "s";
  for (const auto& n : notes) detail += " [" + n + "]";
  return {ok, detail};
}

// ---- 5 ----

// Largest objective slope between the optimum and its feasible grid
// neighbours in each coordinate direction.
double local_lipschitz(const Problem& p, const Assignment& at, const std::vector<double>& steps) {
  const auto coords = coordinates(p.vars);
  const Eigen::VectorXd x0 = to_coordinates(coords, at);
  const double f0 = objective_value(p, at);
  const double h = steps.empty() ? 1e-3 : *std::max_element(steps.begin(), steps.end());
  double best = 0;
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    for (double s : {-h, h}) {
      Eigen::VectorXd x = x0;
      x(i) += s;
      const Assignment a = from_coordinates(p.vars, x);
      try {
        if (!is_feasible(p, a)) continue;
        best = std::max(best, std::abs(objective_value(p, a) - f0) / h);
      } catch (const DomainError&) {
      }
    }
  }
  return best;
}

Outcome optimum_coincidence() {
  const auto start = std::chrono::steady_clock::now();
  int checked = 0, agreed = 0;
  std::string detail;
  for (const auto& e : corpus()) {
    const Canonicalized c = load(e);
    if (c.source.vars.size() != 2 || e.boxes.empty()) continue;
    ++checked;
    const BruteForceResult bp = brute_force_optimum(c.source, kPGrid, {}, e.boxes);

    // Boxes for fresh variables cover their forward images on feasible
    // samples of P.
    SampleConfig cfg;
    cfg.samples = 1000;
    cfg.boxes = e.boxes;
    SampleSet s = sample_feasible(c.source, cfg);
    s.points.push_back(bp.argmin);
    auto q_boxes = e.boxes;
    for (const auto& v : c.reduced.fresh_vars) {
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& a : s.points) {
        const double z = forward_apply(c.reduction, a).at(v.name).as_scalar();
        lo = std::min(lo, z);
        hi = std::max(hi, z);
      }
      const double pad = 0.05 * (hi - lo) + 0.05;
      q_boxes[v.name] = {lo - pad, hi + pad};
    }
    const Problem& q = c.reduced.problem;
    const int free_dims = static_cast<int>(coordinates(q.vars).size());
    const int q_grid = std::max(3, static_cast<int>(std::pow(kQGridPoints, 1.0 / free_dims)));
    const BruteForceResult bq = brute_force_optimum(q, q_grid, {}, q_boxes);

    double h = 0;
    for (double st : bp.steps) h = std::max(h, st);
    for (double st : bq.steps) h = std::max(h, st);
    const double lip = std::max({local_lipschitz(c.source, bp.argmin, bp.steps),
                                 local_lipschitz(q, bq.argmin, bq.steps), 1.0});
    const double tol = 2 * h * lip;
    const double gap = std::abs(bp.value - bq.value);
    const bool ok = gap <= tol;
    if (ok) ++agreed;
    detail += " " + e.file.substr(0, e.file.size() - 4) + ":" + fmt(gap) + (ok ? "<=" : ">") + fmt(tol);
  }
  const double t = seconds_since(start);
  return {agreed == checked && checked > 0 && t < kOptimumSeconds,
          "agree=" + std::to_string(agreed) + "/" + std::to_string(checked) + " time=" + fmt(t) + "s;" + detail};
}

// ---- 6 ----

Outcome covariance() {
  // Five fixed samples in R^2; the maximum-likelihood inverse covariance is
  // the inverse of their sample covariance.
  Eigen::MatrixXd ys(5, 2);
  ys << 1.0, 0.5, -0.3, 1.2, 0.8, -0.7, -1.1, -0.4, 0.2, 0.9;
  const Eigen::MatrixXd y = ys.transpose() * ys / 5.0;
  const Problem p = parse_problem(slurp(kFixtures / "covariance.cvx"));
  const Params params{{"Y", Value::matrix(y)}};

  if (python_adapter_available()) {
    SolverConfig cfg;
    cfg.command = python_adapter();
    const SolveResult r = solve(p, cfg, params);
    if (!r.original) return {false, "status=" + r.status};
    const Eigen::MatrixXd s = r.original->at("S").as_matrix();
    const double err = (s.inverse() - y).norm();
    return {err <= kCovarianceTol, "status=" + r.status + " |S^-1 - Y|_F=" + fmt(err)};
  }

  // Without a PSD-capable solver: logdet obligations (criterion 3) and the
  // n = 1 instance against the scalar log formulation.
  const double yy = y(0, 0);
  const Problem p1 = parse_problem(
      "parameters (Y : matrix 1)\noptimization (S : matrix 1)\n  maximize logdet S - trace (Y * S)\n"
      "  subject to\n    c : posDef S\n");
  const Problem p2 = parse_problem("parameters (y : R)\noptimization (s : R)\n  maximize log s - y * s\n  subject to\n    c : 0 < s\n");
  const Canonicalized c1 = canonicalize(p1, default_registry(), {{"Y", Value::matrix(Eigen::MatrixXd::Constant(1, 1, yy))}});
  const Canonicalized c2 = canonicalize(p2, default_registry(), {{"y", Value(yy)}});
  double worst = 0;
  for (double s = 0.05; s < 10; s += 0.05) {
    Assignment a1, a2;
    a1.set("S", Value::matrix(Eigen::MatrixXd::Constant(1, 1, s)));
    a2.set("s", s);
    const double v1 = objective_value(c1.reduced.problem, forward_apply(c1.reduction, a1));
    const double v2 = objective_value(c2.reduced.problem, forward_apply(c2.reduction, a2));
    worst = std::max(worst, std::abs(v1 - v2));
  }
  return {worst <= kLogAgreementTol, "no PSD-capable adapter; n=1 agreement with log formulation=" + fmt(worst)};
}

// ---- 7 ----

Outcome user_reduction() {
  const auto start = std::chrono::steady_clock::now();
  SampleConfig cfg;
  cfg.samples = kUserSamples;
  const fs::path u = kFixtures / "user";
  const EquivReport good =
      check_user_reduction(slurp(u / "exp_product.cvx"), slurp(u / "exp_sum.cvx"), slurp(u / "identity.maps"), cfg);
  const EquivReport bad =
      check_user_reduction(slurp(u / "weighted_p.cvx"), slurp(u / "weighted_q.cvx"), slurp(u / "swapped.maps"), cfg);
  bool witness = false;
  for (const auto& c : bad.clauses) witness = witness || (c.verdict == Verdict::Fail && c.witness);
  const double t = seconds_since(start);
  const bool ok = good.verdict() == Verdict::Pass && good.p_samples == static_cast<std::size_t>(kUserSamples) &&
                  bad.verdict() == Verdict::Fail && witness && t < kUserSeconds;
  return {ok, std::string("identity=") + std::string(to_string(good.verdict())) +
                  " swapped=" + std::string(to_string(bad.verdict())) + " witness=" + (witness ? "yes" : "no") +
                  " time=" + fmt(t) + "s"};
}

// ---- 8 ----

Outcome determinism() {
  int files = 0, mismatches = 0;
  auto outputs = [](const CorpusEntry& e) {
    const Canonicalized c = load(e);
    return print_problem(c.reduced.problem) + "\n----\n" + write_cbf(c.reduced);
  };
  for (const auto& e : corpus()) {
    ++files;
    const std::string first = outputs(e);
    for (int k = 1; k < kRepeats; ++k)
      if (outputs(e) != first) ++mismatches;
  }
  const bool golden = write_cbf(canonicalize(parse_problem(slurp(kFixtures / "so1.cvx"))).reduced) ==
                          slurp(kFixtures / "so1.cbf") &&
                      write_cbf(canonicalize(parse_problem(slurp(kFixtures / "posorth.cvx"))).reduced) ==
                          slurp(kFixtures / "posorth.cbf");
  return {mismatches == 0 && golden, "problems=" + std::to_string(files) + " repeats=" + std::to_string(kRepeats) +
                                         " mismatches=" + std::to_string(mismatches) +
                                         " goldens=" + (golden ? "match" : "differ")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"1 worked-example canonicalization", worked_example_canon},
      {"2 worked-example solve", worked_example_solve},
      {"3 atom obligations", atom_obligations},
      {"4 strong equivalence over corpus", strong_equivalence},
      {"5 optimum coincidence", optimum_coincidence},
      {"6 covariance estimation", covariance},
      {"7 user reduction", user_reduction},
      {"8 determinism and goldens", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
