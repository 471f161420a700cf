#include "cvxc/atoms.hpp"
#include "cvxc/canon.hpp"
#include "cvxc/cbf.hpp"
#include "cvxc/errors.hpp"
#include "cvxc/obligations.hpp"
#include "cvxc/parser.hpp"
#include "cvxc/solver.hpp"
#include "cvxc/verify.hpp"

#include "options.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>

namespace {

using namespace cvxc;
using tools::UsageError;
using json = nlohmann::ordered_json;

enum Exit : int { kOk = 0, kUsage = 1, kModelError = 2, kVerifyFail = 3, kInconclusive = 4, kSolverError = 5 };

struct Globals {
  std::uint64_t seed = 0;
  std::optional<double> tol;
  double feas_tol = 1e-6;
  std::string format = "text";
  std::vector<std::string> atom_files;

  bool structured() const { return format == "structured"; }
};

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

json to_json(const Value& v) {
  if (v.is_scalar()) return v.as_scalar();
  if (v.is_boolean()) return v.truth();
  if (v.is_vector()) {
    json a = json::array();
    for (int k = 0; k < v.size(); ++k) a.push_back(v.entry(k));
    return a;
  }
  const auto& m = v.as_matrix();
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const Assignment& a) {
  json j = json::object();
  for (const auto& [name, v] : a.values()) j[name] = to_json(v);
  return j;
}

json to_json(const TreeNode& n) {
  json j;
  j["id"] = n.id;
  j["expr"] = print_expr(n.oexpr);
  j["role"] = std::string(to_string(n.role));
  if (!n.is_leaf()) {
    j["atom"] = n.atom->name;
    j["curvature"] = std::string(to_string(n.atom->curvature));
    j["fresh"] = n.fresh;
    json ds = json::array();
    for (const auto& d : n.discharges)
      ds.push_back({{"condition", d.condition}, {"by", d.by}, {"background", d.background}});
    j["discharges"] = ds;
    json cs = json::array();
    for (const auto& c : n.children) cs.push_back(to_json(c));
    j["children"] = cs;
  }
  return j;
}

json to_json(const EquivReport& r) {
  json clauses = json::array();
  for (const auto& c : r.clauses) {
    json cj{{"name", c.name}, {"verdict", std::string(to_string(c.verdict))}, {"checked", c.checked}, {"worst", c.worst}};
    if (c.witness)
      cj["witness"] = {{"point", to_json(c.witness->point)},
                       {"image", to_json(c.witness->image)},
                       {"violation", c.witness->violation},
                       {"detail", c.witness->detail}};
    clauses.push_back(cj);
  }
  return {{"verdict", std::string(to_string(r.verdict()))},
          {"mode", r.monotone ? "monotone" : "strong"},
          {"p_samples", r.p_samples},
          {"q_samples", r.q_samples},
          {"wanted", r.wanted},
          {"clauses", clauses}};
}

json to_json(const ObligationReport& r) {
  json obs = json::array();
  for (const auto& o : r.results) {
    json oj{{"obligation", std::string(to_string(o.kind))}, {"pass", o.pass}, {"samples", o.samples}, {"worst", o.worst}};
    if (o.witness) {
      oj["witness"] = {{"args", to_json(o.witness->args)},
                       {"impl", to_json(o.witness->impl)},
                       {"args_prime", to_json(o.witness->args_prime)},
                       {"violation", o.witness->violation}};
      if (o.witness->direction) oj["witness"]["direction"] = std::string(to_string(*o.witness->direction));
    }
    obs.push_back(oj);
  }
  return {{"atom", r.atom}, {"pass", r.pass()}, {"obligations", obs}};
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::Pass: return kOk;
    case Verdict::Fail: return kVerifyFail;
    case Verdict::Inconclusive: return kInconclusive;
  }
  return kVerifyFail;
}

AtomRegistry load_registry(const Globals& g) {
  AtomRegistry reg = builtin_registry();
  for (const auto& f : g.atom_files)
    for (auto& d : parse_atom_decls(tools::read_text_file(f))) reg.register_atom(std::move(d));
  return reg;
}

struct ProblemArgs {
  std::string file;
  std::vector<std::string> params;

  void add(CLI::App* cmd) {
    cmd->add_option("file", file, "Problem in .cvx syntax")->required();
    cmd->add_option("--param", params, "Bind a parameter: name=value (number or [[..],..] matrix)");
  }
  Problem load() const { return parse_problem(tools::read_text_file(file)); }
};

// ---- check ----

struct CheckCmd {
  ProblemArgs problem;
  bool explain = false;

  int run(const Globals& g) const {
    const AtomRegistry reg = load_registry(g);
    const Canonicalized c = canonicalize(problem.load(), reg, tools::parse_params(problem.params));
    if (g.structured()) {
      json trees = json::array();
      for (const auto& t : c.reduced.trees) trees.push_back({{"component", t.component}, {"root", to_json(t.root)}});
      emit({{"command", "check"}, {"status", "ok"}, {"trees", trees}});
      return kOk;
    }
    std::cout << "ok\n";
    if (explain)
      for (const auto& t : c.reduced.trees) std::cout << explain_tree(t);
    return kOk;
  }
};

// ---- canon ----

struct CanonCmd {
  ProblemArgs problem;
  bool print = false;
  bool explain = false;
  std::string cbf_out;

  int run(const Globals& g) const {
    const AtomRegistry reg = load_registry(g);
    const Canonicalized c = canonicalize(problem.load(), reg, tools::parse_params(problem.params));
    const ReducedProblem& r = c.reduced;
    if (!cbf_out.empty()) tools::write_text_file(cbf_out, write_cbf(r));
    const bool show = print || cbf_out.empty();
    if (g.structured()) {
      json j{{"command", "canon"}, {"status", "ok"}};
      if (show) j["reduced"] = print_problem(r.problem);
      json interp = json::object();
      for (const auto& [name, e] : c.reduction.interp) interp[name] = print_expr(e);
      j["interp"] = interp;
      json prov = json::object();
      for (const auto& [name, from] : r.provenance) prov[name] = from;
      j["provenance"] = prov;
      json elim = json::object();
      for (const auto& [name, by] : r.eliminated) elim[name] = by;
      j["eliminated"] = elim;
      if (!cbf_out.empty()) j["cbf"] = cbf_out;
      emit(j);
      return kOk;
    }
    if (show) std::cout << print_problem(r.problem) << "\n";
    if (explain) {
      for (const auto& t : r.trees) std::cout << explain_tree(t);
      for (const auto& [name, e] : c.reduction.interp) std::cout << "interp " << name << " := " << print_expr(e) << "\n";
      for (const auto& [name, from] : r.provenance) std::cout << "provenance " << name << " <- " << from << "\n";
      for (const auto& [name, by] : r.eliminated) std::cout << "eliminated " << name << " by " << by << "\n";
    }
    return kOk;
  }
};

// ---- verify ----

struct VerifyCmd {
  std::string file;
  std::vector<std::string> params;
  std::vector<std::string> atoms;
  std::vector<std::string> user;
  std::vector<std::string> boxes;
  int samples = 1000;
  int dim = 2;
  std::int64_t max_attempts = 100000;

  SampleConfig config(const Globals& g) const {
    SampleConfig cfg;
    cfg.samples = samples;
    cfg.seed = g.seed;
    cfg.dim = dim;
    cfg.max_attempts = max_attempts;
    tools::apply_boxes(boxes, cfg.box, cfg.boxes);
    cfg.check();
    return cfg;
  }

  int run_atoms(const Globals& g) const {
    const AtomRegistry reg = load_registry(g);
    std::vector<std::shared_ptr<const AtomDecl>> selected;
    if (atoms.empty()) {
      selected = reg.atoms();
    } else {
      for (const auto& name : atoms) {
        auto d = reg.find(name);
        if (!d) throw UsageError("unknown atom '" + name + "'");
        selected.push_back(d);
      }
    }
    ObligationTolerances tol;
    tol.tol = g.tol.value_or(tol.tol);
    tol.feas_tol = g.feas_tol;
    const SampleConfig cfg = config(g);
    bool pass = true;
    json reports = json::array();
    for (const auto& d : selected) {
      const ObligationReport r = check_atom_obligations(*d, cfg, tol);
      pass = pass && r.pass();
      if (g.structured()) reports.push_back(to_json(r));
      else std::cout << format_obligation_report(r);
    }
    if (g.structured()) emit({{"command", "verify"}, {"mode", "atoms"}, {"pass", pass}, {"atoms", reports}});
    return pass ? kOk : kVerifyFail;
  }

  int run(const Globals& g, const CLI::App& cmd) const {
    const bool atoms_mode = cmd.count("--atoms") > 0;
    const bool user_mode = !user.empty();
    if (atoms_mode + user_mode + !file.empty() != 1) throw UsageError("verify takes exactly one of FILE, --atoms or --user");
    if (atoms_mode) return run_atoms(g);

    EquivOptions opt;
    opt.tol = g.tol.value_or(opt.tol);
    opt.feas_tol = g.feas_tol;
    const SampleConfig cfg = config(g);
    EquivReport r;
    if (user_mode) {
      r = check_user_reduction(tools::read_text_file(user[0]), tools::read_text_file(user[1]),
                               tools::read_text_file(user[2]), cfg, opt);
    } else {
      const AtomRegistry reg = load_registry(g);
      const Canonicalized c = canonicalize(parse_problem(tools::read_text_file(file)), reg, tools::parse_params(params));
      r = check_reduction(c, cfg, opt);
    }
    if (g.structured()) {
      json j = to_json(r);
      j["command"] = "verify";
      j["mode_of_check"] = user_mode ? "user" : "reduction";
      emit(j);
    } else {
      std::cout << format_equiv_report(r);
    }
    return verdict_exit(r.verdict());
  }
};

// ---- solve ----

struct SolveCmd {
  ProblemArgs problem;
  std::string solver;
  double timeout = 60;
  bool keep_files = false;

  int run(const Globals& g) const {
    const AtomRegistry reg = load_registry(g);
    SolverConfig cfg;
    cfg.command = solver;
    cfg.timeout_seconds = timeout;
    cfg.keep_files = keep_files;
    const SolveResult r = cvxc::solve(problem.load(), cfg, tools::parse_params(problem.params), reg);
    if (g.structured()) {
      json j{{"command", "solve"}, {"status", r.status}};
      if (r.original) {
        j["value"] = r.value;
        j["reduced_value"] = r.reduced_value;
        j["residual"] = r.original_residual;
        j["reduced_residual"] = r.reduced_residual;
        j["solution"] = to_json(*r.original);
        j["reduced_solution"] = to_json(*r.reduced);
      }
      emit(j);
      return kOk;
    }
    std::cout << "status " << r.status << "\n";
    if (r.original) {
      std::cout << "value " << format_double(r.value) << "\n";
      std::cout << "residual " << format_double(r.original_residual) << "\n";
      for (const auto& [name, v] : r.original->values()) std::cout << name << " " << format_value(v) << "\n";
    }
    return kOk;
  }
};

int exit_for_stage(const std::string& stage) {
  if (stage == "canonicalize" || stage == "write-cbf") return kModelError;
  return kSolverError;
}

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const UsageError& e) {
    std::cerr << "cvxc: " << e.what() << "\n";
    return kUsage;
  } catch (const PipelineError& e) {
    std::cerr << "cvxc: " << e.what() << "\n";
    return exit_for_stage(e.stage());
  } catch (const SolverError& e) {
    std::cerr << "cvxc: " << e.what() << "\n";
    return kSolverError;
  } catch (const SamplerExhausted& e) {
    std::cerr << "cvxc: " << e.what() << "\n";
    return kInconclusive;
  } catch (const std::exception& e) {
    // Parse, validation, DCP and condition errors.
    std::cerr << "cvxc: " << e.what() << "\n";
    return kModelError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cvxc: compile convex problems to conic form, verify the reduction, and solve"};
  app.require_subcommand(1);
  Globals g;
  double tol = 0;
  app.add_option("--seed", g.seed, "Random seed for sampling")->capture_default_str();
  auto* tol_opt = app.add_option("--tol", tol, "Value tolerance (defaults: 1e-8 reductions, 1e-7 atoms)");
  app.add_option("--feas-tol", g.feas_tol, "Constraint tolerance")->capture_default_str();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "structured"}))->capture_default_str();
  app.add_option("--atom-file", g.atom_files, "Extra atom declarations");

  CheckCmd check;
  auto* check_cmd = app.add_subcommand("check", "Parse and check DCP rules");
  check.problem.add(check_cmd);
  check_cmd->add_flag("--explain", check.explain, "Print atom trees with roles");

  CanonCmd canon;
  auto* canon_cmd = app.add_subcommand("canon", "Print the conic reduced problem");
  canon.problem.add(canon_cmd);
  canon_cmd->add_flag("--print", canon.print, "Print the reduced problem (default unless --cbf)");
  canon_cmd->add_flag("--explain", canon.explain, "Print trees, forward map, provenance and eliminated conditions");
  canon_cmd->add_option("--cbf", canon.cbf_out, "Write the CBF file here");

  VerifyCmd verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check a reduction or atom obligations numerically");
  verify_cmd->add_option("file", verify.file, "Problem whose canonicalization is checked");
  verify_cmd->add_option("--param", verify.params, "Bind a parameter: name=value");
  verify_cmd->add_option("--atoms", verify.atoms, "Check atom obligations (all atoms when no names)")->expected(0, -1);
  verify_cmd->add_option("--user", verify.user, "Check a user reduction: P.cvx Q.cvx MAPS")->expected(3);
  verify_cmd->add_option("--samples", verify.samples, "Samples per check")->capture_default_str()->check(CLI::PositiveNumber);
  verify_cmd->add_option("--box", verify.boxes, "Sampling box name=lo:hi (name * for the default)");
  verify_cmd->add_option("--dim", verify.dim, "Dimension for vector/matrix atom arguments")->capture_default_str()->check(CLI::PositiveNumber);
  verify_cmd->add_option("--max-attempts", verify.max_attempts, "Sampling attempts before giving up")->capture_default_str();

  SolveCmd solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve through an external conic solver adapter");
  solve.problem.add(solve_cmd);
  solve_cmd->add_option("--solver", solve.solver, "Adapter command with {input} and {output} (default $CVXC_SOLVER_CMD)");
  solve_cmd->add_option("--timeout", solve.timeout, "Seconds before the solver is killed")->capture_default_str();
  solve_cmd->add_flag("--keep-files", solve.keep_files, "Keep the scratch directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (tol_opt->count() > 0) g.tol = tol;

  return guarded([&] {
    if (check_cmd->parsed()) return check.run(g);
    if (canon_cmd->parsed()) return canon.run(g);
    if (verify_cmd->parsed()) return verify.run(g, *verify_cmd);
    return solve.run(g);
  });
}
