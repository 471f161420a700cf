// Test adapter: answers a CBF file by grid search on the problem it came
// from. The CBF is regenerated from --problem and must match the input
// byte for byte, so the stub only ever answers the question it was asked.

#include "cvxc/cbf.hpp"
#include "cvxc/canon.hpp"
#include "cvxc/errors.hpp"
#include "cvxc/parser.hpp"
#include "cvxc/verify.hpp"

#include "options.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Grid-search solver adapter for tests"};
  std::string problem_path, input, output;
  std::vector<std::string> params, boxes;
  int grid = 201;
  double feas_tol = 1e-6;
  app.add_option("--problem", problem_path, "Source .cvx problem of the CBF file")->required();
  app.add_option("--param", params, "Parameter binding name=value");
  app.add_option("--grid", grid, "Grid points per free coordinate")->check(CLI::PositiveNumber);
  app.add_option("--box", boxes, "Search box name=lo:hi (name * for the default)");
  app.add_option("--feas-tol", feas_tol, "Constraint tolerance on grid points");
  app.add_option("input", input, "CBF file")->required();
  app.add_option("output", output, "Solution file")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    using namespace cvxc;
    const Problem p = parse_problem(tools::read_text_file(problem_path));
    const Canonicalized c = canonicalize(p, default_registry(), tools::parse_params(params));
    const CbfDocument doc = build_cbf(c.reduced.problem);
    if (write_cbf(doc) != tools::read_text_file(input)) {
      std::cerr << "cvxc-stub-solver: " << input << " is not the CBF of " << problem_path << "\n";
      return 2;
    }
    Box fallback;
    std::map<std::string, Box, std::less<>> box_map;
    tools::apply_boxes(boxes, fallback, box_map);
    std::string text;
    try {
      const BruteForceResult r = brute_force_optimum(c.source, grid, fallback, box_map, feas_tol);
      text = write_solution("PRIMAL_AND_DUAL_FEASIBLE", forward_apply(c.reduction, r.argmin), doc);
    } catch (const Infeasible&) {
      text = "STATUS INFEASIBLE\n";
    }
    tools::write_text_file(output, text);
  } catch (const std::exception& e) {
    std::cerr << "cvxc-stub-solver: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
