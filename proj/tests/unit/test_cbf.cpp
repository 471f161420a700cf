#include "cvxc/canon.hpp"
#include "cvxc/cbf.hpp"
#include "cvxc/errors.hpp"
#include "cvxc/parser.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <filesystem>

using namespace cvxc;

namespace {

CbfDocument so1_doc() { return build_cbf(canonicalize(parse_problem(kSo1)).reduced.problem); }

}  // namespace

TEST_CASE("hand-encoded golden file") {
  const Canonicalized c = canonicalize(parse_problem(read_fixture("posorth.cvx")));
  CHECK(write_cbf(c.reduced) == read_fixture("posorth.cbf"));
}

TEST_CASE("worked example golden file") {
  CHECK(write_cbf(canonicalize(parse_problem(kSo1)).reduced) == read_fixture("so1.cbf"));
}

TEST_CASE("worked example layout") {
  const CbfDocument d = so1_doc();
  REQUIRE(d.variables.size() == 4);
  CHECK(d.variables[2].var == "t.0");
  REQUIRE(d.cones.size() == 4);
  CHECK(d.cones[0].kind == "L=");
  CHECK(d.cones[1].kind == "L+");
  CHECK(d.cones[2].kind == "QR");
  CHECK(d.cones[2].rows == 3);
  CHECK(d.cones[2].constraint == "c4'");
  CHECK(d.cones[3].kind == "QR");
  CHECK(d.objective_sign == -1);
  REQUIRE(d.obj_a.size() == 1);
  CHECK(d.obj_a[0] == std::pair<int, double>{2, -1.0});
  // c5' rows are (t.1, 0.5, x).
  CHECK(std::find(d.a.begin(), d.a.end(), std::tuple<int, int, double>{5, 3, 1.0}) != d.a.end());
  CHECK(std::find(d.b.begin(), d.b.end(), std::pair<int, double>{6, 0.5}) != d.b.end());
  CHECK(std::find(d.a.begin(), d.a.end(), std::tuple<int, int, double>{7, 0, 1.0}) != d.a.end());
}

TEST_CASE("coordinates are sorted") {
  const CbfDocument d = so1_doc();
  CHECK(std::is_sorted(d.a.begin(), d.a.end()));
  CHECK(std::is_sorted(d.b.begin(), d.b.end()));
  CHECK(std::is_sorted(d.obj_a.begin(), d.obj_a.end()));
}

TEST_CASE("no constraints means no CON block") {
  const Problem p = parse_problem("optimization (x : R) minimize x");
  const std::string text = write_cbf(build_cbf(p));
  CHECK(text.find("CON") == std::string::npos);
  CHECK(text.find("VAR\n1 1\nF 1\n") != std::string::npos);
}

TEST_CASE("exponential cone rows are (c, b, a)") {
  const Problem p = parse_problem("optimization (x t : R) minimize t subject to c : expCone x 1 t");
  const CbfDocument d = build_cbf(p);
  REQUIRE(d.cones.size() == 1);
  CHECK(d.cones[0].kind == "EXP");
  CHECK(d.a == std::vector<std::tuple<int, int, double>>{{0, 1, 1.0}, {2, 0, 1.0}});
  CHECK(d.b == std::vector<std::pair<int, double>>{{1, 1.0}});
}

TEST_CASE("PSD blocks use the lower triangle") {
  const Problem p = parse_problem("optimization (S : matrix 2) minimize trace S subject to c : psdCone (S - !![1, 0; 0, 1])");
  const CbfDocument d = build_cbf(p);
  REQUIRE(d.psd_dims == std::vector<int>{2});
  CHECK(d.variables.size() == 3);
  CHECK(d.h == std::vector<std::tuple<int, int, int, int, double>>{{0, 0, 0, 0, 1.0}, {0, 1, 1, 0, 1.0}, {0, 2, 1, 1, 1.0}});
  CHECK(d.d == std::vector<std::tuple<int, int, int, double>>{{0, 0, 0, -1.0}, {0, 1, 1, -1.0}});
  const std::string text = write_cbf(d);
  CHECK(text.find("PSDCON\n1\n2\n") != std::string::npos);
  CHECK(text.find("HCOORD\n3\n") != std::string::npos);
}

TEST_CASE("non-conic problems are rejected") {
  CHECK_THROWS_AS(build_cbf(parse_problem(kSo1)), NonConicProblem);
  CHECK_THROWS_AS(build_cbf(parse_problem("optimization (x : R) minimize exp x")), NonConicProblem);
}

TEST_CASE("solution files") {
  const CbfDocument d = so1_doc();
  const SolutionFile s = parse_solution(
      "STATUS PRIMAL_AND_DUAL_FEASIBLE\nVAR 0 -1.414214\nVAR 1 -5.828427\nVAR 2 2.101003\nVAR 3 2\n", d);
  CHECK(s.status == "PRIMAL_AND_DUAL_FEASIBLE");
  CHECK(s.values.size() == 4);
  CHECK(s.values.at("y").as_scalar() == -5.828427);

  const SolutionFile inf = parse_solution("STATUS INFEASIBLE\n", d);
  CHECK(inf.status == "INFEASIBLE");
  CHECK(inf.values.empty());

  CHECK_THROWS_AS(parse_solution("STATUS OK\nVAR 0 1\nVAR 0 2\nVAR 1 0\nVAR 2 0\nVAR 3 0\n", d), MalformedSolution);
  CHECK_THROWS_AS(parse_solution("STATUS OK\nVAR 0 1\nVAR 1 2\n", d), MissingVariable);
  CHECK_THROWS_AS(parse_solution("VAR 0 1\n", d), MalformedSolution);
  CHECK_THROWS_AS(parse_solution("STATUS OK\nVAR 9 1\n", d), MalformedSolution);
  CHECK_THROWS_AS(parse_solution("STATUS OK\nVAR 0 abc\n", d), MalformedSolution);
  CHECK_THROWS_AS(parse_solution("STATUS OK\nVAR 0 nan\n", d), MalformedSolution);
  CHECK_THROWS_AS(parse_solution("STATUS OK\nPSDVAR 0 0 0 1\n", d), MalformedSolution);
  CHECK_THROWS_AS(parse_solution("STATUS OK\nBOGUS\n", d), MalformedSolution);
  CHECK_THROWS_AS(parse_solution("", d), MalformedSolution);
  try {
    parse_solution("STATUS OK\nVAR 0 1\nVAR 0 1\n", d);
  } catch (const MalformedSolution& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("solution ordering law") {
  const Canonicalized c = canonicalize(parse_problem(read_fixture("covariance.cvx")), default_registry(),
                                       {{"Y", Value::matrix((Eigen::MatrixXd(2, 2) << 0.596, 0.04, 0.04, 0.63).finished())}});
  const CbfDocument d = build_cbf(c.reduced.problem);
  Eigen::MatrixXd s(2, 2);
  s << 2, 0.25, 0.25, 1.5;
  Assignment p;
  p.set("S", Value::matrix(s));
  const Assignment q = forward_apply(c.reduction, p);
  const SolutionFile back = parse_solution(write_solution("PRIMAL_AND_DUAL_FEASIBLE", q, d), d);
  CHECK(back.values == q);
}

TEST_CASE("corpus CBF output is byte-stable") {
  for (const auto& entry : std::filesystem::directory_iterator(fixture_path("corpus"))) {
    const std::string name = entry.path().filename().string();
    std::map<std::string, Value, std::less<>> params;
    if (name == "scaled_exp.cvx") params.emplace("a", Value(2.0));
    const std::string text = read_fixture("corpus/" + name);
    const std::string first = write_cbf(canonicalize(parse_problem(text), default_registry(), params).reduced);
    const std::string second = write_cbf(canonicalize(parse_problem(text), default_registry(), params).reduced);
    CHECK(first == second);
  }
}
