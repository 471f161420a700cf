#include "cvxc/errors.hpp"
#include "cvxc/parser.hpp"
#include "cvxc/sampling.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace cvxc;

TEST_CASE("worked example parses") {
  const Problem p = parse_problem(kSo1);
  REQUIRE(p.vars.size() == 2);
  CHECK(p.vars[0].name == "x");
  CHECK(p.vars[1].name == "y");
  CHECK(p.sense == Sense::Maximize);
  REQUIRE(p.constraints.size() == 3);
  CHECK(p.constraints[0].name == "c1");
  CHECK(p.objective == call("sqrt", {Expr::var("x") - Expr::var("y")}));
}

TEST_CASE("precedence") {
  const Problem p = parse_problem(kSo1);
  const Expr x = Expr::var("x"), y = Expr::var("y");
  CHECK(p.constraints[0].body == call("eq", {y, Expr::constant(2.0) * x - Expr::constant(3.0)}));
  CHECK(p.constraints[1].body == call("le", {call("pow", {x, Expr::constant(2.0)}), Expr::constant(2.0)}));
}

TEST_CASE("single cone constraint") {
  const Problem p = parse_problem("optimization (x : R) minimize x subject to c : posOrthCone x");
  CHECK(p.vars.size() == 1);
  REQUIRE(p.constraints.size() == 1);
  CHECK(p.constraints[0].body.is_apply("posOrthCone"));
}

TEST_CASE("parameters become Param nodes") {
  const Problem p = parse_problem(
      "parameters (a : R)\noptimization (x y : ℝ)\n  minimize x\n  subject to\n    c1 : y = a*x - 3\n");
  REQUIRE(p.params.size() == 1);
  bool found = false;
  walk(p.constraints[0].body, [&](const Expr& e, const std::string&) { found = found || e.is_param(); });
  CHECK(found);
}

TEST_CASE("ascii spellings") {
  const Problem a = parse_problem("optimization (x : real) minimize x subject to c : 1 <= x");
  const Problem b = parse_problem("optimization (x : ℝ) minimize x subject to c : 1 ≤ x");
  CHECK(a == b);
}

TEST_CASE("reduced listing re-parses") {
  const Problem q = parse_problem(read_fixture("so1_reduced.cvx"));
  CHECK(q.vars.size() == 4);
  CHECK(q.constraints.size() == 4);
  CHECK(q.constraints[2].name == "c4'");
  CHECK(print_expr(q.constraints[3].body) == "rotatedSoCone t.1 0.5 ![x]");
}

TEST_CASE("syntax errors report a position") {
  try {
    parse_problem("optimization (x : R)\n  minimize x +\n");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.span().line >= 2);
  }
  CHECK_THROWS_AS(parse_problem(""), SyntaxError);
}

TEST_CASE("unknown identifiers and arity") {
  CHECK_THROWS_AS(parse_problem("optimization (x : R) minimize z"), UnknownIdentifier);
  CHECK_THROWS_AS(parse_problem("optimization (x : R) minimize sqrt"), ArityMismatch);
}

TEST_CASE("empty constraint list prints without subject to") {
  const Problem p = parse_problem("optimization (x : R) minimize exp x");
  const std::string s = print_problem(p);
  CHECK(s.find("subject to") == std::string::npos);
  CHECK(parse_problem(s) == p);
}

namespace {

// Random expression over x, y built from surface syntax pieces.
std::string random_expr(Rng& rng, int depth) {
  const int pick = depth <= 0 ? static_cast<int>(uniform(rng, 0, 3)) : static_cast<int>(uniform(rng, 0, 11));
  auto sub = [&] { return random_expr(rng, depth - 1); };
  switch (pick) {
    case 0: return "x";
    case 1: return "y";
    case 2: return format_double(std::round(uniform(rng, -20, 20)) / 4);
    case 3: return "(" + sub() + " + " + sub() + ")";
    case 4: return "(" + sub() + " - " + sub() + ")";
    case 5: return "(" + sub() + " * " + sub() + ")";
    case 6: return "(" + sub() + " / " + sub() + ")";
    case 7: return "(" + sub() + ")^2";
    case 8: return "exp (" + sub() + ")";
    case 9: return "-(" + sub() + ")";
    default: return "abs (" + sub() + ")";
  }
}

}  // namespace

TEST_CASE("print/parse round-trip on generated problems") {
  for (std::uint64_t k = 0; k < 300; ++k) {
    Rng rng = stream_rng(11, k);
    std::string text = "optimization (x y : R)\n  ";
    text += uniform(rng, 0, 1) < 0.5 ? "minimize " : "maximize ";
    text += random_expr(rng, 3) + "\n";
    const int m = static_cast<int>(uniform(rng, 0, 3));
    if (m > 0) text += "  subject to\n";
    for (int i = 0; i < m; ++i) {
      const char* rel = uniform(rng, 0, 1) < 0.5 ? " ≤ " : " = ";
      text += "    c" + std::to_string(i + 1) + " : " + random_expr(rng, 2) + rel + random_expr(rng, 2) + "\n";
    }
    const Problem p = parse_problem(text);
    INFO(text);
    const std::string printed = print_problem(p);
    INFO(printed);
    CHECK(parse_problem(printed) == p);
    CHECK(print_problem(parse_problem(printed)) == printed);
  }
}
