#include "cvxc/affine.hpp"
#include "cvxc/errors.hpp"
#include "cvxc/eval.hpp"
#include "cvxc/parser.hpp"
#include "cvxc/problem.hpp"
#include "cvxc/sampling.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace cvxc;
using namespace cvxc::lit;

namespace {

Assignment at(std::initializer_list<std::pair<const char*, double>> kv) {
  Assignment a;
  for (const auto& [k, v] : kv) a.set(k, v);
  return a;
}

const std::vector<VarDecl> kXY = {{"x", VarShape::scalar()}, {"y", VarShape::scalar()}};

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double d : {0.1, 1.0 / 3.0, 1e300, -2.5e-310, 2.0, -3.0, 123456789.125}) {
    const std::string s = format_double(d);
    CHECK(std::strtod(s.c_str(), nullptr) == d);
  }
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("expression equality is structural") {
  const Expr x = Expr::var("x"), y = Expr::var("y");
  CHECK(x - y == Expr::var("x") - Expr::var("y"));
  CHECK_FALSE(x - y == y - x);
  CHECK(call("sqrt", {x}).is_apply("sqrt"));
  CHECK(free_vars(call("sqrt", {x - y * 2_c})).size() == 2);
}

TEST_CASE("substitute replaces variables") {
  const Expr e = parse_expr("sqrt (x - y)", kXY);
  const Expr s = substitute(e, {{"y", Expr::constant(1.0)}});
  CHECK(print_expr(s) == "sqrt (x - 1)");
}

TEST_CASE("eval of the worked objective") {
  const Expr e = parse_expr("sqrt (x - y)", kXY);
  CHECK(eval_scalar(e, at({{"x", 3}, {"y", -1}})) == doctest::Approx(2.0));
}

TEST_CASE("domain errors carry the node path") {
  const Expr e = parse_expr("x + log y", kXY);
  try {
    eval(e, at({{"x", 1}, {"y", -1}}));
    FAIL("expected DomainError");
  } catch (const DomainError& err) {
    CHECK(err.path() == "root.2");
    CHECK(err.subexpression() == "log y");
  }
}

TEST_CASE("unknown leaf") { CHECK_THROWS_AS(eval(Expr::var("z"), at({{"x", 1}})), UnknownName); }

TEST_CASE("predicates use the feasibility tolerance") {
  const Expr c = parse_expr("x ≤ 2", kXY);
  CHECK(holds(c, at({{"x", 2 + 1e-9}})));
  CHECK_FALSE(holds(c, at({{"x", 2 + 1e-3}})));
  CHECK_FALSE(holds(c, at({{"x", 2 + 1e-9}}), EvalOptions{0}));
}

TEST_CASE("cone membership") {
  const double one[] = {1.0};
  CHECK(in_rotated_cone(0.5, 1.0, one, 0));
  CHECK_FALSE(in_rotated_cone(0.5, 0.9, one, 0));
  CHECK_FALSE(in_rotated_cone(-0.5, -1.0, one, 0));
  const double three_four[] = {3.0, 4.0};
  CHECK(in_second_order_cone(5, three_four, 0));
  CHECK_FALSE(in_second_order_cone(4.9, three_four, 0));
  CHECK(in_exp_cone(0, 1, 1, 0));
  CHECK_FALSE(in_exp_cone(1, 1, 1, 0));
  CHECK(in_exp_cone(-1, 0, 0, 0));  // b = 0 closure: a <= 0, c >= 0
  Eigen::MatrixXd m(2, 2);
  m << 2, 1, 1, 2;
  CHECK(is_psd(m, 0));
  m(0, 1) = m(1, 0) = 3;
  CHECK_FALSE(is_psd(m, 0));
}

TEST_CASE("affine form of a linear expression") {
  const auto ctx = AffineContext::of(kXY);
  const auto f = affine_form(parse_expr("2*x - 3 - y", kXY), ctx);
  REQUIRE(f);
  REQUIRE(f->entries.size() == 1);
  const auto& lin = f->entries[0];
  CHECK(*numeric(lin.terms.at(Coord{"x"})) == 2);
  CHECK(*numeric(lin.terms.at(Coord{"y"})) == -1);
  CHECK(*numeric(lin.constant) == -3);
  CHECK_FALSE(affine_form(parse_expr("sqrt x", kXY), ctx));
  CHECK_FALSE(affine_form(parse_expr("x * y", kXY), ctx));
}

TEST_CASE("affine form agrees with evaluation") {
  const char* exprs[] = {"2*x - 3 - y", "(x + y) / 4 - 7*(y - x)", "-(x - 2*y) + 0.5", "3 * (2 * (x - 1))"};
  const auto ctx = AffineContext::of(kXY);
  Rng rng = stream_rng(7, 0);
  for (const char* text : exprs) {
    const Expr e = parse_expr(text, kXY);
    const auto f = affine_form(e, ctx);
    REQUIRE(f);
    for (int k = 0; k < 50; ++k) {
      const Assignment a = at({{"x", uniform(rng, -10, 10)}, {"y", uniform(rng, -10, 10)}});
      CHECK(eval_affine(*f, a).as_scalar() == doctest::Approx(eval_scalar(e, a)).epsilon(1e-12));
    }
  }
}

TEST_CASE("matrix coordinates round-trip") {
  const std::vector<VarDecl> vars = {{"a", VarShape::scalar()}, {"S", VarShape::sym_matrix(3)}};
  const auto coords = coordinates(vars);
  CHECK(coords.size() == 7);
  CHECK(coords[1] == Coord{"S", 0, 0});
  CHECK(coords[2] == Coord{"S", 0, 1});
  Eigen::VectorXd x(7);
  x << 1, 2, 3, 4, 5, 6, 7;
  const Assignment a = from_coordinates(vars, x);
  CHECK(a.at("S").as_matrix()(2, 0) == 4);
  CHECK(a.at("S").as_matrix()(0, 2) == 4);
  CHECK(to_coordinates(coords, a) == x);
}

TEST_CASE("trace of a constant times a symmetric matrix") {
  const std::vector<VarDecl> vars = {{"S", VarShape::sym_matrix(2)}};
  const Problem p = parse_problem(
      "optimization (S : matrix 2)\n  minimize trace (!![1, 2; 2, 3] * S)\n  subject to\n    c : psdCone S\n");
  const auto f = affine_form(p.objective, AffineContext::of(p));
  REQUIRE(f);
  // Off-diagonal coordinate appears twice in the trace.
  CHECK(*numeric(f->entries[0].terms.at(Coord{"S", 0, 1})) == 4);
  CHECK(*numeric(f->entries[0].terms.at(Coord{"S", 1, 1})) == 3);
}

TEST_CASE("assignments") {
  Assignment a = at({{"x", 1}, {"y", 2}, {"t.0", 3}});
  CHECK(a.restrict_to(kXY) == at({{"x", 1}, {"y", 2}}));
  CHECK_NOTHROW(check_covers(a, kXY));
  a.set("x", std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(check_covers(a, kXY), ValidationError);
  CHECK_THROWS_AS(check_covers(at({{"x", 1}}), kXY), ValidationError);
}

TEST_CASE("validation") {
  Problem p;
  p.vars = {{"x", VarShape::scalar()}, {"x", VarShape::scalar()}};
  p.objective = Expr::var("x");
  CHECK_THROWS_AS(validate(p), ValidationError);

  Problem q;
  q.vars = {{"x", VarShape::scalar()}};
  q.params = {{"a", VarShape::scalar()}};
  q.objective = Expr::var("x");
  q.assumptions = {{"h", call("le", {Expr::var("x"), Expr::param("a")})}};
  CHECK_THROWS_AS(validate(q), ValidationError);
}

TEST_CASE("sense normalization negates the objective") {
  const Problem p = parse_problem("optimization (x : R)\n  maximize x\n  subject to\n    c : x ≤ 1\n");
  const Problem n = normalize_sense(p);
  CHECK(n.sense == Sense::Minimize);
  CHECK(n.objective == call("neg", {Expr::var("x")}));
  CHECK(normalize_sense(n) == n);
}

TEST_CASE("parameter binding checks assumptions") {
  const Problem p = parse_problem(
      "parameters (a : R)\nassuming\n  h : 0 < a\noptimization (x y : R)\n  minimize x\n  subject to\n"
      "    c1 : y = a*x - 3\n");
  const Problem b = bind_parameters(p, {{"a", Value(2.0)}});
  CHECK(b.params.empty());
  CHECK(b.assumptions.empty());
  CHECK(print_expr(b.constraints[0].body) == "y = 2*x - 3");
  CHECK_THROWS_AS(bind_parameters(p, {}), UnboundParameter);
  CHECK_THROWS_AS(bind_parameters(p, {{"a", Value(-1.0)}}), ValidationError);
}

TEST_CASE("objective and violation") {
  const Problem p = parse_problem(kSo1);
  const double x = -std::sqrt(2.0);
  const Assignment a = at({{"x", x}, {"y", 2 * x - 3}});
  CHECK(objective_value(p, a) == doctest::Approx(2.101003).epsilon(1e-6));
  CHECK(is_feasible(p, a));
  const Assignment bad = at({{"x", 2}, {"y", 1}});
  CHECK_FALSE(is_feasible(p, bad));
  CHECK(max_violation(p, bad) == doctest::Approx(2.0));  // x^2 - 2
}
