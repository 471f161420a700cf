#include "cvxc/canon.hpp"
#include "cvxc/cbf.hpp"
#include "cvxc/errors.hpp"
#include "cvxc/eval.hpp"
#include "cvxc/parser.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace cvxc;

namespace {

Canonicalized canon(const std::string& text, const std::map<std::string, Value, std::less<>>& params = {}) {
  return canonicalize(parse_problem(text), default_registry(), params);
}

std::string not_dcp_reason(const std::string& text) {
  try {
    canon(text);
  } catch (const NotDcp& e) {
    return e.reason();
  }
  return "";
}

}  // namespace

TEST_CASE("worked example reduces to the reference listing") {
  const Canonicalized c = canon(kSo1);
  const Problem expected = parse_problem(read_fixture("so1_reduced.cvx"));
  CHECK(c.reduced.problem == expected);
  CHECK(print_problem(c.reduced.problem) == print_problem(expected));
  REQUIRE(c.reduced.eliminated.size() == 1);
  CHECK(c.reduced.eliminated[0].first == "c3");
  REQUIRE(c.reduction.interp.size() == 2);
  CHECK(print_expr(c.reduction.interp[0].second) == "sqrt (x - y)");
  CHECK(print_expr(c.reduction.interp[1].second) == "x^2");
  CHECK(c.reduced.fresh_vars.size() == 2);
}

TEST_CASE("tree roles of the worked example") {
  const Canonicalized c = canon(kSo1);
  const AtomTree& obj = c.reduced.trees.front();
  CHECK(obj.component == "obj");
  const TreeNode& sqrt = obj.root.children.at(0);
  CHECK(sqrt.id == "obj.1");
  CHECK(sqrt.atom->name == "sqrt");
  CHECK(sqrt.role == Role::Concave);
  REQUIRE(sqrt.discharges.size() == 1);
  CHECK(sqrt.discharges[0].by == "c3");
  CHECK(sqrt.children.at(0).is_leaf());
  CHECK(explain_tree(obj).find("obj.1  sqrt (concave)  role concave") != std::string::npos);
}

TEST_CASE("forward and backward maps") {
  const Canonicalized c = canon(kSo1);
  Assignment p;
  p.set("x", -1.0);
  p.set("y", -5.0);
  const Assignment q = forward_apply(c.reduction, p);
  CHECK(q.at("t.0").as_scalar() == std::sqrt(4.0));
  CHECK(q.at("t.1").as_scalar() == 1.0);
  CHECK(backward_apply(c.reduction, q) == p);
  CHECK(objective_value(c.reduced.problem, q) == objective_value(c.source, p));
}

TEST_CASE("canonicalization is deterministic") {
  for (int k = 0; k < 3; ++k)
    CHECK(print_problem(canon(kSo1).reduced.problem) == print_problem(canon(kSo1).reduced.problem));
}

TEST_CASE("DCP violations") {
  CHECK(not_dcp_reason("optimization (x : R) maximize x^2") == "curvature-mismatch");
  CHECK(not_dcp_reason("optimization (x : R) minimize sqrt x subject to c : 0 ≤ x") == "curvature-mismatch");
  CHECK(not_dcp_reason("optimization (x : R) minimize x subject to c : exp x = 1") == "non-affine-leaf");
  CHECK_FALSE(not_dcp_reason("optimization (x y : R) minimize x * y").empty());
}

TEST_CASE("undischarged condition names the node") {
  try {
    canon(read_fixture("log_unguarded.cvx"));
    FAIL("expected UndischargedCondition");
  } catch (const UndischargedCondition& e) {
    CHECK(e.path() == "obj.1");
    CHECK(e.condition() == "0 < x");
  }
}

TEST_CASE("strict inequalities must be consumed") {
  CHECK_THROWS_AS(canon("optimization (x : R) minimize x subject to c : 0 < x"), StrictConstraintSurvives);
  CHECK_NOTHROW(canon(read_fixture("corpus/log_sum.cvx")));
}

TEST_CASE("already-conic constraints pass through") {
  const Canonicalized c = canon(read_fixture("corpus/conic_already.cvx"));
  const Problem& q = c.reduced.problem;
  REQUIRE(q.constraints.size() == 2);
  CHECK(q.constraints[0].name == "c1'");
  CHECK(q.constraints[0].body == c.source.constraints[0].body);
  CHECK(q.constraints[1].body == c.source.constraints[1].body);
  CHECK(c.reduced.fresh_vars.empty());
}

TEST_CASE("parameters must be bound") {
  const std::string text = read_fixture("corpus/scaled_exp.cvx");
  CHECK_THROWS_AS(canon(text), UnboundParameter);
  CHECK_NOTHROW(canon(text, {{"a", Value(2.0)}}));
  // The scaling atom needs 0 <= a, which the assumption 0 < a guarantees.
  CHECK_THROWS_AS(canon(text, {{"a", Value(-2.0)}}), ValidationError);
}

TEST_CASE("fresh names avoid declared ones") {
  const Canonicalized c = canon("optimization (t.0 x : R) maximize sqrt x + t.0 subject to c : 0 ≤ x\n  d : t.0 ≤ 1");
  REQUIRE(c.reduced.fresh_vars.size() == 1);
  CHECK(c.reduced.fresh_vars[0].name == "t.1");
}

TEST_CASE("every corpus problem reduces to conic form") {
  for (const auto& entry : std::filesystem::directory_iterator(fixture_path("corpus"))) {
    const std::string name = entry.path().filename().string();
    INFO(name);
    std::map<std::string, Value, std::less<>> params;
    if (name == "scaled_exp.cvx") params.emplace("a", Value(2.0));
    const Canonicalized c = canon(read_fixture("corpus/" + name), params);
    CHECK_NOTHROW(build_cbf(c.reduced.problem));
    for (const auto& k : c.reduced.problem.constraints) CHECK(cone_kind(k.body.name()).has_value());
  }
}
