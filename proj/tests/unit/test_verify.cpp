#include "cvxc/canon.hpp"
#include "cvxc/errors.hpp"
#include "cvxc/eval.hpp"
#include "cvxc/parser.hpp"
#include "cvxc/verify.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace cvxc;

namespace {

Canonicalized so1() { return canonicalize(parse_problem(kSo1)); }

Canonicalized without(const Canonicalized& c, const std::string& name) {
  Canonicalized m = c;
  auto& cs = m.reduced.problem.constraints;
  std::erase_if(cs, [&](const Constraint& k) { return k.name == name; });
  return m;
}

SampleConfig small(int n = 300) {
  SampleConfig cfg;
  cfg.samples = n;
  return cfg;
}

}  // namespace

TEST_CASE("feasible sampling") {
  const Problem p = so1().source;
  const SampleSet s = sample_feasible(p, small(200));
  REQUIRE(s.points.size() == 200);
  for (const auto& a : s.points) CHECK(max_violation(p, a) <= 1e-9);
  CHECK(sample_feasible(p, small(200)).points == s.points);
}

TEST_CASE("worked example reduction passes every clause") {
  const EquivReport r = check_reduction(so1(), small());
  INFO(format_equiv_report(r));
  CHECK(r.verdict() == Verdict::Pass);
  for (const char* name : {"forward-feasibility", "forward-objective", "backward-feasibility", "backward-objective",
                           "objective-equality", "roundtrip-identity", "node-relation"}) {
    const ClauseResult* c = r.clause(name);
    REQUIRE(c);
    CHECK(c->verdict == Verdict::Pass);
    CHECK(c->checked > 0);
  }
}

TEST_CASE("deleting a graph constraint is caught") {
  const Canonicalized c = so1();
  for (const char* name : {"c4'", "c5'"}) {
    const EquivReport r = check_reduction(without(c, name), small());
    INFO(name);
    CHECK(r.verdict() == Verdict::Fail);
    const bool backward = r.clause("backward-feasibility")->verdict == Verdict::Fail ||
                          r.clause("backward-objective")->verdict == Verdict::Fail;
    CHECK(backward);
  }
}

TEST_CASE("exhausted sampling is inconclusive") {
  const Problem p = parse_problem(read_fixture("infeasible.cvx"));
  const Canonicalized c = canonicalize(p);
  SampleConfig cfg = small(10);
  cfg.max_attempts = 500;
  const EquivReport r = check_reduction(c, cfg);
  CHECK(r.verdict() == Verdict::Inconclusive);
  CHECK_THROWS_AS(sample_feasible(p, cfg).require(), SamplerExhausted);
}

TEST_CASE("user maps are validated") {
  const Problem p = parse_problem(read_fixture("user/exp_product.cvx"));
  const Problem q = parse_problem(read_fixture("user/exp_sum.cvx"));
  CHECK_NOTHROW(parse_user_maps(read_fixture("user/identity.maps"), p, q));
  CHECK_THROWS_AS(parse_user_maps("phi x := x\nphi y := y\npsi x := x\n", p, q), MapMismatch);
  CHECK_THROWS_AS(parse_user_maps("phi x := x\nphi y := y\nphi y := x\npsi x := x\npsi y := y\n", p, q),
                  MapMismatch);
  CHECK_THROWS_AS(parse_user_maps("phi z := x\nphi y := y\npsi x := x\npsi y := y\n", p, q), MapMismatch);
  CHECK(parse_user_maps("mode monotone\nphi x := x\nphi y := y\npsi x := x\npsi y := y\n", p, q).monotone);
}

TEST_CASE("user reduction with identity maps") {
  const EquivReport r = check_user_reduction(read_fixture("user/exp_product.cvx"), read_fixture("user/exp_sum.cvx"),
                                             read_fixture("user/identity.maps"), small());
  CHECK(r.verdict() == Verdict::Pass);
}

TEST_CASE("corrupted user map fails with a witness") {
  const EquivReport r = check_user_reduction(read_fixture("user/weighted_p.cvx"), read_fixture("user/weighted_q.cvx"),
                                             read_fixture("user/swapped.maps"), small());
  CHECK(r.verdict() == Verdict::Fail);
  const ClauseResult* c = r.clause("forward-objective");
  REQUIRE(c);
  REQUIRE(c->witness);
  CHECK(c->witness->violation > 0);
}

TEST_CASE("monotone mode accepts an increasing objective transform") {
  const std::string p = "optimization (x : R) minimize x subject to a : -1 ≤ x\n  b : x ≤ 1";
  const std::string q = "optimization (x : R) minimize exp x subject to a : -1 ≤ x\n  b : x ≤ 1";
  const std::string maps = "phi x := x\npsi x := x\n";
  CHECK(check_user_reduction(p, q, maps, small()).verdict() == Verdict::Fail);
  CHECK(check_user_reduction(p, q, "mode monotone\n" + maps, small()).verdict() == Verdict::Pass);
}

TEST_CASE("brute force on the worked example") {
  const BruteForceResult r = brute_force_optimum(so1().source, 2001, {}, {{"x", {-2, 2}}, {"y", {-6, 0}}});
  CHECK(std::abs(r.value - 2.101003) <= 2e-3);
  CHECK(std::abs(r.argmin.at("x").as_scalar() + 1.414214) <= 3e-3);
  CHECK(std::abs(r.argmin.at("y").as_scalar() + 5.828427) <= 3e-3);
  CHECK(r.feasible > 0);
}

TEST_CASE("brute force errors") {
  CHECK_THROWS_AS(brute_force_optimum(parse_problem(read_fixture("infeasible.cvx")), 101), Infeasible);
  CHECK_THROWS_AS(brute_force_optimum(parse_problem("optimization (a b c d e : R) minimize a"), 1001), Error);
}

TEST_CASE("report text ends with the verdict line") {
  const std::string text = format_equiv_report(check_reduction(so1(), small(50)));
  CHECK(text.find("verdict pass mode=strong p_samples=50 q_samples=50 wanted=50") != std::string::npos);
}
